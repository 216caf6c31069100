#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <unordered_map>

#include "udfsw/field.hpp"
#include "udfsw/fixtures.hpp"
#include "udfsw/isoextract.hpp"
#include "udfsw/mesh.hpp"
#include "udfsw/metrics.hpp"
#include "udfsw/optimizer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace udfsw;

namespace {

constexpr const char* kVersion = "udfsw 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitEmptyLevelSet = 3;
constexpr int kExitNumerical = 4;

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

// key=value[,key=value...] shape parameter list.
std::vector<std::pair<std::string, double>> parse_params(const std::string& text) {
  std::vector<std::pair<std::string, double>> out;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("bad parameter: " + item);
    out.emplace_back(item.substr(0, eq), std::stod(item.substr(eq + 1)));
  }
  return out;
}

void save_mesh_by_extension(const TriMesh& mesh, const std::string& path) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".ply") {
    save_ply(mesh, path);
  } else {
    save_obj(mesh, path);
  }
}

json config_to_json(const ExtractionConfig& c) {
  return json{{"r", c.r},
              {"mc_resolution", c.mc_resolution},
              {"lambda1", c.lambda1},
              {"learning_rate", c.learning_rate},
              {"max_iterations", c.max_iterations},
              {"reset_period", c.reset_period},
              {"w_s", c.w_s},
              {"w_t", c.w_t},
              {"s1", c.s1},
              {"s2", c.s2},
              {"beta_m", c.beta_m},
              {"direction_correction", c.direction_correction_enabled},
              {"topology_correction", c.topology_correction_enabled},
              {"subdivision", c.subdivision_enabled},
              {"mask", c.mask_enabled},
              {"min_cluster_faces", c.min_cluster_faces}};
}

struct FieldSource {
  std::unique_ptr<ScalarField> analytic;  // may own a primitive or mesh field
  std::optional<GridField> grid;
};

// Loads ground truth from a mesh file or point cloud (.xyz: one point per line).
SampleCloud load_ground_truth(const std::string& path, int samples, std::uint64_t seed) {
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".xyz") {
    SampleCloud cloud;
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    double x, y, z;
    while (in >> x >> y >> z) cloud.points.emplace_back(x, y, z);
    if (cloud.points.empty()) throw std::runtime_error(path + ": no points");
    return cloud;
  }
  return sample_mesh_surface(load_obj(path), samples, seed);
}

// key=value config file, one entry per line; '#' starts a comment. Applied
// only where the command line did not already set the option, so precedence
// is CLI > file > built-in defaults.
void apply_config_file(const std::string& path, const CLI::App& cmd,
                       ExtractionConfig& config) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  const std::unordered_map<std::string, std::function<void(double)>> setters = {
      {"r", [&](double v) { if (!cmd.count("--r")) config.r = v; }},
      {"lambda1", [&](double v) { if (!cmd.count("--lambda1")) config.lambda1 = v; }},
      {"iters", [&](double v) { if (!cmd.count("--iters")) config.max_iterations = static_cast<int>(v); }},
      {"lr", [&](double v) { if (!cmd.count("--lr")) config.learning_rate = v; }},
      {"ws", [&](double v) { if (!cmd.count("--ws")) config.w_s = v; }},
      {"wt", [&](double v) { if (!cmd.count("--wt")) config.w_t = v; }},
      {"s1", [&](double v) { if (!cmd.count("--s1")) config.s1 = static_cast<int>(v); }},
      {"s2", [&](double v) { if (!cmd.count("--s2")) config.s2 = static_cast<int>(v); }},
      {"reset_n", [&](double v) { if (!cmd.count("--reset-n")) config.reset_period = static_cast<int>(v); }},
      {"beta_m", [&](double v) { if (!cmd.count("--beta-m")) config.beta_m = static_cast<int>(v); }},
  };
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": unknown key " + key);
    }
    it->second(std::stod(trim(line.substr(eq + 1))));
  }
}

struct ExtractArgs {
  std::string input;
  std::string out = "mesh.obj";
  std::string gt;
  ExtractionConfig config;
  std::uint64_t seed = 0;
  double d_max = 0.0;
  double eta_min = 0.0;
};

int run_extract_cmd(const ExtractArgs& args) {
  const auto t_start = std::chrono::steady_clock::now();
  GridField grid = load_udfgrid(args.input);

  if (args.eta_min > 0.0) {
    const auto check = validate_iso_value(args.config.r, grid.dims().x, args.d_max, args.eta_min);
    if (!check.ok) std::cerr << "warning: " << check.message << "\n";
  }

  double mc_ms = 0.0, opt_ms = 0.0;
  ExtractionResult result;
  const fs::path out_path(args.out);
  const fs::path dir = out_path.parent_path().empty() ? "." : out_path.parent_path();
  const fs::path log_path = dir / (out_path.stem().string() + "_log.csv");
  const fs::path manifest_path = dir / (out_path.stem().string() + "_manifest.json");

  std::ofstream log(log_path);
  log << iteration_csv_header() << "\n";
  try {
    const auto t_mc = std::chrono::steady_clock::now();
    result = run_extraction(grid, args.config, nullptr, [&](const IterationRecord& rec) {
      log << iteration_csv_row(rec) << "\n";
      if (rec.iteration % 25 == 0) {
        std::cerr << "iter " << rec.iteration << " distance=" << rec.distance_term
                  << " active=" << rec.active_vertices << "\n";
      }
    });
    opt_ms = elapsed_ms(t_mc);
    (void)mc_ms;
  } catch (const EmptyLevelSet& err) {
    const auto check = validate_iso_value(args.config.r, grid.dims().x, args.d_max,
                                          args.eta_min > 0 ? args.eta_min : 1.0);
    std::cerr << "error: " << err.what() << "\n"
              << "advisory: keep max{1/(2k), d_max} = " << check.lower_bound
              << " <= r <= eta_min/2\n";
    return kExitEmptyLevelSet;
  } catch (NonFiniteLoss& err) {
    std::cerr << "error: " << err.what() << "\n";
    if (err.has_last_good) {
      const fs::path rescue = dir / (out_path.stem().string() + "_last_good.obj");
      save_obj(err.last_good_mesh, rescue.string());
      std::cerr << "last good mesh written to " << rescue << "\n";
    }
    return kExitNumerical;
  }

  save_mesh_by_extension(result.mesh, args.out);

  json manifest = {{"version", kVersion},
                   {"command", "extract"},
                   {"input", args.input},
                   {"output", args.out},
                   {"log", log_path.string()},
                   {"seed", args.seed},
                   {"config", config_to_json(args.config)},
                   {"wall_ms",
                    {{"optimization", opt_ms}, {"total", elapsed_ms(t_start)}}}};
  std::ofstream(manifest_path) << manifest.dump(2) << "\n";

  std::cout << "final loss: total=" << result.final_loss.total
            << " distance=" << result.final_loss.distance_term
            << " laplacian=" << result.final_loss.laplacian_term << "\n";
  if (!args.gt.empty()) {
    const SampleCloud gt = load_ground_truth(args.gt, 10000, 20240101);
    const MeshReport report = mesh_report(result.mesh, gt);
    std::cout << report_pretty(out_path.stem().string(), report);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shrink-wrapped zero level set extraction from unsigned distance fields"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  int threads = 0;
  if (const char* env = std::getenv("UDFSW_THREADS")) threads = std::atoi(env);
  app.add_option("--threads", threads, "worker threads (0 = hardware default)");

  // --- make-field ------------------------------------------------------
  auto* make_field = app.add_subcommand("make-field", "sample a UDF into a .udfgrid file");
  std::string mf_primitive, mf_mesh, mf_cloud, mf_out = "field.udfgrid", mf_params;
  int mf_dims = 128;
  double mf_radius = -1.0, mf_gap = -1.0, mf_sigma = 0.0;
  std::uint64_t mf_seed = 0;
  make_field->add_option("--primitive", mf_primitive,
                         "sphere|torus|disk|cylinder_plane|u_channel");
  make_field->add_option("--mesh", mf_mesh, "OBJ file to build a mesh-distance field from");
  make_field->add_option("--cloud", mf_cloud, ".xyz point cloud (distance to points)");
  make_field->add_option("--params", mf_params, "shape parameters, key=value[,key=value]");
  make_field->add_option("--radius", mf_radius, "shorthand for --params radius=...");
  make_field->add_option("--gap", mf_gap, "shorthand for --params gap=...");
  make_field->add_option("--dims", mf_dims, "lattice resolution per axis")->check(CLI::Range(2, 2048));
  make_field->add_option("--noise-sigma", mf_sigma, "additive Gaussian noise stddev");
  make_field->add_option("--seed", mf_seed, "noise RNG seed");
  make_field->add_option("--out", mf_out, "output .udfgrid path");

  // --- extract ---------------------------------------------------------
  auto* extract = app.add_subcommand("extract", "run the optimization pipeline");
  ExtractArgs ex;
  bool no_topo = false, no_subdiv = false, no_mask = false, no_dircorr = false;
  extract->add_option("input", ex.input, ".udfgrid input")->required();
  extract->add_option("--out", ex.out, "output mesh (.obj or .ply)");
  extract->add_option("--gt", ex.gt, "ground-truth mesh/points for a final report");
  extract->add_option("--r", ex.config.r, "iso-value");
  extract->add_option("--lambda1", ex.config.lambda1, "Laplacian weight");
  extract->add_option("--iters", ex.config.max_iterations, "iteration count");
  extract->add_option("--lr", ex.config.learning_rate, "learning rate");
  extract->add_option("--ws", ex.config.w_s, "subdivision/cluster threshold");
  extract->add_option("--wt", ex.config.w_t, "activation mask threshold");
  extract->add_option("--s1", ex.config.s1, "topology-edit period");
  extract->add_option("--s2", ex.config.s2, "subdivision period");
  extract->add_option("--reset-n", ex.config.reset_period, "weight reset period");
  extract->add_option("--beta-m", ex.config.beta_m, "mask update period");
  extract->add_option("--d-max", ex.d_max, "noise level estimate for the iso-value check");
  extract->add_option("--eta-min", ex.eta_min, "minimum gap size for the iso-value check");
  extract->add_option("--seed", ex.seed, "run seed recorded in the manifest");
  std::string ex_config_file;
  extract->add_option("--config", ex_config_file,
                      "key=value config file (CLI flags take precedence)");
  extract->add_flag("--no-topo", no_topo, "disable topology correction");
  extract->add_flag("--no-subdiv", no_subdiv, "disable subdivision");
  extract->add_flag("--no-mask", no_mask, "disable the activation mask");
  extract->add_flag("--no-dircorr", no_dircorr, "disable direction correction");

  // --- eval ------------------------------------------------------------
  auto* eval = app.add_subcommand("eval", "Chamfer distance and topology report");
  std::string ev_pred, ev_gt, ev_out;
  int ev_samples = 10000;
  std::uint64_t ev_seed = 20240101;
  eval->add_option("pred", ev_pred, "prediction mesh (OBJ)")->required();
  eval->add_option("--gt", ev_gt, "ground-truth mesh or .xyz points")->required();
  eval->add_option("--out", ev_out, "also write a CSV report here");
  eval->add_option("--samples", ev_samples, "sample count per side");
  eval->add_option("--seed", ev_seed, "sampling seed");

  // --- bench -----------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "runtime/ablation matrix over fixture suites");
  std::string bn_suite = "synthetic-default", bn_out = "bench.csv";
  int bn_dims = 128, bn_full_iters = 150, bn_baseline_iters = 300;
  bench->add_option("--suite", bn_suite, "fixture suite name");
  bench->add_option("--out", bn_out, "output CSV path");
  bench->add_option("--dims", bn_dims, "lattice resolution per axis");
  bench->add_option("--full-iters", bn_full_iters, "iterations for full/components-off runs");
  bench->add_option("--baseline-iters", bn_baseline_iters,
                    "iterations for the uniform-weight baseline (two-stage emulation)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (make_field->parsed()) {
      auto params = mf_params.empty() ? std::vector<std::pair<std::string, double>>{}
                                      : parse_params(mf_params);
      if (mf_radius > 0.0) params.emplace_back("radius", mf_radius);
      if (mf_gap > 0.0) params.emplace_back("gap", mf_gap);

      std::unique_ptr<ScalarField> field;
      TriMesh source_mesh;
      if (!mf_primitive.empty()) {
        field = make_primitive_field(mf_primitive, params);
      } else if (!mf_mesh.empty()) {
        source_mesh = load_obj(mf_mesh);
        field = make_mesh_field(source_mesh);
      } else if (!mf_cloud.empty()) {
        // Distance to a point cloud: degenerate triangles are not allowed,
        // so make each point a tiny triangle.
        std::ifstream in(mf_cloud);
        if (!in) throw std::runtime_error("cannot open " + mf_cloud);
        double x, y, z;
        TriMesh cloud_mesh;
        const double eps = 1e-6;
        while (in >> x >> y >> z) {
          const int base = cloud_mesh.vertex_count();
          cloud_mesh.vertices.emplace_back(x, y, z);
          cloud_mesh.vertices.emplace_back(x + eps, y, z);
          cloud_mesh.vertices.emplace_back(x, y + eps, z);
          cloud_mesh.faces.emplace_back(base, base + 1, base + 2);
        }
        if (cloud_mesh.faces.empty()) throw std::runtime_error(mf_cloud + ": no points");
        source_mesh = std::move(cloud_mesh);
        field = make_mesh_field(source_mesh);
      } else {
        std::cerr << "error: one of --primitive/--mesh/--cloud is required\n";
        return kExitInput;
      }

      std::optional<NoiseSpec> noise;
      if (mf_sigma > 0.0) noise = NoiseSpec{mf_sigma, mf_seed};
      const GridField grid =
          sample_grid(*field, GridDims::cubic(mf_dims), Box3::unit(), noise);
      save_udfgrid(grid, mf_out);

      // Advisory d_max estimate: largest sampled value among lattice points
      // within one cell of the zero set.
      const double cell = grid.cell_size().maxCoeff();
      double d_max = 0.0;
      for (int k = 0; k < grid.dims().z; ++k) {
        for (int j = 0; j < grid.dims().y; ++j) {
          for (int i = 0; i < grid.dims().x; ++i) {
            const double noisy = grid.at(i, j, k);
            const double clean = field->value(grid.lattice_point(i, j, k));
            if (clean <= cell) d_max = std::max(d_max, noisy);
          }
        }
      }
      std::cout << "wrote " << mf_out << " (" << mf_dims << "^3), d_max estimate " << d_max
                << "\n";
      return kExitOk;
    }

    if (extract->parsed()) {
      if (!ex_config_file.empty()) apply_config_file(ex_config_file, *extract, ex.config);
      ex.config.direction_correction_enabled = !no_dircorr;
      ex.config.topology_correction_enabled = !no_topo;
      ex.config.subdivision_enabled = !no_subdiv;
      ex.config.mask_enabled = !no_mask;
      return run_extract_cmd(ex);
    }

    if (bench->parsed()) {
      if (bn_suite != "synthetic-default") {
        std::cerr << "error: unknown suite " << bn_suite << "\n";
        return kExitInput;
      }
      struct BenchConfig {
        const char* name;
        ExtractionConfig config;
      };
      ExtractionConfig full;
      full.max_iterations = bn_full_iters;
      full.mc_resolution = bn_dims;
      // Self-adaptive weights only: every optional stage switched off.
      ExtractionConfig components_off = full;
      components_off.mask_enabled = false;
      components_off.direction_correction_enabled = false;
      components_off.topology_correction_enabled = false;
      components_off.subdivision_enabled = false;
      // Uniform-weight baseline, run longer to emulate a two-stage pipeline.
      ExtractionConfig baseline = components_off;
      baseline.self_adaptive_weights_enabled = false;
      baseline.max_iterations = bn_baseline_iters;
      const BenchConfig matrix[] = {
          {"full", full}, {"components-off", components_off}, {"dcudf-mode", baseline}};

      std::ofstream csv(bn_out);
      csv << "fixture,config,cd_avg_x1e3,wall_ms,vertices,faces,nm_vertices,nm_edges,"
             "boundaries,components\n";
      for (const Fixture& fx : make_standard_fixtures()) {
        const GridField grid =
            sample_grid(*fx.field, GridDims::cubic(bn_dims), Box3::unit());
        for (const BenchConfig& cell : matrix) {
          const auto t0 = std::chrono::steady_clock::now();
          const ExtractionResult res = run_extraction(grid, cell.config, fx.field.get());
          const double wall = elapsed_ms(t0);
          const MeshReport report = mesh_report(res.mesh, fx.ground_truth);
          char row[256];
          std::snprintf(row, sizeof(row), "%s,%s,%.6f,%.1f,%d,%d,%d,%d,%d,%d\n",
                        fx.name.c_str(), cell.name, report.chamfer.average * 1e3, wall,
                        report.vertices, report.faces,
                        report.topology.non_manifold_vertices,
                        report.topology.non_manifold_edges,
                        report.topology.boundary_loops, report.topology.components);
          csv << row;
          std::cerr << fx.name << "/" << cell.name << ": cd=" << report.chamfer.average * 1e3
                    << "e-3 wall=" << wall << "ms\n";
        }
      }
      std::cout << "wrote " << bn_out << "\n";
      return kExitOk;
    }

    if (eval->parsed()) {
      const TriMesh pred = load_obj(ev_pred);
      const SampleCloud gt = load_ground_truth(ev_gt, ev_samples, ev_seed);
      const MeshReport report = mesh_report(pred, gt, ev_samples, ev_seed);
      const std::string name = fs::path(ev_pred).stem().string();
      std::cout << report_pretty(name, report);
      if (!ev_out.empty()) {
        std::ofstream out(ev_out);
        out << report_csv_header() << "\n" << report_csv_row(name, report) << "\n";
      }
      return kExitOk;
    }
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInput;
  } catch (const std::runtime_error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
