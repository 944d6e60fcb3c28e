// Command-line harness for the curvex toolkit: optimizer trajectories,
// stationary-point classification, stationarity scans, basin rasters, and
// the robust-classification experiment. Every run writes CSV artifacts and
// a JSON manifest describing how to reproduce them.
//
// Exit codes: 0 success/converged, 1 expectation mismatch, 2 iteration
// budget exhausted, 3 diverged, 64 usage error, 65 unknown problem.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curvex/curvex.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace curvex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitMaxIters = 2;
constexpr int kExitDiverged = 3;
constexpr int kExitUsage = 64;
constexpr int kExitUnknownProblem = 65;

struct UnknownProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

// "min:max:n" -> square cell grid
GridSpec parse_grid(const std::string& s) {
  std::stringstream ss(s);
  std::string a, b, c;
  if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') ||
      !std::getline(ss, c, ':')) {
    throw CLI::ValidationError("--grid", "expected min:max:n");
  }
  GridSpec g;
  g.x_min = g.y_min = std::stod(a);
  g.x_max = g.y_max = std::stod(b);
  g.nx = g.ny = std::stoi(c);
  if (g.nx <= 0 || g.x_max <= g.x_min) {
    throw CLI::ValidationError("--grid", "degenerate grid");
  }
  return g;
}

/// Flat key=value config file; '#' starts a comment. CLI flags take
/// precedence over file keys, file keys over built-in defaults.
std::map<std::string, std::string> load_config(const std::string& path) {
  std::map<std::string, std::string> kv;
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string t) {
      const auto b = t.find_first_not_of(" \t\r");
      const auto e = t.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = val;
  }
  return kv;
}

/// All settings shared between subcommands, plus per-problem parameters.
struct Settings {
  std::string problem = "toy";
  std::string method = "gda";
  double eta = 1e-3;
  long max_iters = 50000;
  double grad_tol = 1e-8;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::string curvature = "dense";
  std::string out_dir = "out";
  std::string config_path;
  double rho_x = 0.0;
  double rho_y = 0.0;
  double epsilon_adagrad = 1e-8;
  int spectrum_stride = 10;
  long record_stride = 1;
  double power_tol = 1e-6;
  int power_max_iters = 0;
  double power_delta = 0.1;

  // quad problem parameters
  int quad_k = 1;
  int quad_d = 1;
  std::uint64_t quad_seed = 0;
  double quad_coupling = 0.5;

  // robust-mlp problem parameters
  std::uint64_t robust_seed = 0;
  int robust_n_samples = 40;
  int robust_n_features = 2;
  int robust_n_hidden = 4;
  double robust_lambda = 1.0;

  OptimizerConfig optimizer() const {
    OptimizerConfig cfg;
    cfg.method = method_from_string(method);
    cfg.eta = eta;
    cfg.max_iters = max_iters;
    cfg.grad_tol = grad_tol;
    cfg.noise_sigma = noise_sigma;
    cfg.curvature_method = curvature_method_from_string(curvature);
    cfg.power_cfg.tol = power_tol;
    cfg.power_cfg.max_iters = power_max_iters;
    cfg.power_cfg.delta = power_delta;
    cfg.epsilon_adagrad = epsilon_adagrad;
    cfg.seed = seed;
    cfg.rho_x = rho_x;
    cfg.rho_y = rho_y;
    cfg.spectrum_stride = spectrum_stride;
    cfg.record_stride = record_stride;
    return cfg;
  }

  ProblemInstance make_problem() const {
    if (problem == "toy") return toy_problem();
    if (problem == "quad") {
      Rng rng(mix_seed(quad_seed, 0xABCD));
      auto random_spd = [&rng](int n) {
        Mat q = Mat::NullaryExpr(n, n, [&rng](Eigen::Index, Eigen::Index) {
          return rng.normal();
        });
        const Mat orth = Eigen::HouseholderQR<Mat>(q).householderQ();
        Vec eigs(n);
        for (int i = 0; i < n; ++i) eigs[i] = rng.uniform(0.5, 3.0);
        return Mat(orth * eigs.asDiagonal() * orth.transpose());
      };
      const Mat a = random_spd(quad_k);
      const Mat b = random_spd(quad_d);
      const Mat c = quad_coupling *
                    Mat::NullaryExpr(quad_k, quad_d,
                                     [&rng](Eigen::Index, Eigen::Index) {
                                       return rng.normal();
                                     });
      return quadratic_saddle(a, b, c);
    }
    if (problem == "robust-mlp") {
      return robust_mlp_problem(robust_seed, robust_n_samples,
                                robust_n_features, robust_n_hidden,
                                robust_lambda);
    }
    throw UnknownProblem("unknown problem '" + problem + "'");
  }

  json to_json() const {
    json j;
    j["problem"] = problem;
    j["method"] = method;
    j["eta"] = eta;
    j["max_iters"] = max_iters;
    j["grad_tol"] = grad_tol;
    j["noise_sigma"] = noise_sigma;
    j["seed"] = seed;
    j["curvature"] = curvature;
    j["rho_x"] = rho_x;
    j["rho_y"] = rho_y;
    j["epsilon_adagrad"] = epsilon_adagrad;
    j["spectrum_stride"] = spectrum_stride;
    j["record_stride"] = record_stride;
    j["power_tol"] = power_tol;
    j["power_max_iters"] = power_max_iters;
    j["power_delta"] = power_delta;
    if (problem == "quad") {
      j["quad_k"] = quad_k;
      j["quad_d"] = quad_d;
      j["quad_seed"] = quad_seed;
      j["quad_coupling"] = quad_coupling;
    }
    if (problem == "robust-mlp") {
      j["robust_seed"] = robust_seed;
      j["robust_n_samples"] = robust_n_samples;
      j["robust_n_features"] = robust_n_features;
      j["robust_n_hidden"] = robust_n_hidden;
      j["robust_lambda"] = robust_lambda;
    }
    return j;
  }
};

/// Binds the shared flags on a subcommand and remembers the option handles
/// so config-file values can fill anything not set on the command line.
class SettingsBinder {
 public:
  SettingsBinder(CLI::App* cmd, Settings& s) : settings_(s) {
    add(cmd->add_option("--problem", s.problem, "Problem name: toy|quad|robust-mlp"), "problem");
    add(cmd->add_option("--method", s.method, "gda|cesp|adagrad|adagrad-cesp"), "method");
    add(cmd->add_option("--eta", s.eta, "Step size"), "eta");
    add(cmd->add_option("--max-iters", s.max_iters, "Iteration budget"), "max-iters");
    add(cmd->add_option("--grad-tol", s.grad_tol, "Stop when ||grad||^2 below this"), "grad-tol");
    add(cmd->add_option("--noise-sigma", s.noise_sigma, "Gradient noise stddev"), "noise-sigma");
    add(cmd->add_option("--seed", s.seed, "RNG seed"), "seed");
    add(cmd->add_option("--curvature", s.curvature, "dense|power"), "curvature");
    add(cmd->add_option("--out", s.out_dir, "Output directory"), "out");
    add(cmd->add_option("--rho-x", s.rho_x, "Curvature scale override, x block"), "rho-x");
    add(cmd->add_option("--rho-y", s.rho_y, "Curvature scale override, y block"), "rho-y");
    add(cmd->add_option("--epsilon-adagrad", s.epsilon_adagrad, "Adagrad epsilon"), "epsilon-adagrad");
    add(cmd->add_option("--spectrum-stride", s.spectrum_stride, "Steps between spectrum refreshes"), "spectrum-stride");
    add(cmd->add_option("--record-stride", s.record_stride, "Steps between recorded rows"), "record-stride");
    add(cmd->add_option("--power-tol", s.power_tol, "Power iteration residual tolerance"), "power-tol");
    add(cmd->add_option("--power-max-iters", s.power_max_iters, "Power iteration budget (0: auto)"), "power-max-iters");
    add(cmd->add_option("--power-delta", s.power_delta, "Power iteration confidence parameter"), "power-delta");
    add(cmd->add_option("--quad-k", s.quad_k, "quad: x dimension"), "quad-k");
    add(cmd->add_option("--quad-d", s.quad_d, "quad: y dimension"), "quad-d");
    add(cmd->add_option("--quad-seed", s.quad_seed, "quad: instance seed"), "quad-seed");
    add(cmd->add_option("--quad-coupling", s.quad_coupling, "quad: coupling scale"), "quad-coupling");
    add(cmd->add_option("--robust-seed", s.robust_seed, "robust-mlp: dataset seed"), "robust-seed");
    add(cmd->add_option("--robust-n-samples", s.robust_n_samples, "robust-mlp: sample count"), "robust-n-samples");
    add(cmd->add_option("--robust-n-features", s.robust_n_features, "robust-mlp: feature count"), "robust-n-features");
    add(cmd->add_option("--robust-n-hidden", s.robust_n_hidden, "robust-mlp: hidden units"), "robust-n-hidden");
    add(cmd->add_option("--robust-lambda", s.robust_lambda, "robust-mlp: regularization weight"), "robust-lambda");
    cmd->add_option("--config", s.config_path, "Flat key=value config file");
  }

  /// Config keys use the flag names without the leading dashes.
  void apply_config() {
    if (settings_.config_path.empty()) return;
    const auto kv = load_config(settings_.config_path);
    for (auto& [opt, key] : bound_) {
      if (opt->count() > 0) continue;  // command line wins
      const auto it = kv.find(key);
      if (it == kv.end()) continue;
      opt->clear();
      opt->add_result(it->second);
      opt->run_callback();
    }
  }

 private:
  void add(CLI::Option* opt, std::string key) {
    bound_.emplace_back(opt, std::move(key));
  }
  Settings& settings_;
  std::vector<std::pair<CLI::Option*, std::string>> bound_;
};

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

void write_manifest(const fs::path& path, const std::string& command,
                    const std::vector<std::string>& argv, const Settings& s,
                    const std::vector<std::string>& outputs,
                    double duration_s, const json& extra = json::object()) {
  json m;
  m["command"] = command;
  m["argv"] = argv;
  m["settings"] = s.to_json();
  m["code_version"] = kVersion;
  m["wall_clock_utc"] = iso8601_now();
  m["duration_s"] = duration_s;
  m["outputs"] = outputs;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = *it;
  std::ofstream out(path, std::ios::binary);
  out << m.dump(2) << "\n";
}

PointZ parse_point(const std::string& s, const ProblemInstance& p,
                   const char* flag) {
  const auto vals = parse_double_list(s);
  if (static_cast<int>(vals.size()) != p.k + p.d) {
    throw CLI::ValidationError(
        flag, "expected " + std::to_string(p.k + p.d) + " comma-separated values");
  }
  Vec z(p.k + p.d);
  for (size_t i = 0; i < vals.size(); ++i) z[static_cast<int>(i)] = vals[i];
  return PointZ::from_joined(z, p.k);
}

std::vector<std::string> trajectory_header(const ProblemInstance& p) {
  std::vector<std::string> cols{"t"};
  for (int i = 0; i < p.k; ++i) cols.push_back("x" + std::to_string(i));
  for (int i = 0; i < p.d; ++i) cols.push_back("y" + std::to_string(i));
  cols.insert(cols.end(), {"f", "grad_norm_sq", "lambda_min_x", "lambda_max_y",
                           "curv_norm"});
  return cols;
}

int cmd_trajectory(const Settings& s, const std::string& start,
                   const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemInstance p = s.make_problem();
  const PointZ z0 = parse_point(start, p, "--start");
  const OptimizerConfig cfg = s.optimizer();
  const TrajectoryRecord rec = run_trajectory(p, z0, cfg);

  fs::create_directories(s.out_dir);
  const fs::path csv_path = fs::path(s.out_dir) / "trajectory.csv";
  CsvWriter csv(csv_path.string());
  csv.header(trajectory_header(p));
  for (const TrajectoryRow& row : rec.rows) {
    std::vector<std::string> cells{CsvWriter::cell(row.t)};
    for (int i = 0; i < p.k; ++i) cells.push_back(CsvWriter::cell(row.z.x[i]));
    for (int i = 0; i < p.d; ++i) cells.push_back(CsvWriter::cell(row.z.y[i]));
    cells.push_back(CsvWriter::cell(row.f));
    cells.push_back(CsvWriter::cell(row.grad_norm_sq));
    cells.push_back(CsvWriter::cell(row.lambda_min_x));
    cells.push_back(CsvWriter::cell(row.lambda_max_y));
    cells.push_back(CsvWriter::cell(row.curv_norm));
    csv.row(cells);
  }

  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json extra;
  extra["start"] = start;
  extra["status"] = to_string(rec.status);
  extra["iterations"] = rec.final_t;
  write_manifest(fs::path(s.out_dir) / "trajectory.manifest.json", "trajectory",
                 argv, s, {csv_path.string()}, dt, extra);

  std::cout << "status=" << to_string(rec.status) << " iters=" << rec.final_t
            << " final=";
  const Vec fz = rec.final_z.joined();
  for (int i = 0; i < fz.size(); ++i)
    std::cout << (i ? "," : "") << format_double(fz[i]);
  std::cout << "\n";
  switch (rec.status) {
    case RunStatus::Converged: return kExitOk;
    case RunStatus::MaxIters: return kExitMaxIters;
    case RunStatus::Diverged: return kExitDiverged;
  }
  return kExitOk;
}

json report_to_json(const StationaryPointReport& rep) {
  json j;
  const Vec zj = rep.z.joined();
  j["z"] = std::vector<double>(zj.data(), zj.data() + zj.size());
  j["grad_norm"] = rep.grad_norm;
  j["lambda_min_x"] = rep.lambda_min_x;
  j["lambda_max_y"] = rep.lambda_max_y;
  json eigs = json::array();
  for (const auto& ev : rep.jacobian_eigs) {
    eigs.push_back({{"re", ev.real()}, {"im", ev.imag()}});
  }
  j["jacobian_eigs"] = eigs;
  j["verdict"] = to_string(rep.verdict);
  j["margin_x"] = rep.margin_x;
  j["margin_y"] = rep.margin_y;
  return j;
}

int cmd_classify(const Settings& s, const std::string& point, double tol,
                 const std::string& expect,
                 const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemInstance p = s.make_problem();
  const PointZ z = parse_point(point, p, "--point");
  const StationaryPointReport rep = classify_point(p, z, tol);
  const json j = report_to_json(rep);
  std::cout << j.dump(2) << "\n";

  if (!s.out_dir.empty()) {
    fs::create_directories(s.out_dir);
    const fs::path out = fs::path(s.out_dir) / "classify.json";
    std::ofstream f(out, std::ios::binary);
    f << j.dump(2) << "\n";
    const double dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0).count();
    json extra;
    extra["point"] = point;
    extra["tol"] = tol;
    if (!expect.empty()) extra["expect"] = expect;
    write_manifest(fs::path(s.out_dir) / "classify.manifest.json", "classify",
                   argv, s, {out.string()}, dt, extra);
  }
  if (!expect.empty() && verdict_from_string(expect) != rep.verdict) {
    std::cerr << "expected verdict " << expect << ", got "
              << to_string(rep.verdict) << "\n";
    return kExitMismatch;
  }
  return kExitOk;
}

int cmd_scan(const Settings& s, const std::string& grid_str, double tol,
             const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemInstance p = s.make_problem();
  const GridSpec grid = parse_grid(grid_str);
  const ScanReport rep = stationarity_equivalence_scan(p, grid, tol, s.optimizer());

  fs::create_directories(s.out_dir);
  const fs::path csv_path = fs::path(s.out_dir) / "scan.csv";
  CsvWriter csv(csv_path.string());
  csv.header({"ix", "iy", "x", "y", "gda_disp", "cesp_disp", "center_verdict",
              "stationary", "refined_x", "refined_y", "refined_verdict",
              "refined_cesp_disp"});
  for (const ScanCell& c : rep.cells) {
    csv.row({CsvWriter::cell(c.ix), CsvWriter::cell(c.iy),
             CsvWriter::cell(c.cx), CsvWriter::cell(c.cy),
             CsvWriter::cell(c.gda_disp), CsvWriter::cell(c.cesp_disp),
             to_string(c.center_verdict), CsvWriter::cell(int(c.stationary)),
             CsvWriter::cell(c.refined_x), CsvWriter::cell(c.refined_y),
             c.stationary ? to_string(c.refined_verdict) : "none",
             CsvWriter::cell(c.refined_cesp_disp)});
  }

  json summary;
  summary["sets_equal"] = rep.sets_equal;
  summary["fixed_tol"] = rep.fixed_tol;
  auto cells_json = [&](const std::vector<long>& idxs) {
    json arr = json::array();
    for (long idx : idxs) {
      const ScanCell& c = rep.cells[idx];
      arr.push_back({{"ix", c.ix},
                     {"iy", c.iy},
                     {"x", c.refined_x},
                     {"y", c.refined_y},
                     {"verdict", to_string(c.refined_verdict)}});
    }
    return arr;
  };
  summary["gda_stationary_cells"] = cells_json(rep.gda_stationary_cells);
  summary["cesp_fixed_cells"] = cells_json(rep.cesp_fixed_cells);
  summary["locally_optimal_cells"] = cells_json(rep.locally_optimal_cells);
  summary["stable_undesired_cells"] = cells_json(rep.stable_undesired_cells);
  const fs::path sum_path = fs::path(s.out_dir) / "scan_summary.json";
  {
    std::ofstream f(sum_path, std::ios::binary);
    f << summary.dump(2) << "\n";
  }

  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json extra;
  extra["grid"] = grid_str;
  extra["tol"] = tol;
  extra["sets_equal"] = rep.sets_equal;
  write_manifest(fs::path(s.out_dir) / "scan.manifest.json", "scan", argv, s,
                 {csv_path.string(), sum_path.string()}, dt, extra);

  std::cout << summary.dump(2) << "\n";
  return rep.sets_equal ? kExitOk : kExitMismatch;
}

int cmd_basin(const Settings& s, const std::string& grid_str,
              double match_radius, const std::string& attractors_str,
              const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  const ProblemInstance p = s.make_problem();
  const GridSpec grid = parse_grid(grid_str);

  std::vector<PointZ> attractors;
  if (!attractors_str.empty()) {
    std::stringstream ss(attractors_str);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
      if (tok.empty()) continue;
      attractors.push_back(parse_point(tok, p, "--attractors"));
    }
  } else if (s.problem == "toy") {
    const double s2 = std::sqrt(2.0);
    attractors = {
        PointZ{Vec::Constant(1, 0.0), Vec::Constant(1, 0.0)},
        PointZ{Vec::Constant(1, -2.0 - s2), Vec::Constant(1, 2.0 + s2)},
        PointZ{Vec::Constant(1, -2.0 + s2), Vec::Constant(1, 2.0 - s2)},
    };
  } else {
    throw CLI::ValidationError("--attractors",
                               "required for problems other than toy");
  }

  const BasinRaster raster = basin_raster(p, s.optimizer(), grid, attractors,
                                          match_radius);

  fs::create_directories(s.out_dir);
  const fs::path csv_path = fs::path(s.out_dir) / "basin.csv";
  CsvWriter csv(csv_path.string());
  csv.header({"x", "y", "label"});
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      csv.row({CsvWriter::cell(grid.center_x(ix)),
               CsvWriter::cell(grid.center_y(iy)),
               CsvWriter::cell(raster.label_at(ix, iy))});
    }
  }
  const fs::path ppm_path = fs::path(s.out_dir) / "basin.ppm";
  write_basin_ppm(ppm_path.string(), raster);

  long unresolved = 0;
  std::vector<long> counts(attractors.size(), 0);
  for (int label : raster.labels) {
    if (label < 0) {
      ++unresolved;
    } else {
      ++counts[label];
    }
  }

  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json extra;
  extra["grid"] = grid_str;
  extra["match_radius"] = match_radius;
  extra["unresolved_cells"] = unresolved;
  json attr = json::array();
  for (size_t a = 0; a < attractors.size(); ++a) {
    const Vec v = attractors[a].joined();
    attr.push_back({{"id", a},
                    {"point", std::vector<double>(v.data(), v.data() + v.size())},
                    {"cells", counts[a]}});
  }
  extra["attractors"] = attr;
  write_manifest(fs::path(s.out_dir) / "basin.manifest.json", "basin", argv, s,
                 {csv_path.string(), ppm_path.string()}, dt, extra);

  std::cout << "basin raster " << grid.nx << "x" << grid.ny << ": ";
  for (size_t a = 0; a < counts.size(); ++a)
    std::cout << "attractor" << a << "=" << counts[a] << " ";
  std::cout << "unresolved=" << unresolved << "\n";
  return kExitOk;
}

int cmd_robust(const Settings& s, int n_seeds, double init_scale,
               const std::vector<std::string>& argv) {
  const auto t0 = std::chrono::steady_clock::now();
  Settings rs = s;
  rs.problem = "robust-mlp";
  const ProblemInstance p = rs.make_problem();

  fs::create_directories(s.out_dir);
  const fs::path csv_path = fs::path(s.out_dir) / "robust.csv";
  CsvWriter csv(csv_path.string());
  csv.header({"seed", "method", "status", "iters", "grad_norm_sq",
              "lambda_min_x", "lambda_max_y"});

  const Method methods[] = {Method::Gda, Method::Cesp};
  for (int run_seed = 0; run_seed < n_seeds; ++run_seed) {
    Rng init_rng(mix_seed(s.seed, 0x5EED + static_cast<std::uint64_t>(run_seed)));
    PointZ z0{init_scale * init_rng.normal_vec(p.k),
              Vec::Constant(p.d, 1.0 / p.d)};
    for (Method m : methods) {
      OptimizerConfig cfg = rs.optimizer();
      cfg.method = m;
      cfg.seed = mix_seed(s.seed, static_cast<std::uint64_t>(run_seed));
      cfg.record_stride = 0;
      cfg.spectrum_stride = 0;
      const TrajectoryRecord rec = run_trajectory(p, z0, cfg);
      const PointZ g = p.grad(rec.final_z);
      const HessianBlocks hb = detail::raw_hessian_blocks(p, rec.final_z);
      const double lx = dense_extreme_eig(hb.xx, Extreme::Min).eigenvalue;
      const double ly = dense_extreme_eig(hb.yy, Extreme::Max).eigenvalue;
      csv.row({CsvWriter::cell(run_seed), to_string(m), to_string(rec.status),
               CsvWriter::cell(rec.final_t), CsvWriter::cell(g.squared_norm()),
               CsvWriter::cell(lx), CsvWriter::cell(ly)});
    }
  }

  const double dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json extra;
  extra["seeds"] = n_seeds;
  extra["init_scale"] = init_scale;
  write_manifest(fs::path(s.out_dir) / "robust.manifest.json", "robust", argv,
                 s, {csv_path.string()}, dt, extra);
  std::cout << "wrote " << csv_path.string() << " (" << n_seeds
            << " seeds x {gda, cesp})\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> argv_copy(argv, argv + argc);

  CLI::App app{"curvex: saddle-point optimization with curvature exploitation"};
  app.require_subcommand(1);

  Settings s;

  auto* traj = app.add_subcommand("trajectory", "Run one optimizer trajectory");
  SettingsBinder traj_bind(traj, s);
  std::string start = "-3,-1";
  traj->add_option("--start", start, "Start point, comma-separated");

  auto* cls = app.add_subcommand("classify", "Classify a stationary point");
  SettingsBinder cls_bind(cls, s);
  std::string point;
  double cls_tol = 1e-6;
  std::string expect;
  cls->add_option("--point", point, "Point to classify")->required();
  cls->add_option("--tol", cls_tol, "Classification tolerance");
  cls->add_option("--expect", expect, "Expected verdict; exit 1 on mismatch");

  auto* scan = app.add_subcommand("scan", "Stationarity equivalence scan");
  SettingsBinder scan_bind(scan, s);
  std::string scan_grid = "-4:4:161";
  double scan_tol = 1e-6;
  scan->add_option("--grid", scan_grid, "Grid as min:max:n");
  scan->add_option("--tol", scan_tol, "Classification tolerance");

  auto* basin = app.add_subcommand("basin", "Basin-of-attraction raster");
  SettingsBinder basin_bind(basin, s);
  std::string basin_grid = "-4:4:161";
  double match_radius = 1e-2;
  std::string attractors;
  basin->add_option("--grid", basin_grid, "Grid as min:max:n");
  basin->add_option("--match-radius", match_radius, "Attractor match radius");
  basin->add_option("--attractors", attractors,
                    "Semicolon-separated points; defaults to toy's critical points");

  auto* robust = app.add_subcommand(
      "robust", "Paired gda/cesp terminal statistics on robust-mlp");
  SettingsBinder robust_bind(robust, s);
  int n_seeds = 20;
  double init_scale = 0.5;
  robust->add_option("--seeds", n_seeds, "Number of paired runs");
  robust->add_option("--init-scale", init_scale, "Stddev of the theta init");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);  // prints the message
    return kExitUsage;
  }

  try {
    if (traj->parsed()) {
      traj_bind.apply_config();
      return cmd_trajectory(s, start, argv_copy);
    }
    if (cls->parsed()) {
      cls_bind.apply_config();
      return cmd_classify(s, point, cls_tol, expect, argv_copy);
    }
    if (scan->parsed()) {
      scan_bind.apply_config();
      return cmd_scan(s, scan_grid, scan_tol, argv_copy);
    }
    if (basin->parsed()) {
      basin_bind.apply_config();
      return cmd_basin(s, basin_grid, match_radius, attractors, argv_copy);
    }
    if (robust->parsed()) {
      robust_bind.apply_config();
      return cmd_robust(s, n_seeds, init_scale, argv_copy);
    }
  } catch (const UnknownProblem& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknownProblem;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return kExitUsage;
}
