// Command-line front end: analyze, kernel, simulate, estimate, limits, experiment.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sddelan/sddelan.hpp"

namespace {

using namespace sddelan;

constexpr int kExitOk = 0;
constexpr int kExitTestFailure = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string theta;
  std::string measure;
  std::string regime_hint;
};

double parse_number(const std::string& s, const char* what) { return number_from_json(json(s), what); }

std::uint64_t parse_seed(const std::string& s) { return seed_from_json(json(s)); }

struct Loaded {
  SignedMeasure a;
  json raw;
  double theta;
};

Loaded load_measure(const Common& c) {
  if (c.measure.empty()) throw InvalidArgument("--measure is required");
  json raw = read_json_file(c.measure);
  SignedMeasure a = measure_from_json(raw);
  double theta = 0.0;
  if (!c.theta.empty()) {
    theta = parse_number(c.theta, "--theta");
  } else if (raw.contains("theta")) {
    theta = number_from_json(raw.at("theta"), "theta");
  } else {
    throw InvalidArgument("--theta is required (the measure file has no default)");
  }
  return {std::move(a), std::move(raw), theta};
}

ClassifyOptions classify_options(const Common& c) {
  ClassifyOptions o;
  if (!c.regime_hint.empty()) o.regime_hint = regime_from_string(c.regime_hint);
  return o;
}

InitialPath parse_x0(const std::string& s, double r) {
  if (s.empty()) return InitialPath::zero();
  if (std::filesystem::exists(s)) return initial_path_from_json(read_json_file(s), r);
  if (s == "zero") return InitialPath::zero();
  return InitialPath::constant(parse_number(s, "--x0"));
}

/// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void add_common(CLI::App* sub, Common& c, bool hint) {
  sub->add_option("--theta", c.theta, "drift parameter (number, or multiples of pi such as -pi/2)");
  sub->add_option("--measure", c.measure, "measure JSON file")->required();
  if (hint) sub->add_option("--regime-hint", c.regime_hint, "force LAN, LAQ, LAMN or PLAMN");
}

int run_analyze(const Common& c, const std::string& out) {
  const Loaded m = load_measure(c);
  const RegimeReport rep = classify(m.theta, m.a, classify_options(c));
  emit(out, to_json_string(report_to_json(rep)));
  return kExitOk;
}

int run_kernel(const Common& c, double dt, double T, const std::string& out) {
  const Loaded m = load_measure(c);
  const Grid g = Grid::make(m.a.r(), dt, T);
  const Kernel k = solve_fundamental(m.theta, m.a, g);
  std::string text = "t,x0,y\n";
  for (int n = 0; n <= g.n_steps; ++n) {
    text += g17(g.time(n)) + "," + g17(k.x_at(n)) + "," + g17(k.y[static_cast<std::size_t>(n)]) + "\n";
  }
  emit(out, text);
  return kExitOk;
}

int run_simulate(const Common& c, double dt, double T, const std::string& x0s, const std::string& seed,
                 bool no_noise, const std::string& out) {
  const Loaded m = load_measure(c);
  const Grid g = Grid::make(m.a.r(), dt, T);
  const SamplePath p = simulate(m.theta, m.a, parse_x0(x0s, m.a.r()), g, parse_seed(seed), !no_noise);
  std::string text = "t,W,X,Y\n";
  for (int n = 0; n <= g.n_steps; ++n) {
    const auto i = static_cast<std::size_t>(n);
    text += g17(g.time(n)) + "," + g17(p.W[i]) + "," + g17(p.x_at(n)) + "," + g17(p.Y[i]) + "\n";
  }
  emit(out, text);
  return kExitOk;
}

/// Reads a CSV with header t,W,X,Y back into a path (only t >= 0 is needed).
SamplePath read_path_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("t,W,X,Y", 0) != 0) throw InvalidArgument(path + ": expected header t,W,X,Y");
  std::vector<double> t;
  SamplePath p;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[4];
    for (double& x : v) {
      if (!std::getline(ss, cell, ',')) throw InvalidArgument(path + ": short row");
      x = std::stod(cell);
    }
    t.push_back(v[0]);
    p.W.push_back(v[1]);
    p.X.push_back(v[2]);
    p.Y.push_back(v[3]);
  }
  if (t.size() < 2) throw InvalidArgument(path + ": need at least two rows");
  p.grid.dt = t[1] - t[0];
  p.grid.n_steps = static_cast<int>(t.size()) - 1;
  p.grid.n_delay = 0;  // only t >= 0 is stored; the sums never look back
  return p;
}

int run_estimate(const Common& c, const std::string& path_csv, const std::string& out) {
  const SamplePath p = read_path_csv(path_csv);
  const double theta_hat = mle(p);
  const double theta = c.theta.empty() ? theta_hat : parse_number(c.theta, "--theta");
  const double T = p.grid.T();
  double scaling = 1.0 / std::sqrt(T);
  std::string scaling_kind = "T^(-1/2)";
  if (!c.measure.empty()) {
    const SignedMeasure a = measure_from_json(read_json_file(c.measure));
    const RegimeReport rep = classify(theta, a, classify_options(c));
    scaling = rep.scaling.at(T);
    scaling_kind = rep.scaling.describe();
  }
  const ScorePair sp = score_and_info(p, theta, scaling);
  json j;
  j["theta_hat"] = theta_hat;
  j["theta"] = theta;
  j["delta"] = sp.delta;
  j["info"] = sp.info;
  j["T"] = T;
  j["scaling"] = scaling;
  j["scaling_kind"] = scaling_kind;
  emit(out, to_json_string(j));
  return kExitOk;
}

int run_limits(const Common& c, int n, const std::string& seed, double d, const std::string& x0s, int laq_steps,
               const std::string& out) {
  const Loaded m = load_measure(c);
  const RegimeReport rep = classify(m.theta, m.a, classify_options(c));
  ExperimentConfig cfg;
  cfg.measure_json = m.raw;
  cfg.theta = m.theta;
  cfg.limit_samples = n;
  cfg.laq_steps = laq_steps;
  cfg.seed = parse_seed(seed);
  const InitialPath x0 = parse_x0(x0s, m.a.r());
  cfg.x0_json = initial_path_to_json(x0);
  std::optional<double> J;
  if (rep.regime == Regime::kLAN) J = fisher_limit(m.theta, m.a, rep);
  const auto samples = draw_limit_samples(cfg, m.a, rep, J, d, resolve_threads(0));
  std::string text = "delta,info\n";
  for (const auto& s : samples) text += g17(s.delta) + "," + g17(s.info) + "\n";
  emit(out, text);
  return kExitOk;
}

int run_experiment_cmd(const std::string& config, const std::string& out_dir, const std::string& seed, int threads) {
  ExperimentConfig cfg = load_experiment_config(config);
  if (!seed.empty()) cfg.seed = parse_seed(seed);
  if (threads > 0) cfg.threads = threads;
  const ExperimentResult res = run_experiment(cfg);
  if (!out_dir.empty()) write_experiment_outputs(res, out_dir);
  for (const auto& t : res.tests) {
    std::cout << (t.passed ? "PASS " : "FAIL ") << t.name << " statistic=" << g17(t.statistic);
    if (!std::isnan(t.p_value)) std::cout << " p=" << g17(t.p_value);
    if (!t.detail.empty()) std::cout << " (" << t.detail << ")";
    std::cout << "\n";
  }
  return res.passed() ? kExitOk : kExitTestFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical lab for linear stochastic delay equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", sddelan::kToolVersion);

  Common common;
  std::string out;
  double dt = 0.0;
  double T = 0.0;
  std::string x0;
  std::string seed = "0";
  bool no_noise = false;
  std::string path_csv;
  int n = 2000;
  double d = 0.0;
  int laq_steps = 10'000;
  std::string config;
  std::string out_dir;
  int threads = 0;

  auto* analyze = app.add_subcommand("analyze", "classify the likelihood regime at theta");
  add_common(analyze, common, true);
  analyze->add_option("--out", out, "output file (default stdout)");

  auto* kernel = app.add_subcommand("kernel", "fundamental solution x0 and kernel y on [0, T]");
  add_common(kernel, common, false);
  kernel->add_option("--dt", dt)->required();
  kernel->add_option("--T", T)->required();
  kernel->add_option("--out", out);

  auto* sim = app.add_subcommand("simulate", "Euler-Maruyama sample path");
  add_common(sim, common, false);
  sim->add_option("--dt", dt)->required();
  sim->add_option("--T", T)->required();
  sim->add_option("--x0", x0, "constant, 'zero', or a JSON file");
  sim->add_option("--seed", seed, "64-bit decimal seed");
  sim->add_flag("--no-noise", no_noise, "force all Brownian increments to zero");
  sim->add_option("--out", out);

  auto* est = app.add_subcommand("estimate", "MLE, score and information from a path CSV");
  est->add_option("--path", path_csv, "CSV written by simulate")->required();
  est->add_option("--theta", common.theta, "hypothesized theta (default: the MLE)");
  est->add_option("--measure", common.measure, "measure JSON used to pick the scaling");
  est->add_option("--regime-hint", common.regime_hint);
  est->add_option("--out", out);

  auto* lim = app.add_subcommand("limits", "draws from the limiting (Delta, J) law");
  add_common(lim, common, true);
  lim->add_option("--n", n)->check(CLI::PositiveNumber);
  lim->add_option("--seed", seed);
  lim->add_option("--d", d, "PLAMN phase");
  lim->add_option("--x0", x0);
  lim->add_option("--laq-steps", laq_steps);
  lim->add_option("--out", out);

  auto* exp = app.add_subcommand("experiment", "Monte Carlo experiment from a JSON config");
  exp->add_option("--config", config)->required();
  exp->add_option("--out-dir", out_dir);
  exp->add_option("--seed", seed, "override the config's master seed");
  exp->add_option("--threads", threads);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0 && app.get_subcommands().empty()) std::cerr << app.help();
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*analyze) return run_analyze(common, out);
    if (*kernel) return run_kernel(common, dt, T, out);
    if (*sim) return run_simulate(common, dt, T, x0, seed, no_noise, out);
    if (*est) return run_estimate(common, path_csv, out);
    if (*lim) return run_limits(common, n, seed, d, x0, laq_steps, out);
    if (*exp) return run_experiment_cmd(config, out_dir, exp->count("--seed") ? seed : std::string(), threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
