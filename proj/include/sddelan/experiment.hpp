#ifndef SDDELAN_EXPERIMENT_HPP
#define SDDELAN_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "sddelan/error.hpp"
#include "sddelan/fundamental.hpp"
#include "sddelan/inference.hpp"
#include "sddelan/json_io.hpp"
#include "sddelan/ks.hpp"
#include "sddelan/limit_laws.hpp"
#include "sddelan/rng.hpp"
#include "sddelan/simulate.hpp"
#include "sddelan/spectrum.hpp"

namespace sddelan {

inline constexpr const char* kToolVersion = "sddelan 0.1.0";

struct TestSpec {
  std::string name;
  std::optional<double> tol;
};

struct ExperimentConfig {
  json measure_json;
  double theta = 0.0;
  double T = 0.0;
  double dt = 0.0;
  json x0_json;
  int replicates = 0;
  std::uint64_t seed = 0;
  std::optional<Regime> regime_override;
  int limit_samples = 2000;
  int laq_steps = 10'000;
  double phase = 0.0;               // PLAMN d
  std::optional<int> lattice_k;     // T = k * period + phase when set
  double alpha = 1e-3;
  std::vector<TestSpec> tests;
  int threads = 0;
  bool noise = true;

  SignedMeasure measure() const { return measure_from_json(measure_json); }
  InitialPath x0() const { return initial_path_from_json(x0_json, number_from_json(measure_json.at("r"), "r")); }
};

inline std::uint64_t seed_from_json(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer()) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
      v = std::stoull(s, &used, 10);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == s.size() && !s.empty()) return v;
  }
  throw InvalidArgument("seed: expected a 64-bit unsigned integer");
}

inline ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig c;
  if (j.contains("measure")) {
    c.measure_json = j.at("measure");
  } else if (j.contains("measure_file")) {
    std::filesystem::path p = j.at("measure_file").get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    c.measure_json = read_json_file(p);
  } else {
    throw InvalidArgument("config: need 'measure' or 'measure_file'");
  }
  (void)c.measure();  // validate early
  c.theta = j.contains("theta") ? number_from_json(j.at("theta"), "theta")
                                : number_from_json(c.measure_json.at("theta"), "theta");
  c.dt = number_from_json(j.at("dt"), "dt");
  if (j.contains("T")) c.T = number_from_json(j.at("T"), "T");
  c.x0_json = j.value("x0", json(nullptr));
  c.replicates = j.at("replicates").get<int>();
  c.seed = seed_from_json(j.at("seed"));
  if (j.contains("regime") && !j.at("regime").is_null()) c.regime_override = regime_from_string(j.at("regime"));
  c.limit_samples = j.value("limit_samples", c.limit_samples);
  c.laq_steps = j.value("laq_steps", c.laq_steps);
  if (j.contains("phase")) c.phase = number_from_json(j.at("phase"), "phase");
  if (j.contains("lattice_k") && !j.at("lattice_k").is_null()) c.lattice_k = j.at("lattice_k").get<int>();
  c.alpha = j.value("alpha", c.alpha);
  c.threads = j.value("threads", 0);
  c.noise = j.value("noise", true);
  if (j.contains("tests")) {
    for (const auto& t : j.at("tests")) {
      if (t.is_string()) {
        c.tests.push_back({t.get<std::string>(), std::nullopt});
      } else {
        TestSpec s{t.at("name").get<std::string>(), std::nullopt};
        if (t.contains("tol")) s.tol = number_from_json(t.at("tol"), "tests.tol");
        c.tests.push_back(s);
      }
    }
  }
  if (c.replicates < 1) throw InvalidArgument("config: replicates must be positive");
  if (!c.lattice_k && !(c.T > 0.0)) throw InvalidArgument("config: T must be positive");
  (void)c.x0();
  return c;
}

inline ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return experiment_config_from_json(read_json_file(path), path.parent_path());
}

inline json experiment_config_to_json(const ExperimentConfig& c) {
  json j;
  j["measure"] = c.measure_json;
  j["theta"] = c.theta;
  j["T"] = c.T;
  j["dt"] = c.dt;
  j["x0"] = c.x0_json;
  j["replicates"] = c.replicates;
  j["seed"] = std::to_string(c.seed);
  j["regime"] = c.regime_override ? json(to_string(*c.regime_override)) : json(nullptr);
  j["limit_samples"] = c.limit_samples;
  j["laq_steps"] = c.laq_steps;
  j["phase"] = c.phase;
  j["lattice_k"] = c.lattice_k ? json(*c.lattice_k) : json(nullptr);
  j["alpha"] = c.alpha;
  json tests = json::array();
  for (const auto& t : c.tests) {
    json tj{{"name", t.name}};
    if (t.tol) tj["tol"] = *t.tol;
    tests.push_back(tj);
  }
  j["tests"] = tests;
  j["noise"] = c.noise;
  return j;
}

/// Worker count: config value (0 = hardware), capped by SDDE_LAN_THREADS.
inline int resolve_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("SDDE_LAN_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<int>(n, static_cast<int>(cap));
  }
  return std::max(1, n);
}

/// Runs body(i) for i in [0, n) on `threads` workers. Each index writes only
/// its own slot, so output is independent of scheduling.
inline void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(n);
        return;
      }
    }
  };
  const int workers = std::min(threads, std::max(1, n));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct ReplicateResult {
  std::uint64_t seed = 0;
  double delta = 0.0;
  double info = 0.0;
  double theta_hat = 0.0;
  double mean_y = 0.0;     // (1/T) \int Y dt
  double mean_y2 = 0.0;    // (1/T) \int Y^2 dt
  double scaled_y_end = 0.0;
};

struct TestOutcome {
  std::string name;
  double statistic = 0.0;
  double p_value = std::numeric_limits<double>::quiet_NaN();
  double threshold = 0.0;
  bool passed = false;
  std::string detail;
};

struct ErgodicDiagnostics {
  double median_mean_y = 0.0;
  double median_mean_y2 = 0.0;
  double J = 0.0;
  bool mean_ok = false;
  bool square_ok = false;
  bool passed() const { return mean_ok && square_ok; }
};

struct ExperimentResult {
  ExperimentConfig config;
  RegimeReport report;
  double T = 0.0;
  double phase = 0.0;
  double scaling = 0.0;
  std::optional<double> fisher;  // J for LAN runs
  std::vector<ReplicateResult> replicates;
  std::vector<LimitSample> limit;
  std::vector<TestOutcome> tests;
  double median_scaled_y_end = 0.0;
  bool passed() const {
    return std::all_of(tests.begin(), tests.end(), [](const TestOutcome& t) { return t.passed; });
  }
};

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

inline ErgodicDiagnostics ergodic_diagnostics(const std::vector<ReplicateResult>& reps, double J) {
  std::vector<double> m1;
  std::vector<double> m2;
  for (const auto& r : reps) {
    m1.push_back(r.mean_y);
    m2.push_back(r.mean_y2);
  }
  ErgodicDiagnostics d;
  d.J = J;
  d.median_mean_y = median(m1);
  d.median_mean_y2 = median(m2);
  d.mean_ok = std::abs(d.median_mean_y) <= 0.05 * std::sqrt(J);
  d.square_ok = std::abs(d.median_mean_y2 - J) / J <= 0.05;
  return d;
}

namespace detail {

inline std::uint64_t limit_master(std::uint64_t master) { return splitmix64(master ^ 0xA0761D6478BD642Full); }

inline bool needs_limit(const std::vector<TestSpec>& tests) {
  for (const auto& t : tests) {
    if (t.name == "ks_limit_delta" || t.name == "ks_limit_info") return true;
  }
  return false;
}

}  // namespace detail

inline std::vector<LimitSample> draw_limit_samples(const ExperimentConfig& c, const SignedMeasure& a,
                                                   const RegimeReport& rep, std::optional<double> J, double phase,
                                                   int threads) {
  std::vector<LimitSample> out(static_cast<std::size_t>(c.limit_samples));
  const InitialPath x0 = c.x0();
  const std::uint64_t master = detail::limit_master(c.seed);
  SupercriticalOptions sopts;
  sopts.noise = c.noise;
  parallel_for(c.limit_samples, threads, [&](int i) {
    const std::uint64_t s = derive_seed(master, static_cast<std::uint64_t>(i));
    switch (rep.regime) {
      case Regime::kLAN: {
        NormalStream rng(s, 0);
        out[i] = sample_lan(*J, rng);
        break;
      }
      case Regime::kLAQ: out[i] = sample_laq(rep, c.laq_steps, s); break;
      case Regime::kLAMN:
      case Regime::kPLAMN: out[i] = sample_plamn(c.theta, a, rep, x0, phase, s, sopts); break;
      case Regime::kUnclassified: throw DomainError("no limit law for an unclassified regime");
    }
  });
  return out;
}

inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  ExperimentResult res;
  res.config = c;
  const SignedMeasure a = c.measure();
  const InitialPath x0 = c.x0();
  ClassifyOptions copts;
  copts.regime_hint = c.regime_override;
  res.report = classify(c.theta, a, copts);
  const RegimeReport& rep = res.report;
  if (rep.regime == Regime::kUnclassified) {
    throw DomainError("regime UNCLASSIFIED (imaginary parts without a common divisor); set \"regime\" to override");
  }

  // time horizon, snapped to the grid; for a lattice run the phase is the
  // offset that the snapped horizon actually realizes
  double T = c.T;
  res.phase = c.phase;
  if (c.lattice_k) {
    const auto P = rep.period();
    if (!P) throw InvalidArgument("lattice_k requires a PLAMN regime");
    T = *c.lattice_k * *P + c.phase;
    T = std::round(T / c.dt) * c.dt;
    res.phase = T - *c.lattice_k * *P;
  }
  const Grid grid = Grid::make(a.r(), c.dt, T);
  res.T = grid.T();
  res.scaling = rep.scaling.at(res.T);

  const int threads = resolve_threads(c.threads);
  bool need_fisher = rep.regime == Regime::kLAN;
  if (need_fisher) res.fisher = fisher_limit(c.theta, a, rep);

  res.replicates.resize(static_cast<std::size_t>(c.replicates));
  parallel_for(c.replicates, threads, [&](int i) {
    ReplicateResult& out = res.replicates[static_cast<std::size_t>(i)];
    out.seed = derive_seed(c.seed, static_cast<std::uint64_t>(i));
    const SamplePath path = simulate(c.theta, a, x0, grid, out.seed, c.noise);
    const ScorePair sp = score_and_info(path, c.theta, res.scaling);
    out.delta = sp.delta;
    out.info = sp.info;
    try {
      out.theta_hat = mle(path);
    } catch (const DomainError&) {
      out.theta_hat = std::numeric_limits<double>::quiet_NaN();
    }
    double s1 = 0.0;
    double s2 = 0.0;
    for (int n = 0; n < grid.n_steps; ++n) {
      const double y = path.Y[static_cast<std::size_t>(n)];
      s1 += y;
      s2 += y * y;
    }
    out.mean_y = s1 * grid.dt / res.T;
    out.mean_y2 = s2 * grid.dt / res.T;
    out.scaled_y_end = res.scaling * path.Y.back();
  });
  {
    std::vector<double> ends;
    for (const auto& r : res.replicates) ends.push_back(std::abs(r.scaled_y_end));
    res.median_scaled_y_end = median(ends);
  }

  if (detail::needs_limit(c.tests)) res.limit = draw_limit_samples(c, a, rep, res.fisher, res.phase, threads);

  std::vector<double> deltas;
  std::vector<double> infos;
  for (const auto& r : res.replicates) {
    deltas.push_back(r.delta);
    infos.push_back(r.info);
  }
  for (const auto& t : c.tests) {
    TestOutcome o;
    o.name = t.name;
    if (t.name == "ks_normal") {
      std::vector<double> ratio;
      for (const auto& r : res.replicates) ratio.push_back(r.info > 0.0 ? r.delta / std::sqrt(r.info) : 0.0);
      const KsResult k = ks_normal(ratio);
      o.statistic = k.statistic;
      o.p_value = k.p_value;
      o.threshold = t.tol.value_or(c.alpha);
      o.passed = k.p_value > o.threshold;
    } else if (t.name == "ks_limit_delta" || t.name == "ks_limit_info") {
      std::vector<double> ref;
      for (const auto& l : res.limit) ref.push_back(t.name == "ks_limit_delta" ? l.delta : l.info);
      const KsResult k = ks_two_sample(t.name == "ks_limit_delta" ? deltas : infos, ref);
      o.statistic = k.statistic;
      o.p_value = k.p_value;
      o.threshold = t.tol.value_or(c.alpha);
      o.passed = k.p_value > o.threshold;
    } else if (t.name == "mean_info") {
      if (!res.fisher) throw InvalidArgument("mean_info needs a LAN regime");
      double mean = 0.0;
      for (double v : infos) mean += v;
      mean /= static_cast<double>(infos.size());
      o.statistic = mean;
      o.threshold = t.tol.value_or(0.05);
      o.passed = std::abs(mean - *res.fisher) <= o.threshold * *res.fisher;
      o.detail = "J = " + format_double(*res.fisher);
    } else if (t.name == "ergodic") {
      if (!res.fisher) throw InvalidArgument("ergodic needs a LAN regime");
      const ErgodicDiagnostics d = ergodic_diagnostics(res.replicates, *res.fisher);
      o.statistic = d.median_mean_y2;
      o.threshold = 0.05;
      o.passed = d.passed();
      o.detail = "median (1/T)int Y = " + format_double(d.median_mean_y) +
                 ", median (1/T)int Y^2 = " + format_double(d.median_mean_y2) + ", J = " + format_double(d.J);
    } else if (t.name == "mle_median") {
      if (!t.tol) throw InvalidArgument("mle_median needs 'tol'");
      std::vector<double> err;
      for (const auto& r : res.replicates) err.push_back(std::abs(r.theta_hat - c.theta));
      o.statistic = median(err);
      o.threshold = *t.tol;
      o.passed = o.statistic <= o.threshold;
    } else if (t.name == "info_positive") {
      double lo = std::numeric_limits<double>::infinity();
      for (double v : infos) lo = std::min(lo, v);
      o.statistic = lo;
      o.passed = lo > 0.0;
    } else {
      throw InvalidArgument("unknown test '" + t.name + "'");
    }
    res.tests.push_back(o);
  }
  return res;
}

inline ErgodicDiagnostics ergodic_check(const ExperimentConfig& c) {
  ExperimentConfig plain = c;
  plain.tests.clear();
  const ExperimentResult res = run_experiment(plain);
  if (res.report.regime != Regime::kLAN || !res.fisher) throw DomainError("ergodic_check: regime is not LAN");
  return ergodic_diagnostics(res.replicates, *res.fisher);
}

inline json experiment_result_to_json(const ExperimentResult& r) {
  json j;
  j["tool_version"] = kToolVersion;
  j["config"] = experiment_config_to_json(r.config);
  j["report"] = report_to_json(r.report);
  j["T"] = r.T;
  j["phase"] = r.phase;
  j["scaling"] = r.scaling;
  j["fisher"] = r.fisher ? json(*r.fisher) : json(nullptr);
  json tests = json::array();
  for (const auto& t : r.tests) {
    json tj{{"name", t.name}, {"statistic", t.statistic}, {"p_value", double_or_string(t.p_value)},
            {"threshold", t.threshold}, {"passed", t.passed}};
    if (!t.detail.empty()) tj["detail"] = t.detail;
    tests.push_back(tj);
  }
  j["tests"] = tests;
  j["passed"] = r.passed();
  std::vector<double> m1;
  std::vector<double> m2;
  for (const auto& x : r.replicates) {
    m1.push_back(x.mean_y);
    m2.push_back(x.mean_y2);
  }
  j["diagnostics"] = {{"median_mean_y", median(m1)},
                      {"median_mean_y2", median(m2)},
                      {"median_abs_scaled_y_end", r.median_scaled_y_end}};
  json reps = json::array();
  for (std::size_t i = 0; i < r.replicates.size(); ++i) {
    const auto& x = r.replicates[i];
    reps.push_back({{"index", i},
                    {"seed", std::to_string(x.seed)},
                    {"delta", x.delta},
                    {"info", x.info},
                    {"theta_hat", double_or_string(x.theta_hat)}});
  }
  j["replicates"] = reps;
  json lim = json::array();
  for (const auto& l : r.limit) lim.push_back({l.delta, l.info});
  j["limit_samples"] = lim;
  return j;
}

inline std::string samples_csv(const ExperimentResult& r) {
  std::string out = "replicate,seed,delta,info,theta_hat\n";
  char buf[160];
  for (std::size_t i = 0; i < r.replicates.size(); ++i) {
    const auto& x = r.replicates[i];
    std::snprintf(buf, sizeof buf, "%zu,%llu,%.17g,%.17g,%.17g\n", i, static_cast<unsigned long long>(x.seed),
                  x.delta, x.info, x.theta_hat);
    out += buf;
  }
  return out;
}

inline void write_experiment_outputs(const ExperimentResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream js(dir / "result.json");
  js << to_json_string(experiment_result_to_json(r));
  std::ofstream csv(dir / "samples.csv");
  csv << samples_csv(r);
  if (!js || !csv) throw Error("cannot write outputs to " + dir.string());
}

}  // namespace sddelan

#endif  // SDDELAN_EXPERIMENT_HPP
