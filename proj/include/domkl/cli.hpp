#pragma once

// Command implementations behind the `domkl` executable. They take streams
// so tests can drive them in-process.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "domkl/config.hpp"
#include "domkl/errors.hpp"
#include "domkl/simulator.hpp"
#include "domkl/validate.hpp"

namespace domkl::cli {

enum ExitCode : int { ok = 0, runtime_failure = 1, config_error = 2 };

/// Shortest round-trip decimal form, so CSV files are byte-stable.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct OutputRow {
  std::string algorithm;
  std::size_t t = 0;
  double mse_mean = 0.0, mse_std = 0.0, cv_mean = 0.0, cv_std = 0.0;
};

inline std::vector<OutputRow> output_rows(const AggregateResult& res) {
  std::vector<OutputRow> rows;
  for (const auto& s : res.algorithms)
    for (std::size_t t = 0; t < s.mse_mean.size(); ++t)
      rows.push_back({to_string(s.algorithm), t + 1, s.mse_mean[t], s.mse_std[t], s.cv_mean[t], s.cv_std[t]});
  return rows;
}

inline void write_results_csv(std::ostream& out, const AggregateResult& res) {
  out << "algorithm,t,mse_mean,mse_std,cv_mean,cv_std\n";
  for (const auto& r : output_rows(res))
    out << r.algorithm << ',' << r.t << ',' << format_real(r.mse_mean) << ',' << format_real(r.mse_std) << ','
        << format_real(r.cv_mean) << ',' << format_real(r.cv_std) << '\n';
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "algorithm,eta_g,rho,final_mse,final_cv\n";
  for (const auto& r : rows)
    out << to_string(r.algorithm) << ',' << format_real(r.eta_global) << ',' << format_real(r.rho) << ','
        << format_real(r.final_mse) << ',' << format_real(r.final_cv) << '\n';
}

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string out_dir = ".";
};

namespace detail {
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return runtime_failure;
  }
}

inline ExperimentConfig load_with_overrides(const RunOptions& opt) {
  ExperimentConfig cfg = load_config(opt.config_path);
  if (opt.seed) cfg.master_seed = *opt.seed;
  if (opt.trials) {
    if (*opt.trials < 1) throw ParseError("--trials must be >= 1", 0);
    cfg.trials = *opt.trials;
  }
  return cfg;
}

inline std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = (std::filesystem::path(dir) / name).string();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  return f;
}
}  // namespace detail

/// Runs the configured experiment, writes <out>/results.csv and prints the
/// final MSE and CV of every algorithm.
inline int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ExperimentConfig cfg = detail::load_with_overrides(opt);
    const auto res = run_experiment(cfg);
    {
      auto f = detail::open_output(opt.out_dir, "results.csv");
      write_results_csv(f, res);
    }
    out << "trials " << res.trials << '\n';
    out << "algorithm final_mse final_cv\n";
    for (const auto& s : res.algorithms)
      out << to_string(s.algorithm) << ' ' << format_real(s.final_mse()) << ' ' << format_real(s.final_cv()) << '\n';
    return static_cast<int>(ok);
  });
}

struct SweepOptions {
  RunOptions run;
  std::vector<double> rhos;
  std::vector<double> eta_gs;
};

/// Grid over (eta_g, rho); writes <out>/sweep.csv and echoes it.
inline int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&] {
    const ExperimentConfig cfg = detail::load_with_overrides(opt.run);
    if (opt.rhos.empty() || opt.eta_gs.empty()) throw ParseError("sweep needs --rho and --eta-g values", 0);
    for (double v : opt.rhos)
      if (!(v > 0.0)) throw ParseError("--rho values must be positive", 0);
    for (double v : opt.eta_gs)
      if (!(v > 0.0)) throw ParseError("--eta-g values must be positive", 0);
    const auto rows = sweep(cfg, opt.rhos, opt.eta_gs);
    {
      auto f = detail::open_output(opt.run.out_dir, "sweep.csv");
      write_sweep_csv(f, rows);
    }
    write_sweep_csv(out, rows);
    return static_cast<int>(ok);
  });
}

/// Runs the invariant suite; exit 0 only if every check passes.
inline int cmd_validate(std::ostream& out, std::ostream& err, const ValidateOptions& vopt = {}) {
  return detail::guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    const auto results = run_invariant_suite(vopt);
    bool all = true;
    for (const auto& r : results) {
      out << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << '\n';
      all = all && r.passed;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out << (all ? "all checks passed" : "some checks FAILED") << " in " << secs << " s\n";
    if (!all) {
      err << "failed checks:";
      for (const auto& r : results)
        if (!r.passed) err << ' ' << r.name;
      err << '\n';
    }
    return static_cast<int>(all ? ok : runtime_failure);
  });
}

}  // namespace domkl::cli
