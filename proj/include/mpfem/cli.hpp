#ifndef MPFEM_CLI_HPP
#define MPFEM_CLI_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mpfem/harness.hpp"
#include "mpfem/problems.hpp"
#include "mpfem/solver.hpp"

namespace mpfem {
namespace cli_detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "problem", "method", "dt", "dx", "T", "c", "A", "L", "a",
      "fine-factor", "test-kind", "out", "levels"};
  return keys;
}

/// Plain key=value file, one pair per line, '#' comments.
inline std::map<std::string, std::string> parse_config_file(
    const std::string& path) {
  std::ifstream f(path);
  if (!f)
    throw std::invalid_argument("config: cannot open '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto pos = t.find('=');
    if (pos == std::string::npos)
      throw std::invalid_argument("config: expected key=value at line " +
                                  std::to_string(lineno));
    std::string key = trim(t.substr(0, pos));
    std::string val = trim(t.substr(pos + 1));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      std::string valid;
      for (const auto& k : keys) valid += (valid.empty() ? "" : ", ") + k;
      throw std::invalid_argument("config: unknown key '" + key +
                                  "' (valid: " + valid + ")");
    }
    kv[key] = val;
  }
  return kv;
}

inline double parse_double(const std::string& s, const std::string& name) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad number for '" + name + "': " + s);
  }
}

inline long parse_long(const std::string& s, const std::string& name) {
  try {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw std::invalid_argument("config: bad integer for '" + name + "': " + s);
  }
}

/// Option values merged from flags (winning), then the config file.
struct Options {
  std::string problem;
  std::string method;
  std::string test_kind;
  std::string out;
  std::string config;
  double dt = std::nan("");
  double dx = std::nan("");
  double T = std::nan("");
  double c = std::nan("");
  double A = std::nan("");
  double L = std::nan("");
  double a = std::nan("");
  long fine_factor = -1;
  long levels = -1;

  void add_common(CLI::App& cmd) {
    cmd.add_option("--problem", problem,
                   "benchmark: lq, distance, falcone1, falcone2");
    cmd.add_option("--method", method,
                   "fem-tilde, fem-tilde2, fem-dual, fm, limit");
    cmd.add_option("--dt", dt, "time step");
    cmd.add_option("--dx", dx, "element center spacing");
    cmd.add_option("--T", T, "horizon (integer multiple of dt)");
    cmd.add_option("--c", c, "trial curvature (quadratic elements)");
    cmd.add_option("--A", A, "test slope (Lipschitz test functions)");
    cmd.add_option("--L", L, "lq only: state domain half-width");
    cmd.add_option("--a", a, "lq only: state cost coefficient");
    cmd.add_option("--fine-factor", fine_factor,
                   "fine-grid refinement over dx");
    cmd.add_option("--test-kind", test_kind, "test functions: lip or quad");
    cmd.add_option("--out", out, "CSV output path");
    cmd.add_option("--config", config, "key=value config file (flags win)");
  }

  /// Fill fields the command line left unset from the config file.
  void merge_file(const CLI::App& cmd) {
    if (cmd.count("--config") == 0 && config.empty()) return;
    auto kv = parse_config_file(config);
    auto want = [&](const char* flag) { return cmd.count(flag) == 0; };
    auto str = [&](const char* key, const char* flag, std::string& tgt) {
      auto it = kv.find(key);
      if (it != kv.end() && want(flag)) tgt = it->second;
    };
    auto num = [&](const char* key, const char* flag, double& tgt) {
      auto it = kv.find(key);
      if (it != kv.end() && want(flag)) tgt = parse_double(it->second, key);
    };
    str("problem", "--problem", problem);
    str("method", "--method", method);
    str("test-kind", "--test-kind", test_kind);
    str("out", "--out", out);
    num("dt", "--dt", dt);
    num("dx", "--dx", dx);
    num("T", "--T", T);
    num("c", "--c", c);
    num("A", "--A", A);
    num("L", "--L", L);
    num("a", "--a", a);
    if (auto it = kv.find("fine-factor"); it != kv.end() &&
                                          cmd.count("--fine-factor") == 0)
      fine_factor = parse_long(it->second, "fine-factor");
    if (auto it = kv.find("levels"); it != kv.end() && cmd.count("--levels") == 0)
      levels = parse_long(it->second, "levels");
  }

  ControlProblem make_problem() const {
    if (problem.empty())
      throw std::invalid_argument("missing required option --problem");
    double lq_a = std::isnan(a) ? 0.3 : a;
    double lq_b = std::isnan(L) ? 10.0 : L;
    return problem_by_name(problem, lq_a, lq_b);
  }

  SolverConfig make_config(const ControlProblem& prob, bool need_dt) const {
    SolverConfig cfg = default_config(prob);
    if (need_dt) {
      if (std::isnan(dt))
        throw std::invalid_argument("missing required option --dt");
      cfg.dt = dt;
    } else if (!std::isnan(dt)) {
      cfg.dt = dt;
    }
    if (std::isnan(dx))
      throw std::invalid_argument("missing required option --dx");
    cfg.dx = dx;
    if (!std::isnan(T)) cfg.T = T;
    if (!std::isnan(c)) cfg.c = c;
    if (!std::isnan(A)) cfg.A = A;
    if (fine_factor > 0) cfg.fine_factor = static_cast<std::size_t>(fine_factor);
    if (!method.empty()) cfg.method = method_by_name(method);
    if (!test_kind.empty()) {
      if (test_kind == "lip" || test_kind == "lipschitz")
        cfg.test_kind = ElementKind::lipschitz;
      else if (test_kind == "quad" || test_kind == "quadratic")
        cfg.test_kind = ElementKind::quadratic;
      else
        throw std::invalid_argument("bad --test-kind '" + test_kind +
                                    "' (valid: lip, quad)");
    }
    return cfg;
  }
};

inline void print_config(std::ostream& os, const ControlProblem& prob,
                         const SolverConfig& cfg, bool with_time) {
  os << "problem: " << prob.name << "\n";
  if (with_time) {
    os << "method: " << method_name(cfg.method) << "\n";
    os << "dt: " << cfg.dt << "  T: " << cfg.T
       << "  steps: " << std::llround(cfg.T / cfg.dt) << "\n";
  }
  os << "dx: " << cfg.dx << "  c: " << cfg.c;
  if (cfg.test_kind == ElementKind::lipschitz) os << "  A: " << cfg.A;
  os << "  test: "
     << (cfg.test_kind == ElementKind::lipschitz ? "lip" : "quad")
     << "  fine-factor: " << cfg.fine_factor << "\n";
}

inline int cmd_solve(const Options& opt, std::ostream& os) {
  ControlProblem prob = opt.make_problem();
  SolverConfig cfg = opt.make_config(prob, /*need_dt=*/true);
  RunResult res = run_benchmark(prob, cfg);

  print_config(os, prob, cfg, true);
  os << "trial elements: " << res.report.trial_size
     << "  test elements: " << res.report.test_size << "\n";
  if (prob.has_analytic()) {
    os << "sup error at T: " << res.report.final_error << "\n";
    os << "projection error primal: " << res.report.proj_primal << "\n";
    os << "projection error dual: " << res.report.proj_dual << "\n";
  }
  os << "wall seconds: " << res.report.wall_seconds << "\n";

  if (!opt.out.empty()) {
    GridFunction recon =
        reconstruct(res.disc.trial, res.trajectory.steps.back(), res.disc.fine);
    std::optional<GridFunction> exact;
    if (prob.has_analytic())
      exact = GridFunction::sample_finite(
          res.disc.fine, [&](double x) { return prob.analytic(x, cfg.T); });
    export_csv(recon, exact, opt.out);
    os << "wrote " << opt.out << "\n";
  }
  return 0;
}

inline int cmd_converge(const Options& opt, std::ostream& os) {
  ControlProblem prob = opt.make_problem();
  SolverConfig cfg = opt.make_config(prob, /*need_dt=*/true);
  if (!prob.has_analytic())
    throw std::invalid_argument("converge requires a benchmark with an "
                                "analytic solution");
  std::size_t levels = opt.levels > 0 ? static_cast<std::size_t>(opt.levels) : 3;
  auto rows = convergence_study(prob, cfg, levels);

  print_config(os, prob, cfg, true);
  os << "dt,dx,sup_error,ratio\n";
  for (const auto& r : rows)
    os << format_number(r.dt) << ',' << format_number(r.dx) << ','
       << format_number(r.sup_error) << ',' << format_number(r.ratio) << "\n";

  if (!opt.out.empty()) {
    std::ofstream f(opt.out, std::ios::binary);
    if (!f)
      throw std::runtime_error("converge: cannot open '" + opt.out + "'");
    f << "dt,dx,sup_error,ratio\n";
    for (const auto& r : rows)
      f << format_number(r.dt) << ',' << format_number(r.dx) << ','
        << format_number(r.sup_error) << ',' << format_number(r.ratio) << "\n";
    if (!f) throw std::runtime_error("converge: write failed");
    os << "wrote " << opt.out << "\n";
  }
  return 0;
}

inline int cmd_diagnose(const Options& opt, std::ostream& os) {
  ControlProblem prob = opt.make_problem();
  SolverConfig cfg = opt.make_config(prob, /*need_dt=*/false);
  if (!prob.has_analytic())
    throw std::invalid_argument("diagnose requires a benchmark with an "
                                "analytic solution");
  Discretization disc = make_discretization(prob, cfg);
  GridFunction v_t = GridFunction::sample_finite(
      disc.fine, [&](double x) { return prob.analytic(x, cfg.T); });
  auto [primal, dual] = projection_diagnostics(v_t, disc.trial, disc.test);

  print_config(os, prob, cfg, false);
  os << "T: " << cfg.T << "\n";
  os << "trial elements: " << disc.trial.size()
     << "  test elements: " << disc.test.size() << "\n";
  os << "projection error primal: " << primal << "\n";
  os << "projection error dual: " << dual << "\n";
  return 0;
}

}  // namespace cli_detail

/** Entry point behind the command line tool. Returns 0 on success,
    2 on usage errors, 1 on runtime failures. */
inline int run_cli(int argc, const char* const* argv, std::ostream& os = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Max-plus finite element solver for finite-horizon optimal "
               "control / Hamilton-Jacobi equations"};
  app.require_subcommand(1);

  cli_detail::Options solve_opt, conv_opt, diag_opt;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "run one benchmark and report errors");
  solve_opt.add_common(*solve_cmd);
  CLI::App* conv_cmd = app.add_subcommand(
      "converge", "refinement study: dt/2^k, dx/4^k per level");
  conv_opt.add_common(*conv_cmd);
  conv_cmd->add_option("--levels", conv_opt.levels, "number of levels");
  CLI::App* diag_cmd = app.add_subcommand(
      "diagnose", "projection errors of the analytic solution at T");
  diag_opt.add_common(*diag_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, os, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, os, err);
    return 2;
  }

  try {
    if (solve_cmd->parsed()) {
      solve_opt.merge_file(*solve_cmd);
      return cli_detail::cmd_solve(solve_opt, os);
    }
    if (conv_cmd->parsed()) {
      conv_opt.merge_file(*conv_cmd);
      return cli_detail::cmd_converge(conv_opt, os);
    }
    diag_opt.merge_file(*diag_cmd);
    return cli_detail::cmd_diagnose(diag_opt, os);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int run_cli(const std::vector<std::string>& args,
                   std::ostream& os = std::cout, std::ostream& err = std::cerr) {
  std::vector<const char*> argv;
  argv.push_back("tropical-hj");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), os, err);
}

}  // namespace mpfem

#endif  // MPFEM_CLI_HPP
