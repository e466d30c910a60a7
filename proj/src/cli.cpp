#include "bhtopo/cli.hpp"

#include "bhtopo/config.hpp"
#include "bhtopo/diagnostics.hpp"
#include "bhtopo/io.hpp"
#include "bhtopo/solver.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <random>

namespace bhtopo {

namespace {

constexpr int kUsageError = 2;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

SolverConfig load_config(const std::string& positional, const std::string& option) {
  if (!positional.empty() && !option.empty() && positional != option) {
    throw ConfigError("config given twice: '" + positional + "' and '" + option + "'");
  }
  const std::string& path = positional.empty() ? option : positional;
  return path.empty() ? SolverConfig{} : parse_config(path);
}

int cmd_solve(SolverConfig cfg, std::ostream& out, bool verbose) {
  out << "solving on a " << cfg.mesh.nx << "x" << cfg.mesh.ny << " grid, output in "
      << cfg.output.dir << "\n";
  const SolveResult r = solve_and_write(cfg, verbose ? &out : nullptr);
  out << "accepted steps: " << r.trace.accepted_count() << ", rejected: " << r.trace.rejected_count()
      << ", total: " << r.trace.records.size() << "\n";
  out << fmt("objective: %.10g -> %.10g\n", r.initial_objective, r.final_objective);
  out << fmt("final residual %.3e (tolerance %.3e)\n", r.final_residual, r.tolerance);
  return 0;
}

int cmd_scalar_demos(std::ostream& out) {
  bool all = true;
  for (const DemoCheck& c : run_scalar_demos()) {
    all = all && c.pass();
    out << (c.pass() ? "PASS  " : "FAIL  ") << c.name
        << fmt(" = %.6f (expected %.6f, tolerance %.0e)\n", c.value, c.expected, c.tolerance);
  }
  return all ? 0 : 1;
}

int cmd_check_derivatives(const SolverConfig& cfg, std::ostream& out) {
  const DomainSpec domain = bridge_domain();
  const Discretization disc(build_structured_mesh(domain, cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.diagonal),
                            domain);
  const Lagrangian lag(disc, cfg.material, cfg.problem);
  const int n = disc.n();
  const int l = disc.l();

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> density(0.05, 0.95);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> worst(12, 0.0);
  std::vector<std::string> names;

  constexpr int kPoints = 4;
  for (int k = 0; k < kPoints; ++k) {
    Vector rho(n), u(l), p(l);
    for (int i = 0; i < n; ++i) rho[i] = density(rng);
    for (int i = 0; i < l; ++i) u[i] = normal(rng);
    for (int i = 0; i < l; ++i) p[i] = normal(rng);
    const auto errors = directional_derivative_check(lag, rho, u, p, 3, rng());
    names.clear();
    for (std::size_t b = 0; b < errors.size(); ++b) {
      names.push_back(errors[b].block);
      worst[b] = std::max(worst[b], errors[b].relative_error);
    }
  }

  bool ok = true;
  out << "max relative errors over " << kPoints << " random points:\n";
  for (std::size_t b = 0; b < names.size(); ++b) {
    const double limit = names[b].rfind("dL/", 0) == 0 ? 1e-6 : 1e-5;
    const bool pass = worst[b] <= limit;
    ok = ok && pass;
    out << (pass ? "PASS  " : "FAIL  ") << names[b] << fmt(" %.3e (limit %.0e)\n", worst[b], limit);
  }
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Barrier-homotopy topology optimization of a loaded beam", "bhtopo"};
  app.require_subcommand(1);

  std::string solve_config, solve_config_opt, out_dir, snapshots;
  int predictor = -1;
  bool verbose = false;
  CLI::App* solve = app.add_subcommand("solve", "Run the full continuation and write results");
  solve->add_option("path", solve_config, "Config file (key = value lines)");
  solve->add_option("--config", solve_config_opt, "Config file (alternative to the positional)");
  solve->add_option("--out-dir", out_dir, "Output directory (overrides output.dir)");
  solve->add_option("--snapshots", snapshots, "Comma-separated t values for density snapshots");
  solve->add_option("--predictor", predictor, "Predictor order")->check(CLI::IsMember({0, 1}));
  solve->add_flag("--verbose", verbose, "Report every accepted step");

  app.add_subcommand("scalar-demos", "Run the scalar homotopy and barrier examples");

  std::string deriv_config, deriv_config_opt;
  CLI::App* deriv =
      app.add_subcommand("check-derivatives", "Compare Lagrangian derivatives with finite differences");
  deriv->add_option("path", deriv_config, "Config file");
  deriv->add_option("--config", deriv_config_opt, "Config file (alternative to the positional)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "bhtopo: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    if (solve->parsed()) {
      SolverConfig cfg = load_config(solve_config, solve_config_opt);
      if (!out_dir.empty()) cfg.output.dir = out_dir;
      if (!snapshots.empty()) cfg.output.snapshots = parse_number_list(snapshots);
      if (predictor >= 0) cfg.predictor_order = predictor;
      cfg.validate();
      return cmd_solve(cfg, out, verbose);
    }
    if (deriv->parsed()) return cmd_check_derivatives(load_config(deriv_config, deriv_config_opt), out);
    return cmd_scalar_demos(out);
  } catch (const ConfigError& e) {
    err << "bhtopo: " << e.what() << "\n";
    return kUsageError;
  } catch (const StepUnderflowError& e) {
    err << "bhtopo: " << e.what() << " after " << e.trace().records.size()
        << " attempted steps; partial param_history.csv written\n";
    return 1;
  } catch (const std::exception& e) {
    err << "bhtopo: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bhtopo
