// Acceptance suite: one PASS/FAIL line per criterion, detail lines indented.
// Exit status is nonzero when any criterion fails.

#include "bhtopo/diagnostics.hpp"
#include "bhtopo/io.hpp"
#include "bhtopo/solver.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace bhtopo;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { details.push_back("info  " + what); }
};

std::string fmt(const char* pattern, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

Vector scalar(double v) { return Vector::Constant(1, v); }

// ---------------------------------------------------------------- criterion 1

Verdict scalar_homotopy() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const HomotopyProblem h = global_homotopy(CubicExample::residual(), CubicExample::jacobian(), scalar(-1.2));
  StepController controller(0.25, 0.25);
  controller.set_stops({0.4, 0.65, 0.9});
  std::vector<std::pair<double, double>> path;
  const TraceResult r = trace_homotopy(h, scalar(-1.2), controller, NewtonConfig{}, 0,
                                       [&](const Vector& x, const TraceRecord& rec) { path.emplace_back(rec.t, x[0]); });
  const double expected[3][2] = {{0.4, -1.0420}, {0.65, -0.9147}, {0.9, -0.7399}};
  for (const auto& [t, target] : expected) {
    double x = std::nan("");
    for (const auto& [tt, xx] : path) {
      if (tt == t) x = xx;
    }
    v.check(std::abs(x - target) <= 1e-3, fmt("x(%.2f) = %.6f, reference %.4f, |diff| <= 1e-3", t, x, target));
  }
  const double root = (-1.0 - std::sqrt(17.0)) / 8.0;
  v.check(std::abs(r.x[0] - root) <= 1e-6, fmt("endpoint %.10f vs (-1-sqrt 17)/8 = %.10f", r.x[0], root));
  v.check(std::abs(r.x[0] - (-0.6404)) <= 1e-4, fmt("endpoint vs reference -0.6404"));
  const double elapsed = seconds_since(start);
  v.check(elapsed < 1.0, fmt("runtime %.3f s < 1 s", elapsed));
  return v;
}

// ---------------------------------------------------------------- criterion 2

Verdict scalar_barrier() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const BoxConstraints box = BoxConstraints::uniform(1, QuarticExample::lower, QuarticExample::upper);
  const BarrierResult r = run_pd_barrier(QuarticExample::objective(), scalar(0.25), box,
                                         listed_then_geometric({2.9, 1.1, 0.4, 0.1}, 0.5), 5.0, 1e-6);
  const double mus[] = {2.9, 1.1, 0.4, 0.1};
  const double reference[] = {0.2008, 0.0315, -0.2456, -0.41};
  for (int k = 0; k < 4; ++k) {
    const double mu = mus[k];
    const double golden = oracle::golden_section(
        [mu](double x) { return QuarticExample::f(x) - mu * (std::log(x + 0.5) + std::log(1.0 - x)); },
        -0.5 + 1e-12, 1.0 - 1e-12, 1e-12);
    const bool found = static_cast<int>(r.history.size()) > k && r.history[k].mu == mu;
    const double x = found ? r.history[k].x[0] : std::nan("");
    v.check(found && std::abs(x - reference[k]) <= 1e-3,
            fmt("mu = %.1f: x = %.6f, reference %.4f, |diff| <= 1e-3", mu, x, reference[k]));
    v.check(found && std::abs(x - golden) <= 1e-6, fmt("mu = %.1f: golden-section minimizer %.8f, |diff| <= 1e-6", mu, golden));
  }
  const bool reached = !r.history.empty() && r.history.back().mu == 1e-6;
  v.check(reached && std::abs(r.x[0] + 0.5) <= 1e-3, fmt("mu = 1e-6: x = %.8f within 1e-3 of -0.5", r.x[0]));
  const double elapsed = seconds_since(start);
  v.check(elapsed < 1.0, fmt("runtime %.3f s < 1 s", elapsed));
  return v;
}

// ---------------------------------------------------------------- criterion 3

Verdict derivative_consistency() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const DomainSpec spec = bridge_domain();
  const Discretization disc(build_structured_mesh(spec, 20, 8), spec);
  const Lagrangian lag(disc, MaterialModel{}, ProblemParams{});
  const int n = disc.n(), l = disc.l(), dim = n + 2 * l;

  auto split = [&](const Vector& z) {
    return std::tuple<Vector, Vector, Vector>{z.head(n), z.segment(n, l), z.tail(l)};
  };
  auto value = [&](const Vector& z) {
    const auto [r, u, p] = split(z);
    return lag.value(r, u, p);
  };
  auto gradient = [&](const Vector& z) {
    const auto [r, u, p] = split(z);
    const GradientBlocks g = lag.gradient(r, u, p);
    Vector out(dim);
    out << g.rho, g.u, g.p;
    return out;
  };
  auto hessian = [&](const Vector& z) {
    const auto [r, u, p] = split(z);
    const HessianBlocks h = lag.hessian(r, u, p);
    DenseMatrix a = DenseMatrix::Zero(dim, dim);
    a.block(0, 0, n, n) = h.rr.to_dense();
    a.block(0, n, n, l) = h.ru.to_dense();
    a.block(0, n + l, n, l) = h.rp.to_dense();
    a.block(n, 0, l, n) = h.ru.to_dense().transpose();
    a.block(n, n + l, l, l) = h.up.to_dense();
    a.block(n + l, 0, l, n) = h.rp.to_dense().transpose();
    a.block(n + l, n, l, l) = h.up.to_dense().transpose();
    return a;
  };

  const char* names[] = {"rho", "u", "p"};
  const int off[] = {0, n, n + l};
  const int size[] = {n, l, l};
  double grad_err[3] = {0, 0, 0};
  double hess_err[3][3] = {};

  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> density(0.05, 0.95);
  std::normal_distribution<double> normal;
  constexpr int kPoints = 5;
  for (int point = 0; point < kPoints; ++point) {
    Vector z(dim);
    for (int i = 0; i < n; ++i) z[i] = density(rng);
    for (int i = n; i < dim; ++i) z[i] = normal(rng);

    const Vector g = gradient(z);
    const DenseMatrix a = hessian(z);
    Vector g_fd(dim);
    DenseMatrix h_fd(dim, dim);
    for (int k = 0; k < dim; ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(z[k]));
      Vector zp = z, zm = z;
      zp[k] += step;
      zm[k] -= step;
      g_fd[k] = (value(zp) - value(zm)) / (2 * step);
      h_fd.col(k) = (gradient(zp) - gradient(zm)) / (2 * step);
    }
    for (int b = 0; b < 3; ++b) {
      const double e = (g_fd.segment(off[b], size[b]) - g.segment(off[b], size[b])).norm() /
                       g.segment(off[b], size[b]).norm();
      grad_err[b] = std::max(grad_err[b], e);
      for (int c = 0; c < 3; ++c) {
        const auto ours = a.block(off[b], off[c], size[b], size[c]);
        const auto ref = h_fd.block(off[b], off[c], size[b], size[c]);
        // Blocks that vanish identically are measured against the whole Hessian.
        const double scale = ours.norm() > 0.0 ? ours.norm() : a.norm();
        hess_err[b][c] = std::max(hess_err[b][c], (ours - ref).norm() / scale);
      }
    }
  }
  for (int b = 0; b < 3; ++b) {
    v.check(grad_err[b] <= 1e-6, fmt("dL/d%s: max relative error %.2e <= 1e-6", names[b], grad_err[b]));
  }
  for (int b = 0; b < 3; ++b) {
    for (int c = 0; c < 3; ++c) {
      v.check(hess_err[b][c] <= 1e-5,
              fmt("d2L/d%s d%s: max relative error %.2e <= 1e-5", names[b], names[c], hess_err[b][c]));
    }
  }
  const double elapsed = seconds_since(start);
  v.note(fmt("nx=20 ny=8, %d random points, %d unknowns, full columnwise central differences", kPoints, dim));
  v.check(elapsed < 30.0, fmt("runtime %.1f s < 30 s", elapsed));
  return v;
}

// ---------------------------------------------------------------- criterion 4

Verdict homotopy_map() {
  Verdict v;
  const SolverConfig cfg;
  const DomainSpec spec = bridge_domain();
  const Discretization disc(build_structured_mesh(spec, cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.diagonal), spec);
  const Lagrangian lag(disc, cfg.material, cfg.problem);
  const BarrierHomotopy map(lag, cfg.barrier.schedule);
  const InitialState s = map.initialize(cfg.rho0);

  const double r0 = map.residual(s.point, s.anchor, 0.0).norm();
  v.check(r0 <= 1e-10, fmt("|H(x0, 0)| = %.3e <= 1e-10", r0));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.05, 0.95), dual(0.1, 10.0);
  KktPoint y = s.point;
  for (int i = 0; i < map.n(); ++i) {
    y.rho[i] = unit(rng);
    y.z_lower[i] = dual(rng);
    y.z_upper[i] = dual(rng);
  }
  for (const KktPoint* x : std::initializer_list<const KktPoint*>{&s.point, &y}) {
    const double d = (map.residual(*x, s.anchor, 1.0) - map.unanchored_residual(*x, cfg.barrier.schedule.mu_inf))
                         .lpNorm<Eigen::Infinity>();
    v.check(d <= 1e-14, fmt("max |H(x, 1) - F(x; mu_inf)| = %.3e <= 1e-14 (%s point)", d,
                            x == &s.point ? "initial" : "random"));
  }
  return v;
}

// ---------------------------------------------------------------- criterion 5

struct EndState {
  double residual, tolerance, min_rho, max_rho, complementarity, intermediate, j0, j1, symmetry;
  int accepted, total;
};

EndState end_state(const SolverConfig& cfg, const SolveResult& r) {
  EndState e{};
  const KktPoint& x = r.final;
  const double mu = cfg.barrier.schedule.mu_inf;
  e.residual = r.final_residual;
  e.tolerance = r.tolerance;
  e.min_rho = x.rho.minCoeff();
  e.max_rho = x.rho.maxCoeff();
  e.complementarity = std::max((x.z_lower.array() * x.rho.array() - mu).abs().maxCoeff(),
                               (x.z_upper.array() * (1.0 - x.rho.array()) - mu).abs().maxCoeff());
  int intermediate = 0;
  for (int i = 0; i < x.rho.size(); ++i) intermediate += x.rho[i] > 0.1 && x.rho[i] < 0.9;
  e.intermediate = static_cast<double>(intermediate) / static_cast<double>(x.rho.size());
  e.j0 = r.initial_objective;
  e.j1 = r.final_objective;
  const int nx = cfg.mesh.nx;
  for (int j = 0; j <= cfg.mesh.ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      e.symmetry = std::max(e.symmetry, std::abs(x.rho[j * (nx + 1) + i] - x.rho[j * (nx + 1) + nx - i]));
    }
  }
  e.accepted = r.trace.accepted_count();
  e.total = static_cast<int>(r.trace.records.size());
  return e;
}

void check_end_state(Verdict& v, const std::string& tag, const EndState& e, bool with_symmetry) {
  v.check(e.residual <= e.tolerance, fmt("%s (a) |F(x; mu_inf)| = %.3e <= tol %.3e", tag.c_str(), e.residual, e.tolerance));
  v.check(e.min_rho > 0.0 && e.max_rho < 1.0, fmt("%s (b) rho in [%.3e, 1 - %.3e]", tag.c_str(), e.min_rho, 1.0 - e.max_rho));
  v.check(e.complementarity <= 10 * e.tolerance,
          fmt("%s (c) max |z c - mu_inf| = %.3e <= 10 tol", tag.c_str(), e.complementarity));
  v.check(e.intermediate <= 0.15, fmt("%s (d) intermediate fraction %.4f <= 0.15", tag.c_str(), e.intermediate));
  v.check(e.j1 < e.j0, fmt("%s (e) J: %.6f -> %.6f", tag.c_str(), e.j0, e.j1));
  if (with_symmetry) {
    v.check(e.symmetry <= 1e-3, fmt("%s (f) symmetry defect %.3e <= 1e-3", tag.c_str(), e.symmetry));
  } else {
    v.note(fmt("%s symmetry defect %.3e (triangulation is not mirror symmetric)", tag.c_str(), e.symmetry));
  }
  const bool factor3 = e.accepted >= 26 / 3.0 && e.accepted <= 26 * 3 && e.total >= 47 / 3.0 && e.total <= 47 * 3;
  v.check(factor3, fmt("%s steps: %d accepted / %d total (reference 26 / 47, within a factor 3)", tag.c_str(),
                       e.accepted, e.total));
}

struct DefaultRun {
  SolverConfig cfg;
  std::optional<SolveResult> result;
  std::string error;
};

Verdict end_to_end(DefaultRun& run_a) {
  Verdict v;
  auto start = std::chrono::steady_clock::now();
  try {
    run_a.result = solve_and_write(run_a.cfg);
  } catch (const std::exception& e) {
    run_a.error = e.what();
  }
  const double time_a = seconds_since(start);
  if (run_a.result) {
    check_end_state(v, "A", end_state(run_a.cfg, *run_a.result), false);
  } else {
    v.check(false, "A: " + run_a.error);
  }
  v.note(fmt("A: default configuration, uniform diagonals, %.1f s", time_a));

  SolverConfig b = run_a.cfg;
  b.mesh.diagonal = DiagonalPattern::Mirrored;
  b.barrier.fraction_to_boundary = true;
  b.output.dir = (fs::path(run_a.cfg.output.dir).parent_path() / "run_b").string();
  start = std::chrono::steady_clock::now();
  try {
    const SolveResult r = solve_and_write(b);
    check_end_state(v, "B", end_state(b, r), true);
  } catch (const std::exception& e) {
    v.check(false, std::string("B: ") + e.what());
  }
  const double time_b = seconds_since(start);
  v.note(fmt("B: same parameters, mirrored diagonals, fraction-to-boundary damping, %.1f s", time_b));
  v.check(time_a + time_b <= 600.0, fmt("runtime %.1f s <= 600 s", time_a + time_b));
  return v;
}

// ---------------------------------------------------------------- criterion 6

Verdict step_halving() {
  Verdict v;
  SolverConfig cfg;
  cfg.stepping.dt_init = 0.9;
  cfg.stepping.dt_max = 0.9;
  SolveTrace trace;
  try {
    trace = solve(cfg).trace;
    v.note("run reached t = 1");
  } catch (const StepUnderflowError& e) {
    trace = e.trace();
    v.note(fmt("run stopped by step underflow at t = %.9f", e.last_t()));
  }
  const auto& recs = trace.records;
  v.check(!recs.empty() && recs.front().dt == 0.9, fmt("first attempted dt = %.3g", recs.empty() ? 0.0 : recs.front().dt));
  v.check(trace.rejected_count() >= 1, fmt("%d rejected of %zu attempted steps", trace.rejected_count(), recs.size()));
  if (!recs.empty() && !recs.front().accepted) {
    v.note(fmt("first step rejected: %s", recs.front().note.c_str()));
  }
  // The recorded dt is t_next - t in floating point, so exact halving holds up
  // to the rounding of t itself.
  int followed = 0;
  bool halves = true;
  for (std::size_t k = 0; k + 1 < recs.size(); ++k) {
    if (recs[k].accepted) continue;
    ++followed;
    const double t_prev = recs[k].t - recs[k].dt;
    const double slack = 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_prev));
    halves = halves && std::abs(recs[k + 1].dt - 0.5 * recs[k].dt) <= slack;
  }
  v.check(followed >= 1 && halves, fmt("every retry after a rejection (%d) attempts exactly half the rejected dt", followed));
  if (recs.size() >= 2) {
    v.note(fmt("first two attempts: dt = %.17g then %.17g", recs[0].dt, recs[1].dt));
  }
  return v;
}

// ---------------------------------------------------------------- criterion 7

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism(const DefaultRun& run_a) {
  Verdict v;
  if (!run_a.result) {
    v.check(false, "first default run failed: " + run_a.error);
    return v;
  }
  SolverConfig again = run_a.cfg;
  again.output.dir = (fs::path(run_a.cfg.output.dir).parent_path() / "run_a_repeat").string();
  fs::remove_all(again.output.dir);
  try {
    solve_and_write(again);
  } catch (const std::exception& e) {
    v.check(false, std::string("second default run failed: ") + e.what());
    return v;
  }
  std::vector<std::string> first, second;
  for (const auto& e : fs::directory_iterator(run_a.cfg.output.dir)) first.push_back(e.path().filename().string());
  for (const auto& e : fs::directory_iterator(again.output.dir)) second.push_back(e.path().filename().string());
  std::sort(first.begin(), first.end());
  std::sort(second.begin(), second.end());
  v.check(first == second && !first.empty(), fmt("same %zu output files in both runs", first.size()));
  int identical = 0;
  for (const std::string& name : first) {
    const bool same = slurp(fs::path(run_a.cfg.output.dir) / name) == slurp(fs::path(again.output.dir) / name);
    identical += same;
    if (!same) v.check(false, name + " differs");
  }
  v.check(identical == static_cast<int>(first.size()), fmt("%d of %zu files byte-identical", identical, first.size()));
  return v;
}

}  // namespace

int main() {
  const fs::path out = fs::current_path() / "acceptance_out";
  fs::remove_all(out);
  fs::create_directories(out);

  DefaultRun run_a;
  run_a.cfg.output.dir = (out / "run_a").string();

  struct Criterion {
    int id;
    std::string title;
    std::function<Verdict()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "scalar homotopy oracle (cubic path and root)", scalar_homotopy},
      {2, "scalar barrier oracle (quartic subproblem minimizers)", scalar_barrier},
      {3, "Lagrangian derivatives vs finite differences", derivative_consistency},
      {4, "homotopy map anchor bookkeeping", homotopy_map},
      {5, "end-to-end 60x20 solve (A: defaults, a-e; B: mirrored mesh with damping, a-f)",
       [&] { return end_to_end(run_a); }},
      {6, "rejected steps halve dt (dt_init = 0.9)", step_halving},
      {7, "repeated default runs are byte-identical", [&] { return determinism(run_a); }},
  };

  bool all = true;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.check(false, std::string("unexpected exception: ") + e.what());
    }
    all = all && v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << ": " << c.title << "\n";
    for (const std::string& d : v.details) std::cout << "        " << d << "\n";
    std::cout.flush();
  }
  return all ? 0 : 1;
}
