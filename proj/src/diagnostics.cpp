#include "bhtopo/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace bhtopo {

VectorMap CubicExample::residual() {
  return [](const Vector& x) { return Vector::Constant(1, f(x[0])); };
}

JacobianMap CubicExample::jacobian() {
  return [](const Vector& x) { return SparseMatrix::diagonal(Vector::Constant(1, df(x[0]))); };
}

SmoothObjective QuarticExample::objective() {
  SmoothObjective o;
  o.value = [](const Vector& x) { return f(x[0]); };
  o.gradient = [](const Vector& x) { return Vector::Constant(1, df(x[0])); };
  o.hessian = [](const Vector& x) { return SparseMatrix::diagonal(Vector::Constant(1, d2f(x[0]))); };
  return o;
}

std::function<double(double)> listed_then_geometric(std::vector<double> steps, double alpha) {
  std::sort(steps.begin(), steps.end(), std::greater<>());
  const auto geometric = geometric_update(alpha);
  return [steps = std::move(steps), geometric](double mu) {
    for (double s : steps) {
      if (s < mu) return s;
    }
    return geometric(mu);
  };
}

bool DemoCheck::pass() const { return std::abs(value - expected) <= tolerance; }

std::vector<DemoCheck> run_scalar_demos() {
  std::vector<DemoCheck> out;

  const Vector x0 = Vector::Constant(1, -1.2);
  const HomotopyProblem cubic =
      global_homotopy(CubicExample::residual(), CubicExample::jacobian(), x0);
  StepController controller(0.25, 0.25);
  controller.set_stops({0.4, 0.65, 0.9});
  std::vector<std::pair<double, double>> path;
  const TraceResult traced = trace_homotopy(
      cubic, x0, controller, NewtonConfig{}, 0,
      [&](const Vector& x, const TraceRecord& r) { path.emplace_back(r.t, x[0]); });
  auto at = [&](double t) {
    for (const auto& [ti, xi] : path) {
      if (ti == t) return xi;
    }
    return std::nan("");
  };
  out.push_back({"cubic x(0.4)", at(0.4), -1.0420, 1e-3});
  out.push_back({"cubic x(0.65)", at(0.65), -0.9147, 1e-3});
  out.push_back({"cubic x(0.9)", at(0.9), -0.7399, 1e-3});
  out.push_back({"cubic x(1)", traced.x[0], (-1.0 - std::sqrt(17.0)) / 8.0, 1e-6});

  const BoxConstraints box =
      BoxConstraints::uniform(1, QuarticExample::lower, QuarticExample::upper);
  const BarrierResult barrier =
      run_pd_barrier(QuarticExample::objective(), box.analytic_center(), box,
                     listed_then_geometric({2.9, 1.1, 0.4, 0.1}), 5.0, 1e-6);
  auto minimizer_at = [&](double mu) {
    for (const BarrierSubproblem& s : barrier.history) {
      if (s.mu == mu) return s.x[0];
    }
    return std::nan("");
  };
  out.push_back({"quartic x(mu=2.9)", minimizer_at(2.9), 0.2008, 1e-3});
  out.push_back({"quartic x(mu=1.1)", minimizer_at(1.1), 0.0315, 1e-3});
  out.push_back({"quartic x(mu=0.4)", minimizer_at(0.4), -0.2456, 1e-3});
  out.push_back({"quartic x(mu=0.1)", minimizer_at(0.1), -0.41, 1e-3});
  out.push_back({"quartic x(mu=1e-6)", barrier.x[0], -0.5, 1e-3});
  return out;
}

namespace {

struct Point3 {
  Vector rho, u, p;
  Vector& block(int b) { return b == 0 ? rho : (b == 1 ? u : p); }
};

const Vector& block_of(const GradientBlocks& g, int b) { return b == 0 ? g.rho : (b == 1 ? g.u : g.p); }

Vector hessian_times(const HessianBlocks& h, int row, int col, const Vector& v) {
  // Rows and columns ordered (rho, u, p); (u,u) and (p,p) vanish.
  if (row == 0 && col == 0) return h.rr * v;
  if (row == 0 && col == 1) return h.ru * v;
  if (row == 0 && col == 2) return h.rp * v;
  if (row == 1 && col == 0) return h.ru.transpose() * v;
  if (row == 2 && col == 0) return h.rp.transpose() * v;
  if ((row == 1 && col == 2) || (row == 2 && col == 1)) return h.up * v;
  return Vector::Zero(h.up.rows());
}

}  // namespace

std::vector<BlockError> directional_derivative_check(const Lagrangian& lag, const Vector& rho,
                                                     const Vector& u, const Vector& p,
                                                     int directions, std::uint64_t seed) {
  static const char* kNames[] = {"rho", "u", "p"};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Point3 base{rho, u, p};
  const GradientBlocks g = lag.gradient(rho, u, p);
  const HessianBlocks h = lag.hessian(rho, u, p);
  const double step = 1e-6;

  double grad_err[3] = {0, 0, 0};
  double hess_err[3][3] = {};
  for (int d = 0; d < directions; ++d) {
    for (int col = 0; col < 3; ++col) {
      Point3 plus = base;
      Point3 minus = base;
      Vector v = plus.block(col);
      for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
      v.normalize();
      plus.block(col) += step * v;
      minus.block(col) -= step * v;

      const double fd = (lag.value(plus.rho, plus.u, plus.p) - lag.value(minus.rho, minus.u, minus.p)) /
                        (2.0 * step);
      const double an = block_of(g, col).dot(v);
      grad_err[col] = std::max(grad_err[col], std::abs(fd - an) / std::max(block_of(g, col).norm(), 1e-300));

      const GradientBlocks gp = lag.gradient(plus.rho, plus.u, plus.p);
      const GradientBlocks gm = lag.gradient(minus.rho, minus.u, minus.p);
      for (int row = 0; row < 3; ++row) {
        const Vector fdv = (block_of(gp, row) - block_of(gm, row)) / (2.0 * step);
        const Vector anv = hessian_times(h, row, col, v);
        const double scale = anv.norm();
        const double err = scale > 0.0 ? (fdv - anv).norm() / scale : fdv.norm();
        hess_err[row][col] = std::max(hess_err[row][col], err);
      }
    }
  }

  std::vector<BlockError> out;
  for (int b = 0; b < 3; ++b) out.push_back({std::string("dL/d") + kNames[b], grad_err[b]});
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out.push_back({std::string("d2L/d") + kNames[r] + "d" + kNames[c], hess_err[r][c]});
    }
  }
  return out;
}

}  // namespace bhtopo
