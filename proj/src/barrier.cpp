#include "bhtopo/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace bhtopo {

BoxConstraints BoxConstraints::uniform(int n, double a, double b) {
  return {Vector::Constant(n, a), Vector::Constant(n, b)};
}

void BoxConstraints::validate() const {
  if (lower.size() != upper.size()) throw DimensionError("box: bound sizes differ");
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw std::invalid_argument("box: need lower < upper");
  }
}

bool BoxConstraints::strictly_inside(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  }
  return true;
}

DualPair DualPair::central(const BoxConstraints& box, const Vector& x, double mu) {
  return {(mu / box.lower_slack(x).array()).matrix(), (mu / box.upper_slack(x).array()).matrix()};
}

bool DualPair::positive() const {
  return (lower.array() > 0.0).all() && (upper.array() > 0.0).all();
}

void BarrierSchedule::validate() const {
  if (!(mu_inf > 0.0)) throw std::invalid_argument("barrier: mu_inf must be positive");
  if (!(mu0 > mu_inf)) throw std::invalid_argument("barrier: mu0 must exceed mu_inf");
}

double BarrierSchedule::mu(double t) const {
  if (kind == ScheduleKind::Geometric) return mu0 * std::pow(mu_inf / mu0, t);
  return t * mu_inf + (1.0 - t) * mu0;
}

double BarrierSchedule::dmu_dt(double t) const {
  if (kind == ScheduleKind::Geometric) return mu(t) * std::log(mu_inf / mu0);
  return mu_inf - mu0;
}

std::string to_string(ScheduleKind kind) {
  return kind == ScheduleKind::Geometric ? "geometric" : "linear";
}

ScheduleKind schedule_kind_from_string(const std::string& name) {
  if (name == "linear") return ScheduleKind::Linear;
  if (name == "geometric") return ScheduleKind::Geometric;
  throw std::invalid_argument("unknown barrier schedule '" + name + "'");
}

double barrier_value(const std::function<double(const Vector&)>& f, const VectorMap& c,
                     const Vector& x, double mu) {
  const Vector cx = c(x);
  double logs = 0.0;
  for (Eigen::Index i = 0; i < cx.size(); ++i) {
    if (!(cx[i] > 0.0)) {
      throw NonInteriorError("barrier: constraint " + std::to_string(i) + " is not strictly positive");
    }
    logs += std::log(cx[i]);
  }
  return f(x) - mu * logs;
}

namespace {

void check_box_sizes(const Vector& x, const BoxConstraints& box, const DualPair& duals) {
  const auto n = x.size();
  if (box.lower.size() != n || box.upper.size() != n || duals.lower.size() != n ||
      duals.upper.size() != n) {
    throw DimensionError("box system: inconsistent vector sizes");
  }
}

}  // namespace

Vector pd_residual_box(const Vector& grad_f, const Vector& x, const BoxConstraints& box,
                       const DualPair& duals, double mu) {
  check_box_sizes(x, box, duals);
  if (grad_f.size() != x.size()) throw DimensionError("box system: gradient size");
  const auto n = x.size();
  Vector r(3 * n);
  r.head(n) = grad_f - duals.lower + duals.upper;
  r.segment(n, n) = (duals.lower.array() * box.lower_slack(x).array() - mu).matrix();
  r.tail(n) = (duals.upper.array() * box.upper_slack(x).array() - mu).matrix();
  return r;
}

BlockSystem pd_newton_matrix_box(const SparseMatrix& hess_f, const Vector& x,
                                 const BoxConstraints& box, const DualPair& duals) {
  check_box_sizes(x, box, duals);
  const int n = static_cast<int>(x.size());
  BlockSystem sys({{"x", n}, {"z_lower", n}, {"z_upper", n}});
  sys.set(0, 0, hess_f);
  sys.set_diagonal(0, 1, Vector::Constant(n, -1.0));
  sys.set_diagonal(0, 2, Vector::Ones(n));
  sys.set_diagonal(1, 0, duals.lower);
  sys.set_diagonal(1, 1, box.lower_slack(x));
  sys.set_diagonal(2, 0, -duals.upper);
  sys.set_diagonal(2, 2, box.upper_slack(x));
  return sys;
}

BoxStep pd_newton_step_box(const SparseMatrix& hess_f, const Vector& grad_f, const Vector& x,
                           const BoxConstraints& box, const DualPair& duals, double mu) {
  const BlockSystem sys = pd_newton_matrix_box(hess_f, x, box, duals);
  const Vector step = solve_direct(sys.assemble(), -pd_residual_box(grad_f, x, box, duals, mu));
  return {sys.segment(step, 0), sys.segment(step, 1), sys.segment(step, 2)};
}

double fraction_to_boundary(const Vector& value, const Vector& step, double tau) {
  if (value.size() != step.size()) throw DimensionError("fraction_to_boundary: size mismatch");
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    if (step[i] < 0.0) alpha = std::min(alpha, -tau * value[i] / step[i]);
  }
  return alpha;
}

BarrierDivergedError::BarrierDivergedError(double mu, const std::string& reason,
                                           std::vector<BarrierSubproblem> history)
    : std::runtime_error("barrier subproblem at mu = " + std::to_string(mu) +
                         " failed: " + reason),
      mu_(mu),
      history_(std::move(history)) {}

std::function<double(double)> geometric_update(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("geometric_update: alpha must lie in (0, 1)");
  }
  return [alpha](double mu) { return alpha * mu; };
}

BarrierResult run_pd_barrier(const SmoothObjective& f, const Vector& x0,
                             const BoxConstraints& box,
                             const std::function<double(double)>& theta, double mu0,
                             double mu_inf, const BarrierRunConfig& cfg) {
  box.validate();
  cfg.newton.validate();
  BarrierSchedule{mu0, mu_inf}.validate();
  if (!box.strictly_inside(x0)) throw NonInteriorError("barrier: x0 is not strictly inside the box");

  const auto n = x0.size();
  auto split = [n](const Vector& w) {
    return std::tuple<Vector, DualPair>{w.head(n), DualPair{w.segment(n, n), w.tail(n)}};
  };

  double mu = mu0;
  HomotopyProblem sub;
  sub.dimension = static_cast<int>(3 * n);
  sub.residual = [&](const Vector& w, double) {
    const auto [x, z] = split(w);
    return pd_residual_box(f.gradient(x), x, box, z, mu);
  };
  sub.jacobian_x = [&](const Vector& w, double) {
    const auto [x, z] = split(w);
    return pd_newton_matrix_box(f.hessian(x), x, box, z).assemble();
  };
  sub.admissible = [&](const Vector& w) {
    const auto [x, z] = split(w);
    return box.strictly_inside(x) && z.positive();
  };
  if (cfg.fraction_to_boundary) {
    const double tau = cfg.boundary_fraction;
    sub.step_length = [&box, n, tau](const Vector& w, const Vector& dw) {
      const Vector x = w.head(n);
      const Vector dx = dw.head(n);
      double alpha = fraction_to_boundary(box.lower_slack(x), dx, tau);
      alpha = std::min(alpha, fraction_to_boundary(box.upper_slack(x), -dx, tau));
      alpha = std::min(alpha, fraction_to_boundary(w.tail(2 * n), dw.tail(2 * n), tau));
      return alpha;
    };
  }

  const DualPair z0 = DualPair::central(box, x0, mu0);
  Vector w(3 * n);
  w << x0, z0.lower, z0.upper;

  BarrierResult out;
  while (mu > mu_inf) {
    const double next = theta(mu);
    if (!(next < mu)) throw std::invalid_argument("barrier: theta must decrease mu");
    mu = std::max(next, mu_inf);
    NewtonResult r = newton_corrector(sub, w, 0.0, cfg.newton);
    if (!r.converged()) throw BarrierDivergedError(mu, r.reason, std::move(out.history));
    w = std::move(r.x);
    auto [x, z] = split(w);
    out.history.push_back({mu, x, z, r.iterations});
  }
  std::tie(out.x, out.duals) = split(w);
  return out;
}

}  // namespace bhtopo
