#pragma once

#include "bhtopo/homotopy.hpp"
#include "bhtopo/sparse.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhtopo {

/// a <= x <= b, written as c_a(x) = x - a >= 0 and c_b(x) = b - x >= 0.
struct BoxConstraints {
  Vector lower;
  Vector upper;

  static BoxConstraints uniform(int n, double a, double b);

  void validate() const;
  int size() const { return static_cast<int>(lower.size()); }
  Vector lower_slack(const Vector& x) const { return x - lower; }
  Vector upper_slack(const Vector& x) const { return upper - x; }
  /// Minimizer of -sum log c(x): the box midpoint.
  Vector analytic_center() const { return 0.5 * (lower + upper); }
  bool strictly_inside(const Vector& x) const;
};

struct DualPair {
  Vector lower;  // multipliers of x - a >= 0
  Vector upper;  // multipliers of b - x >= 0

  /// z = mu / c(x) componentwise.
  static DualPair central(const BoxConstraints& box, const Vector& x, double mu);
  bool positive() const;
};

enum class ScheduleKind { Linear, Geometric };

/// mu(t) with mu(0) = mu0 and mu(1) = mu_inf, decreasing in t.
struct BarrierSchedule {
  double mu0 = 50.0;
  double mu_inf = 0.001;
  ScheduleKind kind = ScheduleKind::Linear;

  void validate() const;
  double mu(double t) const;
  double dmu_dt(double t) const;
};

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& name);

class NonInteriorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// B(x; mu) = f(x) - mu sum log c_i(x). Throws NonInteriorError if some
/// c_i(x) <= 0.
double barrier_value(const std::function<double(const Vector&)>& f, const VectorMap& c,
                     const Vector& x, double mu);

/// [grad f - z_a + z_b; z_a * c_a - mu; z_b * c_b - mu], length 3n.
Vector pd_residual_box(const Vector& grad_f, const Vector& x, const BoxConstraints& box,
                       const DualPair& duals, double mu);

/// Newton matrix of the box primal-dual system, blocks (x, z_a, z_b):
///   [ H    -I   I  ]
///   [ Z_a  C_a  0  ]
///   [ -Z_b 0    C_b]
BlockSystem pd_newton_matrix_box(const SparseMatrix& hess_f, const Vector& x,
                                 const BoxConstraints& box, const DualPair& duals);

struct BoxStep {
  Vector dx;
  Vector dz_lower;
  Vector dz_upper;
};

/// Solves the Newton system against -pd_residual_box. Throws
/// SingularMatrixError when the block matrix is singular.
BoxStep pd_newton_step_box(const SparseMatrix& hess_f, const Vector& grad_f, const Vector& x,
                           const BoxConstraints& box, const DualPair& duals, double mu);

/// Largest alpha in (0, 1] with every slack and multiplier keeping at least a
/// (1 - tau) fraction of its value along the step.
double fraction_to_boundary(const Vector& value, const Vector& step, double tau);

struct SmoothObjective {
  std::function<double(const Vector&)> value;
  VectorMap gradient;
  JacobianMap hessian;
};

struct BarrierRunConfig {
  NewtonConfig newton;
  bool fraction_to_boundary = false;
  double boundary_fraction = 0.995;
};

struct BarrierSubproblem {
  double mu;
  Vector x;
  DualPair duals;
  int newton_iters;
};

struct BarrierResult {
  Vector x;
  DualPair duals;
  std::vector<BarrierSubproblem> history;
};

class BarrierDivergedError : public std::runtime_error {
 public:
  BarrierDivergedError(double mu, const std::string& reason, std::vector<BarrierSubproblem> history);

  double mu() const { return mu_; }
  const std::vector<BarrierSubproblem>& history() const { return history_; }

 private:
  double mu_;
  std::vector<BarrierSubproblem> history_;
};

/// mu -> alpha mu.
std::function<double(double)> geometric_update(double alpha = 0.5);

/// Primal-dual barrier continuation in mu: starting from z = mu0 / c(x0), each
/// round sets mu <- max(theta(mu), mu_inf) and solves the primal-dual system
/// with full Newton steps, until mu_inf has been solved for. An iterate that
/// leaves the strict interior counts as divergence and aborts with
/// BarrierDivergedError.
BarrierResult run_pd_barrier(const SmoothObjective& f, const Vector& x0,
                             const BoxConstraints& box,
                             const std::function<double(double)>& theta, double mu0,
                             double mu_inf, const BarrierRunConfig& cfg = {});

}  // namespace bhtopo
