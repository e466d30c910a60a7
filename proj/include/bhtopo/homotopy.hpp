#pragma once

#include "bhtopo/sparse.hpp"

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhtopo {

using VectorMap = std::function<Vector(const Vector&)>;
using JacobianMap = std::function<SparseMatrix(const Vector&)>;

/// A homotopy H(x, t) with its x-Jacobian and t-derivative. `admissible`
/// (optional) rejects iterates outside the domain where H is meaningful,
/// `step_length` (optional) damps a Newton step dx at x to alpha dx, and
/// `barrier_parameter` (optional) reports mu(t) for logging.
struct HomotopyProblem {
  int dimension = 0;
  std::function<Vector(const Vector&, double)> residual;
  std::function<SparseMatrix(const Vector&, double)> jacobian_x;
  std::function<Vector(const Vector&, double)> dh_dt;
  std::function<bool(const Vector&)> admissible;
  std::function<double(const Vector&, const Vector&)> step_length;
  std::function<double(double)> barrier_parameter;

  bool is_admissible(const Vector& x) const { return !admissible || admissible(x); }
  double mu(double t) const {
    return barrier_parameter ? barrier_parameter(t) : std::numeric_limits<double>::quiet_NaN();
  }
};

/// H(x, t) = F(x) - (1 - t) F(x0), so that H(x0, 0) = 0 and H(., 1) = F.
HomotopyProblem global_homotopy(VectorMap f, JacobianMap jf, const Vector& x0);

struct NewtonConfig {
  double tol = 1e-8;               // absolute, Euclidean norm of the residual
  int max_iter = 20;
  double divergence_growth = 1e3;  // give up once |H| exceeds this factor times its minimum

  void validate() const;
};

enum class NewtonStatus { Converged, Diverged };

struct NewtonResult {
  NewtonStatus status = NewtonStatus::Diverged;
  Vector x;
  int iterations = 0;
  double residual_norm = std::numeric_limits<double>::infinity();
  std::string reason;

  bool converged() const { return status == NewtonStatus::Converged; }
};

/// Full Newton steps on H(., t) = 0 without line search. Divergence is
/// reported as a value: exhausted iterations, a singular Jacobian, an
/// inadmissible iterate, a non-finite or blown-up residual.
NewtonResult newton_corrector(const HomotopyProblem& problem, Vector x, double t,
                              const NewtonConfig& cfg);

struct PredictorResult {
  Vector x;
  bool fell_back = false;  // singular H_x: zero-order predictor used instead
};

/// x + dt x' with H_x(x, t) x' = -H_t(x, t).
PredictorResult tangent_predictor(const HomotopyProblem& problem, const Vector& x, double t,
                                  double dt);

/// Adaptive increments in t: grow after an accepted step (capped at dt_max),
/// shrink the attempted increment after a rejected one. Optional stops force
/// the tracer to land on given t values.
class StepController {
 public:
  StepController(double dt_init, double dt_max, double growth = 1.5, double shrink = 0.5,
                 double dt_min = 1e-8);

  double dt() const { return dt_; }
  double dt_max() const { return dt_max_; }
  double dt_min() const { return dt_min_; }

  /// min(t + dt, next stop after t, 1).
  double propose(double t) const;
  void accept();
  void reject(double attempted_dt);
  bool underflow() const { return dt_ < dt_min_; }

  void set_stops(std::vector<double> stops);

 private:
  double dt_;
  double dt_max_;
  double growth_;
  double shrink_;
  double dt_min_;
  std::vector<double> stops_;
};

struct TraceRecord {
  int index = 0;        // 1-based over all attempts
  double t = 0.0;       // attempted homotopy parameter
  double dt = 0.0;      // attempted increment
  double mu = std::numeric_limits<double>::quiet_NaN();
  int newton_iters = 0;
  double residual_norm = 0.0;
  bool accepted = false;
  bool predictor_fallback = false;
  std::string note;
};

struct SolveTrace {
  std::vector<TraceRecord> records;

  int accepted_count() const;
  int rejected_count() const;
};

class StepUnderflowError : public std::runtime_error {
 public:
  StepUnderflowError(SolveTrace trace, Vector last_x, double last_t);

  const SolveTrace& trace() const { return trace_; }
  const Vector& last_x() const { return last_x_; }
  double last_t() const { return last_t_; }

 private:
  SolveTrace trace_;
  Vector last_x_;
  double last_t_;
};

struct TraceResult {
  Vector x;
  SolveTrace trace;
};

/// Called after every accepted step with the new point and its record.
using TraceObserver = std::function<void(const Vector&, const TraceRecord&)>;

/// Follows the zero curve of H from (x0, 0) to t = 1. A rejected step is
/// retried from the last accepted point. Throws StepUnderflowError when the
/// increment drops below dt_min, std::invalid_argument when H(x0, 0) is not
/// within tolerance.
TraceResult trace_homotopy(const HomotopyProblem& problem, const Vector& x0,
                           StepController controller, const NewtonConfig& cfg,
                           int predictor_order = 0, const TraceObserver& on_accept = {});

}  // namespace bhtopo
