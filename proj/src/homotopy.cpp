#include "bhtopo/homotopy.hpp"

#include <algorithm>
#include <cmath>

namespace bhtopo {

HomotopyProblem global_homotopy(VectorMap f, JacobianMap jf, const Vector& x0) {
  const Vector f0 = f(x0);
  HomotopyProblem h;
  h.dimension = static_cast<int>(x0.size());
  h.residual = [f, f0](const Vector& x, double t) -> Vector { return f(x) - (1.0 - t) * f0; };
  h.jacobian_x = [jf](const Vector& x, double) { return jf(x); };
  h.dh_dt = [f0](const Vector&, double) { return f0; };
  return h;
}

void NewtonConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("newton: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("newton: max_iter must be at least 1");
  if (!(divergence_growth > 1.0)) {
    throw std::invalid_argument("newton: divergence_growth must exceed 1");
  }
}

NewtonResult newton_corrector(const HomotopyProblem& problem, Vector x, double t,
                              const NewtonConfig& cfg) {
  NewtonResult out;
  Vector h = problem.residual(x, t);
  double norm = h.norm();
  double best = norm;
  out.residual_norm = norm;

  for (int it = 0;; ++it) {
    out.iterations = it;
    if (!std::isfinite(norm)) {
      out.reason = "non-finite residual";
      break;
    }
    if (norm <= cfg.tol) {
      out.status = NewtonStatus::Converged;
      break;
    }
    if (norm > cfg.divergence_growth * best) {
      out.reason = "residual growth";
      break;
    }
    if (it == cfg.max_iter) {
      out.reason = "iteration limit";
      break;
    }
    Vector dx;
    try {
      dx = solve_direct(problem.jacobian_x(x, t), -h);
    } catch (const SingularMatrixError& e) {
      out.reason = e.what();
      break;
    }
    if (problem.step_length) dx *= problem.step_length(x, dx);
    x += dx;
    if (!problem.is_admissible(x)) {
      out.iterations = it + 1;
      out.reason = "left admissible region";
      break;
    }
    h = problem.residual(x, t);
    norm = h.norm();
    best = std::min(best, norm);
    out.residual_norm = norm;
  }
  out.x = std::move(x);
  return out;
}

PredictorResult tangent_predictor(const HomotopyProblem& problem, const Vector& x, double t,
                                  double dt) {
  if (dt == 0.0) return {x, false};
  try {
    const Vector tangent = solve_direct(problem.jacobian_x(x, t), -problem.dh_dt(x, t));
    return {x + dt * tangent, false};
  } catch (const SingularMatrixError&) {
    return {x, true};
  }
}

StepController::StepController(double dt_init, double dt_max, double growth, double shrink,
                               double dt_min)
    : dt_(dt_init), dt_max_(dt_max), growth_(growth), shrink_(shrink), dt_min_(dt_min) {
  if (!(dt_init > 0.0) || !(dt_max > 0.0) || dt_init > dt_max) {
    throw std::invalid_argument("step controller: need 0 < dt_init <= dt_max");
  }
  if (!(growth >= 1.0)) throw std::invalid_argument("step controller: growth must be >= 1");
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("step controller: shrink must lie in (0, 1)");
  }
  if (!(dt_min > 0.0)) throw std::invalid_argument("step controller: dt_min must be positive");
}

double StepController::propose(double t) const {
  double next = std::min(t + dt_, 1.0);
  const auto stop = std::upper_bound(stops_.begin(), stops_.end(), t);
  if (stop != stops_.end()) next = std::min(next, *stop);
  return next;
}

void StepController::accept() { dt_ = std::min(growth_ * dt_, dt_max_); }

void StepController::reject(double attempted_dt) { dt_ = shrink_ * std::min(attempted_dt, dt_); }

void StepController::set_stops(std::vector<double> stops) {
  std::sort(stops.begin(), stops.end());
  stops_ = std::move(stops);
}

int SolveTrace::accepted_count() const {
  return static_cast<int>(std::count_if(records.begin(), records.end(),
                                        [](const TraceRecord& r) { return r.accepted; }));
}

int SolveTrace::rejected_count() const {
  return static_cast<int>(records.size()) - accepted_count();
}

StepUnderflowError::StepUnderflowError(SolveTrace trace, Vector last_x, double last_t)
    : std::runtime_error("homotopy step size underflow at t = " + std::to_string(last_t)),
      trace_(std::move(trace)),
      last_x_(std::move(last_x)),
      last_t_(last_t) {}

TraceResult trace_homotopy(const HomotopyProblem& problem, const Vector& x0,
                           StepController controller, const NewtonConfig& cfg,
                           int predictor_order, const TraceObserver& on_accept) {
  cfg.validate();
  if (predictor_order != 0 && predictor_order != 1) {
    throw std::invalid_argument("predictor order must be 0 or 1");
  }
  const double start_norm = problem.residual(x0, 0.0).norm();
  if (!(start_norm <= cfg.tol)) {
    throw std::invalid_argument("start point is not on the zero curve: |H(x0, 0)| = " +
                                std::to_string(start_norm));
  }

  TraceResult out;
  Vector x = x0;
  double t = 0.0;
  while (t < 1.0) {
    const double t_next = controller.propose(t);
    const double dt = t_next - t;

    TraceRecord rec;
    rec.index = static_cast<int>(out.trace.records.size()) + 1;
    rec.t = t_next;
    rec.dt = dt;
    rec.mu = problem.mu(t_next);

    Vector guess = x;
    if (predictor_order == 1) {
      PredictorResult pred = tangent_predictor(problem, x, t, dt);
      if (!pred.fell_back && problem.is_admissible(pred.x)) {
        guess = std::move(pred.x);
      } else {
        rec.predictor_fallback = true;
      }
    }

    NewtonResult corr = newton_corrector(problem, std::move(guess), t_next, cfg);
    rec.newton_iters = corr.iterations;
    rec.residual_norm = corr.residual_norm;
    rec.accepted = corr.converged();
    rec.note = corr.reason;
    out.trace.records.push_back(rec);

    if (corr.converged()) {
      x = std::move(corr.x);
      t = t_next;
      controller.accept();
      if (on_accept) on_accept(x, out.trace.records.back());
    } else {
      controller.reject(dt);
      if (controller.underflow()) throw StepUnderflowError(out.trace, x, t);
    }
  }
  out.x = std::move(x);
  return out;
}

}  // namespace bhtopo
