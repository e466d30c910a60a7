#pragma once

#include "bhtopo/barrier.hpp"
#include "bhtopo/config.hpp"
#include "bhtopo/homotopy.hpp"
#include "bhtopo/lagrangian.hpp"

#include <functional>

namespace bhtopo {

/// Primal-dual iterate of the constrained compliance problem.
struct KktPoint {
  Vector rho;      // n
  Vector u;        // l
  Vector p;        // l, adjoint
  Vector z_lower;  // n, multipliers of rho >= 0
  Vector z_upper;  // n, multipliers of rho <= 1

  /// Concatenation (rho, u, p, z_lower, z_upper).
  Vector pack() const;
  static KktPoint unpack(const Vector& x, int n, int l);
};

/// Stationarity residual at the starting point, frozen for the whole run.
struct HomotopyAnchor {
  Vector r0;
};

struct InitialState {
  KktPoint point;
  HomotopyAnchor anchor;
};

/// The barrier-homotopy map of the density problem with box 0 <= rho <= 1:
///
///   H(x, t) = [ dL/drho - z_a + z_b - (1-t) r0 ]
///             [ dL/du                          ]
///             [ dL/dp                          ]
///             [ z_a * rho - mu(t)              ]
///             [ z_b * (1 - rho) - mu(t)        ]
///
/// Holds a reference to the Lagrangian, which must outlive it.
class BarrierHomotopy {
 public:
  BarrierHomotopy(const Lagrangian& lagrangian, BarrierSchedule schedule);

  const Lagrangian& lagrangian() const { return lag_; }
  const BarrierSchedule& schedule() const { return schedule_; }
  const BoxConstraints& box() const { return box_; }
  int n() const { return n_; }
  int l() const { return l_; }
  int dimension() const { return 3 * n_ + 2 * l_; }

  /// rho = rho0, u from the state equation, p from the adjoint equation, and
  /// z = mu0 / c(rho0).
  InitialState initialize(const Vector& rho0) const;
  InitialState initialize(double rho0) const;

  /// The map without the anchor term, at a given barrier parameter.
  Vector unanchored_residual(const KktPoint& x, double mu) const;
  Vector residual(const KktPoint& x, const HomotopyAnchor& anchor, double t) const;
  BlockSystem jacobian(const KktPoint& x) const;
  Vector h_t(const KktPoint& x, const HomotopyAnchor& anchor, double t) const;

  /// rho strictly inside (0, 1) and both multipliers strictly positive.
  bool interior(const KktPoint& x) const;

  /// The same map on packed vectors, for the path tracer.
  HomotopyProblem problem(const HomotopyAnchor& anchor, bool fraction_to_boundary = false,
                          double boundary_fraction = 0.995) const;

 private:
  const Lagrangian& lag_;
  BarrierSchedule schedule_;
  BoxConstraints box_;
  int n_;
  int l_;
};

struct SolveResult {
  TriMesh mesh;
  KktPoint initial;
  KktPoint final;
  SolveTrace trace;
  double initial_objective = 0.0;
  double final_objective = 0.0;
  double tolerance = 0.0;   // absolute Newton tolerance used
  double final_residual = 0.0;  // |H(final, 1)|
};

/// Called after every accepted step, including a record for t = 0.
using SolveObserver =
    std::function<void(const TriMesh& mesh, const KktPoint& x, const TraceRecord& record)>;

/// Builds the bridge problem described by `cfg` and traces the barrier
/// homotopy from t = 0 to t = 1. Throws StepUnderflowError when the step size
/// collapses.
SolveResult solve(const SolverConfig& cfg, const SolveObserver& observer = {});

}  // namespace bhtopo
