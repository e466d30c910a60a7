#include "bhtopo/solver.hpp"

#include <algorithm>

namespace bhtopo {

Vector KktPoint::pack() const {
  Vector x(rho.size() + u.size() + p.size() + z_lower.size() + z_upper.size());
  x << rho, u, p, z_lower, z_upper;
  return x;
}

KktPoint KktPoint::unpack(const Vector& x, int n, int l) {
  if (x.size() != 3 * n + 2 * l) throw DimensionError("KktPoint::unpack: wrong vector length");
  KktPoint k;
  k.rho = x.segment(0, n);
  k.u = x.segment(n, l);
  k.p = x.segment(n + l, l);
  k.z_lower = x.segment(n + 2 * l, n);
  k.z_upper = x.segment(2 * n + 2 * l, n);
  return k;
}

BarrierHomotopy::BarrierHomotopy(const Lagrangian& lagrangian, BarrierSchedule schedule)
    : lag_(lagrangian),
      schedule_(schedule),
      n_(lagrangian.discretization().n()),
      l_(lagrangian.discretization().l()) {
  schedule_.validate();
  box_ = BoxConstraints::uniform(n_, 0.0, 1.0);
}

InitialState BarrierHomotopy::initialize(const Vector& rho0) const {
  if (rho0.size() != n_) throw DimensionError("initialize: rho0 has the wrong length");
  if (!box_.strictly_inside(rho0)) throw NonInteriorError("initialize: rho0 must lie in (0, 1)");

  const Discretization& disc = lag_.discretization();
  const SparseMatrix k = lag_.state_operator(rho0);
  InitialState s;
  s.point.rho = rho0;
  s.point.u = solve_direct(k, disc.load());
  s.point.p = solve_direct(k.transpose(), -disc.load());
  const DualPair z = DualPair::central(box_, rho0, schedule_.mu0);
  s.point.z_lower = z.lower;
  s.point.z_upper = z.upper;

  const GradientBlocks g = lag_.gradient(s.point.rho, s.point.u, s.point.p);
  s.anchor.r0 = g.rho - s.point.z_lower + s.point.z_upper;
  return s;
}

InitialState BarrierHomotopy::initialize(double rho0) const {
  return initialize(Vector::Constant(n_, rho0));
}

Vector BarrierHomotopy::unanchored_residual(const KktPoint& x, double mu) const {
  const GradientBlocks g = lag_.gradient(x.rho, x.u, x.p);
  Vector r(dimension());
  r.segment(0, n_) = g.rho - x.z_lower + x.z_upper;
  r.segment(n_, l_) = g.u;
  r.segment(n_ + l_, l_) = g.p;
  r.segment(n_ + 2 * l_, n_) =
      (x.z_lower.array() * box_.lower_slack(x.rho).array() - mu).matrix();
  r.segment(2 * n_ + 2 * l_, n_) =
      (x.z_upper.array() * box_.upper_slack(x.rho).array() - mu).matrix();
  return r;
}

Vector BarrierHomotopy::residual(const KktPoint& x, const HomotopyAnchor& anchor, double t) const {
  Vector r = unanchored_residual(x, schedule_.mu(t));
  r.head(n_) -= (1.0 - t) * anchor.r0;
  return r;
}

BlockSystem BarrierHomotopy::jacobian(const KktPoint& x) const {
  const HessianBlocks h = lag_.hessian(x.rho, x.u, x.p);
  BlockSystem sys({{"rho", n_}, {"u", l_}, {"p", l_}, {"z_lower", n_}, {"z_upper", n_}});
  sys.set(0, 0, h.rr);
  sys.set(0, 1, h.ru);
  sys.set(0, 2, h.rp);
  sys.set_diagonal(0, 3, Vector::Constant(n_, -1.0));
  sys.set_diagonal(0, 4, Vector::Ones(n_));
  // K(rho) is symmetric, so it serves for both K and K^T.
  sys.set(1, 0, h.ru.transpose());
  sys.set(1, 2, h.up);
  sys.set(2, 0, h.rp.transpose());
  sys.set(2, 1, h.up);
  sys.set_diagonal(3, 0, x.z_lower);
  sys.set_diagonal(3, 3, box_.lower_slack(x.rho));
  sys.set_diagonal(4, 0, -x.z_upper);
  sys.set_diagonal(4, 4, box_.upper_slack(x.rho));
  return sys;
}

Vector BarrierHomotopy::h_t(const KktPoint&, const HomotopyAnchor& anchor, double t) const {
  Vector ht = Vector::Zero(dimension());
  ht.head(n_) = anchor.r0;
  ht.tail(2 * n_).setConstant(-schedule_.dmu_dt(t));
  return ht;
}

bool BarrierHomotopy::interior(const KktPoint& x) const {
  return box_.strictly_inside(x.rho) && (x.z_lower.array() > 0.0).all() &&
         (x.z_upper.array() > 0.0).all();
}

HomotopyProblem BarrierHomotopy::problem(const HomotopyAnchor& anchor, bool fraction_to_boundary,
                                         double boundary_fraction) const {
  HomotopyProblem h;
  h.dimension = dimension();
  const int n = n_;
  const int l = l_;
  h.residual = [this, anchor, n, l](const Vector& x, double t) {
    return residual(KktPoint::unpack(x, n, l), anchor, t);
  };
  h.jacobian_x = [this, n, l](const Vector& x, double) {
    return jacobian(KktPoint::unpack(x, n, l)).assemble();
  };
  h.dh_dt = [this, anchor, n, l](const Vector& x, double t) {
    return h_t(KktPoint::unpack(x, n, l), anchor, t);
  };
  h.admissible = [this, n, l](const Vector& x) { return interior(KktPoint::unpack(x, n, l)); };
  h.barrier_parameter = [this](double t) { return schedule_.mu(t); };
  if (fraction_to_boundary) {
    const double tau = boundary_fraction;
    h.step_length = [this, n, l, tau](const Vector& x, const Vector& dx) {
      const KktPoint p = KktPoint::unpack(x, n, l);
      const KktPoint d = KktPoint::unpack(dx, n, l);
      double alpha = bhtopo::fraction_to_boundary(box_.lower_slack(p.rho), d.rho, tau);
      alpha = std::min(alpha, bhtopo::fraction_to_boundary(box_.upper_slack(p.rho), -d.rho, tau));
      alpha = std::min(alpha, bhtopo::fraction_to_boundary(p.z_lower, d.z_lower, tau));
      alpha = std::min(alpha, bhtopo::fraction_to_boundary(p.z_upper, d.z_upper, tau));
      return alpha;
    };
  }
  return h;
}

SolveResult solve(const SolverConfig& cfg, const SolveObserver& observer) {
  cfg.validate();
  const DomainSpec domain = bridge_domain();
  const Discretization disc(build_structured_mesh(domain, cfg.mesh.nx, cfg.mesh.ny, cfg.mesh.diagonal),
                            domain);
  const Lagrangian lag(disc, cfg.material, cfg.problem);
  const BarrierHomotopy map(lag, cfg.barrier.schedule);

  const InitialState start = map.initialize(cfg.rho0);
  const NewtonConfig newton = cfg.newton_config(map.dimension());
  const HomotopyProblem problem =
      map.problem(start.anchor, cfg.barrier.fraction_to_boundary, cfg.barrier.boundary_fraction);

  const int n = map.n();
  const int l = map.l();
  if (observer) {
    TraceRecord first;
    first.t = 0.0;
    first.mu = map.schedule().mu(0.0);
    first.accepted = true;
    first.residual_norm = map.residual(start.point, start.anchor, 0.0).norm();
    observer(disc.mesh(), start.point, first);
  }
  TraceObserver on_accept;
  if (observer) {
    on_accept = [&](const Vector& x, const TraceRecord& rec) {
      observer(disc.mesh(), KktPoint::unpack(x, n, l), rec);
    };
  }

  const StepController controller(cfg.stepping.dt_init, cfg.stepping.dt_max, cfg.stepping.growth,
                                   cfg.stepping.shrink, cfg.stepping.dt_min);
  TraceResult traced =
      trace_homotopy(problem, start.point.pack(), controller, newton, cfg.predictor_order, on_accept);

  SolveResult out;
  out.mesh = disc.mesh();
  out.initial = start.point;
  out.final = KktPoint::unpack(traced.x, n, l);
  out.trace = std::move(traced.trace);
  out.initial_objective = lag.objective(out.initial.rho, out.initial.u);
  out.final_objective = lag.objective(out.final.rho, out.final.u);
  out.tolerance = newton.tol;
  out.final_residual = map.residual(out.final, start.anchor, 1.0).norm();
  return out;
}

}  // namespace bhtopo
