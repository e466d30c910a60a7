#include "bhtopo/lagrangian.hpp"

namespace bhtopo {

void ProblemParams::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("problem: gamma must be positive");
  if (!(beta > 0.0)) throw std::invalid_argument("problem: beta must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("problem: epsilon must be positive");
}

namespace {

Local6Vec gather(const Element& e, const Vector& v) {
  Local6Vec out;
  for (int a = 0; a < 6; ++a) out[a] = e.dofs[a] >= 0 ? v[e.dofs[a]] : 0.0;
  return out;
}

}  // namespace

Lagrangian::Lagrangian(const Discretization& disc, MaterialModel material, ProblemParams params)
    : disc_(disc), material_(material), params_(params) {
  material_.validate();
  params_.validate();
}

void Lagrangian::check_sizes(const Vector& rho, const Vector& u, const Vector& p) const {
  if (rho.size() != disc_.n() || u.size() != disc_.l() || p.size() != disc_.l()) {
    throw DimensionError("Lagrangian: field sizes do not match the dof map");
  }
}

SparseMatrix Lagrangian::state_operator(const Vector& rho) const {
  return assemble_state_operator(disc_, material_, rho);
}

double Lagrangian::objective(const Vector& rho, const Vector& u) const {
  if (rho.size() != disc_.n() || u.size() != disc_.l()) {
    throw DimensionError("objective: field sizes do not match the dof map");
  }
  const auto& gl = disc_.gl();
  const double eps = params_.epsilon;
  const double c_rho = gl.integrals.dot(rho);
  const double gradient_energy = rho.dot(gl.stiffness * rho);
  const double mass_energy = rho.dot(gl.mass * rho);
  return disc_.load().dot(u) + params_.gamma * c_rho +
         0.5 * params_.beta * (eps * gradient_energy + (c_rho - mass_energy) / eps);
}

double Lagrangian::value(const Vector& rho, const Vector& u, const Vector& p) const {
  check_sizes(rho, u, p);
  const Vector state = state_operator(rho) * u - disc_.load();
  return objective(rho, u) + p.dot(state);
}

GradientBlocks Lagrangian::gradient(const Vector& rho, const Vector& u, const Vector& p) const {
  check_sizes(rho, u, p);
  const auto& gl = disc_.gl();
  const double eps = params_.epsilon;
  const double beta = params_.beta;
  const double dlam = material_.lambda1 - material_.lambda0;
  const double dmu = material_.mu1 - material_.mu0;

  GradientBlocks g;
  g.rho = params_.gamma * gl.integrals +
          beta * (eps * (gl.stiffness * rho) + (gl.integrals - 2.0 * (gl.mass * rho)) / (2.0 * eps));

  // d/drho_i of p.K(rho)u: per element, the moment of g'(rho) phi_i times the
  // split energy (lambda1-lambda0) div u div p + 2 (mu1-mu0) E(u):E(p).
  for (const Element& e : disc_.elements()) {
    const DensityMoments m = density_moments(e, rho, material_);
    const Local6Vec ue = gather(e, u);
    const Local6Vec pe = gather(e, p);
    const double coupling = dlam * ue.dot(e.div_div * pe) + dmu * ue.dot(e.strain2 * pe);
    for (int i = 0; i < 3; ++i) g.rho[e.vertices[i]] += m.dg[i] * coupling;
  }

  const SparseMatrix k = state_operator(rho);
  g.u = disc_.load() + k.transpose() * p;
  g.p = k * u - disc_.load();
  return g;
}

HessianBlocks Lagrangian::hessian(const Vector& rho, const Vector& u, const Vector& p) const {
  check_sizes(rho, u, p);
  const auto& gl = disc_.gl();
  const double eps = params_.epsilon;
  const double beta = params_.beta;
  const double dlam = material_.lambda1 - material_.lambda0;
  const double dmu = material_.mu1 - material_.mu0;
  const int n = disc_.n();
  const int l = disc_.l();

  std::vector<Triplet> rr, ru, rp;
  gl.stiffness.append_triplets(rr, 0, 0, beta * eps);
  gl.mass.append_triplets(rr, 0, 0, -beta / eps);
  ru.reserve(disc_.elements().size() * 18);
  rp.reserve(disc_.elements().size() * 18);

  for (const Element& e : disc_.elements()) {
    const DensityMoments m = density_moments(e, rho, material_);
    const Local6Vec ue = gather(e, u);
    const Local6Vec pe = gather(e, p);
    const Local6Vec kp = dlam * (e.div_div * pe) + dmu * (e.strain2 * pe);
    const Local6Vec ku = dlam * (e.div_div * ue) + dmu * (e.strain2 * ue);
    const double coupling = ue.dot(kp);
    for (int i = 0; i < 3; ++i) {
      const int vi = e.vertices[i];
      for (int j = 0; j < 3; ++j) rr.push_back({vi, e.vertices[j], m.d2g(i, j) * coupling});
      for (int a = 0; a < 6; ++a) {
        const int dof = e.dofs[a];
        if (dof < 0) continue;
        ru.push_back({vi, dof, m.dg[i] * kp[a]});
        rp.push_back({vi, dof, m.dg[i] * ku[a]});
      }
    }
  }

  HessianBlocks h;
  h.rr = SparseMatrix::from_triplets(n, n, rr);
  h.ru = SparseMatrix::from_triplets(n, l, ru);
  h.rp = SparseMatrix::from_triplets(n, l, rp);
  h.up = state_operator(rho);
  return h;
}

}  // namespace bhtopo
