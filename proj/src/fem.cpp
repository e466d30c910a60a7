#include "bhtopo/fem.hpp"

#include <cmath>
#include <string>

namespace bhtopo {

void MaterialModel::validate() const {
  if (!(lambda0 > 0.0) || !(lambda1 > 0.0) || !(mu0 > 0.0) || !(mu1 > 0.0)) {
    throw std::invalid_argument("material: all Lame moduli must be positive");
  }
  if (!(lambda1 > lambda0)) throw std::invalid_argument("material: lambda1 must exceed lambda0");
  if (!(mu1 > mu0)) throw std::invalid_argument("material: mu1 must exceed mu0");
  if (!(exponent >= 1.0)) throw std::invalid_argument("material: exponent must be >= 1");
}

namespace {

// Integer exponents take the exact product path so that p = 3 yields
// polynomials in rho (and stays defined for rho < 0).
double power(double x, double p) {
  const double r = std::round(p);
  if (r == p && std::abs(r) <= 16.0) {
    int k = static_cast<int>(r);
    double acc = 1.0;
    for (; k > 0; --k) acc *= x;
    return acc;
  }
  return std::pow(x, p);
}

}  // namespace

double MaterialModel::interpolation(double rho) const { return power(rho, exponent); }

double MaterialModel::interpolation_d1(double rho) const {
  return exponent * power(rho, exponent - 1.0);
}

double MaterialModel::interpolation_d2(double rho) const {
  if (exponent == 1.0) return 0.0;
  return exponent * (exponent - 1.0) * power(rho, exponent - 2.0);
}

DofMap::DofMap(const TriMesh& mesh)
    : num_density_(static_cast<int>(mesh.num_vertices())),
      disp_(2 * mesh.num_vertices(), -1) {
  std::vector<char> fixed(mesh.num_vertices(), 0);
  for (int v : dirichlet_vertex_set(mesh)) fixed[v] = 1;
  int next = 0;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (fixed[v]) continue;
    disp_[2 * v] = next++;
    disp_[2 * v + 1] = next++;
  }
  num_displacement_ = next;
}

const std::array<std::array<double, 3>, TriangleRule::kPoints> TriangleRule::points = [] {
  constexpr double a1 = 0.44594849091596488632;
  constexpr double b1 = 1.0 - 2.0 * a1;
  constexpr double a2 = 0.09157621350977074346;
  constexpr double b2 = 1.0 - 2.0 * a2;
  return std::array<std::array<double, 3>, kPoints>{{
      {b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1},
      {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2},
  }};
}();

const std::array<double, TriangleRule::kPoints> TriangleRule::weights = {
    0.22338158967801146570, 0.22338158967801146570, 0.22338158967801146570,
    0.10995174365532186764, 0.10995174365532186764, 0.10995174365532186764,
};

std::vector<Element> build_elements(const TriMesh& mesh, const DofMap& dofs) {
  std::vector<Element> out;
  out.reserve(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    Element e;
    e.vertices = mesh.triangles[t];
    e.area = mesh.signed_area(t);
    if (!(e.area > 0.0)) {
      throw std::invalid_argument("triangle " + std::to_string(t) + " has non-positive area");
    }
    const Point2& p0 = mesh.vertices[e.vertices[0]];
    const Point2& p1 = mesh.vertices[e.vertices[1]];
    const Point2& p2 = mesh.vertices[e.vertices[2]];
    const double inv = 1.0 / (2.0 * e.area);
    e.grad[0] = {(p1[1] - p2[1]) * inv, (p2[0] - p1[0]) * inv};
    e.grad[1] = {(p2[1] - p0[1]) * inv, (p0[0] - p2[0]) * inv};
    e.grad[2] = {(p0[1] - p1[1]) * inv, (p1[0] - p0[0]) * inv};
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) e.dofs[2 * k + c] = dofs.displacement(e.vertices[k], c);
    }
    // psi_(k,c) = phi_k e_c: div = d_c phi_k, 2E:E = delta_cd g_k.g_m + d_d phi_k d_c phi_m.
    for (int k = 0; k < 3; ++k) {
      for (int c = 0; c < 2; ++c) {
        for (int m = 0; m < 3; ++m) {
          for (int d = 0; d < 2; ++d) {
            const auto& gk = e.grad[k];
            const auto& gm = e.grad[m];
            const double dot = gk[0] * gm[0] + gk[1] * gm[1];
            e.div_div(2 * k + c, 2 * m + d) = gk[c] * gm[d];
            e.strain2(2 * k + c, 2 * m + d) =
                (c == d ? dot : 0.0) + gk[d] * gm[c];
          }
        }
      }
    }
    out.push_back(e);
  }
  return out;
}

DensityMoments density_moments(const Element& e, const Vector& rho, const MaterialModel& material) {
  DensityMoments m;
  const double r0 = rho[e.vertices[0]], r1 = rho[e.vertices[1]], r2 = rho[e.vertices[2]];
  for (int q = 0; q < TriangleRule::kPoints; ++q) {
    const auto& b = TriangleRule::points[q];
    const double w = TriangleRule::weights[q] * e.area;
    const double r = b[0] * r0 + b[1] * r1 + b[2] * r2;
    const double g0 = material.interpolation(r);
    const double g1 = material.interpolation_d1(r);
    const double g2 = material.interpolation_d2(r);
    m.g += w * g0;
    for (int i = 0; i < 3; ++i) {
      m.dg[i] += w * g1 * b[i];
      for (int j = 0; j < 3; ++j) m.d2g(i, j) += w * g2 * b[i] * b[j];
    }
  }
  return m;
}

Discretization::Discretization(TriMesh mesh, const DomainSpec& spec)
    : mesh_(std::move(mesh)),
      dofs_(mesh_),
      elements_(build_elements(mesh_, dofs_)),
      gl_(assemble_gl_operators(mesh_, dofs_)),
      load_(assemble_traction_load(mesh_, dofs_, spec)) {}

SparseMatrix assemble_state_operator(const Discretization& disc, const MaterialModel& material,
                                     const Vector& rho) {
  if (rho.size() != disc.n()) throw DimensionError("assemble_state_operator: rho has wrong length");
  std::vector<Triplet> t;
  t.reserve(disc.elements().size() * 36);
  for (const Element& e : disc.elements()) {
    const DensityMoments m = density_moments(e, rho, material);
    const double lam = material.lambda0 * e.area + (material.lambda1 - material.lambda0) * m.g;
    const double mu = material.mu0 * e.area + (material.mu1 - material.mu0) * m.g;
    for (int a = 0; a < 6; ++a) {
      const int ra = e.dofs[a];
      if (ra < 0) continue;
      for (int b = 0; b < 6; ++b) {
        const int cb = e.dofs[b];
        if (cb < 0) continue;
        t.push_back({ra, cb, lam * e.div_div(a, b) + mu * e.strain2(a, b)});
      }
    }
  }
  return SparseMatrix::from_triplets(disc.l(), disc.l(), t);
}

Vector assemble_traction_load(const TriMesh& mesh, const DofMap& dofs, const DomainSpec& spec) {
  Vector f = Vector::Zero(dofs.num_displacement());
  for (const auto& edge : mesh.boundary_edges) {
    if (edge.tag != EdgeTag::NeumannTraction) continue;
    const double half = 0.5 * mesh.edge_length(edge);
    for (int v : edge.vertices) {
      for (int c = 0; c < 2; ++c) {
        const int dof = dofs.displacement(v, c);
        if (dof >= 0) f[dof] += half * spec.traction[c];
      }
    }
  }
  return f;
}

GlOperators assemble_gl_operators(const TriMesh& mesh, const DofMap& dofs) {
  const int n = dofs.num_density();
  std::vector<Triplet> kt, mt;
  kt.reserve(mesh.num_triangles() * 9);
  mt.reserve(mesh.num_triangles() * 9);
  Vector c = Vector::Zero(n);
  for (const Element& e : build_elements(mesh, dofs)) {
    for (int i = 0; i < 3; ++i) {
      const auto& gi = e.grad[i];
      const int vi = e.vertices[i];
      c[vi] += e.area / 3.0;
      for (int j = 0; j < 3; ++j) {
        const auto& gj = e.grad[j];
        const int vj = e.vertices[j];
        kt.push_back({vi, vj, e.area * (gi[0] * gj[0] + gi[1] * gj[1])});
        mt.push_back({vi, vj, e.area * (i == j ? 2.0 : 1.0) / 12.0});
      }
    }
  }
  return {SparseMatrix::from_triplets(n, n, kt), SparseMatrix::from_triplets(n, n, mt), c};
}

Vector solve_state(const Discretization& disc, const MaterialModel& material, const Vector& rho,
                   const Vector& f) {
  return solve_direct(assemble_state_operator(disc, material, rho), f);
}

}  // namespace bhtopo
