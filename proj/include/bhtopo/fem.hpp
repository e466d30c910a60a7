#pragma once

#include "bhtopo/mesh.hpp"
#include "bhtopo/sparse.hpp"

#include <Eigen/Core>

#include <array>
#include <vector>

namespace bhtopo {

/// Two-phase isotropic material with Lamé moduli interpolated as
/// m(rho) = m0 + rho^exponent (m1 - m0).
struct MaterialModel {
  double lambda0 = 7.498e-5;
  double lambda1 = 0.750;
  double mu0 = 3.750e-5;
  double mu1 = 0.375;
  double exponent = 3.0;

  void validate() const;

  double interpolation(double rho) const;         // rho^p
  double interpolation_d1(double rho) const;      // p rho^(p-1)
  double interpolation_d2(double rho) const;      // p (p-1) rho^(p-2)
  double lambda(double rho) const { return lambda0 + interpolation(rho) * (lambda1 - lambda0); }
  double mu(double rho) const { return mu0 + interpolation(rho) * (mu1 - mu0); }
};

/// Density lives on every vertex; displacement has two components on every
/// vertex outside the Dirichlet set, numbered (x, y) per vertex in vertex order.
class DofMap {
 public:
  explicit DofMap(const TriMesh& mesh);

  int num_density() const { return num_density_; }
  int num_displacement() const { return num_displacement_; }
  /// -1 for a constrained vertex.
  int displacement(int vertex, int component) const {
    return disp_[2 * vertex + component];
  }
  bool constrained(int vertex) const { return displacement(vertex, 0) < 0; }

 private:
  int num_density_ = 0;
  int num_displacement_ = 0;
  std::vector<int> disp_;
};

/// Symmetric 6-point rule on triangles, exact for polynomials of degree 4.
/// Points in barycentric coordinates, weights sum to one.
struct TriangleRule {
  static constexpr int kPoints = 6;
  static const std::array<std::array<double, 3>, kPoints> points;
  static const std::array<double, kPoints> weights;
};

using Local6 = Eigen::Matrix<double, 6, 6>;
using Local6Vec = Eigen::Matrix<double, 6, 1>;

/// Per-triangle data: area, constant hat-function gradients, and the local
/// displacement dofs ordered (v0x, v0y, v1x, v1y, v2x, v2y).
struct Element {
  std::array<int, 3> vertices;
  double area;
  std::array<Point2, 3> grad;
  std::array<int, 6> dofs;
  Local6 div_div;    // div(psi_a) div(psi_b)
  Local6 strain2;    // 2 E(psi_a) : E(psi_b)
};

/// Quadrature moments of the interpolation function over one element:
/// integral of g(rho_h), g'(rho_h) phi_i and g''(rho_h) phi_i phi_j.
struct DensityMoments {
  double g = 0.0;
  std::array<double, 3> dg{};
  Eigen::Matrix3d d2g = Eigen::Matrix3d::Zero();
};

DensityMoments density_moments(const Element& e, const Vector& rho, const MaterialModel& material);

struct GlOperators {
  SparseMatrix stiffness;  // integral of grad phi_i . grad phi_j
  SparseMatrix mass;       // integral of phi_i phi_j
  Vector integrals;        // integral of phi_i
};

/// Mesh plus everything on it that does not depend on the density: dof
/// numbering, element geometry, density-space operators and the traction load.
class Discretization {
 public:
  Discretization(TriMesh mesh, const DomainSpec& spec);

  const TriMesh& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const std::vector<Element>& elements() const { return elements_; }
  const GlOperators& gl() const { return gl_; }
  const Vector& load() const { return load_; }
  int n() const { return dofs_.num_density(); }
  int l() const { return dofs_.num_displacement(); }

 private:
  TriMesh mesh_;
  DofMap dofs_;
  std::vector<Element> elements_;
  GlOperators gl_;
  Vector load_;
};

std::vector<Element> build_elements(const TriMesh& mesh, const DofMap& dofs);

/// K(rho): elasticity operator on the free displacement dofs.
SparseMatrix assemble_state_operator(const Discretization& disc, const MaterialModel& material,
                                     const Vector& rho);

Vector assemble_traction_load(const TriMesh& mesh, const DofMap& dofs, const DomainSpec& spec);

GlOperators assemble_gl_operators(const TriMesh& mesh, const DofMap& dofs);

/// Solves K(rho) u = f. Propagates SingularMatrixError.
Vector solve_state(const Discretization& disc, const MaterialModel& material, const Vector& rho,
                   const Vector& f);

}  // namespace bhtopo
