#pragma once

#include "bhtopo/fem.hpp"
#include "bhtopo/sparse.hpp"

namespace bhtopo {

/// Weights of the regularized compliance objective.
struct ProblemParams {
  double gamma = 9.75;     // volume penalty
  double beta = 0.5;       // Ginzburg-Landau weight
  double epsilon = 0.0075; // interface width

  void validate() const;
};

struct GradientBlocks {
  Vector rho;  // dL/drho, length n
  Vector u;    // dL/du = f + K(rho) p (adjoint residual), length l
  Vector p;    // dL/dp = K(rho) u - f (state residual), length l
};

/// Second derivatives of L. The (u,u) and (p,p) blocks vanish for compliance.
struct HessianBlocks {
  SparseMatrix rr;  // n x n
  SparseMatrix ru;  // n x l
  SparseMatrix rp;  // n x l
  SparseMatrix up;  // l x l, equals K(rho)
};

/// Discrete Lagrangian of the compliance problem with volume penalty and
/// Ginzburg-Landau regularization:
///
///   J(rho, u)    = f.u + gamma c.rho + beta/2 [eps rho.K rho + (c.rho - rho.M rho) / eps]
///   L(rho, u, p) = J(rho, u) + p.(K(rho) u - f)
///
/// where c, K and M are the density-space load, stiffness and mass operators.
/// Holds a reference to the discretization, which must outlive it.
class Lagrangian {
 public:
  Lagrangian(const Discretization& disc, MaterialModel material, ProblemParams params);

  const Discretization& discretization() const { return disc_; }
  const MaterialModel& material() const { return material_; }
  const ProblemParams& params() const { return params_; }

  double objective(const Vector& rho, const Vector& u) const;
  double value(const Vector& rho, const Vector& u, const Vector& p) const;
  GradientBlocks gradient(const Vector& rho, const Vector& u, const Vector& p) const;
  HessianBlocks hessian(const Vector& rho, const Vector& u, const Vector& p) const;

  SparseMatrix state_operator(const Vector& rho) const;

 private:
  void check_sizes(const Vector& rho, const Vector& u, const Vector& p) const;

  const Discretization& disc_;
  MaterialModel material_;
  ProblemParams params_;
};

}  // namespace bhtopo
