#pragma once

#include "bhtopo/barrier.hpp"
#include "bhtopo/homotopy.hpp"
#include "bhtopo/lagrangian.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bhtopo {

/// F(x) = 4x^3 - 3x^2 - 2x + 1 as a one-dimensional system.
struct CubicExample {
  static double f(double x) { return ((4.0 * x - 3.0) * x - 2.0) * x + 1.0; }
  static double df(double x) { return (12.0 * x - 6.0) * x - 2.0; }
  static VectorMap residual();
  static JacobianMap jacobian();
};

/// f(x) = x^4 - x^3 - x^2 + x + 1/4 on the box [-1/2, 1].
struct QuarticExample {
  static constexpr double lower = -0.5;
  static constexpr double upper = 1.0;
  static double f(double x) { return (((x - 1.0) * x - 1.0) * x + 1.0) * x + 0.25; }
  static double df(double x) { return ((4.0 * x - 3.0) * x - 2.0) * x + 1.0; }
  static double d2f(double x) { return (12.0 * x - 6.0) * x - 2.0; }
  static SmoothObjective objective();
};

/// mu -> the next entry of `steps` below mu, then alpha mu once the list is used up.
std::function<double(double)> listed_then_geometric(std::vector<double> steps, double alpha = 0.5);

struct DemoCheck {
  std::string name;
  double value;
  double expected;
  double tolerance;
  bool pass() const;
};

/// Cubic path values at t = 0.4, 0.65, 0.9 and the endpoint, and the quartic
/// barrier minimizers for mu = 2.9, 1.1, 0.4, 0.1 and the limit point.
std::vector<DemoCheck> run_scalar_demos();

struct BlockError {
  std::string block;
  double relative_error;
};

/// Compares the analytic gradient and Hessian blocks of the Lagrangian with
/// central differences along `directions` random unit directions per block,
/// at the point (rho, u, p).
std::vector<BlockError> directional_derivative_check(const Lagrangian& lag, const Vector& rho,
                                                     const Vector& u, const Vector& p,
                                                     int directions, std::uint64_t seed);

}  // namespace bhtopo
