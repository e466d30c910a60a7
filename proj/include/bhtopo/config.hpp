#pragma once

#include "bhtopo/barrier.hpp"
#include "bhtopo/fem.hpp"
#include "bhtopo/lagrangian.hpp"
#include "bhtopo/mesh.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhtopo {

struct MeshConfig {
  int nx = 60;
  int ny = 20;
  DiagonalPattern diagonal = DiagonalPattern::Uniform;
};

struct SteppingConfig {
  double dt_init = 0.25;
  double dt_max = 0.25;
  double growth = 1.5;
  double shrink = 0.5;
  double dt_min = 1e-8;
};

struct NewtonSettings {
  double tol = 1e-8;
  int max_iter = 20;
  double divergence_growth = 1e3;
  bool scale_tol = true;  // multiply tol by sqrt(system dimension)
};

struct BarrierSettings {
  BarrierSchedule schedule;
  bool fraction_to_boundary = false;
  double boundary_fraction = 0.995;
};

struct OutputConfig {
  std::string dir = "output";
  std::vector<double> snapshots = {0.0,      0.5,      0.9375,   0.999931, 0.999946,
                                   0.999956, 0.999974, 0.999988, 1.0};
};

/// Everything a solve needs. Default-constructed values are the bridge
/// experiment settings.
struct SolverConfig {
  MeshConfig mesh;
  MaterialModel material;
  ProblemParams problem;
  double rho0 = 0.5;
  BarrierSettings barrier;
  SteppingConfig stepping;
  NewtonSettings newton;
  int predictor_order = 0;
  OutputConfig output;

  /// Throws ConfigError naming the offending key.
  void validate() const;

  /// Absolute Newton tolerance for a system of the given dimension.
  double newton_tolerance(int dimension) const;
  NewtonConfig newton_config(int dimension) const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Flat `section.key = value` lines. Blank lines and lines starting with '#'
/// are skipped; a '#' after a value starts a comment. Unknown keys, repeated
/// keys and malformed values raise ConfigError with the line number. The
/// result is validated.
SolverConfig parse_config_string(const std::string& text, const std::string& source = "<string>");
SolverConfig parse_config(const std::string& path);

/// Every key, in a fixed order, with shortest round-trip number formatting.
std::string serialize_config(const SolverConfig& cfg);

/// FNV-1a 64 over serialize_config with the output section at its defaults,
/// as 16 hex digits. Runs that differ only in where they write share a digest.
std::string config_digest(const SolverConfig& cfg);

/// Comma-separated numbers, as used by output.snapshots.
std::vector<double> parse_number_list(const std::string& text);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_exact(double v);

std::string to_string(DiagonalPattern pattern);
DiagonalPattern diagonal_pattern_from_string(const std::string& name);

}  // namespace bhtopo
