#pragma once

#include "bhtopo/config.hpp"
#include "bhtopo/homotopy.hpp"
#include "bhtopo/mesh.hpp"
#include "bhtopo/solver.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace bhtopo {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// CSV with header `it,t,mu` and one row per attempted step.
void write_param_history(const SolveTrace& trace, const std::filesystem::path& path);

/// Legacy VTK ASCII unstructured grid of triangles with a point scalar `rho`.
/// The output depends only on the arguments, byte for byte.
void write_density_vtk(const TriMesh& mesh, const Vector& rho, const std::filesystem::path& path,
                       const std::string& title = "density");

struct DensityField {
  std::string title;
  std::vector<Point2> points;
  std::vector<std::array<int, 3>> triangles;
  Vector rho;
};

/// Reads files produced by write_density_vtk.
DensityField read_density_vtk(const std::filesystem::path& path);

/// "nx=<nx> ny=<ny> config=<digest>" for density file headers.
std::string density_title(const SolverConfig& cfg);

/// Writes a density snapshot at the first accepted t at or after each
/// requested value. Files are named density_t=<t with 6 decimals>.vtk.
class SnapshotWriter {
 public:
  SnapshotWriter(std::filesystem::path dir, std::vector<double> requested, std::string title);

  void operator()(const TriMesh& mesh, const KktPoint& x, const TraceRecord& record);
  const std::vector<std::filesystem::path>& written() const { return written_; }

 private:
  std::filesystem::path dir_;
  std::vector<double> pending_;
  std::string title_;
  std::vector<std::filesystem::path> written_;
};

std::string snapshot_filename(double t);

/// Runs the solver and writes param_history.csv, density_final.vtk, the
/// snapshots and summary.json into cfg.output.dir. With a log stream, every
/// accepted step is reported there. On step underflow the partial
/// param_history.csv is still written before the error propagates.
SolveResult solve_and_write(const SolverConfig& cfg, std::ostream* log = nullptr);

}  // namespace bhtopo
