#include "bhtopo/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bhtopo {

namespace fs = std::filesystem;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

void write_param_history(const SolveTrace& trace, const fs::path& path) {
  if (trace.records.empty()) throw std::invalid_argument("write_param_history: empty trace");
  std::ofstream out = open_output(path);
  out << "it,t,mu\n";
  for (const TraceRecord& r : trace.records) {
    out << r.index << ',' << format_exact(r.t) << ',' << format_exact(r.mu) << '\n';
  }
  close_checked(out, path);
}

void write_density_vtk(const TriMesh& mesh, const Vector& rho, const fs::path& path,
                       const std::string& title) {
  if (static_cast<std::size_t>(rho.size()) != mesh.num_vertices()) {
    throw DimensionError("write_density_vtk: rho length differs from the vertex count");
  }
  if (title.find('\n') != std::string::npos || title.size() > 255) {
    throw std::invalid_argument("write_density_vtk: title must be a single line under 256 chars");
  }
  std::ofstream out = open_output(path);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Point2& p : mesh.vertices) out << format_exact(p[0]) << ' ' << format_exact(p[1]) << " 0\n";
  out << "CELLS " << mesh.num_triangles() << ' ' << 4 * mesh.num_triangles() << '\n';
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << mesh.num_triangles() << '\n';
  for (std::size_t i = 0; i < mesh.num_triangles(); ++i) out << "5\n";
  out << "POINT_DATA " << mesh.num_vertices() << "\nSCALARS rho double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index i = 0; i < rho.size(); ++i) out << format_exact(rho[i]) << '\n';
  close_checked(out, path);
}

namespace {

class Tokens {
 public:
  Tokens(std::istream& in, fs::path path) : in_(in), path_(std::move(path)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) fail("unexpected end of file");
    return w;
  }
  void expect(const std::string& w) {
    const std::string got = word();
    if (got != w) fail("expected '" + w + "', found '" + got + "'");
  }
  long integer() {
    const std::string w = word();
    long v = 0;
    const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size()) fail("bad integer '" + w + "'");
    return v;
  }
  double real() {
    const std::string w = word();
    double v = 0;
    const auto res = std::from_chars(w.data(), w.data() + w.size(), v);
    if (res.ec != std::errc() || res.ptr != w.data() + w.size()) fail("bad number '" + w + "'");
    return v;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path_.string() + ": " + what);
  }

 private:
  std::istream& in_;
  fs::path path_;
};

}  // namespace

DensityField read_density_vtk(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("# vtk DataFile", 0) != 0) throw IoError(path.string() + ": not a legacy VTK file");
  DensityField field;
  std::getline(in, field.title);

  Tokens tok(in, path);
  tok.expect("ASCII");
  tok.expect("DATASET");
  tok.expect("UNSTRUCTURED_GRID");
  tok.expect("POINTS");
  const long np = tok.integer();
  tok.word();  // scalar type
  field.points.resize(np);
  for (auto& p : field.points) {
    p[0] = tok.real();
    p[1] = tok.real();
    tok.real();
  }
  tok.expect("CELLS");
  const long nc = tok.integer();
  tok.integer();
  field.triangles.resize(nc);
  for (auto& t : field.triangles) {
    if (tok.integer() != 3) tok.fail("only triangle cells are supported");
    for (int& v : t) v = static_cast<int>(tok.integer());
  }
  tok.expect("CELL_TYPES");
  if (tok.integer() != nc) tok.fail("CELL_TYPES count differs from CELLS");
  for (long i = 0; i < nc; ++i) {
    if (tok.integer() != 5) tok.fail("only VTK_TRIANGLE cells are supported");
  }
  tok.expect("POINT_DATA");
  if (tok.integer() != np) tok.fail("POINT_DATA count differs from POINTS");
  tok.expect("SCALARS");
  tok.expect("rho");
  tok.word();
  tok.expect("1");
  tok.expect("LOOKUP_TABLE");
  tok.word();
  field.rho.resize(np);
  for (long i = 0; i < np; ++i) field.rho[i] = tok.real();
  return field;
}

std::string density_title(const SolverConfig& cfg) {
  return "bhtopo density nx=" + std::to_string(cfg.mesh.nx) + " ny=" + std::to_string(cfg.mesh.ny) +
         " config=" + config_digest(cfg);
}

std::string snapshot_filename(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "density_t=%.6f.vtk", t);
  return buf;
}

SnapshotWriter::SnapshotWriter(fs::path dir, std::vector<double> requested, std::string title)
    : dir_(std::move(dir)), pending_(std::move(requested)), title_(std::move(title)) {
  std::sort(pending_.begin(), pending_.end());
}

void SnapshotWriter::operator()(const TriMesh& mesh, const KktPoint& x, const TraceRecord& record) {
  bool due = false;
  while (!pending_.empty() && record.t >= pending_.front()) {
    pending_.erase(pending_.begin());
    due = true;
  }
  if (!due) return;
  const fs::path path = dir_ / snapshot_filename(record.t);
  write_density_vtk(mesh, x.rho, path, title_ + " t=" + format_exact(record.t));
  written_.push_back(path);
}

namespace {

void write_summary(const SolverConfig& cfg, const SolveResult& r, const fs::path& path) {
  const Vector& rho = r.final.rho;
  const double mu_inf = cfg.barrier.schedule.mu_inf;
  const double comp = std::max(
      ((r.final.z_lower.array() * rho.array()) - mu_inf).abs().maxCoeff(),
      ((r.final.z_upper.array() * (1.0 - rho.array())) - mu_inf).abs().maxCoeff());
  const auto intermediate = (rho.array() > 0.1 && rho.array() < 0.9).count();

  nlohmann::ordered_json j;
  j["config_digest"] = config_digest(cfg);
  j["vertices"] = rho.size();
  j["unknowns"] = r.initial.pack().size();
  j["accepted_steps"] = r.trace.accepted_count();
  j["rejected_steps"] = r.trace.rejected_count();
  j["newton_tolerance"] = r.tolerance;
  j["final_residual"] = r.final_residual;
  j["max_complementarity_defect"] = comp;
  j["initial_objective"] = r.initial_objective;
  j["final_objective"] = r.final_objective;
  j["min_rho"] = rho.minCoeff();
  j["max_rho"] = rho.maxCoeff();
  j["intermediate_fraction"] = static_cast<double>(intermediate) / static_cast<double>(rho.size());

  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
  close_checked(out, path);
}

}  // namespace

SolveResult solve_and_write(const SolverConfig& cfg, std::ostream* log) {
  cfg.validate();
  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  const std::string title = density_title(cfg);
  SnapshotWriter snapshots(dir, cfg.output.snapshots, title);

  auto observer = [&](const TriMesh& mesh, const KktPoint& x, const TraceRecord& rec) {
    snapshots(mesh, x, rec);
    if (log) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "step %3d  t=%.9f  mu=%-12.6g newton=%2d  |H|=%.3e", rec.index,
                    rec.t, rec.mu, rec.newton_iters, rec.residual_norm);
      *log << buf << '\n';
    }
  };

  SolveResult result;
  try {
    result = solve(cfg, observer);
  } catch (const StepUnderflowError& e) {
    write_param_history(e.trace(), dir / "param_history.csv");
    throw;
  }
  write_param_history(result.trace, dir / "param_history.csv");
  write_density_vtk(result.mesh, result.final.rho, dir / "density_final.vtk", title + " final");
  write_summary(cfg, result, dir / "summary.json");
  return result;
}

}  // namespace bhtopo
