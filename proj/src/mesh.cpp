#include "bhtopo/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace bhtopo {

std::string to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::DirichletZero: return "DirichletZero";
    case EdgeTag::NeumannTraction: return "NeumannTraction";
    case EdgeTag::NeumannFree: return "NeumannFree";
  }
  return "?";
}

double Segment::length() const {
  return std::hypot(to[0] - from[0], to[1] - from[1]);
}

bool Segment::contains(const Point2& p, double tol) const {
  const double lo_x = std::min(from[0], to[0]), hi_x = std::max(from[0], to[0]);
  const double lo_y = std::min(from[1], to[1]), hi_y = std::max(from[1], to[1]);
  return p[0] >= lo_x - tol && p[0] <= hi_x + tol && p[1] >= lo_y - tol &&
         p[1] <= hi_y + tol;
}

namespace {

bool is_horizontal(const Segment& s) {
  return std::abs(s.from[1] - s.to[1]) <= kGeometricTolerance;
}

bool is_vertical(const Segment& s) {
  return std::abs(s.from[0] - s.to[0]) <= kGeometricTolerance;
}

std::string describe(const Segment& s) {
  std::ostringstream os;
  os << "[(" << s.from[0] << ", " << s.from[1] << ") - (" << s.to[0] << ", "
     << s.to[1] << ")]";
  return os.str();
}

// Length of the common part of two segments lying on the same line.
double overlap_length(const Segment& a, const Segment& b) {
  const double tol = kGeometricTolerance;
  if (is_horizontal(a) && is_horizontal(b) && std::abs(a.from[1] - b.from[1]) <= tol) {
    const double lo = std::max(std::min(a.from[0], a.to[0]), std::min(b.from[0], b.to[0]));
    const double hi = std::min(std::max(a.from[0], a.to[0]), std::max(b.from[0], b.to[0]));
    return hi - lo;
  }
  if (is_vertical(a) && is_vertical(b) && std::abs(a.from[0] - b.from[0]) <= tol) {
    const double lo = std::max(std::min(a.from[1], a.to[1]), std::min(b.from[1], b.to[1]));
    const double hi = std::min(std::max(a.from[1], a.to[1]), std::max(b.from[1], b.to[1]));
    return hi - lo;
  }
  return 0.0;
}

}  // namespace

void DomainSpec::validate() const {
  if (!(width > 0.0) || !(height > 0.0)) {
    throw std::invalid_argument("domain width and height must be positive");
  }
  const double tol = kGeometricTolerance;
  std::vector<const Segment*> all;
  for (const auto* list : {&dirichlet_segments, &traction_segments}) {
    for (const auto& s : *list) {
      if (s.length() <= tol) {
        throw std::invalid_argument("degenerate boundary segment " + describe(s));
      }
      bool on_boundary = false;
      if (is_horizontal(s)) {
        const double y = s.from[1];
        on_boundary = (std::abs(y) <= tol || std::abs(y - height) <= tol) &&
                      std::min(s.from[0], s.to[0]) >= -tol &&
                      std::max(s.from[0], s.to[0]) <= width + tol;
      } else if (is_vertical(s)) {
        const double x = s.from[0];
        on_boundary = (std::abs(x) <= tol || std::abs(x - width) <= tol) &&
                      std::min(s.from[1], s.to[1]) >= -tol &&
                      std::max(s.from[1], s.to[1]) <= height + tol;
      }
      if (!on_boundary) {
        throw std::invalid_argument("segment " + describe(s) + " does not lie on the boundary");
      }
      all.push_back(&s);
    }
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (overlap_length(*all[i], *all[j]) > tol) {
        throw std::invalid_argument("boundary segments " + describe(*all[i]) + " and " +
                                    describe(*all[j]) + " overlap");
      }
    }
  }
}

double DomainSpec::traction_length() const {
  double total = 0.0;
  for (const auto& s : traction_segments) total += s.length();
  return total;
}

DomainSpec bridge_domain() {
  DomainSpec spec;
  spec.width = 2.4;
  spec.height = 0.8;
  spec.dirichlet_segments = {Segment{{0.0, 0.0}, {0.12, 0.0}},
                             Segment{{2.28, 0.0}, {2.4, 0.0}}};
  spec.traction_segments = {Segment{{1.08, 0.0}, {1.32, 0.0}}};
  spec.traction = {0.0, -1.0};
  return spec;
}

double TriMesh::signed_area(std::size_t tri) const {
  const auto& t = triangles[tri];
  const Point2& a = vertices[t[0]];
  const Point2& b = vertices[t[1]];
  const Point2& c = vertices[t[2]];
  return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]));
}

double TriMesh::edge_length(const BoundaryEdge& e) const {
  const Point2& a = vertices[e.vertices[0]];
  const Point2& b = vertices[e.vertices[1]];
  return std::hypot(b[0] - a[0], b[1] - a[1]);
}

namespace {

// Grid coordinate i*extent/n, computed from the nearer end so that the grid
// is exactly symmetric under reflection about the midpoint.
double grid_coordinate(int i, int n, double extent) {
  if (2 * i <= n) return extent * i / n;
  return extent - extent * (n - i) / n;
}

bool in_any(const std::vector<Segment>& segs, const Point2& a, const Point2& b) {
  return std::any_of(segs.begin(), segs.end(), [&](const Segment& s) {
    return s.contains(a, kGeometricTolerance) && s.contains(b, kGeometricTolerance);
  });
}

}  // namespace

TriMesh build_structured_mesh(const DomainSpec& spec, int nx, int ny, DiagonalPattern pattern) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("mesh resolution must be at least 1x1");
  }
  spec.validate();

  TriMesh mesh;
  mesh.width = spec.width;
  mesh.height = spec.height;
  mesh.nx = nx;
  mesh.ny = ny;

  const auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

  mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      mesh.vertices.push_back({grid_coordinate(i, nx, spec.width),
                               grid_coordinate(j, ny, spec.height)});
    }
  }

  mesh.triangles.reserve(static_cast<std::size_t>(2 * nx * ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = vid(i, j), v10 = vid(i + 1, j);
      const int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      const bool forward = pattern == DiagonalPattern::Uniform || 2 * i < nx;
      if (forward) {
        mesh.triangles.push_back({v00, v10, v11});
        mesh.triangles.push_back({v00, v11, v01});
      } else {
        mesh.triangles.push_back({v00, v10, v01});
        mesh.triangles.push_back({v10, v11, v01});
      }
    }
  }

  // Boundary traversed counter-clockwise: bottom, right, top, left.
  std::vector<std::array<int, 2>> edges;
  edges.reserve(static_cast<std::size_t>(2 * (nx + ny)));
  for (int i = 0; i < nx; ++i) edges.push_back({vid(i, 0), vid(i + 1, 0)});
  for (int j = 0; j < ny; ++j) edges.push_back({vid(nx, j), vid(nx, j + 1)});
  for (int i = nx; i > 0; --i) edges.push_back({vid(i, ny), vid(i - 1, ny)});
  for (int j = ny; j > 0; --j) edges.push_back({vid(0, j), vid(0, j - 1)});

  mesh.boundary_edges.reserve(edges.size());
  for (const auto& e : edges) {
    const Point2& a = mesh.vertices[e[0]];
    const Point2& b = mesh.vertices[e[1]];
    EdgeTag tag = EdgeTag::NeumannFree;
    if (in_any(spec.dirichlet_segments, a, b)) {
      tag = EdgeTag::DirichletZero;
    } else if (in_any(spec.traction_segments, a, b)) {
      tag = EdgeTag::NeumannTraction;
    }
    mesh.boundary_edges.push_back({e, tag});
  }
  return mesh;
}

std::vector<int> dirichlet_vertex_set(const TriMesh& mesh) {
  std::set<int> ids;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag == EdgeTag::DirichletZero) {
      ids.insert(e.vertices[0]);
      ids.insert(e.vertices[1]);
    }
  }
  return {ids.begin(), ids.end()};
}

}  // namespace bhtopo
