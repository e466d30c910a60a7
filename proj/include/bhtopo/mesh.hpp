#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bhtopo {

using Point2 = std::array<double, 2>;

enum class EdgeTag { DirichletZero, NeumannTraction, NeumannFree };

std::string to_string(EdgeTag tag);

/// Axis-aligned piece of the rectangle boundary, given by its two end points.
struct Segment {
  Point2 from;
  Point2 to;

  double length() const;
  bool contains(const Point2& p, double tol) const;
};

/// Rectangle [0,width] x [0,height] with tagged boundary pieces and a constant
/// traction applied on the traction segments.
struct DomainSpec {
  double width = 1.0;
  double height = 1.0;
  std::vector<Segment> dirichlet_segments;
  std::vector<Segment> traction_segments;
  Point2 traction{0.0, 0.0};

  /// Throws std::invalid_argument if a segment leaves the boundary, is
  /// degenerate, or overlaps another segment.
  void validate() const;

  double traction_length() const;
};

/// Beam on two supports with a centered load: [0,2.4]x[0,0.8], clamped on
/// [0,0.12] and [2.28,2.4] at y=0, loaded with (0,-1) on [1.08,1.32] at y=0.
DomainSpec bridge_domain();

/// How each grid cell is split into two triangles.
enum class DiagonalPattern {
  Uniform,   // every cell split lower-left to upper-right
  Mirrored,  // left half as Uniform, right half mirrored about x = width/2
};

struct BoundaryEdge {
  std::array<int, 2> vertices;
  EdgeTag tag;
};

struct TriMesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // counter-clockwise
  std::vector<BoundaryEdge> boundary_edges;
  double width = 0.0;
  double height = 0.0;
  int nx = 0;
  int ny = 0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  double signed_area(std::size_t tri) const;
  double edge_length(const BoundaryEdge& e) const;
};

constexpr double kGeometricTolerance = 1e-12;

TriMesh build_structured_mesh(const DomainSpec& spec, int nx, int ny,
                              DiagonalPattern pattern = DiagonalPattern::Uniform);

/// Vertices incident to at least one DirichletZero edge, sorted ascending.
std::vector<int> dirichlet_vertex_set(const TriMesh& mesh);

}  // namespace bhtopo
