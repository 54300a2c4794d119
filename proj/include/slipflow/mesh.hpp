#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "slipflow/geometry.hpp"

namespace slipflow {

enum class BoundaryTag : std::uint8_t { Interior, Slip, Left, Right, Top };

struct Edge {
  std::array<int, 2> vertices;
  BoundaryTag tag = BoundaryTag::Interior;
};

/// Structured triangulation of Omega(alpha) obtained from the unit-square
/// grid by the vertical map x2 = alpha(x1) + t (omega - alpha(x1)).
///
/// Vertex (i, j) has index j (n_x + 1) + i. Every mesh built with the same
/// (n_x, n_y) has identical connectivity.
struct Mesh {
  int nx = 0;
  int ny = 0;
  double omega = 0.0;
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;      // counter-clockwise
  std::vector<Edge> edges;
  std::vector<std::array<int, 3>> triangle_edges;  // edges (v0 v1), (v1 v2), (v2 v0)
  std::vector<int> slip_edges;                     // ordered by x1
  std::vector<std::array<double, 2>> slip_intervals;

  int vertex_index(int i, int j) const { return j * (nx + 1) + i; }
  double triangle_area(int t) const;
  double total_area() const;
};

Mesh build_mesh(const BoundaryShape& shape, int nx, int ny);

/// Reference coordinates (x1, t) of a physical point under the vertical map.
Vec2 to_reference(const BoundaryShape& shape, const Vec2& x);

void write_vtk(const std::filesystem::path& path, const Mesh& mesh);

}  // namespace slipflow
