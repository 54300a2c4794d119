#include "slipflow/mesh.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>

#include "slipflow/errors.hpp"

namespace slipflow {

double Mesh::triangle_area(int t) const {
  const auto& tri = triangles[t];
  const Vec2 a = vertices[tri[1]] - vertices[tri[0]];
  const Vec2 b = vertices[tri[2]] - vertices[tri[0]];
  return 0.5 * (a.x() * b.y() - a.y() * b.x());
}

double Mesh::total_area() const {
  double s = 0.0;
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) s += triangle_area(t);
  return s;
}

Mesh build_mesh(const BoundaryShape& shape, int nx, int ny) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("build_mesh: n_x and n_y must be at least 2");

  Mesh mesh;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.omega = shape.omega();
  mesh.vertices.reserve((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    const double t = static_cast<double>(j) / ny;
    for (int i = 0; i <= nx; ++i) {
      const double x1 = static_cast<double>(i) / nx;
      const double a = shape.alpha(x1);
      // Pin the top row exactly to omega.
      const double x2 = j == ny ? shape.omega() : a + t * (shape.omega() - a);
      mesh.vertices.emplace_back(x1, x2);
    }
  }

  std::map<std::pair<int, int>, int> edge_ids;
  auto edge_of = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto [it, inserted] = edge_ids.try_emplace({key.first, key.second}, static_cast<int>(mesh.edges.size()));
    if (inserted) mesh.edges.push_back({{a, b}, BoundaryTag::Interior});
    return it->second;
  };

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = mesh.vertex_index(i, j), v10 = mesh.vertex_index(i + 1, j);
      const int v01 = mesh.vertex_index(i, j + 1), v11 = mesh.vertex_index(i + 1, j + 1);
      for (const std::array<int, 3> tri : {std::array{v00, v10, v11}, std::array{v00, v11, v01}}) {
        mesh.triangles.push_back(tri);
        mesh.triangle_edges.push_back({edge_of(tri[0], tri[1]), edge_of(tri[1], tri[2]), edge_of(tri[2], tri[0])});
      }
    }
  }

  for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
    const double area = mesh.triangle_area(t);
    if (!(area > 0.0)) throw DegenerateCell(t, area);
  }

  auto tag = [&](int a, int b, BoundaryTag tg) { mesh.edges[edge_ids.at(std::minmax(a, b))].tag = tg; };
  for (int i = 0; i < nx; ++i) {
    const int a = mesh.vertex_index(i, 0), b = mesh.vertex_index(i + 1, 0);
    tag(a, b, BoundaryTag::Slip);
    mesh.slip_edges.push_back(edge_ids.at(std::minmax(a, b)));
    mesh.slip_intervals.push_back({static_cast<double>(i) / nx, static_cast<double>(i + 1) / nx});
    tag(mesh.vertex_index(i, ny), mesh.vertex_index(i + 1, ny), BoundaryTag::Top);
  }
  for (int j = 0; j < ny; ++j) {
    tag(mesh.vertex_index(0, j), mesh.vertex_index(0, j + 1), BoundaryTag::Left);
    tag(mesh.vertex_index(nx, j), mesh.vertex_index(nx, j + 1), BoundaryTag::Right);
  }
  return mesh;
}

Vec2 to_reference(const BoundaryShape& shape, const Vec2& x) {
  const double a = shape.alpha(x.x());
  return {x.x(), (x.y() - a) / (shape.omega() - a)};
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\nslipflow mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.vertices.size() << " double\n";
  for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " 0\n";
  out << "CELLS " << mesh.triangles.size() << " " << 4 * mesh.triangles.size() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.triangles.size() << "\n";
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) out << "5\n";
}

}  // namespace slipflow
