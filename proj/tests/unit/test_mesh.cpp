#include <doctest.h>

#include <cmath>
#include <map>

#include "slipflow/mesh.hpp"

using namespace slipflow;

namespace {
BoundaryShape shape_of(const ShapeCandidate& c) { return validate_shape(c, AdmissibleSetParams{}); }
}  // namespace

TEST_CASE("two by two mesh of the flat channel") {
  const auto m = build_mesh(shape_of(ShapeCandidate::constant(0.5)), 2, 2);
  CHECK(m.vertices.size() == 9);
  CHECK(m.triangles.size() == 8);
  CHECK(m.edges.size() == 16);
  CHECK(m.slip_edges.size() == 2);
  CHECK(m.total_area() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m.vertices[m.vertex_index(1, 1)].isApprox(Vec2(0.5, 1.0)));
  CHECK_THROWS_AS(build_mesh(shape_of(ShapeCandidate::constant(0.5)), 1, 2), std::invalid_argument);
}

TEST_CASE("area of the sine channel") {
  // The sine integrates to zero, so the exact area is omega - 0.5 = 1.
  const auto m = build_mesh(shape_of(ShapeCandidate::sine(0.5, 0.05, 1.0)), 64, 64);
  CHECK(std::abs(m.total_area() - 1.0) <= 1e-4);
}

TEST_CASE("mesh audit") {
  for (const auto& c : {ShapeCandidate::constant(0.5), ShapeCandidate::sine(0.5, 0.05, 1.0),
                        ShapeCandidate::spline(std::vector<double>{0.45, 0.5, 0.55, 0.5, 0.45})}) {
    const auto m = build_mesh(shape_of(c), 5, 3);
    for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) CHECK(m.triangle_area(t) > 0.0);

    std::map<std::pair<int, int>, int> uses;
    for (const auto& tri : m.triangles)
      for (int k = 0; k < 3; ++k) {
        const int a = tri[k], b = tri[(k + 1) % 3];
        uses[{std::min(a, b), std::max(a, b)}]++;
      }
    CHECK(uses.size() == m.edges.size());
    std::map<BoundaryTag, int> tags;
    for (const auto& e : m.edges) {
      const int n = uses.at({std::min(e.vertices[0], e.vertices[1]), std::max(e.vertices[0], e.vertices[1])});
      CHECK(n == (e.tag == BoundaryTag::Interior ? 2 : 1));
      tags[e.tag]++;
      const Vec2 a = m.vertices[e.vertices[0]], b = m.vertices[e.vertices[1]];
      switch (e.tag) {
        case BoundaryTag::Left:
          CHECK((a.x() == 0.0 && b.x() == 0.0));
          break;
        case BoundaryTag::Right:
          CHECK((a.x() == 1.0 && b.x() == 1.0));
          break;
        case BoundaryTag::Top:
          CHECK((a.y() == 1.5 && b.y() == 1.5));
          break;
        default:
          break;
      }
    }
    CHECK(tags[BoundaryTag::Slip] == 5);
    CHECK(tags[BoundaryTag::Top] == 5);
    CHECK(tags[BoundaryTag::Left] == 3);
    CHECK(tags[BoundaryTag::Right] == 3);

    // Slip edges run along the graph, ordered by x1, covering [0, 1].
    double x = 0.0;
    for (std::size_t k = 0; k < m.slip_edges.size(); ++k) {
      CHECK(m.slip_intervals[k][0] == doctest::Approx(x));
      x = m.slip_intervals[k][1];
      const auto& e = m.edges[m.slip_edges[k]];
      CHECK(e.tag == BoundaryTag::Slip);
      for (int v : e.vertices) CHECK(m.vertices[v].y() == doctest::Approx(c.value(m.vertices[v].x())).epsilon(1e-14));
    }
    CHECK(x == doctest::Approx(1.0));
  }
}

TEST_CASE("reference coordinates invert the vertical map") {
  const auto s = shape_of(ShapeCandidate::sine(0.5, 0.05, 1.0));
  const auto m = build_mesh(s, 4, 4);
  for (int j = 0; j <= 4; ++j)
    for (int i = 0; i <= 4; ++i) {
      const Vec2 r = to_reference(s, m.vertices[m.vertex_index(i, j)]);
      CHECK(r.x() == doctest::Approx(i / 4.0));
      CHECK(r.y() == doctest::Approx(j / 4.0));
    }
}
