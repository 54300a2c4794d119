#include "slipflow/fem.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace slipflow {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

std::array<Vec2, 3> corners_of(const Mesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  return {mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]};
}

// Gradients of the barycentric coordinates and the triangle area.
std::array<Vec2, 3> barycentric_gradients(const std::array<Vec2, 3>& p, double& area) {
  const double det = (p[1].x() - p[0].x()) * (p[2].y() - p[0].y()) - (p[2].x() - p[0].x()) * (p[1].y() - p[0].y());
  area = 0.5 * det;
  std::array<Vec2, 3> g;
  for (int i = 0; i < 3; ++i) {
    const Vec2& pj = p[(i + 1) % 3];
    const Vec2& pk = p[(i + 2) % 3];
    g[i] = Vec2(pj.y() - pk.y(), pk.x() - pj.x()) / det;
  }
  return g;
}

void p2_from_barycentric(const std::array<Vec2, 3>& grad_lambda, const std::array<double, 3>& l,
                         std::array<double, 6>& values, std::array<Vec2, 6>& gradients) {
  for (int i = 0; i < 3; ++i) {
    values[i] = l[i] * (2.0 * l[i] - 1.0);
    gradients[i] = (4.0 * l[i] - 1.0) * grad_lambda[i];
  }
  for (int e = 0; e < 3; ++e) {
    const int a = e, b = (e + 1) % 3;
    values[3 + e] = 4.0 * l[a] * l[b];
    gradients[3 + e] = 4.0 * (l[b] * grad_lambda[a] + l[a] * grad_lambda[b]);
  }
}

Vec2 physical_point(const std::array<Vec2, 3>& p, const std::array<double, 3>& l) {
  return l[0] * p[0] + l[1] * p[1] + l[2] * p[2];
}

}  // namespace

const TriangleRule& triangle_rule() {
  static const TriangleRule rule = [] {
    constexpr double a1 = 0.44594849091596488632, w1 = 0.22338158967801146570;
    constexpr double a2 = 0.09157621350977074346, w2 = 0.10995174365532186764;
    TriangleRule r;
    r.points = {{{a1, a1, 1.0 - 2.0 * a1}, {a1, 1.0 - 2.0 * a1, a1}, {1.0 - 2.0 * a1, a1, a1},
                 {a2, a2, 1.0 - 2.0 * a2}, {a2, 1.0 - 2.0 * a2, a2}, {1.0 - 2.0 * a2, a2, a2}}};
    r.weights = {w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

void p2_basis(const std::array<Vec2, 3>& vertices, const std::array<double, 3>& lambda,
              std::array<double, 6>& values, std::array<Vec2, 6>& gradients) {
  double area = 0.0;
  p2_from_barycentric(barycentric_gradients(vertices, area), lambda, values, gradients);
}

Eigen::Matrix<double, 6, 6> p2_stiffness(const std::array<Vec2, 3>& vertices) {
  double area = 0.0;
  const auto gl = barycentric_gradients(vertices, area);
  const auto& rule = triangle_rule();
  Eigen::Matrix<double, 6, 6> k = Eigen::Matrix<double, 6, 6>::Zero();
  std::array<double, 6> phi;
  std::array<Vec2, 6> dphi;
  for (int q = 0; q < 6; ++q) {
    p2_from_barycentric(gl, rule.points[q], phi, dphi);
    const double w = rule.weights[q] * area;
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) k(i, j) += w * dphi[i].dot(dphi[j]);
  }
  return k;
}

FemSpace build_space(const Mesh& mesh, const BoundaryShape& shape) {
  FemSpace s;
  s.mesh = mesh;
  s.n_vertices = static_cast<int>(mesh.vertices.size());
  s.n_p2 = s.n_vertices + static_cast<int>(mesh.edges.size());

  s.nodes = mesh.vertices;
  s.nodes.reserve(s.n_p2);
  for (const auto& e : mesh.edges) s.nodes.push_back(0.5 * (mesh.vertices[e.vertices[0]] + mesh.vertices[e.vertices[1]]));

  s.cell_nodes.reserve(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& v = mesh.triangles[t];
    const auto& e = mesh.triangle_edges[t];
    s.cell_nodes.push_back({v[0], v[1], v[2], s.n_vertices + e[0], s.n_vertices + e[1], s.n_vertices + e[2]});
  }

  s.on_gamma.assign(s.n_p2, 0);
  s.on_slip.assign(s.n_p2, 0);
  for (int ei = 0; ei < static_cast<int>(mesh.edges.size()); ++ei) {
    const auto& e = mesh.edges[ei];
    if (e.tag == BoundaryTag::Interior) continue;
    char& mark = e.tag == BoundaryTag::Slip ? s.on_slip[s.n_vertices + ei] : s.on_gamma[s.n_vertices + ei];
    mark = 1;
    for (int v : e.vertices) (e.tag == BoundaryTag::Slip ? s.on_slip[v] : s.on_gamma[v]) = 1;
  }
  for (int k = 0; k < s.n_p2; ++k)
    if (s.on_gamma[k]) {
      s.gamma_dofs.push_back(s.velocity_dof(0, k));
      s.gamma_dofs.push_back(s.velocity_dof(1, k));
    }

  auto add_slip = [&](int node, double x1) {
    const auto frame = boundary_frame(shape, x1);
    SlipNode sn{node, x1, frame.normal, frame.tangent, frame.weight, s.on_gamma[node] != 0};
    if (!sn.corner) s.active_slip.push_back(static_cast<int>(s.slip_nodes.size()));
    s.slip_nodes.push_back(sn);
  };
  const int nx = mesh.nx;
  for (int i = 0; i < nx; ++i) {
    add_slip(mesh.vertex_index(i, 0), static_cast<double>(i) / nx);
    add_slip(s.n_vertices + mesh.slip_edges[i], (i + 0.5) / nx);
  }
  add_slip(mesh.vertex_index(nx, 0), 1.0);

  for (int e = 0; e < nx; ++e) {
    const auto [xa, xb] = mesh.slip_intervals[e];
    std::array<double, 3> d;
    for (int q = 0; q < 3; ++q) d[q] = boundary_frame(shape, xa + kEdgeGauss.points[q] * (xb - xa)).weight;
    s.slip_density.push_back(d);
  }
  return s;
}

Vector assemble_load(const FemSpace& space, const BodyForce& force) {
  Vector F = Vector::Zero(space.velocity_dofs());
  const auto& rule = triangle_rule();
  std::array<double, 6> phi;
  std::array<Vec2, 6> dphi;
  for (int t = 0; t < static_cast<int>(space.cell_nodes.size()); ++t) {
    const auto p = corners_of(space.mesh, t);
    double area = 0.0;
    const auto gl = barycentric_gradients(p, area);
    for (int q = 0; q < 6; ++q) {
      p2_from_barycentric(gl, rule.points[q], phi, dphi);
      const Vec2 f = force(physical_point(p, rule.points[q]));
      const double w = rule.weights[q] * area;
      for (int i = 0; i < 6; ++i) {
        const int node = space.cell_nodes[t][i];
        F[space.velocity_dof(0, node)] += w * f.x() * phi[i];
        F[space.velocity_dof(1, node)] += w * f.y() * phi[i];
      }
    }
  }
  return F;
}

AssembledSystem assemble(const FemSpace& space, const BodyForce& force) {
  const int nv = space.velocity_dofs();
  const int np = space.pressure_dofs();
  Triplets ta, tm, tb, tp;
  const auto& rule = triangle_rule();
  std::array<double, 6> phi;
  std::array<Vec2, 6> dphi;

  for (int t = 0; t < static_cast<int>(space.cell_nodes.size()); ++t) {
    const auto p = corners_of(space.mesh, t);
    const auto& cn = space.cell_nodes[t];
    const auto& tri = space.mesh.triangles[t];
    double area = 0.0;
    const auto gl = barycentric_gradients(p, area);
    Eigen::Matrix<double, 6, 6> ke = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> me = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 3, 6> bx = Eigen::Matrix<double, 3, 6>::Zero();
    Eigen::Matrix<double, 3, 6> by = Eigen::Matrix<double, 3, 6>::Zero();
    Eigen::Matrix3d mp = Eigen::Matrix3d::Zero();
    for (int q = 0; q < 6; ++q) {
      const auto& l = rule.points[q];
      p2_from_barycentric(gl, l, phi, dphi);
      const double w = rule.weights[q] * area;
      for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
          ke(i, j) += w * dphi[i].dot(dphi[j]);
          me(i, j) += w * phi[i] * phi[j];
        }
        for (int k = 0; k < 3; ++k) {
          bx(k, i) += w * l[k] * dphi[i].x();
          by(k, i) += w * l[k] * dphi[i].y();
        }
      }
      for (int k = 0; k < 3; ++k)
        for (int m = 0; m < 3; ++m) mp(k, m) += w * l[k] * l[m];
    }
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          ta.emplace_back(space.velocity_dof(c, cn[i]), space.velocity_dof(c, cn[j]), ke(i, j));
          tm.emplace_back(space.velocity_dof(c, cn[i]), space.velocity_dof(c, cn[j]), me(i, j));
        }
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 6; ++i) {
        tb.emplace_back(tri[k], space.velocity_dof(0, cn[i]), bx(k, i));
        tb.emplace_back(tri[k], space.velocity_dof(1, cn[i]), by(k, i));
      }
      for (int m = 0; m < 3; ++m) tp.emplace_back(tri[k], tri[m], mp(k, m));
    }
  }

  AssembledSystem sys;
  sys.A.resize(nv, nv);
  sys.A.setFromTriplets(ta.begin(), ta.end());
  sys.Mv.resize(nv, nv);
  sys.Mv.setFromTriplets(tm.begin(), tm.end());
  sys.B.resize(np, nv);
  sys.B.setFromTriplets(tb.begin(), tb.end());
  sys.Mp.resize(np, np);
  sys.Mp.setFromTriplets(tp.begin(), tp.end());
  sys.pressure_mean = sys.Mp * Vector::Ones(np);
  sys.F = assemble_load(space, force);

  const int ns = space.slip_count();
  Triplets tn, tt;
  for (int j = 0; j < ns; ++j) {
    const auto& sn = space.slip_nodes[j];
    for (int c = 0; c < 2; ++c) {
      tn.emplace_back(j, space.velocity_dof(c, sn.node), sn.normal[c]);
      tt.emplace_back(j, space.velocity_dof(c, sn.node), sn.tangent[c]);
    }
  }
  sys.N.resize(ns, nv);
  sys.N.setFromTriplets(tn.begin(), tn.end());
  sys.T.resize(ns, nv);
  sys.T.setFromTriplets(tt.begin(), tt.end());

  // Row sums of the P2 edge mass with the exact arclength density.
  sys.W = Vector::Zero(ns);
  for (int e = 0; e < space.mesh.nx; ++e) {
    const auto [xa, xb] = space.mesh.slip_intervals[e];
    const double h = xb - xa;
    for (int q = 0; q < 3; ++q) {
      const double s = kEdgeGauss.points[q];
      const std::array<double, 3> basis = {(1.0 - s) * (1.0 - 2.0 * s), 4.0 * s * (1.0 - s), s * (2.0 * s - 1.0)};
      for (int k = 0; k < 3; ++k) sys.W[2 * e + k] += kEdgeGauss.weights[q] * h * space.slip_density[e][q] * basis[k];
    }
  }
  return sys;
}

double h1_seminorm(const AssembledSystem& system, const Vector& u) { return std::sqrt(std::max(0.0, u.dot(system.A * u))); }

double h1_norm(const AssembledSystem& system, const Vector& u) {
  return std::sqrt(std::max(0.0, u.dot(system.A * u) + u.dot(system.Mv * u)));
}

double pressure_l2(const AssembledSystem& system, const Vector& p) { return std::sqrt(std::max(0.0, p.dot(system.Mp * p))); }

double slip_l2(const AssembledSystem& system, const Vector& values) {
  return std::sqrt(values.cwiseProduct(values).dot(system.W));
}

void write_solution_vtk(const std::filesystem::path& path, const FemSpace& space, const Vector& u, const Vector& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  out << "# vtk DataFile Version 3.0\nslipflow solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << space.n_p2 << " double\n";
  for (const auto& x : space.nodes) out << x.x() << " " << x.y() << " 0\n";
  const auto nc = space.cell_nodes.size();
  out << "CELLS " << nc << " " << 7 * nc << "\n";
  for (const auto& c : space.cell_nodes) {
    out << "6";
    for (int k : c) out << " " << k;
    out << "\n";
  }
  out << "CELL_TYPES " << nc << "\n";
  for (std::size_t i = 0; i < nc; ++i) out << "22\n";
  out << "POINT_DATA " << space.n_p2 << "\n";
  out << "VECTORS u double\n";
  for (int k = 0; k < space.n_p2; ++k)
    out << u[space.velocity_dof(0, k)] << " " << u[space.velocity_dof(1, k)] << " 0\n";
  out << "SCALARS p double 1\nLOOKUP_TABLE default\n";
  for (int k = 0; k < space.n_vertices; ++k) out << p[k] << "\n";
  for (const auto& e : space.mesh.edges) out << 0.5 * (p[e.vertices[0]] + p[e.vertices[1]]) << "\n";
}

void write_coo(const std::filesystem::path& path, const SparseMatrix& matrix) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  for (int k = 0; k < matrix.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

}  // namespace slipflow
