#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "slipflow/geometry.hpp"
#include "slipflow/mesh.hpp"

namespace slipflow {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using BodyForce = std::function<Vec2(const Vec2&)>;

/// A P2 node lying on the closed slip boundary, with its geometric frame.
struct SlipNode {
  int node = -1;          // P2 node index
  double x1 = 0.0;
  Vec2 normal;
  Vec2 tangent;
  double arc_weight = 1.0;  // sqrt(1 + alpha'^2) at x1
  bool corner = false;      // x1 in {0, 1}: belongs to the no-slip part
};

/// Taylor-Hood P2/P1 layout on a Mesh.
///
/// Scalar P2 nodes are the mesh vertices followed by the edge midpoints.
/// Velocity DOF (component c, node k) is c * n_p2 + k; pressure DOFs are the
/// vertices. Slip nodes are all P2 nodes on the closed slip boundary, sorted
/// by x1; corner entries carry no unknowns.
struct FemSpace {
  Mesh mesh;
  int n_vertices = 0;
  int n_p2 = 0;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 6>> cell_nodes;  // v0 v1 v2 m01 m12 m20
  std::vector<char> on_gamma;                  // per P2 node
  std::vector<char> on_slip;                   // per P2 node, corners included
  std::vector<int> gamma_dofs;
  std::vector<SlipNode> slip_nodes;
  std::vector<int> active_slip;  // indices into slip_nodes, corners excluded
  /// sqrt(1 + alpha'^2) at the edge Gauss points of each slip edge.
  std::vector<std::array<double, 3>> slip_density;

  int velocity_dofs() const { return 2 * n_p2; }
  int pressure_dofs() const { return n_vertices; }
  int slip_count() const { return static_cast<int>(slip_nodes.size()); }
  int velocity_dof(int component, int node) const { return component * n_p2 + node; }
};

FemSpace build_space(const Mesh& mesh, const BoundaryShape& shape);

/// Global operators of the Stokes problem on a FemSpace.
struct AssembledSystem {
  SparseMatrix A;   // vector Laplacian, a(u, v)
  SparseMatrix B;   // b(v, q) = int q div v, rows = pressure DOFs
  SparseMatrix Mv;  // velocity mass
  SparseMatrix Mp;  // pressure mass
  Vector F;         // (f, v)
  Vector pressure_mean;  // int of each P1 basis function
  SparseMatrix N;   // normal trace at slip nodes
  SparseMatrix T;   // tangential trace at slip nodes
  Vector W;         // lumped slip-boundary mass, one entry per slip node
};

AssembledSystem assemble(const FemSpace& space, const BodyForce& force);

/// Load vector only, for re-using operators with another force.
Vector assemble_load(const FemSpace& space, const BodyForce& force);

// Element-level helpers, exposed for verification.

/// 6-point degree-4 rule on the reference triangle: barycentric points and
/// weights summing to one.
struct TriangleRule {
  std::array<std::array<double, 3>, 6> points;
  std::array<double, 6> weights;
};
const TriangleRule& triangle_rule();

/// 3-point Gauss rule on [0, 1].
struct EdgeRule {
  std::array<double, 3> points;
  std::array<double, 3> weights;
};
inline constexpr EdgeRule kEdgeGauss{{0.11270166537925831148, 0.5, 0.88729833462074168852},
                                     {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};

/// Scalar P2 stiffness matrix of one triangle (node order v0 v1 v2 m01 m12 m20).
Eigen::Matrix<double, 6, 6> p2_stiffness(const std::array<Vec2, 3>& vertices);

/// P2 values and physical gradients at barycentric point `lambda`.
void p2_basis(const std::array<Vec2, 3>& vertices, const std::array<double, 3>& lambda,
              std::array<double, 6>& values, std::array<Vec2, 6>& gradients);

/// Discrete norms.
double h1_seminorm(const AssembledSystem& system, const Vector& u);
double h1_norm(const AssembledSystem& system, const Vector& u);
double pressure_l2(const AssembledSystem& system, const Vector& p);
double slip_l2(const AssembledSystem& system, const Vector& values);

/// Legacy-VTK output with quadratic triangles; pressure is interpolated to
/// edge midpoints.
void write_solution_vtk(const std::filesystem::path& path, const FemSpace& space, const Vector& u,
                        const Vector& p);

/// Coordinate-format matrix dump, one `i j value` line per stored entry.
void write_coo(const std::filesystem::path& path, const SparseMatrix& matrix);

}  // namespace slipflow
