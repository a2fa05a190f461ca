#pragma once

#include <map>
#include <vector>

#include "csim/linalg.hpp"

namespace csim {

/// Simplicial grid on the standard (n-1)-simplex: all points with integer
/// barycentric numerators summing to m. Cells come from the staircase
/// triangulation in cumulative-sum coordinates, which restricts cleanly to
/// every face of the simplex.
struct BarycentricMesh {
  int n = 0;  // species count (ambient dimension)
  int m = 0;  // subdivision resolution

  std::vector<std::vector<int>> points;     // integer coordinates, lexicographic order
  std::vector<std::vector<int>> neighbors;  // p ~ q iff q = p + e_i - e_j
  std::vector<std::vector<int>> cells;      // top-dimensional simplices (n node ids each)
  std::vector<std::vector<int>> node_cells; // cells incident to each node

  /// Barycentric direction of node p (coordinates / m), a point of Delta.
  Vec direction(int p) const;

  /// Index of the node with the given integer coordinates, or -1.
  int index_of(const std::vector<int>& coords) const;

  /// Indices i with point[p][i] == 0 (the support face selector of the node).
  std::vector<int> zero_coords(int p) const;

  /// True if every coordinate of node p is positive (interior of Delta).
  bool is_interior(int p) const;

  std::map<std::vector<int>, int> index;
};

BarycentricMesh make_mesh(int n, int m);

/// Piecewise-linear interpolation of nodal values at an arbitrary direction
/// u in Delta (coordinates >= 0 summing to 1).
double interpolate_linear(const BarycentricMesh& mesh, const Vec& values, const Vec& u);

/// Locates a target direction inside a deformed copy of the mesh: the node
/// positions are `cloud[p]` (directions in Delta) instead of mesh.direction(p).
/// Returns the value interpolated over the containing (or least-violated)
/// deformed cell. `hint_node` narrows the search to nearby cells first.
double interpolate_in_deformed(const BarycentricMesh& mesh, const std::vector<Vec>& cloud,
                               const Vec& values, const Vec& u, int hint_node);

}  // namespace csim
