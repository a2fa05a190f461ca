#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "csim/flow.hpp"
#include "csim/mesh.hpp"
#include "csim/sysmodel.hpp"

namespace csim {

/// The reconstructed carrying simplex as a radius function over the
/// barycentric mesh of Delta: the surface is {r(u) * u : u in Delta}.
/// The radius of a point x is sum_i x_i (so x = r * u with u in Delta).
struct RadialGraph {
  BarycentricMesh mesh;
  Vec radii;
  Vec bracket_width;           // final outer-inner bracket width per ray
  bool converged = true;       // every ray contracted below tol_hausdorff
  bool polished = false;       // per-ray backward-time bisection applied
  double tol_hausdorff = 0.0;
  std::vector<int> unconverged_rays;

  /// Ambient surface point for mesh node p.
  Vec point(int p) const;
};

struct SweepParams {
  int m = 40;
  double r_outer = 0.0;    // <= 0 selects 2 * (sum of axial radii)
  double eps_inner = 0.0;  // <= 0 selects 1e-2 * (min axial radius)
  double t_sweep = 200.0;  // total sweep time cap
  double tol_hausdorff = 1e-4;
  double dt_increment = 1.0;  // flow time between re-projections
  bool polish = true;         // refine each ray by backward-time bisection
  double polish_tol = 1e-6;
};

/// Two-sided radial shell sweep: an outer shell above the attractor and an
/// inner shell near the repelling origin are flowed forward and radially
/// re-projected onto the mesh rays until they bracket the carrying simplex.
/// Boundary rays are swept inside their own face subsystem.
RadialGraph reconstruct_sigma(const std::shared_ptr<const System>& sys,
                              const SweepParams& params, const IntegratorConfig& cfg);

/// Radius of the reconstructed surface along an arbitrary ray direction.
/// Uses a local quadratic fit over the containing cell's neighborhood
/// (falls back to piecewise-linear at degenerate spots). Mesh queries
/// inherit the interpolation error of the mesh; near points where the
/// surface is not twice differentiable that error decays slowly in m, so
/// exact per-ray answers must come from radius_on_ray.
double radius_at(const RadialGraph& graph, const Vec& u);

/// Radius of the carrying simplex itself along one ray: bisection on the
/// backward-time dichotomy, the same solve the reconstruction's polish
/// stage uses. Rays on a boundary face are solved inside their own
/// subsystem. Mesh-free and accurate to tol, but far slower than a graph
/// query.
double radius_on_ray(const std::shared_ptr<const System>& sys, const Vec& u,
                     const IntegratorConfig& cfg, double tol = 1e-6);

/// Plain piecewise-linear radius query.
double radius_at_linear(const RadialGraph& graph, const Vec& u);

struct ResidualReport {
  double max_residual = 0.0;
  Vec per_point;
};

/// Flows every graph point by dt_probe and measures the distance back to
/// the interpolated surface (radial mismatch along the flowed ray).
ResidualReport invariance_residual(const RadialGraph& graph, const System& sys,
                                   double dt_probe, const IntegratorConfig& cfg);

/// Pairs of graph points strictly ordered componentwise on the shared
/// support face; a valid carrying simplex yields an empty list.
std::vector<std::pair<int, int>> unorderedness_check(const RadialGraph& graph,
                                                     double slack = 1e-9);

struct FaceConsistencyRecord {
  IndexSet face;
  double max_radial_discrepancy = 0.0;  // embedded vs independent reconstruction
  double join_bound_worst = 0.0;        // max over face points of (y_i - x^[I]_i)
  bool join_bound_ok = true;            // join-point upper bound y <= x^[I]
};

struct FaceConsistencyReport {
  std::vector<FaceConsistencyRecord> faces;
  double max_discrepancy = 0.0;
  bool join_bound_ok = true;
};

/// Reconstructs every proper face subsystem independently and compares
/// radii on shared rays; also verifies the join-point upper bound on faces
/// with 1 <= |I| <= n-2.
FaceConsistencyReport face_consistency_check(const RadialGraph& graph,
                                             const std::shared_ptr<const System>& sys,
                                             const SweepParams& params,
                                             const IntegratorConfig& cfg);

struct HullReport {
  bool all_inside = true;
  int entered = 0;      // samples inside after the settling flow
  int stayed = 0;       // samples still inside after the hold flow
  double worst_excess = 0.0;  // max of (radius - surface radius) observed
};

/// Flows quasi-random starts from [0, box_hi]^n for T, then a further
/// T_hold, checking per-ray radial membership in conv({0} u Sigma). The
/// surface radius on each landed ray comes from radius_on_ray.
HullReport hull_check(const System& sys, int samples, double box_hi, double T,
                      double T_hold, const IntegratorConfig& cfg,
                      std::uint64_t seed = 0, double slack = 5e-3);

struct C1Report {
  double max_adjacent_angle = 0.0;  // radians, between normals of adjacent nodes
  int degenerate_points = 0;
};

/// Least-squares tangent-plane fit at each interior node; reports the max
/// angular jump of the normal field between adjacent nodes.
C1Report c1_diagnostic(const RadialGraph& graph);

/// CSV export: header b1..bn,r,x1..xn,bracket_width; rows in lexicographic
/// order of the integer barycentric coordinates; shortest round-trip floats.
void export_graph(const RadialGraph& graph, const std::string& path);
RadialGraph import_graph(const std::string& path);

}  // namespace csim
