#include "csim/simplex.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "csim/eig.hpp"
#include "csim/util.hpp"

namespace csim {

namespace {

double radius_of(const Vec& x) { return std::accumulate(x.begin(), x.end(), 0.0); }

Vec direction_of(const Vec& x) {
  const double r = radius_of(x);
  Vec u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / r;
  return u;
}

/// Ambient coordinates of a face-mesh node inside the big mesh.
std::vector<int> embed_coords(const std::vector<int>& sub, const IndexSet& I) {
  const auto keep = I.complement();
  std::vector<int> full(I.n, 0);
  for (std::size_t i = 0; i < keep.size(); ++i) full[keep[i]] = sub[i];
  return full;
}

enum class Side { below, above, on_sigma };

/// Backward-time dichotomy: below the carrying simplex the reversed flow
/// collapses to the origin, above it blows up.
Side classify_backward(const System& sys, Vec x, double lo_radius, double hi_radius,
                       const IntegratorConfig& cfg, double t_cap = 80.0) {
  IntegratorConfig bw = cfg;
  bw.overflow_guard = std::max(cfg.overflow_guard, 100.0 * hi_radius);
  double t = 0.0;
  const double dt = 0.5;
  while (t < t_cap) {
    try {
      x = flow(sys, x, -dt, bw);
    } catch (const NumericalError&) {
      return Side::above;
    }
    t += dt;
    const double r = radius_of(x);
    if (r <= lo_radius) return Side::below;
    if (r >= hi_radius) return Side::above;
  }
  return Side::on_sigma;
}

struct ShellSweepResult {
  Vec radii;   // full face-mesh array; interior entries updated
  Vec widths;  // bracket widths at interior nodes
  bool converged = true;
  std::vector<int> unconverged;
};

/// Sweeps the interior rays of one face subsystem. `radii` carries
/// already-reconstructed boundary values on entry.
ShellSweepResult sweep_face(const System& sys, const BarycentricMesh& mesh, Vec radii,
                            const SweepParams& params, const IntegratorConfig& cfg) {
  const int n = sys.dim();
  std::vector<int> interior;
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p)
    if (mesh.is_interior(p)) interior.push_back(p);

  ShellSweepResult res;
  res.widths.assign(mesh.points.size(), 0.0);
  if (interior.empty()) {
    res.radii = std::move(radii);
    return res;
  }

  // Shell placement: start from the axial radii and validate that the
  // outer shell moves inward and the inner shell outward along every ray.
  Vec axial(n);
  for (int i = 0; i < n; ++i) {
    std::vector<int> coords(n, 0);
    coords[i] = mesh.m;
    axial[i] = radii[mesh.index_of(coords)];
  }
  double r_outer = params.r_outer > 0.0
                       ? params.r_outer
                       : 2.0 * std::accumulate(axial.begin(), axial.end(), 0.0);
  double eps_inner = params.eps_inner > 0.0
                         ? params.eps_inner
                         : 1e-2 * *std::min_element(axial.begin(), axial.end());

  const auto radial_velocity = [&](double r, const Vec& u) {
    const Vec F = eval_vector_field(sys, r * u);
    return radius_of(F);
  };
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    for (int p : interior)
      if (radial_velocity(r_outer, mesh.direction(p)) >= 0.0) {
        ok = false;
        break;
      }
    if (ok) break;
    if (attempt >= 4)
      throw NumericalError("reconstruct_sigma: outer shell not above the attractor");
    r_outer *= 2.0;
  }
  for (int attempt = 0;; ++attempt) {
    bool ok = true;
    for (int p : interior)
      if (radial_velocity(eps_inner, mesh.direction(p)) <= 0.0) {
        ok = false;
        break;
      }
    if (ok) break;
    if (attempt >= 4)
      throw NumericalError("reconstruct_sigma: inner shell not below the repeller basin");
    eps_inner *= 0.5;
  }

  const int np = static_cast<int>(mesh.points.size());
  Vec r_out(np, 0.0), r_in(np, 0.0);
  for (int p = 0; p < np; ++p) r_out[p] = r_in[p] = radii[p];
  for (int p : interior) {
    r_out[p] = r_outer;
    r_in[p] = eps_inner;
  }

  std::vector<Vec> cloud(np);
  Vec cloud_val(np), next(np);

  const auto sweep_shell = [&](Vec& shell) {
    // Flow interior shell points; boundary nodes stay frozen at the
    // already-converged face values (exact samples of the surface).
    parallel_for(np, [&](int p) {
      if (!mesh.is_interior(p)) {
        cloud[p] = mesh.direction(p);
        cloud_val[p] = shell[p];
        return;
      }
      const Vec x = flow(sys, shell[p] * mesh.direction(p), params.dt_increment, cfg);
      cloud[p] = direction_of(x);
      cloud_val[p] = radius_of(x);
    });
    parallel_for(static_cast<int>(interior.size()), [&](int k) {
      const int q = interior[k];
      next[q] = interpolate_in_deformed(mesh, cloud, cloud_val, mesh.direction(q), q);
    });
    for (int q : interior) shell[q] = next[q];
  };

  double max_width = 0.0;
  for (double t = 0.0; t < params.t_sweep; t += params.dt_increment) {
    sweep_shell(r_out);
    sweep_shell(r_in);
    max_width = 0.0;
    for (int q : interior) {
      if (r_in[q] > r_out[q]) {
        if (r_in[q] - r_out[q] > 1e-3 * r_outer)
          throw NumericalError(
              "reconstruct_sigma: non-monotone bracket (tolerance too tight for "
              "this resolution)");
        std::swap(r_in[q], r_out[q]);
      }
      max_width = std::max(max_width, r_out[q] - r_in[q]);
    }
    if (max_width < params.tol_hausdorff) break;
  }

  for (int q : interior) {
    res.widths[q] = r_out[q] - r_in[q];
    radii[q] = 0.5 * (r_in[q] + r_out[q]);
    if (res.widths[q] >= params.tol_hausdorff) {
      res.converged = false;
      res.unconverged.push_back(q);
    }
  }

  if (params.polish) {
    // Per-ray refinement: bisect on the backward-time dichotomy between the
    // sweep brackets. This removes the interpolation bias of the sweep.
    const double lo_radius = 0.5 * eps_inner;
    const double hi_radius = 2.0 * r_outer;
    parallel_for(static_cast<int>(interior.size()), [&](int k) {
      const int q = interior[k];
      const Vec u = mesh.direction(q);
      const double pad = 5.0 * std::max(res.widths[q], params.tol_hausdorff) + 1e-3;
      double lo = std::max(eps_inner, r_in[q] - pad);
      double hi = std::min(r_outer, r_out[q] + pad);
      const auto side_at = [&](double r) {
        return classify_backward(sys, r * u, lo_radius, hi_radius, cfg);
      };
      // Make sure the bracket actually straddles the surface.
      for (int grow = 0; grow < 6 && side_at(lo) != Side::below; ++grow)
        lo = std::max(eps_inner, 0.5 * lo);
      for (int grow = 0; grow < 6 && side_at(hi) != Side::above; ++grow)
        hi = std::min(r_outer, 2.0 * hi);
      if (side_at(lo) != Side::below || side_at(hi) != Side::above) return;
      while (hi - lo > params.polish_tol) {
        const double mid = 0.5 * (lo + hi);
        const Side s = side_at(mid);
        if (s == Side::below)
          lo = mid;
        else if (s == Side::above)
          hi = mid;
        else {
          lo = hi = mid;  // already indistinguishable from the surface
          break;
        }
      }
      radii[q] = 0.5 * (lo + hi);
    });
  }

  res.radii = std::move(radii);
  return res;
}

}  // namespace

Vec RadialGraph::point(int p) const { return radii[p] * mesh.direction(p); }

RadialGraph reconstruct_sigma(const std::shared_ptr<const System>& sys,
                              const SweepParams& params, const IntegratorConfig& cfg) {
  const int n = sys->dim();
  if (params.m < 2) throw std::invalid_argument("reconstruct_sigma: need m >= 2");

  RadialGraph g;
  g.mesh = make_mesh(n, params.m);
  g.radii.assign(g.mesh.points.size(), 0.0);
  g.bracket_width.assign(g.mesh.points.size(), 0.0);
  g.tol_hausdorff = params.tol_hausdorff;
  g.polished = params.polish;

  // Vertices: the 0-dimensional faces are the axial rest points.
  for (int i = 0; i < n; ++i) {
    std::vector<int> coords(n, 0);
    coords[i] = params.m;
    g.radii[g.mesh.index_of(coords)] = radius_of(axial_rest_point(*sys, i));
  }

  // Sweep faces bottom-up: every boundary ray is handled inside its own
  // face subsystem, whose lower-dimensional boundary is already done.
  for (int d = 2; d <= n; ++d) {
    for (const IndexSet& I : enumerate_faces(n, n - d, n - d)) {
      auto face_sys = restrict_to_face(sys, I);
      const BarycentricMesh face_mesh = make_mesh(d, params.m);
      const int fp = static_cast<int>(face_mesh.points.size());
      std::vector<int> to_ambient(fp);
      Vec face_radii(fp, 0.0);
      for (int p = 0; p < fp; ++p) {
        to_ambient[p] = g.mesh.index_of(embed_coords(face_mesh.points[p], I));
        face_radii[p] = g.radii[to_ambient[p]];
      }
      ShellSweepResult res = sweep_face(*face_sys, face_mesh, std::move(face_radii),
                                        params, cfg);
      for (int p = 0; p < fp; ++p) {
        if (!face_mesh.is_interior(p)) continue;
        g.radii[to_ambient[p]] = res.radii[p];
        g.bracket_width[to_ambient[p]] = res.widths[p];
      }
      if (!res.converged) {
        g.converged = false;
        for (int q : res.unconverged) g.unconverged_rays.push_back(to_ambient[q]);
      }
    }
  }
  return g;
}

double radius_at_linear(const RadialGraph& graph, const Vec& u) {
  return interpolate_linear(graph.mesh, graph.radii, u);
}

namespace {

/// Local quadratic least-squares fit of the radius around the cell
/// containing u, evaluated at u. Falls back to linear interpolation.
double radius_quadratic(const RadialGraph& graph, const Vec& u) {
  const BarycentricMesh& mesh = graph.mesh;
  const int n = mesh.n;
  if (n == 1 || mesh.cells.empty()) return radius_at_linear(graph, u);

  // Find the nearest node, then collect its 2-ring of neighbors.
  int nearest = 0;
  double best = 1e300;
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p) {
    double d2 = 0.0;
    const Vec up = mesh.direction(p);
    for (int i = 0; i < n; ++i) d2 += (up[i] - u[i]) * (up[i] - u[i]);
    if (d2 < best) {
      best = d2;
      nearest = p;
    }
  }
  std::vector<int> stencil{nearest};
  for (int nb : mesh.neighbors[nearest]) stencil.push_back(nb);
  for (int nb : mesh.neighbors[nearest])
    for (int nb2 : mesh.neighbors[nb]) stencil.push_back(nb2);
  std::sort(stencil.begin(), stencil.end());
  stencil.erase(std::unique(stencil.begin(), stencil.end()), stencil.end());

  // Quadratic model in the first n-1 barycentric coordinates relative to u.
  const int d = n - 1;
  const int ncoef = 1 + d + d * (d + 1) / 2;
  if (static_cast<int>(stencil.size()) < ncoef) return radius_at_linear(graph, u);

  const auto features = [&](const Vec& p) {
    Vec row;
    row.reserve(ncoef);
    row.push_back(1.0);
    Vec delta(d);
    for (int i = 0; i < d; ++i) {
      delta[i] = p[i] - u[i];
      row.push_back(delta[i]);
    }
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) row.push_back(delta[i] * delta[j]);
    return row;
  };

  Mat ata(ncoef, ncoef);
  Vec atb(ncoef, 0.0);
  for (int p : stencil) {
    const Vec row = features(mesh.direction(p));
    for (int i = 0; i < ncoef; ++i) {
      atb[i] += row[i] * graph.radii[p];
      for (int j = 0; j < ncoef; ++j) ata(i, j) += row[i] * row[j];
    }
  }
  try {
    const Vec coef = solve_linear(ata, atb);
    return coef[0];  // model evaluated at delta = 0
  } catch (const NumericalError&) {
    return radius_at_linear(graph, u);
  }
}

}  // namespace

double radius_at(const RadialGraph& graph, const Vec& u) {
  return radius_quadratic(graph, u);
}

double radius_on_ray(const std::shared_ptr<const System>& sys, const Vec& u_in,
                     const IntegratorConfig& cfg, double tol) {
  const int n = sys->dim();
  if (static_cast<int>(u_in.size()) != n)
    throw std::invalid_argument("radius_on_ray: direction size mismatch");
  const double s = radius_of(u_in);
  if (!(s > 0.0)) throw std::invalid_argument("radius_on_ray: ray must be nonzero");
  Vec u = u_in;
  for (double& ui : u) ui /= s;

  const IndexSet I = zero_pattern(u, 1e-14);
  const auto keep = I.complement();
  if (keep.size() == 1) return radius_of(axial_rest_point(*sys, keep[0]));

  auto face_sys = I.card() == 0 ? sys : restrict_to_face(sys, I);
  const Vec v = project_to_face(u, I);
  const int d = face_sys->dim();
  Vec axial(d);
  for (int i = 0; i < d; ++i) axial[i] = radius_of(axial_rest_point(*face_sys, i));
  const double min_axial = *std::min_element(axial.begin(), axial.end());
  const double sum_axial = std::accumulate(axial.begin(), axial.end(), 0.0);

  double lo = 1e-2 * min_axial;
  double hi = 2.0 * sum_axial;
  // Dichotomy thresholds sit safely outside any bracket the grow loops
  // below can reach.
  const double lo_thresh = 1e-4 * min_axial;
  const double hi_thresh = 300.0 * sum_axial;
  const auto side_at = [&](double r) {
    return classify_backward(*face_sys, r * v, lo_thresh, hi_thresh, cfg);
  };
  for (int grow = 0; grow < 6 && side_at(lo) != Side::below; ++grow) lo *= 0.5;
  for (int grow = 0; grow < 6 && side_at(hi) != Side::above; ++grow) hi *= 2.0;
  if (side_at(lo) != Side::below || side_at(hi) != Side::above)
    throw NumericalError("radius_on_ray: could not bracket the surface");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const Side side = side_at(mid);
    if (side == Side::below)
      lo = mid;
    else if (side == Side::above)
      hi = mid;
    else
      break;  // backward orbit is pinned to the surface within the time cap
  }
  return 0.5 * (lo + hi);
}

ResidualReport invariance_residual(const RadialGraph& graph, const System& sys,
                                   double dt_probe, const IntegratorConfig& cfg) {
  const int np = static_cast<int>(graph.mesh.points.size());
  auto base = std::shared_ptr<const System>(&sys, [](const System*) {});
  ResidualReport rep;
  rep.per_point.assign(np, 0.0);
  parallel_for(np, [&](int p) {
    const Vec x0 = graph.point(p);
    // Probe faces inside their own subsystem so radial drift cannot leave
    // the face (mirrors the sweep's corner handling).
    const IndexSet I(graph.mesh.n, graph.mesh.zero_coords(p));
    double resid;
    if (I.card() == graph.mesh.n - 1) {
      // Axial rest point: fixed up to integrator tolerance.
      const int i = I.complement()[0];
      const Vec x = flow(sys, x0, dt_probe, cfg);
      resid = std::abs(x[i] - x0[i]);
    } else {
      // A node on the surface must land on the surface. The landed ray is
      // off-node, so the comparison radius comes from the exact per-ray
      // solve; an interpolated comparison would drown the drift in mesh
      // error wherever the surface is not twice differentiable.
      Vec x;
      if (I.card() == 0) {
        x = flow(sys, x0, dt_probe, cfg);
      } else {
        auto face_sys = restrict_to_face(base, I);
        x = embed_in_face(flow(*face_sys, project_to_face(x0, I), dt_probe, cfg), I);
      }
      const Vec u = direction_of(x);
      resid = std::abs(radius_of(x) - radius_on_ray(base, u, cfg, 1e-7)) * norm2(u);
    }
    rep.per_point[p] = resid;
  });
  rep.max_residual = *std::max_element(rep.per_point.begin(), rep.per_point.end());
  return rep;
}

std::vector<std::pair<int, int>> unorderedness_check(const RadialGraph& graph,
                                                     double slack) {
  const int np = static_cast<int>(graph.mesh.points.size());
  const int n = graph.mesh.n;
  std::vector<Vec> pts(np);
  for (int p = 0; p < np; ++p) pts[p] = graph.point(p);

  std::vector<std::pair<int, int>> violations;
  for (int p = 0; p < np; ++p) {
    for (int q = 0; q < np; ++q) {
      if (p == q) continue;
      // Strict ordering on the union of supports (<<_J with J the shared
      // zero set): x < y - slack on every index where either is positive.
      bool dominated = true;
      bool any = false;
      for (int i = 0; i < n; ++i) {
        const bool px = graph.mesh.points[p][i] > 0;
        const bool qx = graph.mesh.points[q][i] > 0;
        if (!px && !qx) continue;
        any = true;
        if (!(pts[p][i] < pts[q][i] - slack)) {
          dominated = false;
          break;
        }
      }
      if (any && dominated) violations.emplace_back(p, q);
    }
  }
  return violations;
}

FaceConsistencyReport face_consistency_check(const RadialGraph& graph,
                                             const std::shared_ptr<const System>& sys,
                                             const SweepParams& params,
                                             const IntegratorConfig& cfg) {
  const int n = sys->dim();
  FaceConsistencyReport rep;
  for (const IndexSet& I : enumerate_faces(n, 1, n - 1)) {
    FaceConsistencyRecord rec;
    rec.face = I;
    const int d = n - I.card();
    auto face_sys = restrict_to_face(sys, I);

    if (d == 1) {
      // 0-dimensional face: vertex radius vs the axial rest point.
      const int i = I.complement()[0];
      std::vector<int> coords(n, 0);
      coords[i] = graph.mesh.m;
      const double vertex_r = graph.radii[graph.mesh.index_of(coords)];
      rec.max_radial_discrepancy =
          std::abs(vertex_r - radius_of(axial_rest_point(*sys, i)));
    } else {
      SweepParams sub = params;
      const RadialGraph face_graph = reconstruct_sigma(face_sys, sub, cfg);
      for (int p = 0; p < static_cast<int>(face_graph.mesh.points.size()); ++p) {
        const int amb =
            graph.mesh.index_of(embed_coords(face_graph.mesh.points[p], I));
        rec.max_radial_discrepancy = std::max(
            rec.max_radial_discrepancy, std::abs(face_graph.radii[p] - graph.radii[amb]));
      }
    }

    // Join-point upper bound (faces of codimension >= 2 carry dynamics the
    // bound applies to).
    if (I.card() >= 1 && I.card() <= n - 2) {
      const Vec join = join_point(*sys, I);
      const auto keep = I.complement();
      for (int p = 0; p < static_cast<int>(graph.mesh.points.size()); ++p) {
        if (graph.mesh.zero_coords(p) != I.members) continue;
        const Vec x = graph.point(p);
        for (int i : keep)
          rec.join_bound_worst = std::max(rec.join_bound_worst, x[i] - join[i]);
      }
      rec.join_bound_ok = rec.join_bound_worst <= 1e-9;
    }

    rep.max_discrepancy = std::max(rep.max_discrepancy, rec.max_radial_discrepancy);
    rep.join_bound_ok = rep.join_bound_ok && rec.join_bound_ok;
    rep.faces.push_back(std::move(rec));
  }
  return rep;
}

HullReport hull_check(const System& sys, int samples, double box_hi, double T,
                      double T_hold, const IntegratorConfig& cfg, std::uint64_t seed,
                      double slack) {
  const int n = sys.dim();
  auto base = std::shared_ptr<const System>(&sys, [](const System*) {});
  HullReport rep;
  std::vector<Vec> starts(samples);
  HaltonSampler sampler(n, seed);
  for (int s = 0; s < samples; ++s)
    starts[s] = sampler.next_in_box(Vec(n, 0.0), Vec(n, box_hi));

  const auto inside = [&](const Vec& x) {
    const double r = radius_of(x);
    if (r <= slack) return std::make_pair(true, 0.0);  // near the origin
    const Vec u = direction_of(x);
    // Membership in conv({0} u Sigma) is radial: r below the surface radius.
    // The surface radius comes from the exact per-ray solve; mesh
    // interpolation under-reads sharp crests of the surface and would
    // misclassify orbits that settle right on them.
    const double excess = r - radius_on_ray(base, u, cfg, 1e-4);
    return std::make_pair(excess <= slack, excess);
  };

  std::vector<int> entered(samples, 0), stayed(samples, 0);
  std::vector<double> excesses(samples, 0.0);
  parallel_for(samples, [&](int s) {
    Vec x = flow(sys, starts[s], T, cfg);
    auto [in1, e1] = inside(x);
    entered[s] = in1 ? 1 : 0;
    double worst = e1;
    // Hold phase: membership must persist.
    bool stay = in1;
    double t = 0.0;
    while (t < T_hold) {
      const double dt = std::min(1.0, T_hold - t);
      x = flow(sys, x, dt, cfg);
      t += dt;
      auto [in2, e2] = inside(x);
      worst = std::max(worst, e2);
      if (!in2) stay = false;
    }
    stayed[s] = stay ? 1 : 0;
    excesses[s] = worst;
  });
  for (int s = 0; s < samples; ++s) {
    rep.entered += entered[s];
    rep.stayed += stayed[s];
    rep.worst_excess = std::max(rep.worst_excess, excesses[s]);
  }
  rep.all_inside = rep.entered == samples && rep.stayed == samples;
  return rep;
}

C1Report c1_diagnostic(const RadialGraph& graph) {
  const BarycentricMesh& mesh = graph.mesh;
  const int n = mesh.n;
  const int np = static_cast<int>(mesh.points.size());
  if (mesh.m < 8) throw std::invalid_argument("c1_diagnostic: need m >= 8");

  C1Report rep;
  std::vector<Vec> normals(np);
  for (int p = 0; p < np; ++p) {
    if (!mesh.is_interior(p)) continue;
    const Vec center = graph.point(p);
    Mat cov(n, n);
    int count = 0;
    for (int nb : mesh.neighbors[p]) {
      const Vec d = graph.point(nb) - center;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) cov(i, j) += d[i] * d[j];
      ++count;
    }
    if (count < n) {
      ++rep.degenerate_points;
      continue;
    }
    // Normal = eigenvector of the smallest covariance eigenvalue, found by
    // inverse iteration off the Jacobi spectrum.
    const auto evs = symmetric_eigenvalues(cov);
    if (evs[1] - evs[0] < 1e-12 * std::abs(evs.back())) {
      ++rep.degenerate_points;
      continue;
    }
    // Shifted inverse iteration.
    Mat shifted = cov;
    const double shift = evs[0] - 1e-9 * std::abs(evs.back());
    for (int i = 0; i < n; ++i) shifted(i, i) -= shift;
    Vec v(n, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int it = 0; it < 30; ++it) {
      Vec w = solve_linear(shifted, v);
      const double nw = norm2(w);
      for (double& wi : w) wi /= nw;
      v = w;
    }
    if (dot(v, mesh.direction(p)) < 0.0) v = -1.0 * v;
    normals[p] = v;
  }

  for (int p = 0; p < np; ++p) {
    if (normals[p].empty()) continue;
    for (int nb : mesh.neighbors[p]) {
      if (nb < p || normals[nb].empty()) continue;
      const double c = std::clamp(dot(normals[p], normals[nb]), -1.0, 1.0);
      rep.max_adjacent_angle = std::max(rep.max_adjacent_angle, std::acos(c));
    }
  }
  return rep;
}

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void export_graph(const RadialGraph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_graph: cannot open " + path);
  const int n = graph.mesh.n;
  for (int i = 1; i <= n; ++i) out << "b" << i << ",";
  out << "r,";
  for (int i = 1; i <= n; ++i) out << "x" << i << ",";
  out << "bracket_width\n";
  for (int p = 0; p < static_cast<int>(graph.mesh.points.size()); ++p) {
    for (int i = 0; i < n; ++i) out << graph.mesh.points[p][i] << ",";
    out << shortest(graph.radii[p]) << ",";
    const Vec x = graph.point(p);
    for (int i = 0; i < n; ++i) out << shortest(x[i]) << ",";
    out << shortest(graph.bracket_width[p]) << "\n";
  }
  if (!out) throw std::runtime_error("export_graph: write failed for " + path);
}

RadialGraph import_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("import_graph: cannot open " + path);
  std::string header;
  std::getline(in, header);
  int n = 0;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      // Coordinate columns are exactly b1..bn ("bracket_width" is not one).
      if (tok.size() < 2 || tok[0] != 'b') continue;
      if (std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(c); }))
        ++n;
    }
  }
  if (n < 1) throw std::runtime_error("import_graph: bad header in " + path);

  std::vector<std::vector<int>> coords;
  Vec radii, widths;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::vector<int> b(n);
    for (int i = 0; i < n; ++i) {
      std::getline(ss, tok, ',');
      b[i] = std::stoi(tok);
    }
    std::getline(ss, tok, ',');
    radii.push_back(std::stod(tok));
    for (int i = 0; i < n; ++i) std::getline(ss, tok, ',');  // skip x columns
    std::getline(ss, tok, ',');
    widths.push_back(std::stod(tok));
    coords.push_back(std::move(b));
  }
  if (coords.empty()) throw std::runtime_error("import_graph: no rows in " + path);
  const int m = std::accumulate(coords[0].begin(), coords[0].end(), 0);

  RadialGraph g;
  g.mesh = make_mesh(n, m);
  g.radii.assign(g.mesh.points.size(), 0.0);
  g.bracket_width.assign(g.mesh.points.size(), 0.0);
  for (std::size_t row = 0; row < coords.size(); ++row) {
    const int p = g.mesh.index_of(coords[row]);
    if (p < 0) throw std::runtime_error("import_graph: unknown mesh point");
    g.radii[p] = radii[row];
    g.bracket_width[p] = widths[row];
  }
  return g;
}

}  // namespace csim
