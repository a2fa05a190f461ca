#include "csim/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "csim/eig.hpp"
#include "csim/util.hpp"

namespace csim {

namespace {

RestPoint make_rest_point(const System& sys, Vec location) {
  RestPoint p;
  p.face = zero_pattern(location);
  p.residual = norm_inf(eval_vector_field(sys, location));
  p.eigenvalues = eigenvalues(eval_jacobian(sys, location));
  p.location = std::move(location);
  return p;
}

bool same_point(const Vec& x, const Vec& y, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - y[i]) > tol) return false;
  return true;
}

/// Interior rest points of the face subsystem spanned by `keep`, embedded
/// back into ambient coordinates.
std::vector<Vec> face_interior_points(const std::shared_ptr<const System>& sys,
                                      const IndexSet& I) {
  const int n = sys->dim();
  const auto keep = I.complement();
  const int d = static_cast<int>(keep.size());
  std::vector<Vec> found;

  if (const auto* lv = dynamic_cast<const LotkaVolterra*>(sys.get())) {
    Mat a(d, d);
    Vec b(d);
    for (int r = 0; r < d; ++r) {
      b[r] = lv->b()[keep[r]];
      for (int c = 0; c < d; ++c) a(r, c) = lv->a()(keep[r], keep[c]);
    }
    try {
      const Vec y = solve_linear(a, b);
      if (std::all_of(y.begin(), y.end(), [](double v) { return v > 0.0; })) {
        Vec x(n, 0.0);
        for (int r = 0; r < d; ++r) x[keep[r]] = y[r];
        found.push_back(std::move(x));
      }
    } catch (const NumericalError&) {
      // Singular face matrix: no isolated interior equilibrium on this face.
    }
    return found;
  }

  // General path: Newton on the surviving growth rates from quasi-random
  // seeds bounded by the join point.
  auto face_sys = restrict_to_face(sys, I);
  Vec hi(d);
  {
    const Vec join = join_point(*sys, I);
    for (int r = 0; r < d; ++r) hi[r] = 1.5 * join[keep[r]];
  }
  HaltonSampler sampler(d, 0);
  const int seeds = 20 * d;
  for (int s = 0; s < seeds; ++s) {
    Vec y = sampler.next_in_box(Vec(d, 0.0), hi);
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      const Vec f = face_sys->growth(y);
      if (norm_inf(f) < 1e-13) {
        ok = true;
        break;
      }
      Vec step;
      try {
        step = solve_linear(face_sys->growth_jacobian(y), f);
      } catch (const NumericalError&) {
        break;  // singular Jacobian: give up on this seed
      }
      for (int r = 0; r < d; ++r) y[r] -= step[r];
      if (norm_inf(step) > 1e6) break;
    }
    if (!ok) continue;
    if (!std::all_of(y.begin(), y.end(), [](double v) { return v > 1e-10; })) continue;
    Vec x(n, 0.0);
    for (int r = 0; r < d; ++r) x[keep[r]] = y[r];
    if (std::none_of(found.begin(), found.end(),
                     [&](const Vec& z) { return same_point(z, x, 1e-8); }))
      found.push_back(std::move(x));
  }
  return found;
}

}  // namespace

std::vector<RestPoint> find_rest_points(const std::shared_ptr<const System>& sys) {
  const int n = sys->dim();
  std::vector<RestPoint> out;
  out.push_back(make_rest_point(*sys, Vec(n, 0.0)));
  for (int i = 0; i < n; ++i)
    out.push_back(make_rest_point(*sys, axial_rest_point(*sys, i)));

  for (const IndexSet& I : enumerate_faces(n, 0, n - 2)) {
    for (Vec& x : face_interior_points(sys, I)) {
      const bool dup = std::any_of(out.begin(), out.end(), [&](const RestPoint& p) {
        return same_point(p.location, x, 1e-8);
      });
      if (!dup) out.push_back(make_rest_point(*sys, std::move(x)));
    }
  }
  std::sort(out.begin(), out.end(), [](const RestPoint& a, const RestPoint& b) {
    if (a.face.card() != b.face.card()) return a.face.card() > b.face.card();
    return a.location < b.location;
  });
  return out;
}

ExponentReport exponents_at_rest_point(const System& sys, const RestPoint& p) {
  ExponentReport rep;
  const Vec f = sys.growth(p.location);
  for (int i : p.face.members) rep.external[i] = f[i];
  rep.internal = eigenvalue_real_parts(face_jacobian_block(sys, p.location, p.face));
  std::sort(rep.internal.begin(), rep.internal.end());
  return rep;
}

double external_exponent_birkhoff(const System& sys, const IndexSet& I, int i,
                                  const Vec& x0, double T,
                                  const IntegratorConfig& cfg, double T0) {
  if (!I.contains(i)) throw std::invalid_argument("birkhoff: i must be extinct in I");
  if (T0 < 0.0) T0 = 0.5 * T;
  if (T0 >= T) throw std::invalid_argument("birkhoff: need T0 < T");

  const double dt = 0.05;
  Vec x = flow(sys, x0, T0, cfg);
  double integral = 0.0;
  double prev = sys.growth(x)[i];
  double t = T0;
  while (t < T - 1e-12) {
    const double h = std::min(dt, T - t);
    x = flow(sys, x, h, cfg);
    const double cur = sys.growth(x)[i];
    integral += 0.5 * h * (prev + cur);
    prev = cur;
    t += h;
  }
  return integral / (T - T0);
}

std::vector<double> internal_exponents_qr(const System& sys, const IndexSet& I,
                                          const Vec& x0, int k, double T,
                                          const IntegratorConfig& cfg, double tau) {
  const int n = sys.dim();
  const auto keep = I.complement();
  if (k < 1 || k > static_cast<int>(keep.size()))
    throw std::invalid_argument("internal_exponents_qr: bad frame size");

  Mat frame(n, k);
  for (int c = 0; c < k; ++c) frame(keep[c], c) = 1.0;

  Vec sums(k, 0.0);
  Vec x = x0;
  double t = 0.0;
  while (t < T - 1e-12) {
    const double h = std::min(tau, T - t);
    auto [x1, m] = variational_flow(sys, x, frame, h, cfg);
    // The face tangent space is invariant; zero out drift into extinct rows.
    for (int i : I.members)
      for (int c = 0; c < k; ++c) m(i, c) = 0.0;
    const Vec norms = orthonormalize_columns(m);
    for (int c = 0; c < k; ++c) {
      if (norms[c] < 1e-300)
        throw NumericalError("internal_exponents_qr: frame degenerated at t=" +
                             std::to_string(t));
      sums[c] += std::log(norms[c]);
    }
    frame = std::move(m);
    x = std::move(x1);
    t += h;
  }
  for (double& s : sums) s /= T;
  std::sort(sums.begin(), sums.end());
  return sums;
}

GapCheck benaim_gap_check(const ExponentReport& report, int k, double eta) {
  std::vector<double> all = report.internal;
  for (const auto& [i, v] : report.external) all.push_back(v);
  if (all.size() < 2)
    throw std::invalid_argument("benaim_gap_check: need at least two exponents");
  std::sort(all.begin(), all.end());
  GapCheck g;
  g.lambda1 = all[0];
  g.lambda2 = all[1];  // with multiplicity: equal to lambda1 when repeated
  g.margin = g.lambda1 - (k + 1) * g.lambda2;
  g.holds = g.margin < -eta;
  return g;
}

std::vector<ErgodicSample> sample_ergodic_measures(
    const std::shared_ptr<const System>& sys, const SampleParams& params,
    const IntegratorConfig& cfg) {
  const int n = sys->dim();
  const auto rest = find_rest_points(sys);

  std::vector<ErgodicSample> out;
  for (const RestPoint& p : rest) {
    if (!params.include_origin && p.face.card() == n) continue;
    ErgodicSample s;
    s.kind = ErgodicSample::Kind::dirac;
    s.face = p.face;
    s.point = p;
    out.push_back(std::move(s));
  }

  // One empirical tail per face, from a fixed quasi-random interior start.
  for (const IndexSet& I : enumerate_faces(n, 0, n - 1)) {
    const auto keep = I.complement();
    const int d = static_cast<int>(keep.size());
    HaltonSampler sampler(d, params.seed + 1 + static_cast<std::uint64_t>(out.size()));
    const Vec join = join_point(*sys, I);
    Vec x0(n, 0.0);
    const Vec u = sampler.next();
    for (int r = 0; r < d; ++r) x0[keep[r]] = (0.2 + 0.6 * u[r]) * join[keep[r]];

    ErgodicSample s;
    s.kind = ErgodicSample::Kind::empirical;
    s.face = I;
    s.dt_tail = params.dt_tail;
    s.tail_duration = params.T_sample;
    Vec x = flow(*sys, x0, params.T_transient, cfg);
    bool valid = true;
    for (double t = 0.0; t < params.T_sample - 1e-12; t += params.dt_tail) {
      s.tail.push_back(x);
      for (int i : keep)
        if (x[i] < params.delta_face) valid = false;
      x = flow(*sys, x, params.dt_tail, cfg);
    }
    s.tail.push_back(x);
    if (!valid) continue;  // tail touched the face boundary; sample unusable

    // A collapsed tail is the Dirac at the limiting rest point; the Dirac
    // is already listed, so just drop the duplicate.
    bool snapped = false;
    for (const RestPoint& p : rest)
      if (same_point(s.tail.back(), p.location, params.snap_tol) &&
          same_point(s.tail.front(), p.location, params.snap_tol))
        snapped = true;
    if (snapped) continue;

    // Drop near-duplicate consecutive states, keeping the time step tag.
    out.push_back(std::move(s));
  }
  return out;
}

ExponentReport exponents_for_sample(const std::shared_ptr<const System>& sys,
                                    const ErgodicSample& sample,
                                    const IntegratorConfig& cfg) {
  if (sample.kind == ErgodicSample::Kind::dirac)
    return exponents_at_rest_point(*sys, sample.point);

  ExponentReport rep;
  rep.sample_based = true;
  // Externals: time average of f_i over the stored tail (trapezoid).
  const int m = static_cast<int>(sample.tail.size());
  for (int i : sample.face.members) {
    double integral = 0.0;
    double prev = sys->growth(sample.tail[0])[i];
    for (int s = 1; s < m; ++s) {
      const double cur = sys->growth(sample.tail[s])[i];
      integral += 0.5 * sample.dt_tail * (prev + cur);
      prev = cur;
    }
    rep.external[i] = integral / (sample.dt_tail * (m - 1));
  }
  const int k = sys->dim() - sample.face.card();
  rep.internal = internal_exponents_qr(*sys, sample.face, sample.tail.front(), k,
                                       sample.tail_duration, cfg);
  return rep;
}

NonnegativityReport external_nonnegativity_check(
    const std::shared_ptr<const System>& sys,
    const std::vector<ErgodicSample>& samples, const IntegratorConfig& cfg) {
  NonnegativityReport rep;
  rep.holds = true;
  rep.min_external = 1e300;
  rep.per_sample_min.assign(samples.size(), 1e300);
  for (std::size_t s = 0; s < samples.size(); ++s) {
    if (samples[s].face.card() == 0) continue;  // interior measures have no externals
    const ExponentReport er = exponents_for_sample(sys, samples[s], cfg);
    for (const auto& [i, v] : er.external)
      rep.per_sample_min[s] = std::min(rep.per_sample_min[s], v);
    if (rep.per_sample_min[s] < rep.min_external) {
      rep.min_external = rep.per_sample_min[s];
      rep.witness = static_cast<int>(s);
    }
  }
  if (rep.witness < 0) rep.min_external = 0.0;
  rep.holds = rep.min_external >= -1e-6;
  return rep;
}

PermanenceReport permanence_probe(const System& sys, const IndexSet& I, int n_starts,
                                  double T, const IntegratorConfig& cfg,
                                  std::uint64_t seed) {
  const int n = sys.dim();
  const auto keep = I.complement();
  const int d = static_cast<int>(keep.size());
  if (d == 0) throw std::invalid_argument("permanence_probe: empty subsystem");

  const Vec join = join_point(sys, I);
  std::vector<Vec> starts(n_starts, Vec(n, 0.0));
  HaltonSampler sampler(d, seed);
  for (int s = 0; s < n_starts; ++s) {
    const Vec u = sampler.next();
    for (int r = 0; r < d; ++r)
      starts[s][keep[r]] = std::max(1e-4, (0.05 + 0.9 * u[r]) * join[keep[r]]);
  }

  PermanenceReport rep;
  rep.per_start.assign(n_starts, 0.0);
  parallel_for(n_starts, [&](int s) {
    Vec x = flow(sys, starts[s], 0.5 * T, cfg);
    double lo = 1e300;
    double t = 0.5 * T;
    const double dt = 0.5;
    for (int i : keep) lo = std::min(lo, x[i]);
    while (t < T - 1e-12) {
      const double h = std::min(dt, T - t);
      x = flow(sys, x, h, cfg);
      t += h;
      for (int i : keep) lo = std::min(lo, x[i]);
    }
    rep.per_start[s] = lo;
  });
  rep.summary = *std::min_element(rep.per_start.begin(), rep.per_start.end());
  return rep;
}

}  // namespace csim
