#include "csim/certify.hpp"

#include <algorithm>
#include <cmath>

#include "csim/eig.hpp"
#include "csim/util.hpp"

namespace csim {

namespace {

bool close_points(const Vec& x, const Vec& y, double tol) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - y[i]) > tol) return false;
  return true;
}

}  // namespace

AttractorSample sample_attractor(const std::shared_ptr<const System>& sys,
                                 const IndexSet& I, int n_starts, double T_transient,
                                 double T_sample, const IntegratorConfig& cfg,
                                 std::uint64_t seed) {
  const int n = sys->dim();
  if (I.card() > n - 2)
    throw std::invalid_argument("sample_attractor: face must have |I| <= n-2");
  const auto keep = I.complement();
  const int d = static_cast<int>(keep.size());
  const double delta_face = 1e-6;

  AttractorSample out;
  out.face = I;
  out.n_starts = n_starts;
  out.T_transient = T_transient;
  out.T_sample = T_sample;

  const Vec join = join_point(*sys, I);
  std::vector<std::vector<Vec>> tails(n_starts);
  std::vector<int> dropped(n_starts, 0);
  parallel_for(n_starts, [&](int s) {
    Vec u;
    {
      HaltonSampler local(d, seed + static_cast<std::uint64_t>(s) * 1000);
      u = local.next();
    }
    Vec x0(n, 0.0);
    for (int r = 0; r < d; ++r) x0[keep[r]] = (0.1 + 0.8 * u[r]) * join[keep[r]];
    Vec x = flow(*sys, x0, T_transient, cfg);
    for (double t = 0.0; t < T_sample + 1e-12; t += 0.5) {
      bool interior = true;
      for (int i : keep)
        if (x[i] < delta_face) interior = false;
      if (interior)
        tails[s].push_back(x);
      else
        ++dropped[s];
      if (t < T_sample) x = flow(*sys, x, 0.5, cfg);
    }
  });
  for (int s = 0; s < n_starts; ++s) {
    if (dropped[s] > 0)
      out.warnings.push_back("tail " + std::to_string(s) + " dropped " +
                             std::to_string(dropped[s]) +
                             " states within the face-boundary band");
    for (Vec& x : tails[s]) {
      const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                   [&](const Vec& y) { return close_points(x, y, 1e-6); });
      if (!dup) out.points.push_back(std::move(x));
    }
  }

  // Interior rest points of the face belong to the attractor by invariance.
  for (const RestPoint& p : find_rest_points(sys)) {
    if (!(p.face == I)) continue;
    const bool dup = std::any_of(out.points.begin(), out.points.end(),
                                 [&](const Vec& y) {
                                   return close_points(p.location, y, 1e-6);
                                 });
    if (!dup) out.points.push_back(p.location);
  }
  return out;
}

double lambda_at(const System& sys, const Vec& x, const IndexSet& I) {
  Mat block = face_jacobian_block(sys, x, I);
  const int d = block.rows();
  Mat sym(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) sym(i, j) = -0.5 * (block(i, j) + block(j, i));
  return max_symmetric_eigenvalue(sym);
}

double d_at(const System& sys, const Vec& x, const IndexSet& I) {
  const Mat block = face_jacobian_block(sys, x, I);
  const int d = block.rows();
  if (d < 2) throw std::invalid_argument("d_at: need at least two surviving species");
  double min_product = 1e300;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      min_product = std::min(min_product, block(i, j) * block(j, i));
  if (min_product <= 0.0)
    throw NumericalError("d_at: nonpositive cross-partial product (degenerate point)");
  return std::sqrt(min_product);
}

double spectral_norm_df(const System& sys, const Vec& x, const IndexSet& I) {
  return spectral_norm(face_jacobian_block(sys, x, I));
}

CertificateReport certify(const std::shared_ptr<const System>& sys, int k, double eta,
                          const CertifyParams& params, const IntegratorConfig& cfg) {
  if (k < 0) throw std::invalid_argument("certify: k must be >= 0");
  const int n = sys->dim();

  CertificateReport rep;
  rep.k = k;
  rep.eta = eta;
  rep.hyp_a = check_hypothesis_A(*sys);

  const auto faces = enumerate_faces(n, 0, n - 2);
  rep.faces.resize(faces.size());
  rep.c_route_holds = true;
  for (std::size_t fi = 0; fi < faces.size(); ++fi) {
    const IndexSet& I = faces[fi];
    FaceCertificate& fc = rep.faces[fi];
    fc.face = I;

    const PermanenceReport perm =
        permanence_probe(*sys, I, 4, params.T_permanence, cfg, params.seed);
    fc.permanent = perm.summary >= params.permanence_floor;
    if (!fc.permanent)
      rep.warnings.push_back("face subsystem not permanent; its attractor sample "
                             "is unreliable");

    AttractorSample sample =
        sample_attractor(sys, I, params.n_starts, params.T_transient, params.T_sample,
                         cfg, params.seed + fi);
    for (const std::string& w : sample.warnings) rep.warnings.push_back(w);
    fc.sample_size = static_cast<int>(sample.points.size());

    fc.d_inf = 1e300;
    for (const Vec& x : sample.points) {
      fc.sup_norm_df = std::max(fc.sup_norm_df, spectral_norm_df(*sys, x, I));
      fc.lambda_sup = std::max(fc.lambda_sup, lambda_at(*sys, x, I));
      fc.d_inf = std::min(fc.d_inf, d_at(*sys, x, I));
    }
    fc.c1_holds = k * fc.sup_norm_df < 2.0 * (k + 1) * fc.d_inf;
    fc.c2_holds = k * fc.lambda_sup < 2.0 * (k + 1) * fc.d_inf;
    if (!(fc.c1_holds || fc.c2_holds) || !fc.permanent) rep.c_route_holds = false;
  }

  // Exponent-gap route, grouped by the support face of each sampled measure.
  SampleParams sp;
  sp.seed = params.seed;
  sp.T_transient = params.T_transient;
  sp.T_sample = params.T_sample;
  const auto samples = sample_ergodic_measures(sys, sp, cfg);
  rep.gap_route_holds = true;
  for (const ErgodicSample& s : samples) {
    const GapCheck g = benaim_gap_check(exponents_for_sample(sys, s, cfg), k, eta);
    auto it = std::find_if(rep.gap.begin(), rep.gap.end(),
                           [&](const GapRecord& r) { return r.face == s.face; });
    if (it == rep.gap.end()) {
      rep.gap.push_back({s.face, g.margin, g.holds});
    } else if (g.margin > it->margin) {
      it->margin = g.margin;
      it->holds = g.holds;
    }
    if (!g.holds) rep.gap_route_holds = false;
  }

  if (!rep.hyp_a.holds)
    rep.verdict = Verdict::none;
  else if (k >= 1 && rep.c_route_holds)
    rep.verdict = Verdict::ck1;
  else
    rep.verdict = Verdict::c1;
  return rep;
}

int may_leonard_degree(double alpha) {
  if (alpha <= 1.0) throw std::invalid_argument("may_leonard_degree: need alpha > 1");
  if (alpha >= 2.0) return 0;
  int l = static_cast<int>(std::floor(1.0 / (alpha - 1.0)));
  while (l >= 1 && !(alpha < 1.0 + 1.0 / l)) --l;
  return std::max(l, 1);
}

}  // namespace csim
