#include "csim/sysmodel.hpp"

#include <algorithm>
#include <cmath>

#include "csim/util.hpp"

namespace csim {

IndexSet::IndexSet(int n_, std::vector<int> members_) : n(n_), members(std::move(members_)) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  for (int i : members)
    if (i < 0 || i >= n) throw std::invalid_argument("IndexSet: index out of range");
}

bool IndexSet::contains(int i) const {
  return std::binary_search(members.begin(), members.end(), i);
}

std::vector<int> IndexSet::complement() const {
  std::vector<int> c;
  c.reserve(n - members.size());
  for (int i = 0; i < n; ++i)
    if (!contains(i)) c.push_back(i);
  return c;
}

IndexSet zero_pattern(const Vec& x, double tol) {
  std::vector<int> zeros;
  for (int i = 0; i < static_cast<int>(x.size()); ++i)
    if (std::abs(x[i]) <= tol) zeros.push_back(i);
  return IndexSet(static_cast<int>(x.size()), std::move(zeros));
}

bool on_face(const Vec& x, const IndexSet& I, double tol) {
  if (static_cast<int>(x.size()) != I.n) return false;
  for (int i : I.members)
    if (std::abs(x[i]) > tol) return false;
  return true;
}

bool in_open_face(const Vec& x, const IndexSet& I, double tol) {
  if (!on_face(x, I, tol)) return false;
  for (int j : I.complement())
    if (x[j] <= tol) return false;
  return true;
}

LotkaVolterra::LotkaVolterra(Vec b, Mat a) : b_(std::move(b)), a_(std::move(a)) {
  const int n = static_cast<int>(b_.size());
  if (a_.rows() != n || a_.cols() != n)
    throw std::invalid_argument("LotkaVolterra: b length must match a dimension");
  for (double bi : b_)
    if (!(bi > 0.0)) throw std::invalid_argument("LotkaVolterra: b must be positive");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (!(a_(i, j) > 0.0))
        throw std::invalid_argument("LotkaVolterra: a must be entrywise positive");
}

Vec LotkaVolterra::growth(const Vec& x) const {
  const int n = dim();
  Vec f(n);
  for (int i = 0; i < n; ++i) {
    double s = b_[i];
    for (int j = 0; j < n; ++j) s -= a_(i, j) * x[j];
    f[i] = s;
  }
  return f;
}

Mat LotkaVolterra::growth_jacobian(const Vec&) const {
  const int n = dim();
  Mat d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = -a_(i, j);
  return d;
}

LotkaVolterra LotkaVolterra::restricted(const IndexSet& I) const {
  const auto keep = I.complement();
  const int d = static_cast<int>(keep.size());
  if (d == 0) throw std::invalid_argument("LotkaVolterra::restricted: empty subsystem");
  Vec bs(d);
  Mat as(d, d);
  for (int i = 0; i < d; ++i) {
    bs[i] = b_[keep[i]];
    for (int j = 0; j < d; ++j) as(i, j) = a_(keep[i], keep[j]);
  }
  return LotkaVolterra(std::move(bs), std::move(as));
}

MayLeonard::MayLeonard(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("MayLeonard: requires 0 < beta < 1");
  if (!(alpha > 1.0)) throw std::invalid_argument("MayLeonard: requires alpha > 1");
  if (!(alpha + beta > 2.0))
    throw std::invalid_argument("MayLeonard: requires alpha + beta > 2");
}

LotkaVolterra MayLeonard::to_lv() const {
  Mat a(3, 3);
  a(0, 0) = 1;     a(0, 1) = alpha; a(0, 2) = beta;
  a(1, 0) = beta;  a(1, 1) = 1;     a(1, 2) = alpha;
  a(2, 0) = alpha; a(2, 1) = beta;  a(2, 2) = 1;
  return LotkaVolterra(Vec{1.0, 1.0, 1.0}, a);
}

namespace {

void check_point(const System& sys, const Vec& x) {
  if (static_cast<int>(x.size()) != sys.dim())
    throw std::invalid_argument("point dimension does not match system");
  for (double xi : x)
    if (xi < -1e-12) throw std::invalid_argument("point has a negative coordinate");
}

}  // namespace

Vec eval_vector_field(const System& sys, const Vec& x) {
  check_point(sys, x);
  const Vec f = sys.growth(x);
  Vec F(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) F[i] = x[i] * f[i];
  return F;
}

Mat eval_jacobian(const System& sys, const Vec& x) {
  check_point(sys, x);
  const int n = sys.dim();
  const Vec f = sys.growth(x);
  const Mat df = sys.growth_jacobian(x);
  Mat dF(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dF(i, j) = (i == j ? f[i] : 0.0) + x[i] * df(i, j);
  return dF;
}

Mat face_jacobian_block(const System& sys, const Vec& x, const IndexSet& I) {
  if (!on_face(x, I))
    throw std::invalid_argument("face_jacobian_block: point is not on the face C_I");
  const Mat dF = eval_jacobian(sys, x);
  const auto keep = I.complement();
  const int d = static_cast<int>(keep.size());
  Mat block(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) block(i, j) = dF(keep[i], keep[j]);
  return block;
}

Vec axial_rest_point(const System& sys, int i, double r_scan) {
  const int n = sys.dim();
  if (i < 0 || i >= n) throw std::invalid_argument("axial_rest_point: bad index");

  const auto fi = [&](double t) {
    Vec x(n, 0.0);
    x[i] = t;
    return sys.growth(x)[i];
  };

  // Bracket the root of f_i along the axis.
  double lo = 1e-8, hi = lo;
  double flo = fi(lo);
  if (!(flo > 0.0))
    throw NumericalError("axial_rest_point: f_i not positive near the origin");
  bool bracketed = false;
  while (hi < r_scan) {
    hi = std::min(hi * 2.0, r_scan);
    if (fi(hi) <= 0.0) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed)
    throw NumericalError("axial_rest_point: no sign change on the scanned axis interval");

  // Bisection to a tight interval, then Newton polish.
  for (int it = 0; it < 80 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (fi(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    Vec x(n, 0.0);
    x[i] = t;
    const double val = sys.growth(x)[i];
    if (std::abs(val) < 1e-12) break;
    const double slope = sys.growth_jacobian(x)(i, i);
    if (slope == 0.0) break;
    const double step = val / slope;
    t -= step;
    if (!(t > 0.0)) t = 0.5 * (lo + hi);
  }
  Vec x(n, 0.0);
  x[i] = t;
  if (std::abs(sys.growth(x)[i]) > 1e-10)
    throw NumericalError("axial_rest_point: Newton polish did not converge");
  return x;
}

Vec join_point(const System& sys, const IndexSet& I) {
  const int n = sys.dim();
  if (I.card() > n - 1) throw std::invalid_argument("join_point: |I| must be <= n-1");
  Vec x(n, 0.0);
  for (int j : I.complement()) x[j] = axial_rest_point(sys, j)[j];
  return x;
}

HypothesisAReport check_hypothesis_A(const System& sys) {
  const int n = sys.dim();
  HypothesisAReport rep;
  rep.margins.resize(n);
  for (int i = 0; i < n; ++i) {
    // x^[i] is the join over the other species' axial points, i.e. x^[{i}].
    const Vec xi = join_point(sys, IndexSet(n, {i}));
    rep.margins[i] = sys.growth(xi)[i];
  }
  rep.holds = *std::min_element(rep.margins.begin(), rep.margins.end()) >= -1e-10;
  return rep;
}

HypothesisAReport check_hypothesis_A_lv(const LotkaVolterra& lv) {
  const int n = lv.dim();
  HypothesisAReport rep;
  rep.margins.resize(n);
  for (int i = 0; i < n; ++i) {
    double s = lv.b()[i];
    for (int j = 0; j < n; ++j)
      if (j != i) s -= lv.a()(i, j) * lv.b()[j] / lv.a()(j, j);
    rep.margins[i] = s;
  }
  rep.holds = *std::min_element(rep.margins.begin(), rep.margins.end()) >= -1e-10;
  return rep;
}

CompetitivenessReport verify_strong_competitiveness(const System& sys, const Vec& lo,
                                                    const Vec& hi, int samples,
                                                    const std::vector<Vec>& rest_points,
                                                    std::uint64_t seed) {
  const int n = sys.dim();
  CompetitivenessReport rep;
  HaltonSampler sampler(n, seed);
  for (int s = 0; s < samples; ++s) {
    const Vec x = sampler.next_in_box(lo, hi);
    const Mat df = sys.growth_jacobian(x);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        if (df(i, j) > rep.worst_offdiag) {
          rep.worst_offdiag = df(i, j);
          rep.witness_point = x;
          rep.witness_i = i;
          rep.witness_j = j;
        }
      }
  }
  rep.strongly_competitive = rep.worst_offdiag < 0.0;
  for (const Vec& p : rest_points) {
    const Mat df = sys.growth_jacobian(p);
    for (int i = 0; i < n; ++i) {
      rep.rest_point_diagonals.push_back(df(i, i));
      if (df(i, i) >= 0.0) rep.rest_point_diagonals_negative = false;
    }
  }
  return rep;
}

namespace {

/// View of a system restricted to a face, for non-Lotka-Volterra systems.
class FaceRestrictedSystem final : public System {
 public:
  FaceRestrictedSystem(std::shared_ptr<const System> base, IndexSet I)
      : base_(std::move(base)), I_(std::move(I)), keep_(I_.complement()) {}

  int dim() const override { return static_cast<int>(keep_.size()); }

  Vec growth(const Vec& y) const override {
    const Vec f = base_->growth(embed_in_face(y, I_));
    Vec out(keep_.size());
    for (std::size_t i = 0; i < keep_.size(); ++i) out[i] = f[keep_[i]];
    return out;
  }

  Mat growth_jacobian(const Vec& y) const override {
    const Mat df = base_->growth_jacobian(embed_in_face(y, I_));
    const int d = dim();
    Mat out(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out(i, j) = df(keep_[i], keep_[j]);
    return out;
  }

 private:
  std::shared_ptr<const System> base_;
  IndexSet I_;
  std::vector<int> keep_;
};

}  // namespace

std::shared_ptr<const System> restrict_to_face(const std::shared_ptr<const System>& sys,
                                               const IndexSet& I) {
  if (I.card() >= sys->dim())
    throw std::invalid_argument("restrict_to_face: empty subsystem");
  if (I.card() == 0) return sys;
  if (const auto* lv = dynamic_cast<const LotkaVolterra*>(sys.get()))
    return std::make_shared<LotkaVolterra>(lv->restricted(I));
  return std::make_shared<FaceRestrictedSystem>(sys, I);
}

Vec embed_in_face(const Vec& sub_point, const IndexSet& I) {
  const auto keep = I.complement();
  if (sub_point.size() != keep.size())
    throw std::invalid_argument("embed_in_face: dimension mismatch");
  Vec x(I.n, 0.0);
  for (std::size_t i = 0; i < keep.size(); ++i) x[keep[i]] = sub_point[i];
  return x;
}

Vec project_to_face(const Vec& x, const IndexSet& I) {
  const auto keep = I.complement();
  Vec y(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) y[i] = x[keep[i]];
  return y;
}

std::vector<IndexSet> enumerate_faces(int n, int min_card, int max_card) {
  std::vector<IndexSet> out;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) members.push_back(i);
    const int c = static_cast<int>(members.size());
    if (c >= min_card && c <= max_card) out.emplace_back(n, std::move(members));
  }
  std::sort(out.begin(), out.end(), [](const IndexSet& a, const IndexSet& b) {
    if (a.card() != b.card()) return a.card() < b.card();
    return a.members < b.members;
  });
  return out;
}

}  // namespace csim
