#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "csim/certify.hpp"
#include "csim/eig.hpp"
#include "csim/util.hpp"

using namespace csim;

namespace {

std::shared_ptr<const System> weak_lv() {
  Mat a = Mat::identity(3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) a(i, j) = 0.1;
  return std::make_shared<LotkaVolterra>(Vec(3, 1.0), a);
}

std::shared_ptr<const System> ml(double alpha, double beta) {
  return std::make_shared<LotkaVolterra>(MayLeonard(alpha, beta).to_lv());
}

// Roots of a symmetric 3x3 characteristic polynomial by the trigonometric
// form; closed-form oracle for the iterative solver.
std::vector<double> sym3_eigen_oracle(const Mat& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p < 1e-300) return {q, q, q};
  Mat b(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
  const double detb =
      b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
      b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
      b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::vector<double> ev{e1, e2, e3};
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> sym2_eigen_oracle(const Mat& a) {
  const double tr = a(0, 0) + a(1, 1);
  const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
  return {tr / 2.0 - disc, tr / 2.0 + disc};
}

LotkaVolterra random_lv(HaltonSampler& sampler, int n) {
  const Vec e = sampler.next();
  Vec b(n);
  Mat a(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) b[i] = 0.3 + 2.0 * e[k++];
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = 0.05 + 1.2 * e[k++];
  for (int i = 0; i < n; ++i) a(i, i) += 1.0;
  return LotkaVolterra(std::move(b), std::move(a));
}

}  // namespace

TEST_CASE("lambda and d at the cyclic interior point") {
  const auto sys = ml(1.5, 0.8);
  const Vec y(3, 1.0 / 3.3);
  const IndexSet empty = IndexSet::empty(3);
  CHECK(lambda_at(*sys, y, empty) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d_at(*sys, y, empty) ==
        doctest::Approx(std::sqrt(1.2) / 3.3).epsilon(1e-10));
}

TEST_CASE("lambda, d, and the operator norm at the weak-coupling rest point") {
  const auto sys = weak_lv();
  const Vec p(3, 5.0 / 6.0);
  const IndexSet empty = IndexSet::empty(3);
  CHECK(lambda_at(*sys, p, empty) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(d_at(*sys, p, empty) == doctest::Approx(5.0 / 60.0).epsilon(1e-10));
  CHECK(spectral_norm_df(*sys, p, empty) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("matrix functionals agree with closed-form oracles") {
  HaltonSampler sampler(40, 77);
  IntegratorConfig cfg;
  int done = 0;
  while (done < 100) {
    const int n = 2 + done % 2;  // alternate 2x2 and 3x3 cases
    const LotkaVolterra lv = random_lv(sampler, n);
    const Vec e = sampler.next();
    Vec probe(n);
    for (int i = 0; i < n; ++i) probe[i] = 0.05 + 1.15 * e[i];
    const IndexSet empty = IndexSet::empty(n);
    const Mat block = face_jacobian_block(lv, probe, empty);

    Mat sym(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sym(i, j) = -0.5 * (block(i, j) + block(j, i));
    const auto sym_ev = n == 2 ? sym2_eigen_oracle(sym) : sym3_eigen_oracle(sym);
    CHECK(lambda_at(lv, probe, empty) ==
          doctest::Approx(sym_ev.back()).epsilon(1e-9));

    double min_product = 1e300;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        min_product = std::min(min_product, block(i, j) * block(j, i));
    CHECK(d_at(lv, probe, empty) ==
          doctest::Approx(std::sqrt(min_product)).epsilon(1e-9));

    const Mat ata = block.transpose() * block;
    const auto ata_ev = n == 2 ? sym2_eigen_oracle(ata) : sym3_eigen_oracle(ata);
    CHECK(spectral_norm_df(lv, probe, empty) ==
          doctest::Approx(std::sqrt(std::max(ata_ev.back(), 0.0))).epsilon(1e-9));
    ++done;
  }
}

TEST_CASE("d degenerates on the face boundary") {
  const auto sys = weak_lv();
  CHECK_THROWS_AS(d_at(*sys, Vec{0.5, 0.0, 0.5}, IndexSet::empty(3)), NumericalError);
}

TEST_CASE("attractor samples collapse onto the known equilibria") {
  IntegratorConfig cfg;
  const auto sys = weak_lv();
  const AttractorSample interior =
      sample_attractor(sys, IndexSet::empty(3), 4, 150.0, 10.0, cfg);
  REQUIRE(!interior.points.empty());
  for (const Vec& x : interior.points)
    for (int i = 0; i < 3; ++i) CHECK(x[i] == doctest::Approx(5.0 / 6.0).epsilon(1e-4));

  const AttractorSample edge =
      sample_attractor(sys, IndexSet(3, {2}), 4, 150.0, 10.0, cfg);
  for (const Vec& x : edge.points) {
    CHECK(x[2] == 0.0);
    CHECK(x[0] == doctest::Approx(1.0 / 1.1).epsilon(1e-4));
  }
}

TEST_CASE("weak-coupling certificate: degree 1 passes, degree 2 fails honestly") {
  IntegratorConfig cfg;
  CertifyParams params;
  params.n_starts = 4;
  params.T_transient = 120.0;
  params.T_sample = 10.0;
  const auto sys = weak_lv();

  const CertificateReport k0 = certify(sys, 0, 1e-3, params, cfg);
  CHECK(k0.hyp_a.holds);
  CHECK(k0.verdict == Verdict::c1);

  const CertificateReport k1 = certify(sys, 1, 1e-3, params, cfg);
  CHECK(k1.verdict == Verdict::c1);  // not C^2: the coupling is too weak
  CHECK(!k1.c_route_holds);
  const auto interior = std::find_if(k1.faces.begin(), k1.faces.end(),
                                     [](const FaceCertificate& f) {
                                       return f.face.card() == 0;
                                     });
  REQUIRE(interior != k1.faces.end());
  CHECK(interior->sup_norm_df == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(4.0 * interior->d_inf == doctest::Approx(1.0 / 3.0).epsilon(1e-4));
  CHECK(!interior->c1_holds);
  CHECK(!interior->c2_holds);

  const auto gap0 = std::find_if(k1.gap.begin(), k1.gap.end(), [](const GapRecord& g) {
    return g.face.card() == 0;
  });
  REQUIRE(gap0 != k1.gap.end());
  CHECK(gap0->margin == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(!gap0->holds);
  CHECK(!k1.gap_route_holds);
}

TEST_CASE("cyclic system gets no certificate") {
  IntegratorConfig cfg;
  CertifyParams params;
  params.n_starts = 2;
  params.T_transient = 60.0;
  params.T_sample = 5.0;
  params.T_permanence = 60.0;
  const CertificateReport rep = certify(ml(1.5, 0.8), 0, 1e-3, params, cfg);
  CHECK(!rep.hyp_a.holds);
  CHECK(rep.verdict == Verdict::none);
  CHECK(!rep.warnings.empty());  // interior subsystem is not permanent
}

TEST_CASE("certificates are monotone in the degree") {
  IntegratorConfig cfg;
  CertifyParams params;
  params.n_starts = 2;
  params.T_transient = 100.0;
  params.T_sample = 5.0;
  // Two species, coupling 0.7: on the attractor |DF| = 1 and d = 0.7/1.7,
  // so k < 2(k+1) * 0.41176 holds for k <= 4 and fails at k = 5.
  Mat a = Mat::identity(2);
  a(0, 1) = a(1, 0) = 0.7;
  auto sys = std::make_shared<LotkaVolterra>(Vec(2, 1.0), a);
  std::vector<bool> held;
  for (int k = 1; k <= 6; ++k) {
    const CertificateReport rep = certify(sys, k, 1e-3, params, cfg);
    held.push_back(rep.verdict == Verdict::ck1);
  }
  // The set of certified degrees is downward closed in k.
  for (std::size_t i = 1; i < held.size(); ++i)
    if (held[i]) CHECK(held[i - 1]);
  CHECK(held[0]);
  CHECK(held[3]);
  CHECK(!held[4]);  // 5 * sup|DF| = 5 exceeds 12 d = 4.94
}

TEST_CASE("scaling the field scales the functionals coherently") {
  HaltonSampler sampler(40, 99);
  const LotkaVolterra lv = random_lv(sampler, 3);
  Vec b2 = lv.b();
  Mat a2 = lv.a();
  const double c = 3.7;
  for (double& v : b2) v *= c;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a2(i, j) *= c;
  const LotkaVolterra scaled(b2, a2);
  const Vec probe{0.4, 0.3, 0.5};
  const IndexSet empty = IndexSet::empty(3);
  CHECK(lambda_at(scaled, probe, empty) ==
        doctest::Approx(c * lambda_at(lv, probe, empty)).epsilon(1e-10));
  CHECK(d_at(scaled, probe, empty) ==
        doctest::Approx(c * d_at(lv, probe, empty)).epsilon(1e-10));
  CHECK(spectral_norm_df(scaled, probe, empty) ==
        doctest::Approx(c * spectral_norm_df(lv, probe, empty)).epsilon(1e-10));
}

TEST_CASE("closed-form degree rule") {
  CHECK(may_leonard_degree(1.4) == 2);
  CHECK(may_leonard_degree(1.9) == 1);
  CHECK(may_leonard_degree(2.0) == 0);
  CHECK(may_leonard_degree(1.5) == 1);   // boundary: alpha = 1 + 1/2 exactly
  CHECK(may_leonard_degree(1.05) == 19);
  CHECK(may_leonard_degree(2.5) == 0);
}

TEST_CASE("degree rule is consistent with the axial gap arithmetic") {
  // For valid (alpha, beta) with l = degree(alpha): -1 - l(1 - alpha) < 0.
  for (double alpha : {1.2, 1.4, 1.6, 1.9}) {
    const int l = may_leonard_degree(alpha);
    REQUIRE(l >= 1);
    CHECK(-1.0 - l * (1.0 - alpha) < 0.0);
  }
}
