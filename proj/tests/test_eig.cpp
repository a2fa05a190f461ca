#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "csim/eig.hpp"
#include "csim/util.hpp"

using namespace csim;

namespace {

// det(A - z I) for a 3x3, evaluated directly; an eigenvalue must be a root.
std::complex<double> charpoly3(const Mat& a, std::complex<double> z) {
  std::complex<double> m[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = a(i, j) - (i == j ? z : 0.0);
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat random3(HaltonSampler& sampler, double scale) {
  const Vec e = sampler.next();
  Mat a(3, 3);
  int k = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = scale * (e[k++] - 0.5);
  return a;
}

}  // namespace

TEST_CASE("symmetric eigenvalues of a known matrix") {
  Mat a(2, 2);
  a(0, 0) = 2.0;
  a(0, 1) = a(1, 0) = 1.0;
  a(1, 1) = 2.0;
  const auto ev = symmetric_eigenvalues(a);
  CHECK(ev[0] == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ev[1] == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("symmetric eigenvalues match the closed-form 2x2 roots") {
  HaltonSampler sampler(9, 11);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec e = sampler.next();
    Mat a(2, 2);
    a(0, 0) = 4.0 * (e[0] - 0.5);
    a(1, 1) = 4.0 * (e[1] - 0.5);
    a(0, 1) = a(1, 0) = 4.0 * (e[2] - 0.5);
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    const auto ev = symmetric_eigenvalues(a);
    CHECK(ev[0] == doctest::Approx(tr / 2.0 - disc).epsilon(1e-11));
    CHECK(ev[1] == doctest::Approx(tr / 2.0 + disc).epsilon(1e-11));
  }
}

TEST_CASE("general eigenvalues are characteristic-polynomial roots") {
  HaltonSampler sampler(9, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat a = random3(sampler, 4.0);
    const auto evs = eigenvalues(a);
    REQUIRE(evs.size() == 3);
    double scale = 0.0;
    for (const auto& z : evs) scale = std::max(scale, std::abs(z));
    scale = std::max(scale, 1.0);
    for (const auto& z : evs)
      CHECK(std::abs(charpoly3(a, z)) < 1e-9 * scale * scale * scale);
    // Trace identity.
    std::complex<double> sum = 0.0;
    for (const auto& z : evs) sum += z;
    CHECK(sum.real() == doctest::Approx(a(0, 0) + a(1, 1) + a(2, 2)).epsilon(1e-9));
    CHECK(std::abs(sum.imag()) < 1e-12);
  }
}

TEST_CASE("complex eigenvalues come in exact conjugate pairs") {
  Mat rot(2, 2);
  rot(0, 0) = 1.0;
  rot(0, 1) = -2.0;
  rot(1, 0) = 2.0;
  rot(1, 1) = 1.0;
  const auto evs = eigenvalues(rot);
  REQUIRE(evs.size() == 2);
  CHECK(evs[0].real() == evs[1].real());
  CHECK(evs[0].imag() == -evs[1].imag());
  CHECK(evs[0].real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(evs[0].imag()) == doctest::Approx(2.0).epsilon(1e-12));

  HaltonSampler sampler(9, 23);
  for (int trial = 0; trial < 100; ++trial) {
    auto evs3 = eigenvalues(random3(sampler, 6.0));
    for (std::size_t i = 0; i < evs3.size(); ++i) {
      if (evs3[i].imag() == 0.0) continue;
      const auto conj = std::conj(evs3[i]);
      const bool paired = std::any_of(evs3.begin(), evs3.end(),
                                      [&](auto z) { return z == conj; });
      CHECK(paired);
    }
  }
}

TEST_CASE("circulant spectrum is reproduced") {
  // circ(0, a, b): eigenvalues a+b, and the conjugate pair a w + b w^2.
  Mat c(3, 3);
  const double a = 1.5, b = 0.8;
  c(0, 1) = c(1, 2) = c(2, 0) = a;
  c(0, 2) = c(1, 0) = c(2, 1) = b;
  auto evs = eigenvalues(c);
  std::sort(evs.begin(), evs.end(),
            [](auto l, auto r) { return l.real() < r.real(); });
  CHECK(evs[2].real() == doctest::Approx(a + b).epsilon(1e-12));
  CHECK(evs[0].real() == doctest::Approx(-(a + b) / 2.0).epsilon(1e-12));
  CHECK(std::abs(evs[0].imag()) ==
        doctest::Approx(std::sqrt(3.0) / 2.0 * std::abs(a - b)).epsilon(1e-10));
}

TEST_CASE("spectral norm and symmetric max agree with Rayleigh bounds") {
  HaltonSampler sampler(9, 41);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat a = random3(sampler, 3.0);
    const double sn = spectral_norm(a);
    // |A e_j| <= |A| for every coordinate direction.
    for (int j = 0; j < 3; ++j) {
      Vec col(3);
      for (int i = 0; i < 3; ++i) col[i] = a(i, j);
      CHECK(norm2(col) <= sn + 1e-10);
    }
    const double ms = max_symmetric_eigenvalue(a);
    CHECK(ms <= sn + 1e-9);
    for (int j = 0; j < 3; ++j) CHECK(a(j, j) <= ms + 1e-10);
  }
}

TEST_CASE("defective and diagonal matrices are handled") {
  Mat d(3, 3);
  d(0, 0) = -1.0;
  d(1, 1) = 2.0;
  d(2, 2) = 5.0;
  const auto evd = eigenvalue_real_parts(d);
  CHECK(evd[0] == doctest::Approx(-1.0));
  CHECK(evd[2] == doctest::Approx(5.0));

  Mat j(2, 2);  // Jordan block
  j(0, 0) = j(1, 1) = 3.0;
  j(0, 1) = 1.0;
  for (const auto& z : eigenvalues(j)) {
    CHECK(z.real() == doctest::Approx(3.0).epsilon(1e-7));
    CHECK(std::abs(z.imag()) < 1e-7);
  }
}
