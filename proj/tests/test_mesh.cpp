#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "csim/mesh.hpp"
#include "csim/util.hpp"

using namespace csim;

namespace {

long long binom(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long long factorial(int n) {
  long long r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

Vec random_direction(HaltonSampler& sampler, int n) {
  Vec u = sampler.next();
  u.resize(n);
  double s = 0.0;
  for (double& v : u) {
    v += 1e-3;
    s += v;
  }
  for (double& v : u) v /= s;
  return u;
}

}  // namespace

TEST_CASE("node and cell counts match the combinatorial formulas") {
  for (int n : {2, 3, 4}) {
    for (int m : {1, 2, 5, 8}) {
      const BarycentricMesh mesh = make_mesh(n, m);
      CHECK(static_cast<long long>(mesh.points.size()) == binom(m + n - 1, n - 1));
      // The staircase triangulation of the m-fold dilated simplex has
      // m^(n-1) top-dimensional cells.
      const auto cube_cells =
          static_cast<std::size_t>(std::llround(std::pow(m, n - 1)));
      CHECK(mesh.cells.size() == cube_cells);
    }
  }
}

TEST_CASE("points are lexicographic and index_of inverts the order") {
  const BarycentricMesh mesh = make_mesh(3, 4);
  for (std::size_t p = 1; p < mesh.points.size(); ++p)
    CHECK(mesh.points[p - 1] < mesh.points[p]);
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p)
    CHECK(mesh.index_of(mesh.points[p]) == p);
  CHECK(mesh.index_of({9, 9, 9}) == -1);
}

TEST_CASE("neighbor relation is symmetric and within one lattice move") {
  const BarycentricMesh mesh = make_mesh(4, 3);
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p) {
    for (int q : mesh.neighbors[p]) {
      int moved = 0;
      for (int i = 0; i < 4; ++i) moved += std::abs(mesh.points[p][i] - mesh.points[q][i]);
      CHECK(moved == 2);  // one +1 and one -1
      const auto& back = mesh.neighbors[q];
      CHECK(std::find(back.begin(), back.end(), p) != back.end());
    }
  }
}

TEST_CASE("cells partition the simplex (barycentric volumes sum to one)") {
  for (int n : {2, 3, 4}) {
    const BarycentricMesh mesh = make_mesh(n, 3);
    double total = 0.0;
    for (const auto& cell : mesh.cells) {
      // Volume of the simplex spanned by the first n-1 coordinates.
      const int d = n - 1;
      Mat e(d, d);
      for (int v = 1; v <= d; ++v)
        for (int i = 0; i < d; ++i)
          e(i, v - 1) = mesh.direction(cell[v])[i] - mesh.direction(cell[0])[i];
      // Determinant by elimination (tiny d).
      double det = 1.0;
      for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
          if (std::abs(e(r, c)) > std::abs(e(piv, c))) piv = r;
        if (piv != c) {
          for (int cc = 0; cc < d; ++cc) std::swap(e(c, cc), e(piv, cc));
          det = -det;
        }
        det *= e(c, c);
        if (e(c, c) == 0.0) break;
        for (int r = c + 1; r < d; ++r) {
          const double f = e(r, c) / e(c, c);
          for (int cc = c; cc < d; ++cc) e(r, cc) -= f * e(c, cc);
        }
      }
      total += std::abs(det) / factorial(d);
    }
    CHECK(total == doctest::Approx(1.0 / factorial(n - 1)).epsilon(1e-12));
  }
}

TEST_CASE("linear interpolation reproduces linear functions exactly") {
  HaltonSampler sampler(8, 3);
  for (int n : {2, 3, 4}) {
    const BarycentricMesh mesh = make_mesh(n, 5);
    const Vec coef{1.5, -0.7, 0.3, 2.2};
    Vec values(mesh.points.size());
    for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p) {
      const Vec u = mesh.direction(p);
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += coef[i] * u[i];
      values[p] = s;
    }
    for (int trial = 0; trial < 40; ++trial) {
      const Vec u = random_direction(sampler, n);
      double expect = 0.0;
      for (int i = 0; i < n; ++i) expect += coef[i] * u[i];
      CHECK(interpolate_linear(mesh, values, u) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("interpolation at nodes returns nodal values") {
  const BarycentricMesh mesh = make_mesh(3, 6);
  Vec values(mesh.points.size());
  for (std::size_t p = 0; p < values.size(); ++p) values[p] = std::sin(0.7 * p);
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p)
    CHECK(interpolate_linear(mesh, values, mesh.direction(p)) ==
          doctest::Approx(values[p]).epsilon(1e-12));
}

TEST_CASE("deformed-cell interpolation with the identity cloud matches linear") {
  HaltonSampler sampler(8, 29);
  const BarycentricMesh mesh = make_mesh(3, 5);
  std::vector<Vec> cloud(mesh.points.size());
  Vec values(mesh.points.size());
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p) {
    cloud[p] = mesh.direction(p);
    values[p] = std::cos(0.3 * p);
  }
  for (int trial = 0; trial < 30; ++trial) {
    const Vec u = random_direction(sampler, 3);
    CHECK(interpolate_in_deformed(mesh, cloud, values, u, 0) ==
          doctest::Approx(interpolate_linear(mesh, values, u)).epsilon(1e-10));
  }
}

TEST_CASE("deformed-cell interpolation tracks a barycentric remap") {
  // Deform by a map that keeps Delta invariant: a convex reweighting.
  const BarycentricMesh mesh = make_mesh(3, 6);
  std::vector<Vec> cloud(mesh.points.size());
  Vec values(mesh.points.size());
  const Vec coef{0.9, 1.8, -0.4};
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p) {
    Vec u = mesh.direction(p);
    Vec w{0.7 * u[0] + 0.2 * u[1] + 0.1 * u[2], 0.1 * u[0] + 0.8 * u[1] + 0.1 * u[2],
          0.2 * u[0] + 0.0 * u[1] + 0.8 * u[2]};
    cloud[p] = w;
    values[p] = coef[0] * w[0] + coef[1] * w[1] + coef[2] * w[2];
  }
  HaltonSampler sampler(8, 31);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec u = random_direction(sampler, 3);
    // Only query targets well inside the deformed image.
    Vec inside{0.7 * u[0] + 0.2 * u[1] + 0.1 * u[2], 0.1 * u[0] + 0.8 * u[1] + 0.1 * u[2],
               0.2 * u[0] + 0.0 * u[1] + 0.8 * u[2]};
    const double got = interpolate_in_deformed(mesh, cloud, values, inside, 0);
    const double expect =
        coef[0] * inside[0] + coef[1] * inside[1] + coef[2] * inside[2];
    CHECK(got == doctest::Approx(expect).epsilon(1e-9));
  }
}
