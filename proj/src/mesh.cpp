#include "csim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace csim {

namespace {

void enumerate_points(int n, int m, std::vector<int>& cur,
                      std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == n - 1) {
    cur.push_back(m - std::accumulate(cur.begin(), cur.end(), 0));
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  const int used = std::accumulate(cur.begin(), cur.end(), 0);
  for (int k = 0; k <= m - used; ++k) {
    cur.push_back(k);
    enumerate_points(n, m, cur, out);
    cur.pop_back();
  }
}

bool nondecreasing_in_range(const std::vector<int>& s, int m) {
  int prev = 0;
  for (int v : s) {
    if (v < prev || v > m) return false;
    prev = v;
  }
  return true;
}

// Cumulative-sum integer vertex -> barycentric integer coordinates.
std::vector<int> s_to_bary(const std::vector<int>& s, int n, int m) {
  std::vector<int> p(n);
  p[0] = s[0];
  for (int i = 1; i < n - 1; ++i) p[i] = s[i] - s[i - 1];
  p[n - 1] = m - s[n - 2];
  return p;
}

}  // namespace

Vec BarycentricMesh::direction(int p) const {
  Vec u(n);
  for (int i = 0; i < n; ++i) u[i] = static_cast<double>(points[p][i]) / m;
  return u;
}

int BarycentricMesh::index_of(const std::vector<int>& coords) const {
  auto it = index.find(coords);
  return it == index.end() ? -1 : it->second;
}

std::vector<int> BarycentricMesh::zero_coords(int p) const {
  std::vector<int> z;
  for (int i = 0; i < n; ++i)
    if (points[p][i] == 0) z.push_back(i);
  return z;
}

bool BarycentricMesh::is_interior(int p) const {
  for (int i = 0; i < n; ++i)
    if (points[p][i] == 0) return false;
  return true;
}

BarycentricMesh make_mesh(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("make_mesh: need n >= 1, m >= 1");
  BarycentricMesh mesh;
  mesh.n = n;
  mesh.m = m;

  std::vector<int> cur;
  enumerate_points(n, m, cur, mesh.points);
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p)
    mesh.index[mesh.points[p]] = p;

  mesh.neighbors.resize(mesh.points.size());
  for (int p = 0; p < static_cast<int>(mesh.points.size()); ++p) {
    for (int i = 0; i < n; ++i) {
      if (mesh.points[p][i] == 0) continue;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        std::vector<int> q = mesh.points[p];
        --q[i];
        ++q[j];
        const int qi = mesh.index_of(q);
        if (qi >= 0) mesh.neighbors[p].push_back(qi);
      }
    }
    std::sort(mesh.neighbors[p].begin(), mesh.neighbors[p].end());
    mesh.neighbors[p].erase(
        std::unique(mesh.neighbors[p].begin(), mesh.neighbors[p].end()),
        mesh.neighbors[p].end());
  }

  if (n >= 2) {
    const int ns = n - 1;
    double cell_estimate = 1.0;
    for (int i = 0; i < ns; ++i) cell_estimate *= m;
    for (int i = 2; i <= ns; ++i) cell_estimate *= i;
    if (cell_estimate > 5e6)
      throw std::invalid_argument("make_mesh: resolution too high for this dimension");

    std::vector<int> perm(ns);
    std::vector<int> base(ns, 0);
    // Iterate over all bases in [0, m-1]^ns.
    for (;;) {
      std::iota(perm.begin(), perm.end(), 0);
      std::sort(perm.begin(), perm.end());
      do {
        std::vector<int> v = base;
        std::vector<int> cell;
        bool ok = nondecreasing_in_range(v, m);
        if (ok) {
          const int id = mesh.index_of(s_to_bary(v, n, m));
          ok = id >= 0;
          if (ok) cell.push_back(id);
        }
        for (int t = 0; ok && t < ns; ++t) {
          ++v[perm[t]];
          if (!nondecreasing_in_range(v, m)) {
            ok = false;
            break;
          }
          const int id = mesh.index_of(s_to_bary(v, n, m));
          if (id < 0) {
            ok = false;
            break;
          }
          cell.push_back(id);
        }
        if (ok) mesh.cells.push_back(cell);
      } while (std::next_permutation(perm.begin(), perm.end()));

      int d = ns - 1;
      while (d >= 0 && base[d] == m - 1) base[d--] = 0;
      if (d < 0) break;
      ++base[d];
    }

    mesh.node_cells.resize(mesh.points.size());
    for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c)
      for (int v : mesh.cells[c]) mesh.node_cells[v].push_back(c);
  }

  return mesh;
}

double interpolate_linear(const BarycentricMesh& mesh, const Vec& values, const Vec& u) {
  const int n = mesh.n;
  const int m = mesh.m;
  if (static_cast<int>(values.size()) != static_cast<int>(mesh.points.size()))
    throw std::invalid_argument("interpolate_linear: values size mismatch");
  if (static_cast<int>(u.size()) != n)
    throw std::invalid_argument("interpolate_linear: direction size mismatch");
  if (n == 1) return values[0];

  const int ns = n - 1;
  // Cumulative-sum coordinates scaled by m.
  std::vector<double> s(ns);
  double acc = 0.0;
  for (int i = 0; i < ns; ++i) {
    acc += u[i];
    s[i] = std::clamp(acc * m, 0.0, static_cast<double>(m));
  }
  std::vector<int> base(ns);
  std::vector<double> frac(ns);
  for (int i = 0; i < ns; ++i) {
    base[i] = std::min(static_cast<int>(std::floor(s[i])), m - 1);
    frac[i] = s[i] - base[i];
  }
  // Sort by fractional part descending; ties resolved toward higher index so
  // the vertex chain stays inside the ordered region.
  std::vector<int> order(ns);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (frac[a] != frac[b]) return frac[a] > frac[b];
    return a > b;
  });

  std::vector<double> w(ns + 1);
  w[0] = 1.0 - frac[order[0]];
  for (int t = 1; t < ns; ++t) w[t] = frac[order[t - 1]] - frac[order[t]];
  w[ns] = frac[order[ns - 1]];

  std::vector<int> v = base;
  double value = 0.0, wsum = 0.0;
  for (int t = 0; t <= ns; ++t) {
    if (t > 0) ++v[order[t - 1]];
    if (w[t] > 1e-14) {
      if (!nondecreasing_in_range(v, m))
        throw NumericalError("interpolate_linear: direction outside the simplex");
      const int id = mesh.index_of(s_to_bary(v, n, m));
      if (id < 0) throw NumericalError("interpolate_linear: missing mesh vertex");
      value += w[t] * values[id];
      wsum += w[t];
    }
  }
  return value / wsum;
}

namespace {

// Barycentric weights of u in the deformed cell; returns min weight.
bool cell_weights(const BarycentricMesh& mesh, const std::vector<Vec>& cloud,
                  const std::vector<int>& cell, const Vec& u, Vec& lambda) {
  const int n = mesh.n;
  Mat A(n - 1, n - 1);
  Vec rhs(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    rhs[i] = u[i] - cloud[cell[0]][i];
    for (int j = 1; j < n; ++j) A(i, j - 1) = cloud[cell[j]][i] - cloud[cell[0]][i];
  }
  Vec lam;
  try {
    lam = solve_linear(A, rhs);
  } catch (const NumericalError&) {
    return false;
  }
  lambda.assign(n, 0.0);
  double sum = 0.0;
  for (int j = 1; j < n; ++j) {
    lambda[j] = lam[j - 1];
    sum += lam[j - 1];
  }
  lambda[0] = 1.0 - sum;
  return true;
}

double min_of(const Vec& v) { return *std::min_element(v.begin(), v.end()); }

}  // namespace

double interpolate_in_deformed(const BarycentricMesh& mesh, const std::vector<Vec>& cloud,
                               const Vec& values, const Vec& u, int hint_node) {
  if (mesh.n == 1) return values[0];

  auto evaluate = [&](const std::vector<int>& cell, const Vec& lambda) {
    double v = 0.0;
    for (int j = 0; j < mesh.n; ++j) v += lambda[j] * values[cell[j]];
    return v;
  };

  Vec lambda;
  int best_cell = -1;
  double best_score = -1e300;
  Vec best_lambda;

  auto try_cell = [&](int c) -> bool {
    if (!cell_weights(mesh, cloud, mesh.cells[c], u, lambda)) return false;
    const double score = min_of(lambda);
    if (score > best_score) {
      best_score = score;
      best_cell = c;
      best_lambda = lambda;
    }
    return score >= -1e-9;
  };

  // Nearby cells first: the deformation per sweep increment is modest.
  if (hint_node >= 0 && !mesh.node_cells.empty()) {
    for (int c : mesh.node_cells[hint_node])
      if (try_cell(c)) return evaluate(mesh.cells[c], lambda);
    for (int nb : mesh.neighbors[hint_node])
      for (int c : mesh.node_cells[nb])
        if (try_cell(c)) return evaluate(mesh.cells[c], lambda);
  }
  for (int c = 0; c < static_cast<int>(mesh.cells.size()); ++c)
    if (try_cell(c)) return evaluate(mesh.cells[c], lambda);

  if (best_cell < 0)
    throw NumericalError("interpolate_in_deformed: no usable cell");
  // Target drifted outside the cloud; clamp onto the least-violated cell.
  for (double& w : best_lambda) w = std::max(w, 0.0);
  double s = 0.0;
  for (double w : best_lambda) s += w;
  for (double& w : best_lambda) w /= s;
  return evaluate(mesh.cells[best_cell], best_lambda);
}

}  // namespace csim
