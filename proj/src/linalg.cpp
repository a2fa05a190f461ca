#include "csim/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace csim {

Vec solve_linear(Mat a, Vec b) {
  const int n = a.rows();
  if (a.cols() != n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("solve_linear: shape mismatch");
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;

  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
    if (std::abs(a(piv, col)) < 1e-300)
      throw NumericalError("solve_linear: singular matrix");
    if (piv != col) {
      for (int j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
      std::swap(b[piv], b[col]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a(r, col) / a(col, col);
      if (f == 0.0) continue;
      for (int j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      b[r] -= f * b[col];
    }
  }
  Vec x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

Vec orthonormalize_columns(Mat& frame) {
  const int rows = frame.rows();
  const int k = frame.cols();
  Vec diag(k, 0.0);
  for (int c = 0; c < k; ++c) {
    for (int p = 0; p < c; ++p) {
      double proj = 0.0;
      for (int r = 0; r < rows; ++r) proj += frame(r, p) * frame(r, c);
      for (int r = 0; r < rows; ++r) frame(r, c) -= proj * frame(r, p);
    }
    double nrm = 0.0;
    for (int r = 0; r < rows; ++r) nrm += frame(r, c) * frame(r, c);
    nrm = std::sqrt(nrm);
    diag[c] = nrm;
    if (nrm < 1e-300)
      throw NumericalError("orthonormalize_columns: degenerate frame");
    for (int r = 0; r < rows; ++r) frame(r, c) /= nrm;
  }
  return diag;
}

}  // namespace csim
