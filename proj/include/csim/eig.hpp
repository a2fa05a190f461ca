#pragma once

#include <complex>
#include <vector>

#include "csim/linalg.hpp"

namespace csim {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// returned in ascending order. The input is symmetrized first, so
/// tiny asymmetries from roundoff are tolerated.
std::vector<double> symmetric_eigenvalues(Mat a);

/// Eigenvalues of a general real matrix: reduction to upper Hessenberg
/// form followed by shifted (Francis double-shift) QR iteration.
/// Complex eigenvalues come out in exact conjugate pairs.
std::vector<std::complex<double>> eigenvalues(Mat a);

/// Real parts of eigenvalues(), sorted ascending.
std::vector<double> eigenvalue_real_parts(const Mat& a);

/// Largest eigenvalue of the symmetric part (a + a^T)/2.
double max_symmetric_eigenvalue(const Mat& a);

/// Operator (spectral) norm: sqrt of the top eigenvalue of a^T a.
double spectral_norm(const Mat& a);

}  // namespace csim
