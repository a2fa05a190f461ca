#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "csim/linalg.hpp"
#include "csim/sysmodel.hpp"

namespace csim {

struct IntegratorConfig {
  enum class Method { rk4_fixed, rk45_adaptive };
  Method method = Method::rk45_adaptive;
  double step = 1e-2;      // fixed-step size
  double abs_tol = 1e-9;   // adaptive tolerances
  double rel_tol = 1e-9;
  double max_step = 0.1;
  double overflow_guard = 1e6;  // norm bound; tripping it aborts the run
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
};

struct TangentFrame {
  Vec base;
  Mat vectors;  // n x k columns of tangent directions
};

/// phi_T(x0). Zero coordinates of x0 remain exactly zero; coordinates
/// driven into (-1e-13, 0) by roundoff are clamped back to 0, larger
/// negatives force a step retry. Negative T integrates backward.
Vec flow(const System& sys, const Vec& x0, double T, const IntegratorConfig& cfg);

/// States at times {0, dt, 2dt, ..., T}, each continued from the previous.
Trajectory trajectory(const System& sys, const Vec& x0, double T, double dt_sample,
                      const IntegratorConfig& cfg);

/// Integrates the base point and tangent frame jointly through the
/// variational equation xi' = DF(phi_t x) xi. Returns (phi_T x0, Dphi_T(x0) frame).
std::pair<Vec, Mat> variational_flow(const System& sys, const Vec& x0, const Mat& frame,
                                     double T, const IntegratorConfig& cfg);

/// Low-level integrator over an arbitrary right-hand side.
/// Coordinates [0, clamp_dims) are treated as orthant populations
/// (exact-zero preservation and negative clamping); the rest are free.
using Rhs = std::function<void(const Vec&, Vec&)>;
Vec integrate(const Rhs& rhs, Vec y, double T, const IntegratorConfig& cfg, int clamp_dims);

}  // namespace csim
