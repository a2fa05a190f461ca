#include "csim/flow.hpp"

#include <algorithm>
#include <cmath>

namespace csim {

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order weights (for the embedded error estimate).
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                 e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

enum class ClampResult { ok, retry };

// Snap roundoff-negative orthant coordinates back to zero.
ClampResult clamp_orthant(Vec& y, int clamp_dims) {
  for (int i = 0; i < clamp_dims; ++i) {
    if (y[i] < 0.0) {
      if (y[i] > -1e-13)
        y[i] = 0.0;
      else
        return ClampResult::retry;
    }
  }
  return ClampResult::ok;
}

void check_guard(const Vec& y, double guard) {
  if (norm2(y) > guard)
    throw NumericalError("integrate: overflow guard tripped (non-dissipative input?)");
}

void rk4_step(const Rhs& rhs, const Vec& y, double h, Vec& out, Vec& k1, Vec& k2, Vec& k3,
              Vec& k4, Vec& tmp) {
  const std::size_t n = y.size();
  rhs(y, k1);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  rhs(tmp, k2);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  rhs(tmp, k3);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  rhs(tmp, k4);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

Vec integrate_rk4(const Rhs& rhs, Vec y, double T, const IntegratorConfig& cfg,
                  int clamp_dims) {
  const double dir = T >= 0 ? 1.0 : -1.0;
  const double total = std::abs(T);
  const std::size_t n = y.size();
  Vec out(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = 0.0;
  const double t_eps = 1e-13 * std::max(1.0, total);
  while (total - t > t_eps) {
    double h = std::min(cfg.step, total - t);
    for (int attempt = 0;; ++attempt) {
      rk4_step(rhs, y, dir * h, out, k1, k2, k3, k4, tmp);
      if (clamp_orthant(out, clamp_dims) == ClampResult::ok) break;
      if (attempt >= 40 || h < 1e-15)
        throw NumericalError("integrate: step left the orthant and retries exhausted");
      h *= 0.5;
    }
    y = out;
    t += h;
    check_guard(y, cfg.overflow_guard);
  }
  return y;
}

Vec integrate_rk45(const Rhs& rhs, Vec y, double T, const IntegratorConfig& cfg,
                   int clamp_dims) {
  const double dir = T >= 0 ? 1.0 : -1.0;
  const double total = std::abs(T);
  if (total == 0.0) return y;
  const std::size_t n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n), y4(n);

  double t = 0.0;
  double h = std::min(cfg.max_step, total);
  const double t_eps = 1e-13 * std::max(1.0, total);
  while (total - t > t_eps) {
    h = std::min(h, total - t);
    if (h < 1e-15) throw NumericalError("integrate: step size underflow");
    const double hs = dir * h;

    rhs(y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
    rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] =
          y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(tmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      y5[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(y5, k7);
    for (std::size_t i = 0; i < n; ++i)
      y4[i] = y[i] + hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                           e7 * k7[i]);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double sc =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      const double e = (y5[i] - y4[i]) / sc;
      err += e * e;
    }
    err = std::sqrt(err / static_cast<double>(n));

    const bool orthant_ok = clamp_orthant(y5, clamp_dims) == ClampResult::ok;
    if (err <= 1.0 && orthant_ok) {
      y = y5;
      t += h;
      check_guard(y, cfg.overflow_guard);
      double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      factor = std::clamp(factor, 0.2, 5.0);
      h = std::min(h * factor, cfg.max_step);
    } else if (!orthant_ok) {
      h *= 0.5;
    } else {
      const double factor = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
      h *= factor;
    }
  }
  return y;
}

Rhs field_rhs(const System& sys) {
  return [&sys](const Vec& x, Vec& dx) {
    const Vec f = sys.growth(x);
    dx.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] = x[i] * f[i];
  };
}

}  // namespace

Vec integrate(const Rhs& rhs, Vec y, double T, const IntegratorConfig& cfg, int clamp_dims) {
  if (cfg.method == IntegratorConfig::Method::rk4_fixed)
    return integrate_rk4(rhs, std::move(y), T, cfg, clamp_dims);
  return integrate_rk45(rhs, std::move(y), T, cfg, clamp_dims);
}

Vec flow(const System& sys, const Vec& x0, double T, const IntegratorConfig& cfg) {
  const int n = sys.dim();
  if (static_cast<int>(x0.size()) != n)
    throw std::invalid_argument("flow: dimension mismatch");
  for (double v : x0)
    if (v < -1e-12) throw std::invalid_argument("flow: start outside the orthant");
  return integrate(field_rhs(sys), x0, T, cfg, n);
}

Trajectory trajectory(const System& sys, const Vec& x0, double T, double dt_sample,
                      const IntegratorConfig& cfg) {
  if (!(dt_sample > 0.0)) throw std::invalid_argument("trajectory: dt_sample must be > 0");
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);
  if (T <= 0.0) return traj;
  const Rhs rhs = field_rhs(sys);
  Vec y = x0;
  double t = 0.0;
  while (t < T - 1e-12) {
    const double dt = std::min(dt_sample, T - t);
    y = integrate(rhs, y, dt, cfg, sys.dim());
    t += dt;
    traj.times.push_back(t);
    traj.states.push_back(y);
  }
  return traj;
}

std::pair<Vec, Mat> variational_flow(const System& sys, const Vec& x0, const Mat& frame,
                                     double T, const IntegratorConfig& cfg) {
  const int n = sys.dim();
  const int k = frame.cols();
  if (frame.rows() != n) throw std::invalid_argument("variational_flow: frame row mismatch");
  if (static_cast<int>(x0.size()) != n)
    throw std::invalid_argument("variational_flow: dimension mismatch");

  // Augmented state [x, col_1, ..., col_k]; base and tangent evolve jointly.
  Vec y(n * (1 + k));
  for (int i = 0; i < n; ++i) y[i] = x0[i];
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n; ++i) y[n * (1 + c) + i] = frame(i, c);

  const Rhs rhs = [&sys, n, k](const Vec& s, Vec& ds) {
    ds.resize(s.size());
    Vec x(s.begin(), s.begin() + n);
    const Vec f = sys.growth(x);
    const Mat df = sys.growth_jacobian(x);
    for (int i = 0; i < n; ++i) ds[i] = x[i] * f[i];
    for (int c = 0; c < k; ++c) {
      const int off = n * (1 + c);
      for (int i = 0; i < n; ++i) {
        double v = f[i] * s[off + i];
        for (int j = 0; j < n; ++j) v += x[i] * df(i, j) * s[off + j];
        ds[off + i] = v;
      }
    }
  };

  y = integrate(rhs, std::move(y), T, cfg, n);

  Vec xT(y.begin(), y.begin() + n);
  Mat out(n, k);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < n; ++i) out(i, c) = y[n * (1 + c) + i];
  return {std::move(xT), std::move(out)};
}

}  // namespace csim
