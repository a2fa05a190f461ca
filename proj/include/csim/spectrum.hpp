#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "csim/flow.hpp"
#include "csim/sysmodel.hpp"

namespace csim {

struct RestPoint {
  Vec location;
  IndexSet face;  // zero pattern of location
  std::vector<std::complex<double>> eigenvalues;  // of DF(location), conjugate-closed
  double residual = 0.0;                          // |F(location)|_inf
};

/// Rest points on every face. Lotka-Volterra faces are solved directly as
/// linear systems; other systems get Newton from quasi-random seeds.
/// The origin and all axial points are always present; duplicates within
/// 1e-8 are merged.
std::vector<RestPoint> find_rest_points(const std::shared_ptr<const System>& sys);

struct ExponentReport {
  std::vector<double> internal;    // ascending, one per surviving species
  std::map<int, double> external;  // i in face -> i-th external exponent
  bool sample_based = false;       // empirical tail average rather than closed form
};

/// Exponents of the Dirac measure at p: externals are f_i(p) for extinct i,
/// internals are real parts of the surviving-block Jacobian spectrum.
ExponentReport exponents_at_rest_point(const System& sys, const RestPoint& p);

/// Time average of f_i over [T0, T] along the orbit of x0 (trapezoid rule);
/// T0 < 0 selects the default transient cut T/2. x0 must lie in the open
/// face C_I with i extinct.
double external_exponent_birkhoff(const System& sys, const IndexSet& I, int i,
                                  const Vec& x0, double T,
                                  const IntegratorConfig& cfg, double T0 = -1.0);

/// Discrete-QR extraction of the top k exponents within the face tangent
/// space V_I, re-orthonormalizing every tau time units. Ascending.
std::vector<double> internal_exponents_qr(const System& sys, const IndexSet& I,
                                          const Vec& x0, int k, double T,
                                          const IntegratorConfig& cfg,
                                          double tau = 1.0);

struct GapCheck {
  double lambda1 = 0.0;  // smallest exponent
  double lambda2 = 0.0;  // second smallest, with multiplicity
  double margin = 0.0;   // lambda1 - (k+1)*lambda2
  bool holds = false;    // margin < -eta
};

/// Exponent-gap inequality over the merged exponent list of one measure.
GapCheck benaim_gap_check(const ExponentReport& report, int k, double eta);

struct ErgodicSample {
  enum class Kind { dirac, empirical };
  Kind kind = Kind::dirac;
  IndexSet face;
  RestPoint point;        // dirac only
  std::vector<Vec> tail;  // empirical only; states dt_tail apart
  double dt_tail = 0.0;
  double tail_duration = 0.0;
};

struct SampleParams {
  double T_transient = 200.0;
  double T_sample = 100.0;
  double dt_tail = 0.5;
  double delta_face = 1e-6;  // tails closer to the face boundary are invalid
  double snap_tol = 1e-6;    // tails this close to a rest point become Diracs
  std::uint64_t seed = 0;
  bool include_origin = false;  // the origin is not carried by the attractor
};

/// Sampled surrogate for the ergodic measures: Diracs at located rest
/// points plus one empirical orbit tail per face. Tails that have collapsed
/// onto a rest point are snapped to its Dirac.
std::vector<ErgodicSample> sample_ergodic_measures(
    const std::shared_ptr<const System>& sys, const SampleParams& params,
    const IntegratorConfig& cfg);

/// Exponents of one sampled measure; empirical samples get Birkhoff
/// externals and QR internals recomputed along a fresh orbit from the tail.
ExponentReport exponents_for_sample(const std::shared_ptr<const System>& sys,
                                    const ErgodicSample& sample,
                                    const IntegratorConfig& cfg);

struct NonnegativityReport {
  bool holds = false;
  double min_external = 0.0;
  int witness = -1;  // index into the sample list
  std::vector<double> per_sample_min;
};

/// Minimum external exponent over boundary-face samples; verdict true when
/// every external exponent clears -1e-6.
NonnegativityReport external_nonnegativity_check(
    const std::shared_ptr<const System>& sys,
    const std::vector<ErgodicSample>& samples, const IntegratorConfig& cfg);

struct PermanenceReport {
  Vec per_start;         // min surviving coordinate over [T/2, T], per start
  double summary = 0.0;  // min over starts
};

/// Persistence probe on the face subsystem: quasi-random interior starts,
/// minimum surviving coordinate over the second half of [0, T].
PermanenceReport permanence_probe(const System& sys, const IndexSet& I, int n_starts,
                                  double T, const IntegratorConfig& cfg,
                                  std::uint64_t seed = 0);

}  // namespace csim
