#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "csim/spectrum.hpp"
#include "csim/sysmodel.hpp"

namespace csim {

struct AttractorSample {
  IndexSet face;            // |I| <= n-2
  std::vector<Vec> points;  // ambient coordinates, zeros on the face pattern
  int n_starts = 0;
  double T_transient = 0.0;
  double T_sample = 0.0;
  std::vector<std::string> warnings;
};

/// Orbit-tail surrogate for the face attractor: tails of several starts
/// after a transient, subsampled at dt=0.5 and deduplicated at 1e-6, plus
/// the interior rest points of the face.
AttractorSample sample_attractor(const std::shared_ptr<const System>& sys,
                                 const IndexSet& I, int n_starts, double T_transient,
                                 double T_sample, const IntegratorConfig& cfg,
                                 std::uint64_t seed = 0);

/// Largest eigenvalue of the symmetrized negated surviving-block Jacobian.
double lambda_at(const System& sys, const Vec& x, const IndexSet& I);

/// Square root of the smallest pairwise product of cross partials of the
/// vector field over surviving species. Throws on a nonpositive product
/// (the point is degenerate, too close to the face boundary).
double d_at(const System& sys, const Vec& x, const IndexSet& I);

/// Operator norm of the surviving-block Jacobian (largest singular value).
double spectral_norm_df(const System& sys, const Vec& x, const IndexSet& I);

struct FaceCertificate {
  IndexSet face;
  double sup_norm_df = 0.0;  // sample max of |DF^I|
  double lambda_sup = 0.0;   // sample max of lambda(x)
  double d_inf = 0.0;        // sample min of d(x)
  bool c1_holds = false;     // k * sup|DF^I| < 2(k+1) d_inf
  bool c2_holds = false;     // k * lambda_sup < 2(k+1) d_inf
  bool permanent = true;     // subsystem persistence probe passed
  int sample_size = 0;
};

struct GapRecord {
  IndexSet face;         // support face of the binding measure
  double margin = 0.0;   // worst gap margin over measures on this face
  bool holds = false;    // margin < -eta
};

enum class Verdict { none, c1, ck1 };

struct CertificateReport {
  int k = 0;
  double eta = 0.0;
  HypothesisAReport hyp_a;
  std::vector<FaceCertificate> faces;  // every |I| <= n-2
  std::vector<GapRecord> gap;          // every face carrying sampled measures
  bool c_route_holds = false;    // (C1) or (C2) on every face record
  bool gap_route_holds = false;  // gap inequality over all sampled measures
  Verdict verdict = Verdict::none;
  bool sample_based = true;  // extrema over samples, never a proof
  std::vector<std::string> warnings;
};

struct CertifyParams {
  int n_starts = 8;
  double T_transient = 200.0;
  double T_sample = 50.0;
  double T_permanence = 120.0;
  double permanence_floor = 1e-3;
  std::uint64_t seed = 0;
};

/// Smoothness certificate: degree-1 route needs only the growth-margin
/// check at join points; degree k+1 additionally needs (C1) or (C2) on
/// every face with |I| <= n-2, evaluated on attractor samples. The
/// exponent-gap route is evaluated and reported alongside.
CertificateReport certify(const std::shared_ptr<const System>& sys, int k, double eta,
                          const CertifyParams& params, const IntegratorConfig& cfg);

/// Closed-form smoothness degree for the cyclic three-species family:
/// the largest l >= 1 with alpha < 1 + 1/l, or 0 when alpha >= 2.
int may_leonard_degree(double alpha);

}  // namespace csim
