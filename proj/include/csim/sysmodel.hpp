#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "csim/linalg.hpp"

namespace csim {

/// A set of species indices forced to zero (the face selector I).
/// Indices are 0-based internally; CLI output is 1-based.
struct IndexSet {
  int n = 0;
  std::vector<int> members;  // sorted, unique, subset of {0..n-1}

  IndexSet() = default;
  IndexSet(int n_, std::vector<int> members_);

  static IndexSet empty(int n) { return IndexSet(n, {}); }

  bool contains(int i) const;
  int card() const { return static_cast<int>(members.size()); }
  /// Surviving indices I' = {0..n-1} \ members, sorted.
  std::vector<int> complement() const;

  bool operator==(const IndexSet& o) const { return n == o.n && members == o.members; }
  bool operator<(const IndexSet& o) const { return members < o.members; }
};

/// Zero pattern of a point: indices with |x_i| <= tol.
IndexSet zero_pattern(const Vec& x, double tol = 1e-12);

/// Membership in the face C_I (zeros at I, within tol).
bool on_face(const Vec& x, const IndexSet& I, double tol = 1e-10);
/// Membership in the open face C_I° (zeros exactly at I, rest strictly positive).
bool in_open_face(const Vec& x, const IndexSet& I, double tol = 1e-10);

/// A competitive system x' = x_i f_i(x): per-capita growth f and its
/// Jacobian Df are the single source of the field F and of DF.
class System {
 public:
  virtual ~System() = default;
  virtual int dim() const = 0;
  virtual Vec growth(const Vec& x) const = 0;           // f(x)
  virtual Mat growth_jacobian(const Vec& x) const = 0;  // [df_i/dx_j](x)
};

/// x_i' = x_i (b_i - sum_j a_ij x_j) with b_i > 0, a_ij > 0.
class LotkaVolterra final : public System {
 public:
  LotkaVolterra(Vec b, Mat a);

  int dim() const override { return static_cast<int>(b_.size()); }
  Vec growth(const Vec& x) const override;
  Mat growth_jacobian(const Vec& x) const override;

  const Vec& b() const { return b_; }
  const Mat& a() const { return a_; }

  /// The subsystem with rows/columns in I deleted (exact field restriction).
  LotkaVolterra restricted(const IndexSet& I) const;

 private:
  Vec b_;
  Mat a_;
};

/// The May-Leonard cyclic system, valid for 0 < beta < 1 < alpha, alpha+beta > 2.
struct MayLeonard {
  double alpha = 0.0;
  double beta = 0.0;

  MayLeonard(double alpha_, double beta_);
  /// Equivalent Lotka-Volterra form: b = (1,1,1), rows (1, alpha, beta) cyclic.
  LotkaVolterra to_lv() const;
};

/// General system given by callbacks (f and Df supplied analytically).
class CallbackSystem final : public System {
 public:
  using GrowthFn = std::function<Vec(const Vec&)>;
  using JacobianFn = std::function<Mat(const Vec&)>;

  CallbackSystem(int n, GrowthFn f, JacobianFn df)
      : n_(n), f_(std::move(f)), df_(std::move(df)) {}

  int dim() const override { return n_; }
  Vec growth(const Vec& x) const override { return f_(x); }
  Mat growth_jacobian(const Vec& x) const override { return df_(x); }

 private:
  int n_;
  GrowthFn f_;
  JacobianFn df_;
};

/// F(x) with F_i = x_i f_i(x). Coordinates that are exactly zero stay
/// exactly zero. Rejects coordinates below -1e-12 and dim mismatches.
Vec eval_vector_field(const System& sys, const Vec& x);

/// DF(x) with DF_ij = delta_ij f_i(x) + x_i df_i/dx_j(x).
Mat eval_jacobian(const System& sys, const Vec& x);

/// The I'xI' submatrix of DF(x); requires x on the face C_I.
Mat face_jacobian_block(const System& sys, const Vec& x, const IndexSet& I);

/// The i-th axial rest point x^(i): bracketing plus Newton on t -> f_i(t e_i).
Vec axial_rest_point(const System& sys, int i, double r_scan = 1e3);

/// Componentwise lattice join of the axial rest points of surviving species.
Vec join_point(const System& sys, const IndexSet& I);

struct HypothesisAReport {
  Vec margins;  // f_i(x^[i]) per species
  bool holds = false;
};

/// Hypothesis (A): f_i(x^[i]) >= 0 for every i, where x^[i] is the join of
/// the other species' axial points. Slack 1e-10 keeps boundary cases stable.
HypothesisAReport check_hypothesis_A(const System& sys);

/// Closed Lotka-Volterra form: margins b_i - sum_{j != i} a_ij b_j / a_jj.
HypothesisAReport check_hypothesis_A_lv(const LotkaVolterra& lv);

struct CompetitivenessReport {
  bool strongly_competitive = true;
  // Worst (largest) off-diagonal df_i/dx_j seen, with its witness.
  double worst_offdiag = -1e300;
  Vec witness_point;
  int witness_i = -1, witness_j = -1;
  // Diagonal df_i/dx_i at the supplied rest points (standing assumption 2).
  std::vector<double> rest_point_diagonals;
  bool rest_point_diagonals_negative = true;
};

/// Samples quasi-random points in [lo, hi] and checks all off-diagonal
/// partials of f are negative; also checks diagonals at `rest_points`.
CompetitivenessReport verify_strong_competitiveness(const System& sys, const Vec& lo,
                                                    const Vec& hi, int samples,
                                                    const std::vector<Vec>& rest_points = {},
                                                    std::uint64_t seed = 0);

/// The subsystem (E)_I on the surviving coordinates (dimension |I'|).
/// Lotka-Volterra systems restrict exactly (deleted rows/columns).
std::shared_ptr<const System> restrict_to_face(const std::shared_ptr<const System>& sys,
                                               const IndexSet& I);

/// Embeds a point of the face subsystem back into the ambient orthant.
Vec embed_in_face(const Vec& sub_point, const IndexSet& I);
/// Restriction of an ambient point on C_I to the surviving coordinates.
Vec project_to_face(const Vec& x, const IndexSet& I);

/// All subsets I of {0..n-1} with min_card <= |I| <= max_card.
std::vector<IndexSet> enumerate_faces(int n, int min_card, int max_card);

}  // namespace csim
