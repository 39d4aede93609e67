#pragma once

#include <complex>
#include <cstdint>
#include <optional>

#include <Eigen/Dense>

namespace sglab {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using complex = std::complex<double>;

/// Function Omega -> R^d on a finite space, row i holding f(omega_i).
using FunctionField = Eigen::MatrixXd;
/// Complex-valued counterpart of FunctionField.
using ComplexField = Eigen::MatrixXcd;

/// Finite point set with strictly positive atom weights.
class FiniteMeasureSpace {
 public:
  explicit FiniteMeasureSpace(Vector weights);

  /// n atoms of equal mass; total mass 1 when `probability` is set, else mass 1 per atom.
  static FiniteMeasureSpace uniform(int n, bool probability = true);

  int size() const { return static_cast<int>(weights_.size()); }
  const Vector& weights() const { return weights_; }
  double total_mass() const { return total_mass_; }

  /// Same atoms rescaled to total mass 1.
  FiniteMeasureSpace normalized() const;

 private:
  Vector weights_;
  double total_mass_;
};

/// Exponents of L_p(Omega; l_q^d): outer p in (1, inf), inner q in [2, inf), d >= 1.
class MixedNormConfig {
 public:
  MixedNormConfig(double p, double q, int d);

  double p() const { return p_; }
  double q() const { return q_; }
  int d() const { return d_; }
  /// p = q = 2: the space is a Hilbert space and L2 norms are exact.
  bool hilbert() const { return p_ == 2.0 && q_ == 2.0; }

 private:
  double p_;
  double q_;
  int d_;
};

/// (sum_i mu_i ||f(omega_i)||_q^p)^(1/p).
double mixed_norm(const Eigen::Ref<const Matrix>& f, const FiniteMeasureSpace& space,
                  const MixedNormConfig& cfg);
double mixed_norm(const Eigen::Ref<const CMatrix>& f, const FiniteMeasureSpace& space,
                  const MixedNormConfig& cfg);

/// Settings shared by every ratio optimizer in the library.
struct AscentOptions {
  int restarts = 32;
  /// Relative gain below which an iteration counts as stagnant.
  double tol = 1e-9;
  /// Number of consecutive stagnant iterations that ends a restart.
  int patience = 50;
  int max_iterations = 5000;
  std::uint64_t seed = 0;
  /// When the space is Hilbert (p = q = 2), return the exact weighted
  /// spectral norm instead of running the ascent.
  bool exact_hilbert = true;
};

struct NormEstimate {
  double value = 0.0;
  /// False when some restart hit max_iterations before stagnating.
  bool converged = true;
  int iterations = 0;
};

/// Lower bound on ||T|| on L_p(Omega; l_q^d), T acting on each X-component.
///
/// Projected gradient ascent of ||Tf|| / ||f|| on the unit sphere with step
/// halving, restarted from seeded Gaussian fields; the best terminal ratio is
/// returned. Always runs the ascent (ignores `exact_hilbert`).
NormEstimate operator_norm_lower(const Matrix& T, const FiniteMeasureSpace& space,
                                 const MixedNormConfig& cfg, const AscentOptions& opts = {});
NormEstimate operator_norm_lower(const CMatrix& T, const FiniteMeasureSpace& space,
                                 const MixedNormConfig& cfg, const AscentOptions& opts = {});

/// Upper bound from the exact endpoint norms, ||T||_1^(1/p) ||T||_inf^(1-1/p).
/// `p` may be +infinity.
double operator_norm_upper(const Matrix& T, const FiniteMeasureSpace& space, double p);
double operator_norm_upper(const CMatrix& T, const FiniteMeasureSpace& space, double p);

/// Exact norm on L_2(mu; l_2^d): largest singular value of D^(1/2) T D^(-1/2).
double l2_operator_norm(const CMatrix& T, const FiniteMeasureSpace& space);
/// Exact inf ||Tf|| / ||f|| on L_2(mu; l_2^d): smallest singular value.
double l2_minimum_gain(const CMatrix& T, const FiniteMeasureSpace& space);

/// Operator norm as used by the scans in holo and lps: exact when the space
/// is Hilbert and `opts.exact_hilbert`, otherwise operator_norm_lower.
NormEstimate operator_norm_estimate(const CMatrix& T, const FiniteMeasureSpace& space,
                                    const MixedNormConfig& cfg, const AscentOptions& opts = {});
NormEstimate operator_norm_estimate(const Matrix& T, const FiniteMeasureSpace& space,
                                    const MixedNormConfig& cfg, const AscentOptions& opts = {});

/// Estimate of inf ||Tf|| / ||f|| (an upper bound for the true infimum unless exact).
NormEstimate minimum_gain_estimate(const CMatrix& T, const FiniteMeasureSpace& space,
                                   const MixedNormConfig& cfg, const AscentOptions& opts = {});

/// Worst value of ||(x+y)/2||^q + delta ||(x-y)/2||^q - (||x||^q + ||y||^q)/2
/// over sampled pairs, normalized so max(||x||, ||y||) = 1. Pairs live in
/// l_q^d, or in L_q(Omega; l_q^d) when `space` is given. Nonpositive means no
/// violation of power-type-q uniform convexity with constant delta was found.
double uniform_convexity_deficit(double q, double delta, int d, int sample_count,
                                 std::uint64_t seed = 0,
                                 const std::optional<FiniteMeasureSpace>& space = std::nullopt);

struct CotypeEstimate {
  double value = 0.0;
  bool converged = true;
};

/// Lower bound for the martingale cotype-q constant of X = l_r^d (r =
/// `inner_q`, defaulting to q) from Paley-Walsh martingales of the given depth.
CotypeEstimate cotype_lower_bound(double q, int d, int depth, int restarts,
                                  std::uint64_t seed = 0, std::optional<double> inner_q = {});

/// Ratio (sum_k E||df_k||^q)^(1/q) / (E||f_depth||^q)^(1/q) of a Paley-Walsh
/// martingale given by its start value (row 0) and increments in heap order
/// (rows 2^(k-1) .. 2^k - 1 for level k, indexed by the earlier signs).
double paley_walsh_ratio(const Matrix& params, int depth, double q, double inner_q);

}  // namespace sglab
