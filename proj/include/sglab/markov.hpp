#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sglab/spaces.hpp"

namespace sglab {

/// Row-stochastic kernel on a finite measure space. The constructor only
/// checks shapes; use validate_markov for the Markov invariants.
struct MarkovOperator {
  FiniteMeasureSpace space;
  Matrix matrix;

  MarkovOperator(FiniteMeasureSpace space, Matrix matrix);
};

struct Violation {
  std::string invariant;
  double magnitude;
};

/// Outcome of validate_markov: every invariant whose worst violation exceeds
/// the tolerance is listed, together with the measured magnitudes.
struct MarkovDiagnostics {
  double min_entry = 0.0;
  double max_row_sum_defect = 0.0;
  double max_detailed_balance_defect = 0.0;
  double norm_1 = 0.0;
  double norm_inf = 0.0;
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
};

/// Checks positivity, S1 = 1, detailed balance mu_i S_ij = mu_j S_ji, and
/// that both endpoint norms ||S||_1 and ||S||_inf equal 1.
MarkovDiagnostics validate_markov(const MarkovOperator& S, double tol = 1e-12);
MarkovDiagnostics validate_markov(const FiniteMeasureSpace& space, const Matrix& S,
                                  double tol = 1e-12);

/// Whether the generator must annihilate constants.
enum class GeneratorKind {
  /// A1 = 0: e^{tA} is Markovian.
  conservative,
  /// A1 <= 0: e^{tA} is sub-Markovian (used for resolvent test matrices).
  sub_markov,
};

/// Symmetric diffusion semigroup T_t = e^{tA} generated by a mu-self-adjoint
/// matrix A with nonnegative off-diagonal entries and spectrum in (-inf, 0].
///
/// The generator is stored with the semigroup sign (T_t = e^{tA}); the
/// positive operator of the Littlewood-Paley-Stein literature is -A. The
/// spectral decomposition is computed once in the constructor through the
/// symmetrization D^{1/2} A D^{-1/2}, D = diag(mu), so that
/// A = V diag(lambda) V^T D with mu-orthonormal eigenvectors V.
class DiffusionSemigroup {
 public:
  DiffusionSemigroup(FiniteMeasureSpace space, Matrix generator,
                     GeneratorKind kind = GeneratorKind::conservative);

  const FiniteMeasureSpace& space() const { return space_; }
  const Matrix& generator() const { return generator_; }
  int size() const { return space_.size(); }
  GeneratorKind kind() const { return kind_; }

  /// Eigenvalues 0 = lambda_0 >= lambda_1 >= ... (descending, nonpositive).
  const Vector& eigenvalues() const { return eigenvalues_; }
  /// Columns are mu-orthonormal right eigenvectors.
  const Matrix& eigenvectors() const { return eigenvectors_; }

  /// Number of eigenvalues treated as exactly zero.
  int zero_modes() const { return zero_modes_; }
  bool ergodic() const { return zero_modes_ == 1; }
  /// Smallest nonzero |lambda_k|, or 0 when the generator vanishes.
  double spectral_gap() const { return gap_; }
  /// Largest |lambda_k|.
  double spectral_radius() const { return radius_; }

  /// V diag(values) V^T D: applies a spectral multiplier.
  CMatrix spectral_function(const Eigen::VectorXcd& values) const;
  Matrix spectral_function(const Vector& values) const;

  /// Coefficients V^T D f of a field in the eigenbasis (one row per mode).
  Matrix coefficients(const Matrix& f) const;
  /// Inverse of coefficients: V c.
  Matrix synthesize(const Matrix& c) const;

  /// Projection onto the kernel of A (the t -> inf limit of T_t).
  Matrix kernel_projection() const;

 private:
  FiniteMeasureSpace space_;
  Matrix generator_;
  GeneratorKind kind_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  int zero_modes_ = 0;
  double gap_ = 0.0;
  double radius_ = 0.0;
};

/// Spectral exponential sum_k e^{z lambda_k} v_k (mu v_k)^T.
CMatrix semigroup_at(const DiffusionSemigroup& G, complex z);
/// Real-time semigroup T_t as a Markov operator.
MarkovOperator markov_at(const DiffusionSemigroup& G, double t);

/// Two-coordinate Rota dilation of T = S^2 on Omega x Omega.
///
/// Atoms are the pairs (i, j) with mu_i S_ij > 0, weighted by mu_i S_ij.
/// `embed` lifts f(i) to F(i, j) = f(i); `expect_first` (E_A) averages over
/// the second coordinate and `expect_second` (E_B) over the first.
struct DilationBundle {
  FiniteMeasureSpace big_space;
  std::vector<std::pair<int, int>> atoms;
  Matrix embed;
  Matrix expect_first;
  Matrix expect_second;
};

DilationBundle build_rota_dilation(const MarkovOperator& S, double tol = 1e-10);

/// max |E_A E_B embed f - embed S^2 f| over the standard basis f = e_j.
double rota_deviation(const DilationBundle& bundle, const MarkovOperator& S);

struct SubordinationOptions {
  double tol = 1e-8;
  int order = 32;
  int initial_panels = 16;
  int max_panels = 4096;
};

struct SubordinationResult {
  Matrix matrix;
  /// Truncation bound plus the last node-doubling change.
  double achieved = 0.0;
  int panels = 0;
};

/// Poisson semigroup P_t = pi^{-1/2} int_0^inf e^{-s} s^{-1/2} T_{t^2/(4s)} ds,
/// by composite Gauss-Legendre in u = log s on [-L, L].
SubordinationResult subordinated_poisson(const DiffusionSemigroup& G, double t,
                                         const SubordinationOptions& opts = {});

/// Spectral reference e^{-t sqrt(-A)}.
Matrix poisson_spectral(const DiffusionSemigroup& G, double t);

// Example chains. Weights are probability measures.

/// Generator [[-a, a], [a, -a]] with uniform weights.
DiffusionSemigroup two_point_chain(double rate = 1.0);
/// Nearest-neighbour walk on Z/n: generator P - I, P_{i,i+-1} = 1/2.
DiffusionSemigroup cycle_chain(int n);
/// Walk on the complete graph K_n: generator P - I, P_ij = 1/(n-1).
DiffusionSemigroup complete_graph_chain(int n);
/// Generator 0 on n uniform atoms (T_t = I).
DiffusionSemigroup zero_chain(int n);
/// Random reversible kernel: random weights mu and symmetric conductances
/// c_ij, S_ij = c_ij / (K mu_i) off the diagonal, diagonal filling rows to 1.
MarkovOperator random_reversible_kernel(int n, std::uint64_t seed);
/// Semigroup generated by S - I for S = random_reversible_kernel(n, seed).
DiffusionSemigroup random_reversible_chain(int n, std::uint64_t seed);

}  // namespace sglab
