#pragma once

#include <array>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "monolab/optimize.hpp"
#include "monolab/scenario.hpp"

namespace monolab {

/// Real pure state on n qubits. Amplitude index bits run from qubit 0 (most
/// significant) to qubit n-1.
class RealPureState {
 public:
  /// Throws StructuralError unless amplitudes.size() == 2^qubits and the norm
  /// is 1 within 1e-12.
  RealPureState(int qubits, std::vector<double> amplitudes);

  /// Normalizes `amplitudes` first; throws on a zero vector.
  static RealPureState normalized(int qubits, std::vector<double> amplitudes);

  int qubits() const noexcept { return qubits_; }
  std::span<const double> amplitudes() const noexcept { return amplitudes_; }

 private:
  int qubits_;
  std::vector<double> amplitudes_;
};

/// Gaussian amplitudes, normalized.
RealPureState random_real_state(int qubits, std::mt19937_64& rng);

/// sin(angle) sigma_x + cos(angle) sigma_z.
struct PlaneObservable {
  double angle = 0.0;
  /// (x, z) components of the Bloch direction.
  std::array<double, 2> direction() const;
  /// 2x2 real matrix in the computational basis, row-major.
  std::array<double, 4> matrix() const;
};

/// Observable along a given (x, z) direction (need not be normalized).
PlaneObservable observable_along(double x, double z);

/// entries[u][v] = <sigma_u (x) sigma_v> with u, v in {x, z}.
struct CorrelationMatrix {
  std::array<std::array<double, 2>, 2> entries{};

  /// Eigenvalues of T T^T, largest first.
  std::array<double, 2> eigenvalues() const;
  /// a^T T b for plane directions a (first qubit) and b (second qubit).
  double correlation(const PlaneObservable& a, const PlaneObservable& b) const;
};

/// Throws StructuralError for equal or out-of-range qubit indices.
CorrelationMatrix correlation_matrix(const RealPureState& state, int first, int second);

/// <A (x) B> on the given qubit pair.
double expectation(const RealPureState& state, int first, const PlaneObservable& a, int second,
                   const PlaneObservable& b);

/// <A> on one qubit.
double expectation(const RealPureState& state, int qubit, const PlaneObservable& a);

/// alpha(<A1B1> + <A1B2>) + <A2B1> - <A2B2>. Throws HypothesisError for
/// alpha < 1.
double alpha_chsh_value(const CorrelationMatrix& t, const std::array<PlaneObservable, 2>& a,
                        const std::array<PlaneObservable, 2>& b, double alpha);
double alpha_chsh_value(const RealPureState& state, const std::array<PlaneObservable, 2>& a,
                        const std::array<PlaneObservable, 2>& b, double alpha, std::pair<int, int> qubits = {0, 1});

/// 2 sqrt(alpha^2 lambda_1 + lambda_2). Throws HypothesisError for alpha < 1.
double alpha_chsh_max(const CorrelationMatrix& t, double alpha);

/// The second party's observables maximizing the alpha-CHSH value for fixed
/// first-party observables, and the value reached.
struct BestResponse {
  std::array<PlaneObservable, 2> observables;
  double value = 0.0;
};
BestResponse best_response(const CorrelationMatrix& t, const std::array<PlaneObservable, 2>& a, double alpha);

/// Numerical maximum of alpha_chsh_value over all four angles.
MinimizeResult maximize_alpha_chsh(const CorrelationMatrix& t, double alpha, const MinimizeOptions& options = {});

/// Worst slacks of the two three-party monogamy relations for a three-qubit
/// state (qubits 0, 1, 2 = A, B, C), each maximized over plane observables:
///   sum_form:  4a^2(1+a^2) - [a^2 max(I_AB^2, I_AC^2) + min(I_AB^2, I_AC^2)]
///   pair_form[i]: 4(1+a^2) - [I_AB^2 + 4 <A_i C>^2]
struct Theorem4Report {
  double alpha = 1.0;
  double sum_form_slack = 0.0;
  std::array<double, 2> pair_form_slack{};
  double worst_slack() const noexcept;
  bool satisfied(double tol = 1e-7) const noexcept { return worst_slack() >= -tol; }
  /// False when no start of some maximization converged.
  bool converged = false;
};

Theorem4Report check_theorem4(const RealPureState& state, double alpha, const MinimizeOptions& options = {});

/// (beta_+ |01> + beta_- |10>) |0> with beta_+- = sqrt((1 +- sqrt2 sin theta) / 2).
/// Throws StructuralError for theta outside [0, pi/4].
RealPureState saturating_family(double theta);

/// Values reached on a saturating state with A1 = sigma_z, A2 = sigma_x,
/// C = sigma_z and the best response on B.
struct SaturationPoint {
  double theta = 0.0;
  double bell_value = 0.0;
  double correlation = 0.0;
  /// bell_value^2 + 4 correlation^2 - 4(1 + alpha^2)
  double residual = 0.0;
};
SaturationPoint saturation_point(double theta, double alpha);

/// (1/2)(1 + sqrt(1 + alpha^2 - (I/2)^2)) clamped to at most 1. Throws
/// StructuralError for |I| > 2 sqrt(1 + alpha^2) and HypothesisError for
/// alpha < 1.
double quantum_guessing_bound(double bell_value, double alpha);

/// Phases of a twisted Fourier measurement: outcome a of a setting projects
/// onto sum_j exp(i(2 pi j a / d + phase[j])) |j> / sqrt(d).
using PhaseVector = std::vector<double>;

/// The chained two-party functional on the maximally entangled two-qudit
/// state measured with the given phase vectors (M per party, d entries each).
double chained_value_from_phases(int settings, int outcomes, const std::vector<PhaseVector>& alice,
                                 const std::vector<PhaseVector>& bob);

/// The full behavior produced by the same measurements.
FloatBehavior chained_quantum_behavior(int settings, int outcomes, const std::vector<PhaseVector>& alice,
                                       const std::vector<PhaseVector>& bob);

struct ViolationOptions {
  MinimizeOptions minimize;
  /// Free-phase refinement runs only when 2M(d-1) is at most this.
  std::size_t refine_max_parameters = 32;
};

struct ChainedViolation {
  /// An upper bound on the quantum minimum of I^{2,M,d}.
  double value = 0.0;
  std::vector<PhaseVector> alice;
  std::vector<PhaseVector> bob;
  bool converged = false;
  bool refined = false;
};

/// Minimizes I^{2,M,d} over the measurement ansatz: first over a one-parameter
/// family of evenly spaced linear phases, then (for small instances) over all
/// phases starting from that optimum.
ChainedViolation chained_quantum_violation(int settings, int outcomes, const ViolationOptions& options = {});

enum class GuessingBoundKind {
  /// (1 + I) / d
  kMonogamy,
  /// (1/d)(1 + d^2 I / 4) for two parties
  kPrior,
};

/// -log2 of the guessing bound evaluated at I.
double key_rate(double bell_value, int outcomes, GuessingBoundKind kind);

/// key_rate at the computed violation for (M, d).
double key_rate(int settings, int outcomes, GuessingBoundKind kind, const ViolationOptions& options = {});

/// Smallest M (starting at 2) whose rate reaches `target`, given violations[i]
/// = I_Q(M = i + 2). Empty when no listed M reaches it.
std::optional<int> min_settings(std::span<const double> violations, int outcomes, double target,
                                GuessingBoundKind kind);

/// Computes violations for M = 2..max_settings as needed. Empty when the
/// target is unreachable (target >= log2 d, or not reached by max_settings).
std::optional<int> min_settings(int outcomes, double target, GuessingBoundKind kind, int max_settings = 256,
                                const ViolationOptions& options = {});

}  // namespace monolab
