#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace usdlo::analytics {

using Complex = std::complex<double>;

/// Signal ensemble: N symmetric coherent states |√μ·e^{iφ_k}⟩ with
/// φ_k = 2πk/N, detected with efficiency η. Every probability in the module
/// depends on (μ, η) only through the effective intensity η·μ.
class PhaseAlphabet {
public:
  PhaseAlphabet(int n, double mean_photons, double efficiency = 1.0);

  int size() const { return n_; }
  double mean_photons() const { return mu_; }
  double efficiency() const { return eta_; }

  double phase(int k) const;

  /// e^{iφ_k}. Exact-quadrant components are snapped to {0, ±1} and, for even
  /// N, the second half of the table is the exact negation of the first, so
  /// amplitude differences between a phase and itself (or its antipode)
  /// cancel bit-exactly. Elimination soundness relies on this.
  Complex phase_factor(int k) const;

  /// |e^{iφ_j} − e^{iφ_k}|².
  double chord_sq(int j, int k) const;

private:
  int n_;
  double mu_;
  double eta_;
  std::vector<Complex> factors_;
};

/// |c_k|² of the symmetric-state expansion: the k-th value is the Poisson
/// probability of photon number ≡ k (mod N), evaluated through the N-point
/// discrete Fourier sum. Entries are nonnegative and sum to 1.
std::vector<double> symmetric_coefficients(int n, double mu);

/// Optimum USD probability N·min_k |c_k|² for N symmetric coherent states.
double optimal_usd_prob(int n, double mu);

/// Click probability of a phase-elimination test fed the full intensity μ:
/// 1 − exp(−η·μ·|e^{iΔφ}−1|²).
double elimination_click_prob(double mu, double eta, double delta_phi);

/// Closed-form success probabilities (η = 1; substitute μ -> η·μ for lossy
/// detectors). Stage probabilities Bs4Stage1/Bs4Stage2 are the M -> ∞ limits
/// of the 4-step receiver's first/second photodetection.
enum class Scheme {
  Bs2,          ///< 1 − e^{−2μ}
  Bs3Simple,    ///< (1 − e^{−μ})²
  Bs3Feedback,  ///< 1 + 3e^{−2μ} − 4e^{−3μ/2}
  Bs4Simple,    ///< (1 − e^{−μ/2})²(1 − e^{−μ})
  Bs4Feedback,  ///< 1 + 3e^{−2μ} + 2μe^{−2μ} − 4e^{−μ}
  Bs4Stage1,    ///< 1 − e^{−2μ}
  Bs4Stage2,    ///< 1 − e^{−2μ} − 2μe^{−2μ}
  Pol4,         ///< 1 − e^{−2μ}(√2·sinh(√2μ) + 2cosh(√2μ) − 1)
};

const char *scheme_name(Scheme s);

/// Evaluate a closed form. Below μ = 10⁻³ the exponential combination is
/// evaluated by its Taylor series to avoid catastrophic cancellation; results
/// are clamped to [0, 1].
double closed_form(Scheme s, double mu);

/// Optimal two-phase USD probability for arbitrary phases (φ₀, φ₁):
/// 1 − exp(−μ|e^{iφ₀}−e^{iφ₁}|²/2). Reduces to Scheme::Bs2 for φ₁ = φ₀ + π.
double closed_form_two_phase(double mu, double phi0, double phi1);

/// Simple N-way split-and-eliminate scheme:
/// Π_{k=1}^{N−1} (1 − e^{−(μ/N)|e^{2πik/N}−1|²}).
double closed_form_simple(int n, double mu);

enum class AsymptoticKind {
  Optimal,        ///< N·μ^{N−1}/(N−1)!
  SimpleScheme,   ///< μ^{N−1}/N^{N−3}
  FeedbackScheme, ///< N·μ^{N−1}/(N−1)!  (feedback attains the optimum)
};

/// Leading small-μ behaviour of the USD probabilities.
double asymptotic(AsymptoticKind kind, int n, double mu);

/// Finite-M success probability of the general-N feedback scheme: the sum
/// over all (N−1)! elimination orders and per-stage round counts, where stage
/// m tests the N−m+1 surviving phases with one μ/M copy each per round.
/// Consumed copies include the click round (both conventions agree as
/// M -> ∞). Supported for 2 ≤ N ≤ 6, M ≥ N. Evaluated by an O((N−1)!·N·M)
/// stage recursion; converges to closed_form(Bs3Feedback) for N = 3.
double feedback_finite_m(int n, double mu, long m_copies);

/// Finite-M success probability of the 4-step BB84 receiver (basis
/// measurements in steps 2–3, remaining light split between two elimination
/// setups in step 4). Converges to closed_form(Bs4Feedback) with O(1/M) gap.
double feedback4_procedure_finite_m(double mu, long m_copies);

namespace numerics {

/// Clamp to [0, 1]; excursions beyond 1e-9 increment the health counter.
double clamp01(double p, const char *context);
std::uint64_t clamp_warning_count();
void reset_clamp_warnings();

} // namespace numerics

} // namespace usdlo::analytics
