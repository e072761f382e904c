#pragma once
#include <vector>

namespace usdlo::reference {

/// Brute-force Poisson-mod-N coefficients: value[k] = e^{−μ} Σ_{j≡k (N)} μ^j/j!,
/// truncated once terms fall below 1e-18 past the distribution mode.
/// Independent check of the Fourier-sum implementation.
std::vector<double> poisson_mod_coefficients(int n, double mu);

/// No-click probability of an efficiency-η threshold detector from the Fock
/// expansion: Σ_j Poisson(j | intensity)·(1−η)^j. Equals exp(−η·intensity);
/// evaluated by the truncated series as an independent route.
double poisson_no_click_probability(double intensity, double eta);

/// Literal nested-loop evaluation of the general-N feedback sum (same round
/// bookkeeping as analytics::feedback_finite_m). Exponential in N·M; intended
/// for N ≤ 4 and small M as a cross-check of the stage recursion.
double feedback_nested_sum(int n, double mu, long m_copies);

/// Literal double-loop evaluation of the 4-step receiver's finite-M sum.
double feedback4_nested_sum(double mu, long m_copies);

} // namespace usdlo::reference
