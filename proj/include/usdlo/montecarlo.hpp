#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "usdlo/analytics.hpp"
#include "usdlo/strategies.hpp"

namespace usdlo::mc {

/// Simulable measurement procedures.
enum class SimScheme {
  Bs2,         ///< N=2 basis measurement
  Bs3Simple,   ///< N=3 three-way split
  Bs3Feedback, ///< N=3 feedback with two-phase USD final stage
  Bs4Simple,   ///< N=4 four-way split
  Bs4Feedback, ///< N=4 4-step BB84 receiver
  BsnSimple,   ///< N-way split, any N
  BsnFeedback, ///< general-N feedback, elimination setups throughout
};

const char *scheme_name(SimScheme s);
/// Parse tags like "bs3-feedback" or "bsn-simple"; throws on unknown tags.
SimScheme parse_scheme(const std::string &name);
/// Alphabet size the scheme runs at (n is only consulted for the bsn-*
/// schemes).
int scheme_alphabet_size(SimScheme s, int n);

struct EstimateConfig {
  int n = 4;                ///< alphabet size for bsn-* schemes
  double mu = 1.0;          ///< mean photon number
  double eta = 1.0;         ///< detector efficiency
  long copies = 1000;       ///< M for feedback schemes
  long trials = 100000;
  std::uint64_t seed = 0;
  int threads = 0;          ///< 0 = hardware concurrency
};

/// Success-probability estimate with binomial standard error. The harness
/// also audits unambiguity: a violation is an eliminated true phase or a
/// wrong conclusive index (both are impossible by construction and checked
/// on every trial).
struct Estimate {
  double p_hat = 0.0;
  double stderr_value = 0.0;
  long trials = 0;
  long successes = 0;
  long soundness_violations = 0;
};

/// Run `trials` independent trials (substream = trial index, so the result
/// does not depend on the thread count) with a uniformly random true phase.
Estimate estimate(SimScheme scheme, const EstimateConfig &cfg);

/// Merge partial estimates from disjoint trial ranges (associative).
Estimate merge(const Estimate &a, const Estimate &b);

/// Analytic M→∞ reference for a scheme; the general-N feedback scheme has no
/// closed form, so its finite-M sum at the configured M is used.
double analytic_reference(SimScheme scheme, int n, double effective_mu, long copies);

/// Acceptance comparison: pass iff |p̂ − analytic| ≤ 4·stderr + bias_budget,
/// the bias budget absorbing the O(1/M) finite-M offset.
struct Comparison {
  bool pass = false;
  double z_score = 0.0;
  double difference = 0.0;
  double tolerance = 0.0;
};
Comparison compare_to_analytic(const Estimate &est, double analytic_value, double bias_budget);

/// Figure-reproduction table: μ rows against analytic (and optionally Monte
/// Carlo) probability columns.
struct CurveTable {
  struct Metadata {
    int n = 0;
    long copies = 0;
    long trials = 0;
    std::uint64_t seed = 0;
    double eta = 1.0;
    std::string schema_version;
  };
  Metadata metadata;
  std::vector<std::string> columns; ///< first column is always "mu"
  std::vector<std::vector<double>> rows;
};

struct SweepConfig {
  int n = 3;
  double mu_min = 0.0;
  double mu_max = 3.0;
  int points = 61;
  double eta = 1.0;
  long copies = 1000;
  long trials = 0; ///< 0 = analytics-only table
  std::uint64_t seed = 0;
  int threads = 0;
};

/// One row per μ: optimum, simple and feedback analytic curves (plus the
/// polarization curve for N=4), and Monte Carlo columns when trials > 0.
CurveTable sweep(const SweepConfig &cfg);

} // namespace usdlo::mc
