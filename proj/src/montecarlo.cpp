#include "usdlo/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace usdlo::mc {

using strategies::FeedbackConfig;
using strategies::StrategyOutcome;
using strategies::TrueState;

const char *scheme_name(SimScheme s) {
  switch (s) {
    case SimScheme::Bs2: return "bs2";
    case SimScheme::Bs3Simple: return "bs3-simple";
    case SimScheme::Bs3Feedback: return "bs3-feedback";
    case SimScheme::Bs4Simple: return "bs4-simple";
    case SimScheme::Bs4Feedback: return "bs4-feedback";
    case SimScheme::BsnSimple: return "bsn-simple";
    case SimScheme::BsnFeedback: return "bsn-feedback";
  }
  throw std::invalid_argument("unknown scheme tag");
}

SimScheme parse_scheme(const std::string &name) {
  for (SimScheme s : {SimScheme::Bs2, SimScheme::Bs3Simple, SimScheme::Bs3Feedback,
                      SimScheme::Bs4Simple, SimScheme::Bs4Feedback, SimScheme::BsnSimple,
                      SimScheme::BsnFeedback})
    if (name == scheme_name(s)) return s;
  throw std::invalid_argument("unknown scheme tag: " + name);
}

int scheme_alphabet_size(SimScheme s, int n) {
  switch (s) {
    case SimScheme::Bs2: return 2;
    case SimScheme::Bs3Simple:
    case SimScheme::Bs3Feedback: return 3;
    case SimScheme::Bs4Simple:
    case SimScheme::Bs4Feedback: return 4;
    case SimScheme::BsnSimple:
    case SimScheme::BsnFeedback: return n;
  }
  throw std::invalid_argument("unknown scheme tag");
}

namespace {

StrategyOutcome run_one(SimScheme scheme, const TrueState &state, const FeedbackConfig &fc,
                        RandomStream &rng) {
  switch (scheme) {
    case SimScheme::Bs2: return strategies::run_basis_measurement_2(state, rng);
    case SimScheme::Bs3Simple:
    case SimScheme::Bs4Simple:
    case SimScheme::BsnSimple: return strategies::run_simple_scheme(state, rng);
    case SimScheme::Bs3Feedback: return strategies::run_feedback_scheme_3(state, fc, rng);
    case SimScheme::Bs4Feedback: return strategies::run_feedback_scheme_4(state, fc, rng);
    case SimScheme::BsnFeedback: return strategies::run_feedback_scheme_n(state, fc, rng);
  }
  throw std::invalid_argument("unknown scheme tag");
}

struct Tally {
  long successes = 0;
  long violations = 0;
};

Tally run_range(SimScheme scheme, const EstimateConfig &cfg, int n, long lo, long hi) {
  const analytics::PhaseAlphabet alphabet(n, cfg.mu, cfg.eta);
  FeedbackConfig fc;
  fc.copies = cfg.copies;
  Tally tally;
  for (long t = lo; t < hi; ++t) {
    RandomStream rng(cfg.seed, static_cast<std::uint64_t>(t));
    const int true_idx = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const StrategyOutcome out = run_one(scheme, TrueState{alphabet, true_idx}, fc, rng);
    if (out.was_eliminated(true_idx)) ++tally.violations;
    if (out.conclusive()) {
      if (*out.conclusive_index != true_idx) ++tally.violations;
      ++tally.successes;
    }
  }
  return tally;
}

} // namespace

Estimate estimate(SimScheme scheme, const EstimateConfig &cfg) {
  if (cfg.trials < 1)
    throw std::invalid_argument("estimate: need at least one trial");
  const int n = scheme_alphabet_size(scheme, cfg.n);

  int threads = cfg.threads;
  if (threads <= 0)
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<long>(threads, cfg.trials));

  std::vector<Tally> parts(static_cast<std::size_t>(threads));
  std::vector<std::thread> pool;
  const long chunk = (cfg.trials + threads - 1) / threads;
  for (int i = 0; i < threads; ++i) {
    const long lo = i * chunk;
    const long hi = std::min(cfg.trials, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, i, lo, hi] { parts[static_cast<std::size_t>(i)] =
                                           run_range(scheme, cfg, n, lo, hi); });
  }
  for (auto &th : pool) th.join();

  Tally total;
  for (const auto &p : parts) {
    total.successes += p.successes;
    total.violations += p.violations;
  }
  Estimate est;
  est.trials = cfg.trials;
  est.successes = total.successes;
  est.soundness_violations = total.violations;
  est.p_hat = static_cast<double>(total.successes) / static_cast<double>(cfg.trials);
  est.stderr_value = std::sqrt(est.p_hat * (1.0 - est.p_hat) / static_cast<double>(cfg.trials));
  return est;
}

Estimate merge(const Estimate &a, const Estimate &b) {
  Estimate out;
  out.trials = a.trials + b.trials;
  out.successes = a.successes + b.successes;
  out.soundness_violations = a.soundness_violations + b.soundness_violations;
  out.p_hat = static_cast<double>(out.successes) / static_cast<double>(out.trials);
  out.stderr_value = std::sqrt(out.p_hat * (1.0 - out.p_hat) / static_cast<double>(out.trials));
  return out;
}

double analytic_reference(SimScheme scheme, int n, double effective_mu, long copies) {
  using analytics::Scheme;
  switch (scheme) {
    case SimScheme::Bs2: return analytics::closed_form(Scheme::Bs2, effective_mu);
    case SimScheme::Bs3Simple: return analytics::closed_form(Scheme::Bs3Simple, effective_mu);
    case SimScheme::Bs3Feedback: return analytics::closed_form(Scheme::Bs3Feedback, effective_mu);
    case SimScheme::Bs4Simple: return analytics::closed_form(Scheme::Bs4Simple, effective_mu);
    case SimScheme::Bs4Feedback: return analytics::closed_form(Scheme::Bs4Feedback, effective_mu);
    case SimScheme::BsnSimple: return analytics::closed_form_simple(n, effective_mu);
    case SimScheme::BsnFeedback:
      // Closed forms exist for N=2,3; otherwise the finite-M sum stands in.
      if (n == 2) return analytics::closed_form(Scheme::Bs2, effective_mu);
      if (n == 3) return analytics::closed_form(Scheme::Bs3Feedback, effective_mu);
      return analytics::feedback_finite_m(n, effective_mu, copies);
  }
  throw std::invalid_argument("unknown scheme tag");
}

Comparison compare_to_analytic(const Estimate &est, double analytic_value, double bias_budget) {
  if (!(analytic_value >= 0.0 && analytic_value <= 1.0))
    throw std::invalid_argument("compare_to_analytic: analytic value must lie in [0, 1]");
  if (!(bias_budget >= 0.0))
    throw std::invalid_argument("compare_to_analytic: bias budget must be >= 0");
  Comparison cmp;
  cmp.difference = est.p_hat - analytic_value;
  cmp.tolerance = 4.0 * est.stderr_value + bias_budget;
  cmp.pass = std::abs(cmp.difference) <= cmp.tolerance;
  if (est.stderr_value > 0.0)
    cmp.z_score = cmp.difference / est.stderr_value;
  else
    cmp.z_score = cmp.difference == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return cmp;
}

CurveTable sweep(const SweepConfig &cfg) {
  if (cfg.points < 2)
    throw std::invalid_argument("sweep: need at least two grid points");
  if (!(cfg.mu_min >= 0.0) || !(cfg.mu_max > cfg.mu_min))
    throw std::invalid_argument("sweep: need 0 <= mu_min < mu_max");
  if (cfg.n < 2 || cfg.n > 6)
    throw std::invalid_argument("sweep: supported alphabet sizes are 2..6 "
                                "(the feedback reference sum is evaluated up to N=6)");

  const bool with_mc = cfg.trials > 0;
  const bool pol_column = cfg.n == 4;

  CurveTable table;
  table.metadata = {cfg.n, cfg.copies, cfg.trials, cfg.seed, cfg.eta, std::string("1.0")};
  table.columns = {"mu", "p_optimal", "p_simple_analytic", "p_feedback_analytic"};
  if (pol_column) table.columns.push_back("p_pol_analytic");
  if (with_mc) {
    table.columns.insert(table.columns.end(), {"p_simple_mc", "p_simple_mc_stderr",
                                               "p_feedback_mc", "p_feedback_mc_stderr"});
  }

  SimScheme simple = SimScheme::BsnSimple;
  SimScheme feedback = SimScheme::BsnFeedback;
  if (cfg.n == 2) simple = SimScheme::Bs2;
  if (cfg.n == 3) { simple = SimScheme::Bs3Simple; feedback = SimScheme::Bs3Feedback; }
  if (cfg.n == 4) { simple = SimScheme::Bs4Simple; feedback = SimScheme::Bs4Feedback; }

  for (int i = 0; i < cfg.points; ++i) {
    const double mu = cfg.mu_min + (cfg.mu_max - cfg.mu_min) * i / (cfg.points - 1);
    const double eff = cfg.eta * mu;
    std::vector<double> row{mu, analytics::optimal_usd_prob(cfg.n, eff),
                            analytics::closed_form_simple(cfg.n, eff),
                            analytic_reference(feedback, cfg.n, eff, cfg.copies)};
    if (pol_column) row.push_back(analytics::closed_form(analytics::Scheme::Pol4, eff));
    if (with_mc) {
      EstimateConfig ec;
      ec.n = cfg.n;
      ec.mu = mu;
      ec.eta = cfg.eta;
      ec.copies = cfg.copies;
      ec.trials = cfg.trials;
      // Decorrelate grid points by folding the row index into the seed.
      ec.seed = cfg.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1);
      ec.threads = cfg.threads;
      const Estimate s = estimate(simple, ec);
      const Estimate f = estimate(feedback, ec);
      row.insert(row.end(), {s.p_hat, s.stderr_value, f.p_hat, f.stderr_value});
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

} // namespace usdlo::mc
