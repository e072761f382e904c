#include "usdlo/validation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "usdlo/analytics.hpp"
#include "usdlo/montecarlo.hpp"
#include "usdlo/qkd.hpp"
#include "usdlo/reference.hpp"

namespace usdlo::validation {

namespace {

using analytics::Scheme;

std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

struct Runner {
  std::vector<CheckResult> results;

  void run(const std::string &id, const std::string &description,
           const std::function<std::pair<bool, std::string>()> &body) {
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r;
    r.id = id;
    r.description = description;
    try {
      auto [pass, detail] = body();
      r.pass = pass;
      r.detail = std::move(detail);
    } catch (const std::exception &e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    results.push_back(std::move(r));
  }
};

std::pair<bool, std::string> coefficient_oracle(double runtime_limit, double &elapsed) {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_entry = 0.0, worst_sum = 0.0;
  for (int n = 2; n <= 8; ++n) {
    for (double mu : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0}) {
      const auto impl = analytics::symmetric_coefficients(n, mu);
      const auto oracle = reference::poisson_mod_coefficients(n, mu);
      double sum = 0.0;
      for (int k = 0; k < n; ++k) {
        worst_entry = std::max(worst_entry, std::abs(impl[k] - oracle[k]));
        sum += impl[k];
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
  }
  elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = worst_entry <= 1e-10 && worst_sum <= 1e-12 && elapsed < runtime_limit;
  return {pass, fmt("max|impl-oracle|=%.2e max|sum-1|=%.2e t=%.3fs", worst_entry, worst_sum,
                    elapsed)};
}

std::pair<bool, std::string> n2_optimality() {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mu = 5.0 * i / 199.0;
    worst = std::max(worst, std::abs(analytics::closed_form(Scheme::Bs2, mu) -
                                     analytics::optimal_usd_prob(2, mu)));
  }
  return {worst <= 1e-12, fmt("max|BS2-optimal|=%.2e over 200 points", worst)};
}

std::pair<bool, std::string> figure_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string why;
  for (int n : {3, 4}) {
    mc::SweepConfig sc;
    sc.n = n;
    sc.mu_min = 0.0;
    sc.mu_max = 3.0;
    sc.points = 61;
    sc.trials = 0;
    const auto table = mc::sweep(sc);
    std::vector<double> prev(table.columns.size(), 0.0);
    for (const auto &row : table.rows) {
      const double optimal = row[1];
      for (std::size_t c = 2; c < row.size(); ++c) {
        if (row[c] > optimal + 1e-12) {
          ok = false;
          why = fmt("dominance broken at mu=%.3f (col %.0f)", row[0], static_cast<double>(c));
        }
        if (row[c] < prev[c] - 1e-12) {
          ok = false;
          why = fmt("monotonicity broken at mu=%.3f", row[0]);
        }
      }
      if (row[0] <= 1.0 && row[3] < row[2] - 1e-12) {
        ok = false;
        why = fmt("feedback < simple at mu=%.3f", row[0]);
      }
      for (std::size_t c = 0; c < row.size(); ++c) prev[c] = row[c];
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed >= 5.0) {
    ok = false;
    why = fmt("runtime %.2fs exceeds 5s", elapsed);
  }
  return {ok, ok ? fmt("N=3,4 curves dominated, monotone, ordered; t=%.3fs", elapsed) : why};
}

std::pair<bool, std::string> mc_agreement(std::uint64_t seed, int threads, long trials,
                                          double runtime_limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const long m = 1000;
  bool ok = true;
  std::string detail;
  double worst_z = 0.0;
  int idx = 0;
  for (mc::SimScheme scheme : {mc::SimScheme::Bs3Simple, mc::SimScheme::Bs3Feedback,
                               mc::SimScheme::Bs4Simple, mc::SimScheme::Bs4Feedback,
                               mc::SimScheme::BsnFeedback}) {
    for (double mu : {0.25, 1.0}) {
      mc::EstimateConfig ec;
      ec.n = 5; // consulted by bsn-feedback only
      ec.mu = mu;
      ec.copies = m;
      ec.trials = trials;
      ec.seed = seed + 1000 + idx++;
      ec.threads = threads;
      const auto est = mc::estimate(scheme, ec);
      const double analytic = mc::analytic_reference(scheme, 5, mu, m);
      const auto cmp = mc::compare_to_analytic(est, analytic, 5.0 / m);
      worst_z = std::max(worst_z, std::abs(cmp.z_score));
      if (!cmp.pass) {
        ok = false;
        detail += std::string(mc::scheme_name(scheme)) +
                  fmt(" mu=%.2f |diff|=%.2e tol=%.2e; ", mu, std::abs(cmp.difference),
                      cmp.tolerance);
      }
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (elapsed >= runtime_limit) {
    ok = false;
    detail = fmt("runtime %.1fs exceeds %.0fs", elapsed, runtime_limit);
  }
  if (ok) detail = fmt("10 comparisons pass, worst |z+bias|=%.2f, t=%.1fs", worst_z, elapsed);
  return {ok, detail};
}

std::pair<bool, std::string> small_alpha_optimality() {
  const double mu = 1e-2;
  bool ok = true;
  std::string detail;
  for (int n : {3, 4}) {
    const double fb = analytics::feedback_finite_m(n, mu, 10000) /
                      analytics::asymptotic(analytics::AsymptoticKind::Optimal, n, mu);
    const double simple = analytics::closed_form_simple(n, mu) /
                          analytics::asymptotic(analytics::AsymptoticKind::SimpleScheme, n, mu);
    detail += fmt("N=%.0f fb=%.4f simple=%.4f ", n, fb, simple);
    if (fb < 0.9 || fb > 1.1 || simple < 0.9 || simple > 1.1) ok = false;
  }
  return {ok, detail};
}

std::pair<bool, std::string> soundness(std::uint64_t seed, int threads, long scale) {
  long total_trials = 0, violations = 0;
  const auto add = [&](mc::SimScheme s, int n, double mu, long copies, long trials) {
    mc::EstimateConfig ec;
    ec.n = n;
    ec.mu = mu;
    ec.copies = copies;
    ec.trials = trials;
    ec.seed = seed + 2000 + total_trials;
    ec.threads = threads;
    const auto est = mc::estimate(s, ec);
    total_trials += est.trials;
    violations += est.soundness_violations;
  };
  add(mc::SimScheme::Bs3Simple, 3, 1.0, 0, 3 * scale);
  add(mc::SimScheme::Bs4Simple, 4, 1.5, 0, 3 * scale);
  add(mc::SimScheme::Bs2, 2, 0.7, 0, scale);
  add(mc::SimScheme::Bs3Feedback, 3, 1.0, 300, scale);
  add(mc::SimScheme::Bs4Feedback, 4, 1.0, 300, scale);
  add(mc::SimScheme::BsnFeedback, 5, 1.0, 200, scale / 2);
  return {violations == 0,
          fmt("%.0f mixed-scheme trials, %.0f soundness violations", total_trials, violations)};
}

std::pair<bool, std::string> bb84_statistics(std::uint64_t seed, int threads) {
  (void)threads;
  const long pulses = 100000;
  const long m = 1000;
  qkd::SessionConfig sc;
  sc.mean_photons = 1.0;
  sc.copies = m;
  const auto stats = qkd::run_session(pulses, sc, seed + 3000);
  const double n = static_cast<double>(pulses);
  const auto frac_ge = [&](int stage) {
    long c = 0;
    for (int s = stage; s <= 3; ++s) c += stats.stage_counts[s];
    return static_cast<double>(c) / n;
  };
  const auto band = [&](double p) { return 4.0 * std::sqrt(p * (1.0 - p) / n) + 5.0 / m; };

  const double e2 = std::exp(-2.0);
  struct Item { const char *name; double got; double want; double tol; };
  const Item items[] = {
      {"stage>=1", frac_ge(1), 1.0 - e2, band(1.0 - e2)},
      {"stage>=2", frac_ge(2), 1.0 - 3.0 * e2, band(1.0 - 3.0 * e2)},
      {"stage=3", frac_ge(3), analytics::closed_form(Scheme::Bs4Feedback, 1.0),
       band(analytics::closed_form(Scheme::Bs4Feedback, 1.0))},
  };
  bool ok = true;
  std::string detail;
  for (const auto &it : items) {
    if (std::abs(it.got - it.want) > it.tol) {
      ok = false;
      detail += std::string(it.name) + fmt(" off: got %.5f want %.5f; ", it.got, it.want);
    }
  }
  const double coin = stats.coincidence_fraction();
  const double stage2 = static_cast<double>(stats.stage_counts[2]);
  if (stage2 > 0 && std::abs(coin - 0.5) > 4.0 * std::sqrt(0.25 / stage2)) {
    ok = false;
    detail += fmt("coincidence %.4f not ~0.5; ", coin);
  }
  if (stats.bit_errors != 0) {
    ok = false;
    detail += fmt("QBER=%.3e nonzero; ", stats.error_rate());
  }
  if (ok)
    detail = fmt("stage fractions %.4f/%.4f/%.4f", frac_ge(1), frac_ge(2), frac_ge(3)) +
             fmt(", coincidence %.4f, QBER 0", coin);
  return {ok, detail};
}

std::pair<bool, std::string> factor4_gain() {
  const double mu = 1e-2;
  const double multi_photon = -std::expm1(-mu) - mu * std::exp(-mu);
  const double ratio = analytics::closed_form(Scheme::Bs4Stage2, mu) / multi_photon;
  return {std::abs(ratio - 4.0) <= 0.04, fmt("P2/(multi-photon prob) = %.5f at mu=1e-2", ratio)};
}

std::pair<bool, std::string> eta_substitution(std::uint64_t seed, int threads) {
  const double mu = 0.8, eta = 0.25;
  bool ok = true;
  std::string detail;
  for (mc::SimScheme scheme :
       {mc::SimScheme::Bs2, mc::SimScheme::Bs3Simple, mc::SimScheme::Bs3Feedback,
        mc::SimScheme::Bs4Simple, mc::SimScheme::Bs4Feedback, mc::SimScheme::BsnSimple,
        mc::SimScheme::BsnFeedback}) {
    mc::EstimateConfig lossy;
    lossy.n = 5;
    lossy.mu = mu;
    lossy.eta = eta;
    lossy.copies = 500;
    lossy.trials = 20000;
    lossy.seed = seed + 4000;
    lossy.threads = threads;
    mc::EstimateConfig ideal = lossy;
    ideal.mu = eta * mu;
    ideal.eta = 1.0;
    const auto a = mc::estimate(scheme, lossy);
    const auto b = mc::estimate(scheme, ideal);
    if (a.successes != b.successes || a.soundness_violations != b.soundness_violations) {
      ok = false;
      detail += std::string(mc::scheme_name(scheme)) + " tallies differ; ";
    }
  }
  qkd::SessionConfig qa;
  qa.mean_photons = mu;
  qa.efficiency = eta;
  qa.copies = 500;
  qkd::SessionConfig qb = qa;
  qb.mean_photons = eta * mu;
  qb.efficiency = 1.0;
  const auto sa = qkd::run_session(20000, qa, seed + 4001);
  const auto sb = qkd::run_session(20000, qb, seed + 4001);
  if (!(sa.stage_counts == sb.stage_counts && sa.kept_a == sb.kept_a && sa.kept_b == sb.kept_b &&
        sa.kept_c == sb.kept_c && sa.kept_d == sb.kept_d && sa.bit_errors == sb.bit_errors)) {
    ok = false;
    detail += "qkd session stats differ; ";
  }
  if (ok) detail = "identical tallies for (mu, 0.25) vs (0.25*mu, 1) across 7 schemes + BB84";
  return {ok, detail};
}

std::pair<bool, std::string> polarization_curve() {
  // Independent route: sinh/cosh form in extended precision.
  const long double mu = 1.0L;
  const long double s2 = std::sqrt(2.0L);
  const long double direct =
      1.0L - std::exp(-2.0L * mu) * (s2 * std::sinh(s2 * mu) + 2.0L * std::cosh(s2 * mu) - 1.0L);
  const double impl = analytics::closed_form(Scheme::Pol4, 1.0);
  const double gap = std::abs(impl - static_cast<double>(direct));
  bool ok = gap <= 1e-9;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mu_i = 5.0 * i / 199.0;
    const double excess =
        analytics::closed_form(Scheme::Pol4, mu_i) - analytics::optimal_usd_prob(4, mu_i);
    worst = std::max(worst, excess);
  }
  if (worst > 1e-12) ok = false;
  return {ok, fmt("|impl-highprec|=%.2e, max excess over optimal=%.2e", gap, worst)};
}

} // namespace

std::vector<CheckResult> run_checks(Profile profile, std::uint64_t seed, int threads) {
  Runner r;
  const bool full = profile == Profile::Full;

  r.run("coefficient-oracle", "symmetric coefficients match the Poisson-mod-N oracle",
        [&] {
          double elapsed = 0.0;
          return coefficient_oracle(1.0, elapsed);
        });
  r.run("n2-optimality", "BS2 closed form equals the two-state optimum", n2_optimality);
  r.run("factor4-gain", "two-photon stage gains a factor 4 over direct detection", factor4_gain);
  r.run("polarization-curve", "polarization USD curve value and dominance", polarization_curve);

  if (!full) {
    r.run("soundness", "no true-phase elimination across mixed schemes (10^4 scale)",
          [&] { return soundness(seed, threads, 2000); });
    return std::move(r.results);
  }

  r.run("figure-reproduction", "N=3/N=4 analytic curves: dominance, monotonicity, ordering",
        figure_reproduction);
  r.run("mc-agreement", "Monte Carlo matches analytic limits (4 sigma + 5/M)",
        [&] { return mc_agreement(seed, threads, 100000, 120.0); });
  r.run("small-alpha", "finite-M feedback sum and simple scheme reach their asymptotics",
        small_alpha_optimality);
  r.run("soundness", "no true-phase elimination across >= 10^6 mixed trials",
        [&] { return soundness(seed, threads, 150000); });
  r.run("bb84-statistics", "BB84 session stage fractions, coincidence, QBER",
        [&] { return bb84_statistics(seed, threads); });
  r.run("eta-substitution", "(mu, eta) and (eta*mu, 1) give identical tallies",
        [&] { return eta_substitution(seed, threads); });
  return std::move(r.results);
}

bool all_passed(const std::vector<CheckResult> &results) {
  for (const auto &r : results)
    if (!r.pass) return false;
  return true;
}

} // namespace usdlo::validation
