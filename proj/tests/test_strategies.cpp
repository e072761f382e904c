#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "usdlo/analytics.hpp"
#include "usdlo/strategies.hpp"

using namespace usdlo;
using analytics::PhaseAlphabet;
using strategies::FeedbackConfig;
using strategies::StrategyOutcome;
using strategies::TrueState;

namespace {

struct Stats {
  long trials = 0;
  long conclusive = 0;
  long violations = 0;
  double p_hat() const { return static_cast<double>(conclusive) / trials; }
  double sigma() const { return std::sqrt(p_hat() * (1.0 - p_hat()) / trials); }
};

template <typename RunFn>
Stats gather(long trials, std::uint64_t seed, int n, RunFn &&run) {
  Stats st;
  st.trials = trials;
  for (long t = 0; t < trials; ++t) {
    RandomStream rng(seed, static_cast<std::uint64_t>(t));
    const int true_idx = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const StrategyOutcome out = run(true_idx, rng);
    if (out.was_eliminated(true_idx)) ++st.violations;
    if (out.conclusive()) {
      ++st.conclusive;
      if (*out.conclusive_index != true_idx) ++st.violations;
    }
  }
  return st;
}

void check_light_accounting(const StrategyOutcome &out, double mu) {
  CHECK(std::abs(out.intensity_consumed + out.intensity_discarded - mu) < 1e-9);
}

} // namespace

TEST_CASE("eliminate_phase_trial") {
  PhaseAlphabet four(4, 0.5);
  RandomStream rng(3, 0);
  // the true phase never clicks, exactly
  for (int i = 0; i < 20000; ++i)
    CHECK_FALSE(strategies::eliminate_phase_trial(0.5, 2, 2, four, rng));

  // N=2 antipodal test at full intensity mu: click prob 1-e^{-4 mu}
  PhaseAlphabet two(2, 0.6);
  long clicks = 0;
  const long trials = 100000;
  for (long t = 0; t < trials; ++t) {
    RandomStream r(17, static_cast<std::uint64_t>(t));
    clicks += strategies::eliminate_phase_trial(0.6, 0, 1, two, r);
  }
  const double want2 = -std::expm1(-4.0 * 0.6);
  CHECK(std::abs(static_cast<double>(clicks) / trials - want2) <
        4.0 * std::sqrt(want2 * (1.0 - want2) / trials));

  // N=4 adjacent phases at intensity 0.5: rate 1-e^{-1} over 10^6 trials
  clicks = 0;
  const long big = 1000000;
  for (long t = 0; t < big; ++t) {
    RandomStream r(18, static_cast<std::uint64_t>(t));
    clicks += strategies::eliminate_phase_trial(0.5, 0, 1, four, r);
  }
  const double want4 = -std::expm1(-1.0);
  CHECK(std::abs(static_cast<double>(clicks) / big - want4) <
        4.0 * std::sqrt(want4 * (1.0 - want4) / big));

  CHECK_THROWS_AS(strategies::eliminate_phase_trial(-1.0, 0, 1, four, rng),
                  std::invalid_argument);
}

TEST_CASE("basis measurement, N=2") {
  const double mu = 0.8;
  const auto st = gather(100000, 21, 2, [&](int idx, RandomStream &rng) {
    return strategies::run_basis_measurement_2(TrueState{PhaseAlphabet(2, mu), idx}, rng);
  });
  CHECK(st.violations == 0);
  const double want = -std::expm1(-2.0 * mu);
  CHECK(std::abs(st.p_hat() - want) < 4.0 * st.sigma());

  RandomStream rng(4, 0);
  const auto out =
      strategies::run_basis_measurement_2(TrueState{PhaseAlphabet(2, mu), 1}, rng, true);
  CHECK(out.click_log.size() == 2);
  check_light_accounting(out, mu);
}

TEST_CASE("simple scheme statistics") {
  const auto n3 = gather(100000, 31, 3, [&](int idx, RandomStream &rng) {
    return strategies::run_simple_scheme(TrueState{PhaseAlphabet(3, 1.0), idx}, rng);
  });
  CHECK(n3.violations == 0);
  CHECK(std::abs(n3.p_hat() - 0.399576400893728) < 4.0 * n3.sigma());

  const auto n4 = gather(100000, 32, 4, [&](int idx, RandomStream &rng) {
    return strategies::run_simple_scheme(TrueState{PhaseAlphabet(4, 1.0), idx}, rng);
  });
  CHECK(n4.violations == 0);
  CHECK(std::abs(n4.p_hat() - 0.097863717634980) < 4.0 * n4.sigma());

  // vacuum input is never conclusive
  const auto vac = gather(2000, 33, 4, [&](int idx, RandomStream &rng) {
    return strategies::run_simple_scheme(TrueState{PhaseAlphabet(4, 0.0), idx}, rng);
  });
  CHECK(vac.conclusive == 0);

  RandomStream rng(5, 0);
  const auto out = strategies::run_simple_scheme(TrueState{PhaseAlphabet(5, 1.3), 2}, rng, true);
  CHECK(out.click_log.size() == 5);
  CHECK(out.copies_consumed == 5);
  check_light_accounting(out, 1.3);
}

TEST_CASE("N=3 feedback scheme") {
  const double mu = 1.0;
  FeedbackConfig cfg;
  cfg.copies = 1000;
  const auto st = gather(100000, 41, 3, [&](int idx, RandomStream &rng) {
    return strategies::run_feedback_scheme_3(TrueState{PhaseAlphabet(3, mu), idx}, cfg, rng);
  });
  CHECK(st.violations == 0);
  CHECK(std::abs(st.p_hat() - 0.513485209116119) <
        4.0 * st.sigma() + 5.0 / static_cast<double>(cfg.copies));

  const auto vac = gather(1000, 42, 3, [&](int idx, RandomStream &rng) {
    return strategies::run_feedback_scheme_3(TrueState{PhaseAlphabet(3, 0.0), idx}, cfg, rng);
  });
  CHECK(vac.conclusive == 0);

  for (long t = 0; t < 500; ++t) {
    RandomStream rng(43, static_cast<std::uint64_t>(t));
    const auto out =
        strategies::run_feedback_scheme_3(TrueState{PhaseAlphabet(3, 2.0), 1}, cfg, rng);
    check_light_accounting(out, 2.0);
    CHECK(out.stage_reached == static_cast<int>(out.eliminated.size()));
  }

  RandomStream rng(44, 0);
  FeedbackConfig small;
  small.copies = 2;
  CHECK_THROWS_AS(
      strategies::run_feedback_scheme_3(TrueState{PhaseAlphabet(3, 1.0), 0}, small, rng),
      std::invalid_argument);
}

TEST_CASE("4-step receiver: stage fractions") {
  const double mu = 1.0;
  FeedbackConfig cfg;
  cfg.copies = 1000;
  const long trials = 100000;
  std::array<long, 4> stages{};
  long violations = 0;
  for (long t = 0; t < trials; ++t) {
    RandomStream rng(51, static_cast<std::uint64_t>(t));
    const int idx = static_cast<int>(rng.next_u64() % 4);
    const auto out =
        strategies::run_feedback_scheme_4(TrueState{PhaseAlphabet(4, mu), idx}, cfg, rng);
    ++stages[static_cast<std::size_t>(out.stage_reached)];
    if (out.was_eliminated(idx)) ++violations;
    if (out.conclusive() && *out.conclusive_index != idx) ++violations;
  }
  CHECK(violations == 0);
  const double n = trials;
  const auto frac_ge = [&](int s) {
    long c = 0;
    for (int i = s; i <= 3; ++i) c += stages[static_cast<std::size_t>(i)];
    return static_cast<double>(c) / n;
  };
  const auto tol = [&](double p) { return 4.0 * std::sqrt(p * (1 - p) / n) + 5.0 / 1000.0; };
  const double e2 = std::exp(-2.0);
  // first photon: exactly 1-e^{-2 mu} even at finite M
  CHECK(std::abs(frac_ge(1) - (1.0 - e2)) < 4.0 * std::sqrt(e2 * (1 - e2) / n));
  CHECK(std::abs(frac_ge(2) - (1.0 - 3.0 * e2)) < tol(1.0 - 3.0 * e2));
  CHECK(std::abs(frac_ge(3) - 0.205158651497294) < tol(0.205158651497294));
}

TEST_CASE("4-step receiver: step-2 geometric copy consumption (chi-square)") {
  const double mu = 1.0;
  const long m = 1000;
  FeedbackConfig cfg;
  cfg.copies = m;
  cfg.basis_rule = strategies::BasisRule::FixedFirstBasis;
  cfg.keep_click_log = true;
  const long trials = 100000;

  // cells: 20 equal-width bins over the click copy index + a no-click cell
  const int bins = 20;
  const long width = m / bins;
  std::vector<long> observed(bins + 1, 0);
  for (long t = 0; t < trials; ++t) {
    RandomStream rng(62, static_cast<std::uint64_t>(t));
    const int idx = static_cast<int>(rng.next_u64() % 4);
    const auto out =
        strategies::run_feedback_scheme_4(TrueState{PhaseAlphabet(4, mu), idx}, cfg, rng);
    long click_copy = -1; // 1-based index of the copy that produced the first click
    for (const auto &ev : out.click_log) {
      if (ev.clicked) {
        click_copy = ev.round + 1;
        break;
      }
    }
    if (click_copy < 0)
      ++observed[static_cast<std::size_t>(bins)];
    else
      ++observed[static_cast<std::size_t>(std::min<long>((click_copy - 1) / width, bins - 1))];
  }

  // expected from the exact geometric law: P(no click through k copies) = e^{-2k mu/M}
  const auto survive = [&](long k) { return std::exp(-2.0 * mu * static_cast<double>(k) / m); };
  double chi2 = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double expected = (survive(b * width) - survive((b + 1) * width)) * trials;
    const double d = static_cast<double>(observed[static_cast<std::size_t>(b)]) - expected;
    chi2 += d * d / expected;
  }
  const double expected_none = survive(m) * trials;
  const double d_none =
      static_cast<double>(observed[static_cast<std::size_t>(bins)]) - expected_none;
  chi2 += d_none * d_none / expected_none;
  // 21 cells, fully specified model: df = 20; chi-square critical value at 1% = 37.5662
  CHECK(chi2 < 37.5662);
}

TEST_CASE("4-step receiver: basis rule and edge cases") {
  FeedbackConfig fixed;
  fixed.copies = 100;
  fixed.basis_rule = strategies::BasisRule::FixedFirstBasis;
  for (long t = 0; t < 2000; ++t) {
    RandomStream rng(71, static_cast<std::uint64_t>(t));
    const auto out =
        strategies::run_feedback_scheme_4(TrueState{PhaseAlphabet(4, 0.7), 1}, fixed, rng);
    CHECK(out.first_basis == 0);
    check_light_accounting(out, 0.7);
  }
  FeedbackConfig random_rule;
  random_rule.copies = 100;
  long cross_first = 0;
  for (long t = 0; t < 2000; ++t) {
    RandomStream rng(72, static_cast<std::uint64_t>(t));
    const auto out =
        strategies::run_feedback_scheme_4(TrueState{PhaseAlphabet(4, 0.7), 1}, random_rule, rng);
    cross_first += out.first_basis;
  }
  CHECK(cross_first > 800); // ~half of 2000
  CHECK(cross_first < 1200);

  // vacuum never reaches any stage
  for (long t = 0; t < 500; ++t) {
    RandomStream rng(73, static_cast<std::uint64_t>(t));
    const auto out =
        strategies::run_feedback_scheme_4(TrueState{PhaseAlphabet(4, 0.0), 2}, random_rule, rng);
    CHECK(out.stage_reached == 0);
    CHECK_FALSE(out.conclusive());
  }
}

TEST_CASE("general-N feedback scheme") {
  // N=2 approaches 1-e^{-2mu}
  const double mu = 0.9;
  FeedbackConfig cfg;
  cfg.copies = 1000;
  const auto n2 = gather(50000, 81, 2, [&](int idx, RandomStream &rng) {
    return strategies::run_feedback_scheme_n(TrueState{PhaseAlphabet(2, mu), idx}, cfg, rng);
  });
  CHECK(n2.violations == 0);
  CHECK(std::abs(n2.p_hat() - -std::expm1(-2.0 * mu)) < 4.0 * n2.sigma() + 5.0 / 1000.0);

  // M=N degenerates to the simple scheme for N=2
  FeedbackConfig tight;
  tight.copies = 2;
  const auto deg = gather(50000, 82, 2, [&](int idx, RandomStream &rng) {
    return strategies::run_feedback_scheme_n(TrueState{PhaseAlphabet(2, mu), idx}, tight, rng);
  });
  const double exact = -std::expm1(-2.0 * mu);
  CHECK(std::abs(deg.p_hat() - exact) < 4.0 * deg.sigma());

  // N=4 agrees with the finite-M analytic sum
  const auto n4 = gather(100000, 83, 4, [&](int idx, RandomStream &rng) {
    return strategies::run_feedback_scheme_n(TrueState{PhaseAlphabet(4, 1.0), idx}, cfg, rng);
  });
  CHECK(n4.violations == 0);
  const double reference = analytics::feedback_finite_m(4, 1.0, cfg.copies);
  CHECK(std::abs(n4.p_hat() - reference) < 4.0 * n4.sigma() + 5.0 / 1000.0);

  // crowded rounds (large mu/M): simultaneous clicks stay sound
  FeedbackConfig crowded;
  crowded.copies = 10;
  const auto hot = gather(20000, 84, 4, [&](int idx, RandomStream &rng) {
    return strategies::run_feedback_scheme_n(TrueState{PhaseAlphabet(4, 3.0), idx}, crowded, rng);
  });
  CHECK(hot.violations == 0);
  for (long t = 0; t < 500; ++t) {
    RandomStream rng(85, static_cast<std::uint64_t>(t));
    const auto out =
        strategies::run_feedback_scheme_n(TrueState{PhaseAlphabet(5, 1.0), 3}, cfg, rng);
    check_light_accounting(out, 1.0);
    CHECK(out.stage_reached == static_cast<int>(out.eliminated.size()));
  }
}

TEST_CASE("eta substitution is exact for power-of-two eta") {
  const double mu = 0.8, eta = 0.25;
  FeedbackConfig cfg;
  cfg.copies = 400;
  for (int scheme = 0; scheme < 4; ++scheme) {
    for (long t = 0; t < 3000; ++t) {
      RandomStream r1(91, static_cast<std::uint64_t>(t));
      RandomStream r2(91, static_cast<std::uint64_t>(t));
      const int n = scheme == 0 ? 3 : 4;
      const int idx = static_cast<int>(r1.next_u64() % static_cast<std::uint64_t>(n));
      const int idx2 = static_cast<int>(r2.next_u64() % static_cast<std::uint64_t>(n));
      REQUIRE(idx == idx2);
      const TrueState lossy{PhaseAlphabet(n, mu, eta), idx};
      const TrueState ideal{PhaseAlphabet(n, eta * mu, 1.0), idx2};
      StrategyOutcome a, b;
      switch (scheme) {
        case 0:
          a = strategies::run_feedback_scheme_3(lossy, cfg, r1);
          b = strategies::run_feedback_scheme_3(ideal, cfg, r2);
          break;
        case 1:
          a = strategies::run_feedback_scheme_4(lossy, cfg, r1);
          b = strategies::run_feedback_scheme_4(ideal, cfg, r2);
          break;
        case 2:
          a = strategies::run_simple_scheme(lossy, r1);
          b = strategies::run_simple_scheme(ideal, r2);
          break;
        default:
          a = strategies::run_feedback_scheme_n(lossy, cfg, r1);
          b = strategies::run_feedback_scheme_n(ideal, cfg, r2);
          break;
      }
      CHECK(a.eliminated == b.eliminated);
      CHECK(a.stage_reached == b.stage_reached);
      CHECK(a.conclusive_index == b.conclusive_index);
      CHECK(a.copies_consumed == b.copies_consumed);
    }
  }
}
