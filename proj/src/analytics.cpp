#include "usdlo/analytics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace usdlo::analytics {

namespace numerics {
namespace {
std::atomic<std::uint64_t> g_clamp_warnings{0};
}

double clamp01(double p, const char * /*context*/) {
  if (p < -1e-9 || p > 1.0 + 1e-9)
    g_clamp_warnings.fetch_add(1, std::memory_order_relaxed);
  return std::clamp(p, 0.0, 1.0);
}

std::uint64_t clamp_warning_count() { return g_clamp_warnings.load(); }
void reset_clamp_warnings() { g_clamp_warnings.store(0); }

} // namespace numerics

namespace {

using numerics::clamp01;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// One term a·μ^p·e^{bμ} of a closed-form exponential combination.
struct ExpPolyTerm {
  double a;
  int p;
  double b;
};

/// Evaluate Σ terms directly, or by the Taylor series in μ below the
/// cancellation threshold. Coefficients that vanish analytically come out as
/// O(1e-16) dust and are snapped to zero so tiny-μ results keep full
/// relative accuracy.
double eval_exp_combination(const std::vector<ExpPolyTerm> &terms, double mu) {
  constexpr double kSeriesBelow = 1e-3;
  if (mu >= kSeriesBelow) {
    double s = 0.0;
    for (const auto &t : terms)
      s += t.a * std::pow(mu, t.p) * std::exp(t.b * mu);
    return s;
  }
  constexpr int kOrder = 20;
  double coeff[kOrder + 1] = {};
  for (const auto &t : terms) {
    double anb = t.a; // a·b^(n−p)/(n−p)!
    for (int n = t.p; n <= kOrder; ++n) {
      coeff[n] += anb;
      anb *= t.b / static_cast<double>(n - t.p + 1);
    }
  }
  double s = 0.0;
  double mu_pow = 1.0;
  for (int n = 0; n <= kOrder; ++n) {
    if (std::abs(coeff[n]) > 1e-10)
      s += coeff[n] * mu_pow;
    mu_pow *= mu;
  }
  return s;
}

void require_alphabet(int n, double mu) {
  if (n < 2)
    throw std::invalid_argument("phase alphabet needs N >= 2");
  if (!(mu >= 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("mean photon number must be finite and >= 0");
}

double chord_sq_angle(double dphi) { return 2.0 - 2.0 * std::cos(dphi); }

} // namespace

PhaseAlphabet::PhaseAlphabet(int n, double mean_photons, double efficiency)
    : n_(n), mu_(mean_photons), eta_(efficiency) {
  require_alphabet(n, mean_photons);
  if (!(efficiency >= 0.0 && efficiency <= 1.0))
    throw std::invalid_argument("efficiency must lie in [0, 1]");
  factors_.resize(static_cast<std::size_t>(n));
  const int half = n / 2;
  for (int k = 0; k <= (n % 2 == 0 ? half - 1 : n - 1); ++k) {
    Complex f = std::polar(1.0, kTwoPi * k / n);
    if (std::abs(f.real()) < 1e-12) f.real(0.0);
    if (std::abs(f.imag()) < 1e-12) f.imag(0.0);
    factors_[static_cast<std::size_t>(k)] = f;
  }
  if (n % 2 == 0)
    for (int k = half; k < n; ++k)
      factors_[static_cast<std::size_t>(k)] = -factors_[static_cast<std::size_t>(k - half)];
}

double PhaseAlphabet::phase(int k) const {
  return kTwoPi * (((k % n_) + n_) % n_) / n_;
}

Complex PhaseAlphabet::phase_factor(int k) const {
  return factors_[static_cast<std::size_t>(((k % n_) + n_) % n_)];
}

double PhaseAlphabet::chord_sq(int j, int k) const {
  return std::norm(phase_factor(j) - phase_factor(k));
}

std::vector<double> symmetric_coefficients(int n, double mu) {
  require_alphabet(n, mu);
  std::vector<double> values(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      const double theta = kTwoPi * j / n;
      // e^{−2πijk/N} · e^{μ(e^{iθ}−1)}
      const double radial = mu * (std::cos(theta) - 1.0);
      const double angle = mu * std::sin(theta) - kTwoPi * j * k / n;
      acc += std::exp(radial) * std::cos(angle);
    }
    values[static_cast<std::size_t>(k)] = clamp01(acc / n, "symmetric_coefficients");
  }
  return values;
}

double optimal_usd_prob(int n, double mu) {
  const auto values = symmetric_coefficients(n, mu);
  const double smallest = *std::min_element(values.begin(), values.end());
  return clamp01(n * smallest, "optimal_usd_prob");
}

double elimination_click_prob(double mu, double eta, double delta_phi) {
  if (!(mu >= 0.0))
    throw std::invalid_argument("elimination_click_prob: mu must be >= 0");
  return -std::expm1(-eta * mu * chord_sq_angle(delta_phi));
}

const char *scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Bs2: return "BS2";
    case Scheme::Bs3Simple: return "BS3_SIMPLE";
    case Scheme::Bs3Feedback: return "BS3_FEEDBACK";
    case Scheme::Bs4Simple: return "BS4_SIMPLE";
    case Scheme::Bs4Feedback: return "BS4_FEEDBACK";
    case Scheme::Bs4Stage1: return "BS4_P1";
    case Scheme::Bs4Stage2: return "BS4_P2";
    case Scheme::Pol4: return "POL4";
  }
  throw std::invalid_argument("unknown scheme tag");
}

double closed_form(Scheme s, double mu) {
  if (!(mu >= 0.0))
    throw std::invalid_argument("closed_form: mu must be >= 0");
  const double sqrt2 = std::numbers::sqrt2;
  switch (s) {
    case Scheme::Bs2:
    case Scheme::Bs4Stage1:
      return clamp01(-std::expm1(-2.0 * mu), "closed_form");
    case Scheme::Bs3Simple: {
      const double f = -std::expm1(-mu);
      return clamp01(f * f, "closed_form");
    }
    case Scheme::Bs4Simple: {
      const double h = -std::expm1(-0.5 * mu);
      return clamp01(h * h * -std::expm1(-mu), "closed_form");
    }
    case Scheme::Bs3Feedback:
      return clamp01(eval_exp_combination({{1.0, 0, 0.0}, {3.0, 0, -2.0}, {-4.0, 0, -1.5}}, mu),
                     "closed_form");
    case Scheme::Bs4Feedback:
      return clamp01(eval_exp_combination(
                         {{1.0, 0, 0.0}, {3.0, 0, -2.0}, {2.0, 1, -2.0}, {-4.0, 0, -1.0}}, mu),
                     "closed_form");
    case Scheme::Bs4Stage2:
      return clamp01(
          eval_exp_combination({{1.0, 0, 0.0}, {-1.0, 0, -2.0}, {-2.0, 1, -2.0}}, mu),
          "closed_form");
    case Scheme::Pol4:
      return clamp01(eval_exp_combination({{1.0, 0, 0.0},
                                           {1.0, 0, -2.0},
                                           {-(1.0 + sqrt2 / 2.0), 0, sqrt2 - 2.0},
                                           {-(1.0 - sqrt2 / 2.0), 0, -(2.0 + sqrt2)}},
                                          mu),
                     "closed_form");
  }
  throw std::invalid_argument("unknown scheme tag");
}

double closed_form_two_phase(double mu, double phi0, double phi1) {
  if (!(mu >= 0.0))
    throw std::invalid_argument("closed_form_two_phase: mu must be >= 0");
  return clamp01(-std::expm1(-0.5 * mu * chord_sq_angle(phi0 - phi1)), "closed_form_two_phase");
}

double closed_form_simple(int n, double mu) {
  require_alphabet(n, mu);
  double p = 1.0;
  for (int k = 1; k < n; ++k)
    p *= -std::expm1(-(mu / n) * chord_sq_angle(kTwoPi * k / n));
  return clamp01(p, "closed_form_simple");
}

double asymptotic(AsymptoticKind kind, int n, double mu) {
  require_alphabet(n, mu);
  switch (kind) {
    case AsymptoticKind::Optimal:
    case AsymptoticKind::FeedbackScheme: {
      double factorial = 1.0;
      for (int i = 2; i < n; ++i) factorial *= i;
      return n * std::pow(mu, n - 1) / factorial;
    }
    case AsymptoticKind::SimpleScheme:
      return std::pow(mu, n - 1) / std::pow(static_cast<double>(n), n - 3);
  }
  throw std::invalid_argument("unknown asymptotic kind");
}

double feedback_finite_m(int n, double mu, long m_copies) {
  if (n < 2 || n > 6)
    throw std::invalid_argument("feedback_finite_m supports 2 <= N <= 6");
  if (m_copies < n)
    throw std::invalid_argument("feedback_finite_m needs M >= N");
  if (!(mu >= 0.0))
    throw std::invalid_argument("feedback_finite_m: mu must be >= 0");
  const std::size_t m = static_cast<std::size_t>(m_copies);

  // Squared chord distances of the N−1 wrong phases from the true phase.
  std::vector<double> chords(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k)
    chords[static_cast<std::size_t>(k - 1)] = chord_sq_angle(kTwoPi * k / n);

  // Permute phase indices, not chord values: orders that share a chord
  // sequence are still distinct elimination orders and all (N−1)! count.
  std::vector<int> order(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i) order[static_cast<std::size_t>(i)] = i;

  // g_next[c] = success probability of all later stages given c copies
  // consumed; the first-stage value g(0) is accumulated over all orders.
  double total = 0.0;
  std::vector<double> g_next, g_cur, partial_sums;
  do {
    g_next.assign(m + 1, 1.0);
    g_cur.assign(m + 1, 0.0);
    partial_sums.assign(m + 1, 0.0);
    double tail = 0.0; // Σ_{j>=stage} A_j
    for (int stage = n - 2; stage >= 0; --stage) {
      const double a_m = chords[static_cast<std::size_t>(order[static_cast<std::size_t>(stage)])];
      tail += a_m;
      const std::size_t d = static_cast<std::size_t>(n - stage); // copies per round
      const double survive_round = std::exp(-mu * tail / static_cast<double>(m_copies));
      const double click = -std::expm1(-a_m * mu / static_cast<double>(m_copies));
      // partial_sums[c] = Σ_k survive^k · g_next[c + d(k+1)], c + d(k+1) <= M
      for (std::size_t c = m + 1; c-- > 0;) {
        if (c + d <= m)
          partial_sums[c] = g_next[c + d] + survive_round * partial_sums[c + d];
        else
          partial_sums[c] = 0.0;
        g_cur[c] = click * partial_sums[c];
      }
      std::swap(g_next, g_cur);
    }
    total += g_next[0];
  } while (std::next_permutation(order.begin(), order.end()));

  return numerics::clamp01(total, "feedback_finite_m");
}

double feedback4_procedure_finite_m(double mu, long m_copies) {
  if (m_copies < 4)
    throw std::invalid_argument("feedback4_procedure_finite_m needs M >= 4");
  if (!(mu >= 0.0))
    throw std::invalid_argument("feedback4_procedure_finite_m: mu must be >= 0");
  if (mu == 0.0)
    return 0.0;
  const double m = static_cast<double>(m_copies);
  const double per_copy_click = -std::expm1(-2.0 * mu / m);
  const double xy_gap = -std::expm1(-mu / m); // 1 − e^{−μ/M}
  double total = 0.0;
  for (long k = 0; k + 2 <= m_copies; ++k) {
    const long rounds_left = m_copies - k - 1; // step-3 tries available
    // Inner sum over the step-3 click position m', both parts geometric.
    const double s_uniform = -std::expm1(-2.0 * mu * static_cast<double>(rounds_left) / m);
    const double s_weighted = std::exp(-mu * static_cast<double>(m_copies - k - 2) / m) *
                              -std::expm1(-mu * static_cast<double>(rounds_left) / m) /
                              xy_gap * per_copy_click;
    const double inner = s_uniform - s_weighted;
    total += std::exp(-2.0 * static_cast<double>(k) * mu / m) * per_copy_click * inner;
  }
  return numerics::clamp01(total, "feedback4_procedure_finite_m");
}

} // namespace usdlo::analytics
