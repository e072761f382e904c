#include "usdlo/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace usdlo::reference {

std::vector<double> poisson_mod_coefficients(int n, double mu) {
  if (n < 2)
    throw std::invalid_argument("poisson_mod_coefficients: need N >= 2");
  std::vector<double> values(static_cast<std::size_t>(n), 0.0);
  double term = std::exp(-mu); // e^{−μ} μ^j / j!
  for (long j = 0;; ++j) {
    values[static_cast<std::size_t>(j % n)] += term;
    if (term < 1e-18 && j > static_cast<long>(mu)) break;
    term *= mu / static_cast<double>(j + 1);
  }
  return values;
}

double poisson_no_click_probability(double intensity, double eta) {
  double total = 0.0;
  double term = std::exp(-intensity);
  for (long j = 0;; ++j) {
    total += term;
    if (term < 1e-18 && j > static_cast<long>(intensity)) break;
    term *= intensity * (1.0 - eta) / static_cast<double>(j + 1);
  }
  return total;
}

namespace {

double chord_sq(double dphi) { return 2.0 - 2.0 * std::cos(dphi); }

double nested_stage(const std::vector<double> &chords, const std::vector<int> &order,
                    int stage, long consumed, double mu, long m) {
  const int n = static_cast<int>(chords.size()) + 1;
  if (stage == n - 1) return 1.0;
  double tail = 0.0;
  for (int j = stage; j < n - 1; ++j)
    tail += chords[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
  const double a_m = chords[static_cast<std::size_t>(order[static_cast<std::size_t>(stage)])];
  const long d = n - stage;
  const double survive = std::exp(-mu * tail / static_cast<double>(m));
  const double click = -std::expm1(-a_m * mu / static_cast<double>(m));
  double total = 0.0;
  double weight = 1.0;
  for (long k = 0; consumed + d * (k + 1) <= m; ++k) {
    total += weight * click * nested_stage(chords, order, stage + 1,
                                           consumed + d * (k + 1), mu, m);
    weight *= survive;
  }
  return total;
}

} // namespace

double feedback_nested_sum(int n, double mu, long m_copies) {
  if (n < 2 || n > 4)
    throw std::invalid_argument("feedback_nested_sum: literal nesting kept for N <= 4");
  if (m_copies < n)
    throw std::invalid_argument("feedback_nested_sum: need M >= N");
  std::vector<double> chords(static_cast<std::size_t>(n - 1));
  for (int k = 1; k < n; ++k)
    chords[static_cast<std::size_t>(k - 1)] =
        chord_sq(2.0 * std::numbers::pi * k / n);
  std::vector<int> order(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n - 1; ++i) order[static_cast<std::size_t>(i)] = i;
  double total = 0.0;
  do {
    total += nested_stage(chords, order, 0, 0, mu, m_copies);
  } while (std::next_permutation(order.begin(), order.end()));
  return total;
}

double feedback4_nested_sum(double mu, long m_copies) {
  const double m = static_cast<double>(m_copies);
  const double q = -std::expm1(-2.0 * mu / m);
  double total = 0.0;
  for (long k = 0; k < m_copies; ++k) {
    double inner = 0.0;
    for (long mm = 0; mm <= m_copies - k - 2; ++mm) {
      const double remaining = mu * (1.0 - static_cast<double>(k + 1) / m -
                                     static_cast<double>(mm + 1) / m);
      inner += std::exp(-2.0 * static_cast<double>(mm) * mu / m) * q *
               -std::expm1(-remaining);
    }
    total += std::exp(-2.0 * static_cast<double>(k) * mu / m) * q * inner;
  }
  return total;
}

} // namespace usdlo::reference
