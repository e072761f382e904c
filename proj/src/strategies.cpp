#include "usdlo/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace usdlo::strategies {

using optics::Beamsplitter;
using optics::CoherentMode;
using optics::Complex;
using optics::Detector;

bool StrategyOutcome::was_eliminated(int k) const {
  return std::find(eliminated.begin(), eliminated.end(), k) != eliminated.end();
}

std::vector<int> StrategyOutcome::survivors() const {
  std::vector<int> out;
  for (int k = 0; k < n; ++k)
    if (!was_eliminated(k)) out.push_back(k);
  return out;
}

namespace {

/// Shared bookkeeping for one run. All mode amplitudes are derived
/// multiplicatively from √μ so the η-substitution (μ, η) ≡ (ημ, 1) is exact
/// whenever η is a power of two.
struct Run {
  const PhaseAlphabet &alpha;
  int true_idx;
  Detector det;
  RandomStream &rng;
  StrategyOutcome out;
  bool log;
  double base; // √μ

  Run(const TrueState &state, RandomStream &r, bool keep_log)
      : alpha(state.alphabet), true_idx(state.phase_index),
        det(state.alphabet.efficiency()), rng(r), log(keep_log),
        base(std::sqrt(state.alphabet.mean_photons())) {
    if (true_idx < 0 || true_idx >= alpha.size())
      throw std::invalid_argument("true phase index out of range");
    out.n = alpha.size();
  }

  /// Elimination test of phase k on a signal fraction with amplitude scale s:
  /// mode = s·e^{iφ_true} − s·e^{iφ_k}. Exactly vacuum for k == true_idx.
  bool test_eliminate(double scale, int k, int round) {
    const CoherentMode mode{scale * alpha.phase_factor(true_idx) -
                            scale * alpha.phase_factor(k)};
    const bool clicked = optics::sample_click(mode, det, rng);
    if (log) out.click_log.push_back({round, k, clicked});
    if (clicked) eliminate(k);
    return clicked;
  }

  void eliminate(int k) {
    out.eliminated.push_back(k);
    ++out.stage_reached;
  }

  bool done() const { return static_cast<int>(out.eliminated.size()) == out.n - 1; }

  void finish() {
    if (done()) out.conclusive_index = out.survivors().front();
  }
};

/// Basis measurement of one copy (amplitude scale s) against the reference
/// i·s·e^{iφ_a}: output 1 ∝ e^{iφ}−e^{iφ_a} eliminates phase a, output 2
/// ∝ e^{iφ}−e^{iφ_{a+N/2}} eliminates the antipode. Returns the clicks.
struct BasisClicks {
  bool on_anchor = false;
  bool on_antipode = false;
};
BasisClicks measure_basis_pair(Run &run, double scale, int anchor, int round) {
  const int antipode = (anchor + run.out.n / 2) % run.out.n;
  const CoherentMode signal{scale * run.alpha.phase_factor(run.true_idx)};
  const CoherentMode reference{Complex{0.0, 1.0} * (scale * run.alpha.phase_factor(anchor))};
  auto [out_anchor, out_antipode] = optics::beamsplit(signal, reference, Beamsplitter::balanced());
  BasisClicks clicks;
  clicks.on_anchor = optics::sample_click(out_anchor, run.det, run.rng);
  if (run.log) run.out.click_log.push_back({round, anchor, clicks.on_anchor});
  clicks.on_antipode = optics::sample_click(out_antipode, run.det, run.rng);
  if (run.log) run.out.click_log.push_back({round, antipode, clicks.on_antipode});
  if (clicks.on_anchor) run.eliminate(anchor);
  if (clicks.on_antipode) run.eliminate(antipode);
  return clicks;
}

void require_copies(const PhaseAlphabet &alpha, const FeedbackConfig &cfg) {
  if (cfg.copies < alpha.size())
    throw std::invalid_argument("feedback scheme needs M >= N copies");
}

} // namespace

bool eliminate_phase_trial(double intensity, int true_idx, int test_idx,
                           const PhaseAlphabet &alphabet, RandomStream &rng) {
  if (!(intensity >= 0.0))
    throw std::invalid_argument("eliminate_phase_trial: intensity must be >= 0");
  const double scale = std::sqrt(intensity);
  const CoherentMode mode{scale * alphabet.phase_factor(true_idx) -
                          scale * alphabet.phase_factor(test_idx)};
  return optics::sample_click(mode, Detector{alphabet.efficiency()}, rng);
}

StrategyOutcome run_basis_measurement_2(const TrueState &state, RandomStream &rng,
                                        bool keep_click_log) {
  if (state.alphabet.size() != 2)
    throw std::invalid_argument("run_basis_measurement_2 needs an N=2 alphabet");
  Run run(state, rng, keep_click_log);
  measure_basis_pair(run, run.base, 0, 0);
  run.out.copies_consumed = 1;
  run.out.intensity_consumed = state.alphabet.mean_photons();
  run.finish();
  return run.out;
}

StrategyOutcome run_simple_scheme(const TrueState &state, RandomStream &rng,
                                  bool keep_click_log) {
  Run run(state, rng, keep_click_log);
  const int n = run.out.n;
  const double scale = run.base / std::sqrt(static_cast<double>(n));
  for (int k = 0; k < n; ++k)
    run.test_eliminate(scale, k, 0);
  run.out.copies_consumed = n;
  run.out.intensity_consumed = n * (scale * scale);
  run.finish();
  return run.out;
}

StrategyOutcome run_feedback_scheme_3(const TrueState &state, const FeedbackConfig &cfg,
                                      RandomStream &rng) {
  if (state.alphabet.size() != 3)
    throw std::invalid_argument("run_feedback_scheme_3 needs an N=3 alphabet");
  require_copies(state.alphabet, cfg);
  Run run(state, rng, cfg.keep_click_log);
  const long m = cfg.copies;
  const double per_copy = run.base / std::sqrt(static_cast<double>(m));

  long copies_left = m;
  int round = 0;
  while (copies_left >= 3 && run.out.eliminated.empty()) {
    for (int k = 0; k < 3; ++k)
      run.test_eliminate(per_copy, k, round);
    copies_left -= 3;
    ++round;
  }

  if (!run.out.eliminated.empty() && !run.done() && copies_left > 0) {
    // Optimal two-phase USD of the survivors with all remaining light:
    // half per elimination setup.
    const double half = run.base * std::sqrt(static_cast<double>(copies_left) /
                                             (2.0 * static_cast<double>(m)));
    for (int k : run.out.survivors())
      run.test_eliminate(half, k, round);
    copies_left = 0;
  }

  run.out.copies_consumed = m - copies_left;
  run.out.intensity_consumed = static_cast<double>(run.out.copies_consumed) *
                               state.alphabet.mean_photons() / static_cast<double>(m);
  run.out.intensity_discarded = static_cast<double>(copies_left) *
                                state.alphabet.mean_photons() / static_cast<double>(m);
  run.finish();
  return run.out;
}

StrategyOutcome run_feedback_scheme_4(const TrueState &state, const FeedbackConfig &cfg,
                                      RandomStream &rng) {
  if (state.alphabet.size() != 4)
    throw std::invalid_argument("run_feedback_scheme_4 needs the N=4 alphabet");
  require_copies(state.alphabet, cfg);
  Run run(state, rng, cfg.keep_click_log);
  const long m = cfg.copies;
  const double per_copy = run.base / std::sqrt(static_cast<double>(m));

  const int first_anchor =
      cfg.basis_rule == BasisRule::Random ? rng.next_bit() : 0; // 0 = {0,π}, 1 = {π/2,3π/2}
  run.out.first_basis = first_anchor;

  long used = 0;
  bool whole_basis_gone = false;

  // Step 2: first-basis measurements until a click.
  while (used < m) {
    ++used;
    const BasisClicks c = measure_basis_pair(run, per_copy, first_anchor,
                                             static_cast<int>(used - 1));
    if (c.on_anchor || c.on_antipode) {
      whole_basis_gone = c.on_anchor && c.on_antipode;
      break;
    }
  }

  // Step 3: conjugate-basis measurements, skipped when a simultaneous click
  // already removed the whole first basis.
  if (!run.out.eliminated.empty() && !whole_basis_gone && !run.done()) {
    const int second_anchor = 1 - first_anchor;
    while (used < m) {
      ++used;
      const BasisClicks c = measure_basis_pair(run, per_copy, second_anchor,
                                               static_cast<int>(used - 1));
      if (c.on_anchor || c.on_antipode) break;
    }
  }

  // Step 4: all remaining light, split between the two surviving setups.
  long discarded = 0;
  if (!run.done() && run.out.stage_reached >= 2 && used < m) {
    const long rest = m - used;
    const double half = run.base * std::sqrt(static_cast<double>(rest) /
                                             (2.0 * static_cast<double>(m)));
    for (int k : run.out.survivors())
      run.test_eliminate(half, k, static_cast<int>(used));
    used = m;
  } else if (run.done()) {
    discarded = m - used; // conclusive before the light ran out
  } else {
    used = m; // steps 2/3 consumed everything
  }

  run.out.copies_consumed = m - discarded;
  run.out.intensity_consumed = static_cast<double>(run.out.copies_consumed) *
                               state.alphabet.mean_photons() / static_cast<double>(m);
  run.out.intensity_discarded = static_cast<double>(discarded) *
                                state.alphabet.mean_photons() / static_cast<double>(m);
  run.finish();
  return run.out;
}

StrategyOutcome run_feedback_scheme_n(const TrueState &state, const FeedbackConfig &cfg,
                                      RandomStream &rng) {
  require_copies(state.alphabet, cfg);
  Run run(state, rng, cfg.keep_click_log);
  const int n = run.out.n;
  const long m = cfg.copies;
  const double per_copy = run.base / std::sqrt(static_cast<double>(m));

  std::vector<int> active(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) active[static_cast<std::size_t>(k)] = k;

  long copies_left = m;
  int round = 0;
  while (static_cast<long>(active.size()) <= copies_left && active.size() > 1) {
    std::vector<int> clicked;
    for (int k : active)
      if (run.test_eliminate(per_copy, k, round)) clicked.push_back(k);
    copies_left -= static_cast<long>(active.size());
    ++round;
    if (!clicked.empty())
      active.erase(std::remove_if(active.begin(), active.end(),
                                  [&](int k) { return run.out.was_eliminated(k); }),
                   active.end());
  }

  run.out.copies_consumed = m - copies_left;
  run.out.intensity_consumed = static_cast<double>(run.out.copies_consumed) *
                               state.alphabet.mean_photons() / static_cast<double>(m);
  run.out.intensity_discarded = static_cast<double>(copies_left) *
                                state.alphabet.mean_photons() / static_cast<double>(m);
  run.finish();
  return run.out;
}

} // namespace usdlo::strategies
