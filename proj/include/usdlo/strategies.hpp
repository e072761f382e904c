#pragma once
#include <optional>
#include <vector>

#include "usdlo/analytics.hpp"
#include "usdlo/optics.hpp"
#include "usdlo/random.hpp"

namespace usdlo::strategies {

using analytics::PhaseAlphabet;

/// The phase actually sent. Inference code never reads phase_index except
/// through click sampling.
struct TrueState {
  PhaseAlphabet alphabet;
  int phase_index = 0;
};

struct ClickEvent {
  int round;
  int tested_phase;
  bool clicked;
};

/// Auditable record of one measurement run.
struct StrategyOutcome {
  int n = 0;
  std::vector<int> eliminated;               ///< in elimination order
  std::optional<int> conclusive_index;       ///< present iff N−1 phases eliminated
  int stage_reached = 0;                     ///< photodetection events (0..N−1)
  long copies_consumed = 0;
  double intensity_consumed = 0.0;
  double intensity_discarded = 0.0;
  int first_basis = -1;                      ///< 4-step receiver only: 0 plus, 1 cross
  std::vector<ClickEvent> click_log;         ///< populated when auditing is on

  bool conclusive() const { return conclusive_index.has_value(); }
  bool was_eliminated(int k) const;
  std::vector<int> survivors() const;
};

enum class BasisRule { Random, FixedFirstBasis };

struct FeedbackConfig {
  long copies = 1000;                        ///< M, number of weak copies
  BasisRule basis_rule = BasisRule::Random;  ///< 4-step receiver step 2
  bool keep_click_log = false;
};

/// One phase-elimination test: a copy of the given intensity is displaced by
/// −(reference at the tested phase) and detected. A click licenses
/// eliminating test_idx; the true phase produces an exactly-vacuum mode and
/// can never click.
bool eliminate_phase_trial(double intensity, int true_idx, int test_idx,
                           const PhaseAlphabet &alphabet, RandomStream &rng);

/// N=2 basis measurement: the full state interferes with the reference
/// |i·α⟩ on a 50/50 beamsplitter; either output click identifies the state.
StrategyOutcome run_basis_measurement_2(const TrueState &state, RandomStream &rng,
                                        bool keep_click_log = false);

/// Simple scheme: split into N equal copies, one elimination test per phase.
/// Conclusive iff all N−1 wrong-phase detectors clicked.
StrategyOutcome run_simple_scheme(const TrueState &state, RandomStream &rng,
                                  bool keep_click_log = false);

/// N=3 feedback scheme: rounds of three μ/M copies (one elimination test per
/// phase) until a click, then optimal two-phase USD of the survivors with
/// all remaining light.
StrategyOutcome run_feedback_scheme_3(const TrueState &state, const FeedbackConfig &cfg,
                                      RandomStream &rng);

/// 4-step BB84 receiver: basis measurements in a random basis until a click,
/// then in the conjugate basis, then the remaining light is split between
/// elimination setups for the two surviving phases. A simultaneous click on
/// both outputs eliminates both phases of that basis at once.
StrategyOutcome run_feedback_scheme_4(const TrueState &state, const FeedbackConfig &cfg,
                                      RandomStream &rng);

/// General-N feedback scheme: every surviving phase is tested with one μ/M
/// copy per round; each click removes the clicked phase. Runs until N−1
/// phases are eliminated or too few copies remain for a full round.
StrategyOutcome run_feedback_scheme_n(const TrueState &state, const FeedbackConfig &cfg,
                                      RandomStream &rng);

} // namespace usdlo::strategies
