#pragma once
#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "usdlo/strategies.hpp"

namespace usdlo::qkd {

enum class Basis : int { Plus = 0, Cross = 1 };

/// Fixed BB84 encoding: bit0/plus -> φ=0, bit0/cross -> φ=π/2,
/// bit1/plus -> φ=π, bit1/cross -> φ=3π/2.
int encode(int bit, Basis basis);
/// Inverse of encode: (bit, basis) of a phase index.
std::pair<int, Basis> decode(int phase_index);

struct AliceRecord {
  int bit;
  Basis basis;
  int phase_index;
};

enum class InferenceKind {
  None,            ///< no photon detected
  BasisOutcome,    ///< one phase of one basis eliminated (standard sifting)
  UnambiguousBit,  ///< both survivors carry the same bit: no basis exchange needed
  UnambiguousState ///< full USD, three photons detected
};

struct BobRecord {
  int stage_reached = 0;          ///< photodetection events, 0..3
  Basis first_basis = Basis::Plus;
  Basis second_basis = Basis::Cross;
  std::vector<int> eliminated;
  InferenceKind inference = InferenceKind::None;
  int inferred_bit = -1;          ///< valid for UnambiguousBit
  int inferred_state = -1;        ///< valid for UnambiguousState

  std::vector<int> survivors() const;
};

struct SessionConfig {
  double mean_photons = 1.0;
  double efficiency = 1.0;
  long copies = 1000; ///< M of the 4-step receiver
  strategies::BasisRule basis_rule = strategies::BasisRule::Random;
};

/// Run the 4-step receiver on one pulse and classify the outcome.
BobRecord bob_measure(int pulse_phase_index, const SessionConfig &cfg, RandomStream &rng);

/// Sifted-key bookkeeping. Categories: A = single photon, bases matched
/// (standard sifting; mismatched bases are discarded); B = two photons,
/// coinciding bits (kept with no basis exchange); C = two photons, differing
/// bits (kept after Alice reveals her basis); D = three photons (full USD,
/// kept unconditionally).
struct SessionStats {
  long pulses = 0;
  std::array<long, 4> stage_counts{};   ///< indexed by stage_reached
  long kept_a = 0, kept_b = 0, kept_c = 0, kept_d = 0;
  long discarded_basis_mismatch = 0;    ///< stage 1, Bob's basis != Alice's
  long discarded_unresolved = 0;        ///< stage 2, survivors share a basis
  long bit_errors = 0;

  long sifted_total() const { return kept_a + kept_b + kept_c + kept_d; }
  /// Fraction of stage-2 pulses whose two survivors carry the same bit.
  double coincidence_fraction() const;
  /// QBER of the sifted key; exactly 0 for the noiseless channel.
  double error_rate() const;
};

/// Classify aligned Alice/Bob records into the sifted-key categories.
SessionStats sift(std::span<const AliceRecord> alice, std::span<const BobRecord> bob);

/// End-to-end session: uniform random Alice bits and bases, one RNG substream
/// per pulse (deterministic given the seed), streaming sift.
SessionStats run_session(long n_pulses, const SessionConfig &cfg, std::uint64_t seed);

} // namespace usdlo::qkd
