#include "usdlo/qkd.hpp"

#include <algorithm>
#include <stdexcept>

namespace usdlo::qkd {

int encode(int bit, Basis basis) {
  if (bit != 0 && bit != 1)
    throw std::invalid_argument("encode: bit must be 0 or 1");
  return bit * 2 + (basis == Basis::Cross ? 1 : 0);
}

std::pair<int, Basis> decode(int phase_index) {
  if (phase_index < 0 || phase_index > 3)
    throw std::invalid_argument("decode: phase index must lie in [0, 4)");
  return {phase_index / 2, phase_index % 2 == 0 ? Basis::Plus : Basis::Cross};
}

std::vector<int> BobRecord::survivors() const {
  std::vector<int> out;
  for (int k = 0; k < 4; ++k)
    if (std::find(eliminated.begin(), eliminated.end(), k) == eliminated.end())
      out.push_back(k);
  return out;
}

BobRecord bob_measure(int pulse_phase_index, const SessionConfig &cfg, RandomStream &rng) {
  strategies::TrueState state{
      analytics::PhaseAlphabet(4, cfg.mean_photons, cfg.efficiency), pulse_phase_index};
  strategies::FeedbackConfig fc;
  fc.copies = cfg.copies;
  fc.basis_rule = cfg.basis_rule;
  const auto outcome = strategies::run_feedback_scheme_4(state, fc, rng);

  BobRecord rec;
  rec.stage_reached = outcome.stage_reached;
  rec.first_basis = outcome.first_basis == 1 ? Basis::Cross : Basis::Plus;
  rec.second_basis = outcome.first_basis == 1 ? Basis::Plus : Basis::Cross;
  rec.eliminated = outcome.eliminated;

  const auto alive = rec.survivors();
  if (outcome.conclusive()) {
    rec.inference = InferenceKind::UnambiguousState;
    rec.inferred_state = *outcome.conclusive_index;
  } else if (alive.size() == 2) {
    const int bit0 = decode(alive[0]).first;
    const int bit1 = decode(alive[1]).first;
    if (bit0 == bit1) {
      rec.inference = InferenceKind::UnambiguousBit;
      rec.inferred_bit = bit0;
    } else {
      rec.inference = InferenceKind::BasisOutcome;
    }
  } else if (alive.size() == 3) {
    rec.inference = InferenceKind::BasisOutcome;
  }
  return rec;
}

namespace {

void apply_pulse(SessionStats &stats, const AliceRecord &alice, const BobRecord &bob) {
  ++stats.pulses;
  ++stats.stage_counts[static_cast<std::size_t>(bob.stage_reached)];

  const auto keep = [&](int key_bit, long &bucket) {
    ++bucket;
    if (key_bit != alice.bit) ++stats.bit_errors;
  };

  switch (bob.stage_reached) {
    case 0:
      break;
    case 1: {
      // Single click in Bob's first basis; standard BB84 sifting.
      const int gone = bob.eliminated.front();
      if (decode(gone).second == alice.basis)
        keep(decode((gone + 2) % 4).first, stats.kept_a);
      else
        ++stats.discarded_basis_mismatch;
      break;
    }
    case 2: {
      const auto alive = bob.survivors();
      if (bob.inference == InferenceKind::UnambiguousBit) {
        keep(bob.inferred_bit, stats.kept_b);
      } else if (decode(alive[0]).second == decode(alive[1]).second) {
        // Both survivors sit in Alice's basis (a simultaneous click removed
        // the other basis outright); revealing the basis cannot pick the bit.
        ++stats.discarded_unresolved;
      } else {
        const int hers = decode(alive[0]).second == alice.basis ? alive[0] : alive[1];
        keep(decode(hers).first, stats.kept_c);
      }
      break;
    }
    case 3:
      keep(decode(bob.inferred_state).first, stats.kept_d);
      break;
    default:
      throw std::logic_error("stage_reached out of range");
  }
}

} // namespace

double SessionStats::coincidence_fraction() const {
  const long stage2 = stage_counts[2];
  return stage2 > 0 ? static_cast<double>(kept_b) / static_cast<double>(stage2) : 0.0;
}

double SessionStats::error_rate() const {
  const long kept = sifted_total();
  return kept > 0 ? static_cast<double>(bit_errors) / static_cast<double>(kept) : 0.0;
}

SessionStats sift(std::span<const AliceRecord> alice, std::span<const BobRecord> bob) {
  if (alice.size() != bob.size())
    throw std::invalid_argument("sift: record streams must have equal length");
  SessionStats stats;
  for (std::size_t i = 0; i < alice.size(); ++i)
    apply_pulse(stats, alice[i], bob[i]);
  return stats;
}

SessionStats run_session(long n_pulses, const SessionConfig &cfg, std::uint64_t seed) {
  if (n_pulses < 1)
    throw std::invalid_argument("run_session: need at least one pulse");
  SessionStats stats;
  for (long i = 0; i < n_pulses; ++i) {
    RandomStream rng(seed, static_cast<std::uint64_t>(i));
    AliceRecord alice;
    alice.bit = rng.next_bit();
    alice.basis = rng.next_bit() ? Basis::Cross : Basis::Plus;
    alice.phase_index = encode(alice.bit, alice.basis);
    const BobRecord bob = bob_measure(alice.phase_index, cfg, rng);
    apply_pulse(stats, alice, bob);
  }
  return stats;
}

} // namespace usdlo::qkd
