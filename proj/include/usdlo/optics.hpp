#pragma once
#include <complex>
#include <utility>
#include <vector>

#include "usdlo/random.hpp"

namespace usdlo::optics {

using Complex = std::complex<double>;

/// One optical mode in a coherent state. The complex amplitude is the full
/// description; |amplitude|² is the mean photon number. Every operation in
/// this module maps coherent states to coherent states.
struct CoherentMode {
  Complex amplitude{0.0, 0.0};

  double intensity() const { return std::norm(amplitude); }
};

/// Symmetric 2x2 beamsplitter with transfer matrix [[t, r], [r, t]].
/// Unitarity requires |t|²+|r|² = 1 and t·conj(r) + r·conj(t) = 0.
class Beamsplitter {
public:
  Beamsplitter(Complex t, Complex r);

  /// 50/50 splitter, t = 1/√2, r = i/√2.
  static Beamsplitter balanced();

  Complex t() const { return t_; }
  Complex r() const { return r_; }

private:
  Complex t_, r_;
};

/// Threshold (click / no-click) photodetector with quantum efficiency η.
struct Detector {
  double efficiency = 1.0;

  explicit Detector(double eta);
  Detector() = default;
};

/// Interfere two modes on a beamsplitter: outputs (t·a + r·b, r·a + t·b).
/// Total mean photon number is conserved.
std::pair<CoherentMode, CoherentMode> beamsplit(const CoherentMode &a, const CoherentMode &b,
                                                const Beamsplitter &bs);

/// Exact displacement: amplitude -> amplitude + delta.
CoherentMode displace(const CoherentMode &m, Complex delta);

/// Finite-transmittance realisation of displace() for validation: the mode is
/// interfered with the auxiliary state beta = delta·t/r on a (t, r)
/// beamsplitter so the transmitted port approaches m + delta as t -> 1.
struct DisplacementApprox {
  CoherentMode output;    ///< transmitted port, ≈ m + delta
  CoherentMode discarded; ///< reflected port, vanishes as t -> 1
};
DisplacementApprox displace_via_beamsplitter(const CoherentMode &m, Complex delta, double t);

/// Split a mode into n identical copies of amplitude a/√n (a balanced
/// beamsplitter tree gives the same result).
std::vector<CoherentMode> split_equal(const CoherentMode &m, int n);

/// P(click) = 1 − exp(−η·|amplitude|²). Zero iff η·|amplitude|² is zero.
double click_probability(const CoherentMode &m, const Detector &d);

/// Bernoulli draw with click_probability(m, d). The mode is absorbed by the
/// detector and must not be reused.
///
/// Running a scheme at (amplitudes, η) and at (√η·amplitudes, η=1) gives the
/// same click statistics; when η is a power of two the two runs are
/// bit-identical because power-of-two scaling is exact in IEEE arithmetic.
bool sample_click(const CoherentMode &m, const Detector &d, RandomStream &rng);

} // namespace usdlo::optics
