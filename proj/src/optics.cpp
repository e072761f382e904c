#include "usdlo/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace usdlo::optics {

namespace {
constexpr double kUnitarityTol = 1e-12;

void require_finite(Complex z, const char *what) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw std::invalid_argument(std::string(what) + ": amplitude must be finite");
}
} // namespace

Beamsplitter::Beamsplitter(Complex t, Complex r) : t_(t), r_(r) {
  require_finite(t, "Beamsplitter");
  require_finite(r, "Beamsplitter");
  const double norm_defect = std::abs(std::norm(t) + std::norm(r) - 1.0);
  const double ortho_defect = std::abs(2.0 * std::real(t * std::conj(r)));
  if (norm_defect > kUnitarityTol || ortho_defect > kUnitarityTol)
    throw std::invalid_argument("Beamsplitter: coefficients do not form a unitary transfer matrix");
}

Beamsplitter Beamsplitter::balanced() {
  const double s = 1.0 / std::sqrt(2.0);
  return Beamsplitter{Complex{s, 0.0}, Complex{0.0, s}};
}

Detector::Detector(double eta) : efficiency(eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("Detector: efficiency must lie in [0, 1]");
}

std::pair<CoherentMode, CoherentMode> beamsplit(const CoherentMode &a, const CoherentMode &b,
                                                const Beamsplitter &bs) {
  return {CoherentMode{bs.t() * a.amplitude + bs.r() * b.amplitude},
          CoherentMode{bs.r() * a.amplitude + bs.t() * b.amplitude}};
}

CoherentMode displace(const CoherentMode &m, Complex delta) {
  return CoherentMode{m.amplitude + delta};
}

DisplacementApprox displace_via_beamsplitter(const CoherentMode &m, Complex delta, double t) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("displace_via_beamsplitter: need 0 < t < 1");
  const double r = std::sqrt(1.0 - t * t);
  const Beamsplitter bs{Complex{t, 0.0}, Complex{0.0, r}};
  // Auxiliary amplitude chosen so the transmitted port reads t·m + delta.
  const CoherentMode aux{delta * Complex{t, 0.0} / Complex{0.0, r}};
  auto [out, discard] = beamsplit(m, aux, bs);
  return DisplacementApprox{out, discard};
}

std::vector<CoherentMode> split_equal(const CoherentMode &m, int n) {
  if (n < 1)
    throw std::invalid_argument("split_equal: need n >= 1");
  const Complex each = m.amplitude / std::sqrt(static_cast<double>(n));
  return std::vector<CoherentMode>(static_cast<std::size_t>(n), CoherentMode{each});
}

double click_probability(const CoherentMode &m, const Detector &d) {
  return -std::expm1(-d.efficiency * m.intensity());
}

bool sample_click(const CoherentMode &m, const Detector &d, RandomStream &rng) {
  return rng.next_double() < click_probability(m, d);
}

} // namespace usdlo::optics
