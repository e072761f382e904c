#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "usdlo/analytics.hpp"
#include "usdlo/montecarlo.hpp"
#include "usdlo/qkd.hpp"
#include "usdlo/validation.hpp"

namespace py = pybind11;
using namespace usdlo;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Unambiguous state discrimination of symmetric coherent states "
            "with linear optics: closed forms, finite-M sums, Monte Carlo "
            "simulation and a BB84 receiver.";

  // analytics
  m.def("symmetric_coefficients", &analytics::symmetric_coefficients, py::arg("n"),
        py::arg("mu"), "Poisson-mod-N coefficients |c_k|^2 of the symmetric ensemble");
  m.def("optimal_usd_prob", &analytics::optimal_usd_prob, py::arg("n"), py::arg("mu"),
        "Optimum USD probability for N symmetric coherent states");
  m.def("elimination_click_prob", &analytics::elimination_click_prob, py::arg("mu"),
        py::arg("eta"), py::arg("delta_phi"),
        "Click probability of a full-intensity phase-elimination test");
  m.def(
      "closed_form",
      [](const std::string &scheme, double mu) {
        for (analytics::Scheme s :
             {analytics::Scheme::Bs2, analytics::Scheme::Bs3Simple,
              analytics::Scheme::Bs3Feedback, analytics::Scheme::Bs4Simple,
              analytics::Scheme::Bs4Feedback, analytics::Scheme::Bs4Stage1,
              analytics::Scheme::Bs4Stage2, analytics::Scheme::Pol4})
          if (scheme == analytics::scheme_name(s)) return analytics::closed_form(s, mu);
        throw std::invalid_argument("unknown scheme tag: " + scheme);
      },
      py::arg("scheme"), py::arg("mu"),
      "Closed forms by tag: BS2, BS3_SIMPLE, BS3_FEEDBACK, BS4_SIMPLE, BS4_FEEDBACK, "
      "BS4_P1, BS4_P2, POL4");
  m.def("closed_form_two_phase", &analytics::closed_form_two_phase, py::arg("mu"),
        py::arg("phi0"), py::arg("phi1"), "Optimal two-phase USD probability");
  m.def("closed_form_simple", &analytics::closed_form_simple, py::arg("n"), py::arg("mu"),
        "Simple N-way split-and-eliminate scheme");
  m.def(
      "asymptotic",
      [](const std::string &kind, int n, double mu) {
        if (kind == "optimal")
          return analytics::asymptotic(analytics::AsymptoticKind::Optimal, n, mu);
        if (kind == "simple")
          return analytics::asymptotic(analytics::AsymptoticKind::SimpleScheme, n, mu);
        if (kind == "feedback")
          return analytics::asymptotic(analytics::AsymptoticKind::FeedbackScheme, n, mu);
        throw std::invalid_argument("kind must be optimal, simple or feedback");
      },
      py::arg("kind"), py::arg("n"), py::arg("mu"), "Leading small-mu behaviour");
  m.def("feedback_finite_m", &analytics::feedback_finite_m, py::arg("n"), py::arg("mu"),
        py::arg("m"), "Finite-M general-N feedback sum (2 <= N <= 6)");
  m.def("feedback4_procedure_finite_m", &analytics::feedback4_procedure_finite_m,
        py::arg("mu"), py::arg("m"), "Finite-M sum of the 4-step BB84 receiver");

  // montecarlo
  py::class_<mc::Estimate>(m, "Estimate")
      .def_readonly("p_hat", &mc::Estimate::p_hat)
      .def_readonly("stderr", &mc::Estimate::stderr_value)
      .def_readonly("trials", &mc::Estimate::trials)
      .def_readonly("successes", &mc::Estimate::successes)
      .def_readonly("soundness_violations", &mc::Estimate::soundness_violations)
      .def("__repr__", [](const mc::Estimate &e) {
        return "Estimate(p_hat=" + std::to_string(e.p_hat) +
               ", stderr=" + std::to_string(e.stderr_value) +
               ", trials=" + std::to_string(e.trials) + ")";
      });
  m.def(
      "estimate",
      [](const std::string &scheme, int n, double mu, double eta, long m_copies, long trials,
         std::uint64_t seed, int threads) {
        mc::EstimateConfig cfg;
        cfg.n = n;
        cfg.mu = mu;
        cfg.eta = eta;
        cfg.copies = m_copies;
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.threads = threads;
        return mc::estimate(mc::parse_scheme(scheme), cfg);
      },
      py::arg("scheme"), py::arg("n") = 4, py::arg("mu") = 1.0, py::arg("eta") = 1.0,
      py::arg("m") = 1000, py::arg("trials") = 100000, py::arg("seed") = 0,
      py::arg("threads") = 0,
      "Monte Carlo success estimate for a scheme tag (bs2, bs3-simple, bs3-feedback, "
      "bs4-simple, bs4-feedback, bsn-simple, bsn-feedback)");
  m.def(
      "analytic_reference",
      [](const std::string &scheme, int n, double effective_mu, long m_copies) {
        return mc::analytic_reference(mc::parse_scheme(scheme), n, effective_mu, m_copies);
      },
      py::arg("scheme"), py::arg("n"), py::arg("effective_mu"), py::arg("m") = 1000,
      "Analytic limit a scheme's estimate converges to");

  // qkd
  m.def(
      "run_session",
      [](long pulses, double mu, double eta, long m_copies, std::uint64_t seed) {
        qkd::SessionConfig cfg;
        cfg.mean_photons = mu;
        cfg.efficiency = eta;
        cfg.copies = m_copies;
        const auto stats = qkd::run_session(pulses, cfg, seed);
        py::dict d;
        d["pulses"] = stats.pulses;
        d["stage_counts"] = stats.stage_counts;
        d["kept_single_photon"] = stats.kept_a;
        d["kept_coinciding_bits"] = stats.kept_b;
        d["kept_basis_revealed"] = stats.kept_c;
        d["kept_full_usd"] = stats.kept_d;
        d["discarded_basis_mismatch"] = stats.discarded_basis_mismatch;
        d["discarded_unresolved"] = stats.discarded_unresolved;
        d["sifted_total"] = stats.sifted_total();
        d["coincidence_fraction"] = stats.coincidence_fraction();
        d["qber"] = stats.error_rate();
        return d;
      },
      py::arg("pulses"), py::arg("mu") = 0.5, py::arg("eta") = 1.0, py::arg("m") = 1000,
      py::arg("seed") = 0, "BB84 session with the 4-step receiver; returns sift statistics");

  // validation
  m.def(
      "validate",
      [](const std::string &profile, std::uint64_t seed, int threads) {
        const auto results = validation::run_checks(
            profile == "full" ? validation::Profile::Full : validation::Profile::Quick, seed,
            threads);
        py::list out;
        for (const auto &r : results) {
          py::dict d;
          d["id"] = r.id;
          d["pass"] = r.pass;
          d["detail"] = r.detail;
          d["seconds"] = r.seconds;
          out.append(d);
        }
        return out;
      },
      py::arg("profile") = "quick", py::arg("seed") = 988361, py::arg("threads") = 0,
      "Run the oracle/invariant checks; returns one dict per check");
}
