"""Unambiguous state discrimination of symmetric coherent states with linear
optics: closed-form probabilities, finite-M feedback sums, event-level Monte
Carlo simulation, and a BB84 receiver built from the 4-step measurement."""

from usdlo._core import (
    analytic_reference,
    asymptotic,
    closed_form,
    closed_form_simple,
    closed_form_two_phase,
    elimination_click_prob,
    estimate,
    feedback4_procedure_finite_m,
    feedback_finite_m,
    optimal_usd_prob,
    run_session,
    symmetric_coefficients,
    validate,
    Estimate,
)

__all__ = [
    "analytic_reference",
    "asymptotic",
    "closed_form",
    "closed_form_simple",
    "closed_form_two_phase",
    "elimination_click_prob",
    "estimate",
    "feedback4_procedure_finite_m",
    "feedback_finite_m",
    "optimal_usd_prob",
    "run_session",
    "symmetric_coefficients",
    "validate",
    "Estimate",
]

__version__ = "0.1.0"
