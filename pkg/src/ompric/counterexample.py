"""The (K+1)x(K+1) matrix on which OMP can fail with delta_{K+1} = 1/sqrt(K).

Columns 0..K-1 are the standard basis vectors e_0..e_{K-1}; column K is
``(1/K, ..., 1/K, sqrt((K-1)/K))``, a unit vector. Against the all-ones
signal on the first K coordinates every column correlates to exactly 1, so
the first OMP step faces a (K+1)-way tie.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .model import SparseSignal, correlations
from .numerics import gram, sym_eigenvalues
from .omp import TieBreakPolicy, omp_run, recovers
from .rip import DEFAULT_BUDGET, ric_exact, theorem1_condition

DELTA_ATOL = 1e-10
SPECTRUM_ATOL = 1e-10
CORRELATION_ATOL = 1e-12


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    actual: object
    tolerance: float
    passed: bool


@dataclass(frozen=True, eq=False)
class CounterexampleReport:
    K: int
    delta_measured: float
    delta_analytic: float
    witness_support: tuple
    spectrum: np.ndarray
    spectrum_analytic: np.ndarray
    correlations_at_y: np.ndarray
    omp_first_pick_tie: bool
    outcomes: dict
    omp_failed_under: list
    checks: list = field(default_factory=list)

    @property
    def overall(self):
        return all(c.passed for c in self.checks)

    def first_failure(self):
        return next((c for c in self.checks if not c.passed), None)


def _check_k(k):
    if isinstance(k, bool) or int(k) != k or k < 2:
        raise ValueError(f"K must be an integer >= 2, got {k!r}")
    return int(k)


def build_matrix(k):
    k = _check_k(k)
    a = np.zeros((k + 1, k + 1))
    a[:k, :k] = np.eye(k)
    a[:k, k] = 1.0 / k
    a[k, k] = math.sqrt((k - 1) / k)
    return a


def build_signal(k):
    k = _check_k(k)
    x = np.ones(k + 1)
    x[k] = 0.0
    return SparseSignal(x)


def analytic_spectrum(k):
    """Eigenvalues of ``A.T A``: 1 - 1/sqrt(K), then 1 (K-1 times), then 1 + 1/sqrt(K)."""
    r = 1.0 / math.sqrt(k)
    return np.array([1.0 - r] + [1.0] * (k - 1) + [1.0 + r])


def verify(k, budget=DEFAULT_BUDGET):
    """Build the K-th counterexample and check every claim made about it.

    OMP is run under all three tie rules; the adversarial rule is aimed at the
    true support. Failure is expected under ``highest`` and ``adversarial``
    only, since ``lowest`` lands inside the support on the first tie.
    """
    k = _check_k(k)
    a = build_matrix(k)
    x = build_signal(k)
    ric = ric_exact(a, k + 1, budget=budget)
    delta_analytic = 1.0 / math.sqrt(k)
    spectrum = sym_eigenvalues(gram(a))
    expected_spectrum = analytic_spectrum(k)
    profile = correlations(a, a @ x.entries, x.support)

    policies = {
        "lowest": TieBreakPolicy.lowest(),
        "highest": TieBreakPolicy.highest(),
        "adversarial": TieBreakPolicy.adversarial(x.support),
    }
    outcomes = {}
    first_tie = False
    for name, policy in policies.items():
        trace = omp_run(a, a @ x.entries, k, policy)
        outcomes[name] = {
            "recovered": recovers(a, x, policy),
            "first_pick": trace.iterations[0].selected_index,
            "first_pick_tie": trace.iterations[0].tie_detected,
            "selected": trace.selected,
        }
        first_tie = first_tie or trace.iterations[0].tie_detected
    failed = [name for name, out in outcomes.items() if not out["recovered"]]

    delta_err = abs(ric.delta - delta_analytic)
    spec_err = float(np.max(np.abs(spectrum - expected_spectrum)))
    ones_count = int(np.sum(np.abs(spectrum - 1.0) <= SPECTRUM_ATOL))
    corr_err = float(np.max(np.abs(profile.values - 1.0)))
    checks = [
        Check("delta_equals_inv_sqrt_k", delta_analytic, ric.delta, DELTA_ATOL, delta_err <= DELTA_ATOL),
        Check("witness_is_full_set", list(range(k + 1)), list(ric.witness_support), 0.0,
              ric.witness_support == tuple(range(k + 1))),
        Check("spectrum_matches", expected_spectrum.tolist(), spectrum.tolist(), SPECTRUM_ATOL,
              spec_err <= SPECTRUM_ATOL),
        Check("eigenvalue_one_multiplicity", k - 1, ones_count, SPECTRUM_ATOL, ones_count == k - 1),
        Check("all_correlations_one", [1.0] * (k + 1), profile.values.tolist(), CORRELATION_ATOL,
              corr_err <= CORRELATION_ATOL),
        Check("first_pick_tie", True, first_tie, 0.0, first_tie),
        Check("fails_under_highest", False, outcomes["highest"]["recovered"], 0.0,
              not outcomes["highest"]["recovered"]),
        Check("fails_under_adversarial", False, outcomes["adversarial"]["recovered"], 0.0,
              not outcomes["adversarial"]["recovered"]),
        Check("above_sufficiency_threshold", False, theorem1_condition(ric.delta, k), 0.0,
              not theorem1_condition(ric.delta, k)),
    ]
    return CounterexampleReport(
        K=k,
        delta_measured=ric.delta,
        delta_analytic=delta_analytic,
        witness_support=ric.witness_support,
        spectrum=spectrum,
        spectrum_analytic=expected_spectrum,
        correlations_at_y=profile.values,
        omp_first_pick_tie=first_tie,
        outcomes=outcomes,
        omp_failed_under=failed,
        checks=checks,
    )
