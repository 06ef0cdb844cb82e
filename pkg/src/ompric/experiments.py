"""Seeded random-ensemble sweeps for the K-step recovery guarantee.

Random streams come from numpy's PCG64 bit generator. A master
``SeedSequence(seed)`` is spawned into one child per trial, so trial ``t``
draws the same matrix and test signals regardless of how many trials run or
in which order they are evaluated.
"""

import enum
from dataclasses import asdict, dataclass

import numpy as np

from .model import SparseSignal
from .omp import TieBreakPolicy, omp_run, recovers
from .rip import DEFAULT_BUDGET, check_lemma1, ric_exact, sufficiency_threshold, theorem1_condition

SCHEMA_VERSION = 1
SIGNALS_PER_INSTANCE = 12
POLICY_NAMES = ("lowest", "highest", "adversarial")


class Ensemble(enum.Enum):
    GAUSSIAN_UNIT_COLUMNS = "unit"
    GAUSSIAN_RAW = "raw"


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    trials: int = 100
    m: int = 12
    n: int = 18
    k: int = 2
    ensemble: str = Ensemble.GAUSSIAN_UNIT_COLUMNS.value
    tie_policy: str = "all"
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not 1 <= self.k <= self.n:
            raise ValueError(f"need 1 <= k <= n, got k={self.k}, n={self.n}")
        if self.k + 1 > self.n:
            raise ValueError(f"order k+1={self.k + 1} exceeds n={self.n}")
        Ensemble(self.ensemble)
        if self.tie_policy not in POLICY_NAMES + ("all",):
            raise ValueError(f"unknown tie policy {self.tie_policy!r}")

    def policies(self):
        return POLICY_NAMES if self.tie_policy == "all" else (self.tie_policy,)


def trial_rngs(seed, trials):
    children = np.random.SeedSequence(seed).spawn(trials)
    return [np.random.Generator(np.random.PCG64(child)) for child in children]


def random_matrix(rng, m, n, ensemble=Ensemble.GAUSSIAN_UNIT_COLUMNS.value):
    """i.i.d. standard normal entries; unit-column ensemble rescales each column to norm 1."""
    a = rng.standard_normal((m, n))
    if Ensemble(ensemble) is Ensemble.GAUSSIAN_UNIT_COLUMNS:
        a /= np.linalg.norm(a, axis=0)
    return a


def sample_signals(rng, n, k, count=SIGNALS_PER_INSTANCE):
    """Exactly k-sparse test signals on random supports with mixed patterns.

    Patterns cycle through all-ones, alternating signs, Gaussian
    coefficients, random signs with magnitudes spread over four decades, and
    a geometrically decaying alternating sequence.
    """
    out = []
    for i in range(count):
        support = np.sort(rng.choice(n, size=k, replace=False))
        kind = i % 5
        if kind == 0:
            vals = np.ones(k)
        elif kind == 1:
            vals = np.array([(-1.0) ** j for j in range(k)])
        elif kind == 2:
            vals = rng.standard_normal(k)
        elif kind == 3:
            vals = rng.choice([-1.0, 1.0], size=k) * 10.0 ** rng.uniform(-2.0, 2.0, size=k)
        else:
            vals = np.array([(-0.5) ** j for j in range(k)])
        vals[vals == 0.0] = 1.0
        out.append(SparseSignal.from_support(n, support, vals))
    return out


def make_policy(name, support):
    if name == "lowest":
        return TieBreakPolicy.lowest()
    if name == "highest":
        return TieBreakPolicy.highest()
    return TieBreakPolicy.adversarial(support)


def run_instance(a, k, rng, policies=POLICY_NAMES, budget=DEFAULT_BUDGET, signals=None):
    """Compute delta_{k+1} of ``a`` and test OMP on its signals under each policy."""
    ric = ric_exact(a, k + 1, budget=budget)
    holds = theorem1_condition(ric.delta, k)
    if signals is None:
        signals = sample_signals(rng, a.shape[1], k)
    runs = failures = 0
    off_support_picks = 0
    lemma_ok = eq1_ok = eq2_ok = 0
    for x in signals:
        lem = check_lemma1(a, x, ric.delta)
        lemma_ok += lem.conclusion_holds
        eq1_ok += lem.eq1_holds
        eq2_ok += lem.eq2_holds
        y = a @ x.entries
        for name in policies:
            policy = make_policy(name, x.support)
            runs += 1
            if not recovers(a, x, policy):
                failures += 1
            trace = omp_run(a, y, k, policy)
            off_support_picks += sum(i not in x.support for i in trace.selected)
    return {
        "delta": ric.delta,
        "witness_support": list(ric.witness_support),
        "condition_holds": holds,
        "signals": len(signals),
        "omp_runs": runs,
        "recovery_failures": failures,
        "off_support_selections": off_support_picks,
        "lemma1_conclusion_holds": lemma_ok,
        "eq1_holds": eq1_ok,
        "eq2_holds": eq2_ok,
    }


def _check(name, expected, actual, tolerance=0.0):
    return {
        "name": name,
        "expected": expected,
        "actual": actual,
        "tolerance": tolerance,
        "passed": actual == expected,
    }


def run_theorem1(config):
    """Sweep ``config.trials`` random matrices and build the verification report.

    Every instance whose exact delta_{k+1} is below ``1/(sqrt(k)+1)`` must
    recover every test signal under every requested policy, select only
    in-support indices, and satisfy the correlation lemma with both bounds.
    Instances failing the condition are reported but not judged.
    """
    rngs = trial_rngs(config.seed, config.trials)
    records = []
    for t, rng in enumerate(rngs):
        a = random_matrix(rng, config.m, config.n, config.ensemble)
        rec = run_instance(a, config.k, rng, config.policies(), config.budget)
        records.append({"trial": t, **rec})

    good = [r for r in records if r["condition_holds"]]
    bad = [r for r in records if not r["condition_holds"]]

    def total(rs, key):
        return sum(r[key] for r in rs)

    runs_good = total(good, "omp_runs")
    sig_good = total(good, "signals")
    fail_good = total(good, "recovery_failures")
    runs_bad = total(bad, "omp_runs")
    summary = {
        "threshold": sufficiency_threshold(config.k),
        "instances": len(records),
        "condition_holds": len(good),
        "condition_fraction": len(good) / len(records),
        "delta_min": min(r["delta"] for r in records),
        "delta_max": max(r["delta"] for r in records),
        "recovery_rate_condition_holds": (runs_good - fail_good) / runs_good if runs_good else None,
        "lemma1_rate_condition_holds": total(good, "lemma1_conclusion_holds") / sig_good if sig_good else None,
        "recovery_rate_condition_fails": (runs_bad - total(bad, "recovery_failures")) / runs_bad
        if runs_bad else None,
    }
    checks = [
        _check("recovery_failures_condition_holds", 0, fail_good),
        _check("off_support_selections_condition_holds", 0, total(good, "off_support_selections")),
        _check("lemma1_violations_condition_holds", 0, sig_good - total(good, "lemma1_conclusion_holds")),
        _check("eq1_violations_condition_holds", 0, sig_good - total(good, "eq1_holds"), 1e-12),
        _check("eq2_violations_condition_holds", 0, sig_good - total(good, "eq2_holds"), 1e-12),
    ]
    return {
        "schema_version": SCHEMA_VERSION,
        "command": "theorem1",
        "inputs": asdict(config),
        "checks": checks,
        "overall": all(c["passed"] for c in checks),
        "summary": summary,
        "trials": records,
    }
