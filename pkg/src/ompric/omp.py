"""Orthogonal Matching Pursuit with explicit tie-breaking and a full trace."""

import enum
from dataclasses import dataclass

import numpy as np

from .model import DimensionError, SparseSignal, make_support
from .numerics import as_matrix, as_vector, least_squares

TIE_ATOL = 1e-12
EARLY_EXIT_RTOL = 1e-12
RECOVERY_RTOL = 1e-8


class TieRule(enum.Enum):
    LOWEST = "lowest"
    HIGHEST = "highest"
    ADVERSARIAL = "adversarial"


@dataclass(frozen=True)
class TieBreakPolicy:
    """How to resolve a non-unique argmax.

    ``ADVERSARIAL`` prefers any tied index outside ``support`` and falls back
    to the lowest tied index.
    """

    rule: TieRule
    support: tuple = ()

    def __post_init__(self):
        if self.rule is not TieRule.ADVERSARIAL and self.support:
            raise ValueError(f"{self.rule.value} policy takes no support")
        object.__setattr__(self, "support", make_support(self.support))

    @classmethod
    def lowest(cls):
        return cls(TieRule.LOWEST)

    @classmethod
    def highest(cls):
        return cls(TieRule.HIGHEST)

    @classmethod
    def adversarial(cls, support):
        return cls(TieRule.ADVERSARIAL, tuple(support))

    @property
    def name(self):
        return self.rule.value


def policy_from_name(name, support=()):
    rule = TieRule(name)
    if rule is TieRule.ADVERSARIAL:
        return TieBreakPolicy.adversarial(support)
    return TieBreakPolicy(rule)


def select_index(values, excluded, policy):
    """Pick the index of largest ``|values[i]|`` not in ``excluded``.

    Indices within 1e-12 of the maximum magnitude count as tied and are
    resolved by ``policy``. Returns ``(index, tie_detected)``.
    """
    mags = np.abs(np.asarray(values, dtype=np.float64))
    allowed = np.ones(mags.shape[0], dtype=bool)
    allowed[list(excluded)] = False
    if not allowed.any():
        raise ValueError("every index is excluded")
    best = mags[allowed].max()
    tied = np.flatnonzero(allowed & (mags >= best - TIE_ATOL))
    tie = tied.shape[0] > 1
    if policy.rule is TieRule.HIGHEST:
        return int(tied[-1]), tie
    if policy.rule is TieRule.ADVERSARIAL:
        off = [i for i in tied if i not in policy.support]
        if off:
            return int(off[0]), tie
    return int(tied[0]), tie


@dataclass(frozen=True, eq=False)
class OmpIteration:
    selected_index: int
    correlation_values: np.ndarray
    tie_detected: bool
    residual_norm: float
    residual: np.ndarray
    rank_deficient: bool = False

    @property
    def max_correlation(self):
        return float(np.abs(self.correlation_values[self.selected_index]))


@dataclass(frozen=True, eq=False)
class OmpTrace:
    iterations: list
    final_estimate: SparseSignal
    final_support: tuple
    y_norm: float

    @property
    def selected(self):
        return [it.selected_index for it in self.iterations]


def omp_run(a, y, iterations, policy=None):
    """Run OMP for ``iterations`` steps, or fewer if the residual vanishes.

    Early exit happens once the residual norm is at most 1e-12 of ``||y||``.
    """
    a = as_matrix(a)
    y = as_vector(y, "y")
    policy = policy or TieBreakPolicy.lowest()
    m, n = a.shape
    if y.shape[0] != m:
        raise DimensionError(f"y has length {y.shape[0]}, matrix has {m} rows")
    if not 1 <= iterations <= n:
        raise ValueError(f"iterations must lie in [1, {n}], got {iterations}")

    y_norm = float(np.linalg.norm(y))
    stop = EARLY_EXIT_RTOL * y_norm
    chosen = []
    coef = np.zeros(0)
    residual = y.copy()
    records = []
    for _ in range(iterations):
        if float(np.linalg.norm(residual)) <= stop:
            break
        corr = a.T @ residual
        idx, tie = select_index(corr, chosen, policy)
        chosen.append(idx)
        coef, deficient = least_squares(a[:, chosen], y)
        residual = y - a[:, chosen] @ coef
        records.append(
            OmpIteration(idx, corr, tie, float(np.linalg.norm(residual)), residual, deficient)
        )

    estimate = np.zeros(n)
    estimate[chosen] = coef
    return OmpTrace(records, SparseSignal(estimate), tuple(sorted(chosen)), y_norm)


def recovers(a, x, policy=None):
    """True iff OMP run for ``||x||_0`` steps on ``y = A x`` returns ``x``.

    Both the support and the coefficients must match, the latter to 1e-8
    relative in the 2-norm.
    """
    if not isinstance(x, SparseSignal):
        x = SparseSignal(x)
    if x.sparsity < 1:
        raise ValueError("recovers needs a signal with at least one nonzero")
    a = as_matrix(a)
    trace = omp_run(a, a @ x.entries, x.sparsity, policy)
    if trace.final_support != x.support:
        return False
    err = np.linalg.norm(trace.final_estimate.entries - x.entries)
    return bool(err <= RECOVERY_RTOL * x.norm2())
