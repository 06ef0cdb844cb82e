"""Exact restricted isometry constants and the checks built on them.

``ric_exact`` enumerates every k-column subset in lexicographic order, takes
the extreme Jacobi eigenvalues of each Gram submatrix, and reduces to the
worst deviation from 1. Among equal deviations the lexicographically first
subset is kept as witness, so the result does not depend on the backend.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._accel import NUMBA_ENABLED, jit
from .model import DimensionError, SparseSignal, correlations
from .numerics import (
    JACOBI_MAX_SWEEPS,
    JACOBI_RTOL,
    NoConvergenceError,
    _jacobi_batched,
    _jacobi_loop,
    as_matrix,
    gram,
)

DEFAULT_BUDGET = 2_000_000
LEMMA_SLACK = 1e-12
_CHUNK = 1 << 15


class BudgetExceeded(RuntimeError):
    """The requested order needs more subsets than the enumeration budget allows."""


@dataclass(frozen=True)
class RicReport:
    """``delta = max(lambda_max - 1, 1 - lambda_min)``, extremes taken over all subsets."""

    order: int
    delta: float
    witness_support: tuple
    lambda_min: float
    lambda_max: float
    subsets_examined: int


@dataclass(frozen=True)
class Lemma1Report:
    sparsity: int
    delta: float
    s0: float
    max_off_support: float
    eq2_lower_bound: float
    eq1_upper_bound: float
    eq2_holds: bool
    eq1_holds: bool
    condition_holds: bool
    conclusion_holds: bool


@jit
def _ric_scan_loop(g, k, rtol, max_sweeps):
    n = g.shape[0]
    comb = np.arange(k)
    witness = comb.copy()
    sub = np.empty((k, k))
    best = -np.inf
    lam_min = np.inf
    lam_max = -np.inf
    count = 0
    while True:
        fro = 0.0
        for i in range(k):
            for j in range(k):
                v = g[comb[i], comb[j]]
                sub[i, j] = v
                fro += v * v
        eig, sweeps = _jacobi_loop(sub, rtol * np.sqrt(fro), max_sweeps)
        if sweeps < 0:
            return best, comb, lam_min, lam_max, count, False
        lo = eig[0]
        hi = eig[k - 1]
        dev = max(hi - 1.0, 1.0 - lo)
        if dev > best:
            best = dev
            witness[:] = comb
        lam_min = min(lam_min, lo)
        lam_max = max(lam_max, hi)
        count += 1

        i = k - 1
        while i >= 0 and comb[i] == n - k + i:
            i -= 1
        if i < 0:
            break
        comb[i] += 1
        for j in range(i + 1, k):
            comb[j] = comb[j - 1] + 1
    return best, witness, lam_min, lam_max, count, True


def _ric_scan_batched(g, k, rtol, max_sweeps, chunk=_CHUNK):
    n = g.shape[0]
    combos = itertools.combinations(range(n), k)
    best = -np.inf
    witness = None
    lam_min, lam_max, count = np.inf, -np.inf, 0
    while True:
        block = np.array(list(itertools.islice(combos, chunk)), dtype=np.int64).reshape(-1, k)
        if block.shape[0] == 0:
            break
        sub = g[block[:, :, None], block[:, None, :]]
        tol = rtol * np.sqrt(np.sum(sub * sub, axis=(1, 2)))
        eig, sweeps = _jacobi_batched(sub, tol, max_sweeps)
        if np.any(sweeps < 0):
            bad = int(np.flatnonzero(sweeps < 0)[0])
            return best, block[bad], lam_min, lam_max, count, False
        dev = np.maximum(eig[:, -1] - 1.0, 1.0 - eig[:, 0])
        j = int(np.argmax(dev))
        if dev[j] > best:
            best = float(dev[j])
            witness = block[j].copy()
        lam_min = min(lam_min, float(eig[:, 0].min()))
        lam_max = max(lam_max, float(eig[:, -1].max()))
        count += block.shape[0]
    return best, witness, lam_min, lam_max, count, True


def ric_exact(a, order, budget=DEFAULT_BUDGET, backend=None):
    """Restricted isometry constant of ``a`` at ``order`` by exhaustive enumeration.

    ``backend`` forces ``"numba"`` or ``"numpy"``; by default the numba loop is
    used when available.

    Raises
    ------
    BudgetExceeded
        ``binomial(cols, order)`` exceeds ``budget``.
    """
    a = as_matrix(a)
    n = a.shape[1]
    if not 1 <= order <= n:
        raise ValueError(f"order must lie in [1, {n}], got {order}")
    total = math.comb(n, order)
    if total > budget:
        raise BudgetExceeded(f"C({n}, {order}) = {total} subsets exceeds budget {budget}")
    g = gram(a)
    if backend is None:
        backend = "numba" if NUMBA_ENABLED else "numpy"
    if backend == "numba":
        scan = _ric_scan_loop
    elif backend == "numpy":
        scan = _ric_scan_batched
    else:
        raise ValueError(f"unknown backend {backend!r}")
    best, witness, lo, hi, count, ok = scan(g, order, JACOBI_RTOL, JACOBI_MAX_SWEEPS)
    if not ok:
        raise NoConvergenceError(
            f"Jacobi did not converge on subset {tuple(int(i) for i in witness)}"
        )
    return RicReport(
        order=order,
        delta=float(best),
        witness_support=tuple(int(i) for i in witness),
        lambda_min=float(lo),
        lambda_max=float(hi),
        subsets_examined=int(count),
    )


def sufficiency_threshold(k):
    return 1.0 / (math.sqrt(k) + 1.0)


def theorem1_condition(delta, k):
    """Strict test ``delta < 1 / (sqrt(k) + 1)``."""
    if delta < 0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return bool(delta < sufficiency_threshold(k))


def check_lemma1(a, x, delta):
    """Check the correlation bounds of the greedy-selection lemma on one signal.

    ``delta`` must be the restricted isometry constant of ``a`` at order
    ``||x||_0 + 1``; it is taken as given. The report records the in-support
    maximum ``s0``, the largest off-support correlation, both bounds (with
    1e-12 slack) and whether ``s0`` strictly beats every off-support value.
    """
    a = as_matrix(a)
    if not isinstance(x, SparseSignal):
        x = SparseSignal(x)
    if x.length != a.shape[1]:
        raise DimensionError(f"signal has length {x.length}, matrix has {a.shape[1]} columns")
    k = x.sparsity
    if k < 1:
        raise ValueError("signal must have at least one nonzero")
    profile = correlations(a, a @ x.entries, x.support)
    off = np.ones(a.shape[1], dtype=bool)
    off[list(x.support)] = False
    off_mags = np.abs(profile.values[off])
    max_off = float(off_mags.max()) if off_mags.size else 0.0
    xn = x.norm2()
    lower = (1.0 - delta) * xn / math.sqrt(k)
    upper = delta * xn
    return Lemma1Report(
        sparsity=k,
        delta=float(delta),
        s0=profile.s0,
        max_off_support=max_off,
        eq2_lower_bound=lower,
        eq1_upper_bound=upper,
        eq2_holds=bool(profile.s0 >= lower - LEMMA_SLACK),
        eq1_holds=bool(max_off <= upper + LEMMA_SLACK),
        condition_holds=theorem1_condition(delta, k),
        conclusion_holds=bool(profile.s0 > max_off),
    )
