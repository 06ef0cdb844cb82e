import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ompric import rip
from ompric._accel import NUMBA_ENABLED
from ompric.counterexample import build_matrix, build_signal
from ompric.model import DimensionError, SparseSignal
from ompric.numerics import sym_eigenvalues
from ompric.rip import BudgetExceeded, check_lemma1, ric_exact, theorem1_condition

from conftest import eig2x2, naive_gram, unit_columns

# Frozen from the closed-form 2x2 formula and per-subset eigvalsh respectively,
# for np.random.default_rng(20240601).standard_normal((6, 8)).
RAW_6x8_ORDER2 = (9.260132013780298, (0, 2))
RAW_6x8_ORDER3 = (12.32902958516334, (0, 2, 6))


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_counterexample_delta(k):
    rep = ric_exact(build_matrix(k), k + 1)
    r = 1 / math.sqrt(k)
    assert rep.delta == pytest.approx(r, abs=1e-10)
    assert rep.lambda_min == pytest.approx(1 - r, abs=1e-10)
    assert rep.lambda_max == pytest.approx(1 + r, abs=1e-10)
    assert rep.witness_support == tuple(range(k + 1))
    assert rep.subsets_examined == 1


@pytest.mark.parametrize("k", [1, 2, 3, 5])
def test_identity_delta_zero(k):
    rep = ric_exact(np.eye(5), k)
    assert rep.delta == 0.0
    assert rep.witness_support == tuple(range(k))
    assert rep.subsets_examined == math.comb(5, k)


def test_frozen_raw_6x8():
    a = np.random.default_rng(20240601).standard_normal((6, 8))
    r2 = ric_exact(a, 2)
    assert r2.delta == pytest.approx(RAW_6x8_ORDER2[0], abs=1e-8)
    assert r2.witness_support == RAW_6x8_ORDER2[1]
    assert r2.subsets_examined == 28
    r3 = ric_exact(a, 3)
    assert r3.delta == pytest.approx(RAW_6x8_ORDER3[0], abs=1e-8)
    assert r3.witness_support == RAW_6x8_ORDER3[1]


def test_order2_matches_closed_form(rng):
    a = unit_columns(rng, 6, 8)
    g = naive_gram(a)
    best = max(
        max(hi - 1, 1 - lo)
        for i, j in itertools.combinations(range(8), 2)
        for lo, hi in [eig2x2(g[i, i], g[i, j], g[j, j])]
    )
    assert ric_exact(a, 2).delta == pytest.approx(best, abs=1e-12)
    # unit columns: lambda = 1 +- |<a_i, a_j>|, so delta_2 is the coherence
    coherence = np.max(np.abs(g - np.diag(np.diag(g))))
    assert ric_exact(a, 2).delta == pytest.approx(coherence, abs=1e-12)


def test_order1_is_worst_column_norm_deviation(rng):
    a = rng.standard_normal((4, 6))
    sq = np.sum(a * a, axis=0)
    assert ric_exact(a, 1).delta == pytest.approx(np.max(np.abs(sq - 1)), abs=1e-12)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        ric_exact(np.eye(20), 10, budget=1000)
    assert ric_exact(np.eye(6), 3, budget=20).subsets_examined == 20


def test_bad_order():
    with pytest.raises(ValueError):
        ric_exact(np.eye(3), 0)
    with pytest.raises(ValueError):
        ric_exact(np.eye(3), 4)


def test_backends_agree(rng):
    a = unit_columns(rng, 7, 11)
    for k in (1, 2, 3, 4):
        fast = ric_exact(a, k, backend="numba")
        slow = ric_exact(a, k, backend="numpy")
        assert fast.delta == pytest.approx(slow.delta, abs=1e-13)
        assert fast.witness_support == slow.witness_support
        assert fast.subsets_examined == slow.subsets_examined


def test_batched_chunking_is_invisible(rng):
    a = unit_columns(rng, 5, 9)
    g = a.T @ a
    whole = rip._ric_scan_batched(g, 3, 1e-14, 100)
    tiny = rip._ric_scan_batched(g, 3, 1e-14, 100, chunk=7)
    assert whole[0] == tiny[0] and tuple(whole[1]) == tuple(tiny[1]) and whole[4] == tiny[4]


def test_ties_pick_lexicographically_first():
    # columns 1 and 3 duplicate 0 and 2, so several subsets share the worst deviation
    base = np.random.default_rng(3).standard_normal((4, 2))
    a = np.column_stack([base[:, 0], base[:, 0], base[:, 1], base[:, 1]])
    for backend in ("numba", "numpy"):
        rep = ric_exact(a, 2, backend=backend)
        assert rep.witness_support == (0, 1)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(2, 7), st.integers(0, 2**32 - 1))
def test_property_monotone_and_witness(m, n, seed):
    a = np.random.default_rng(seed).standard_normal((m, n))
    deltas = [ric_exact(a, k).delta for k in range(1, n + 1)]
    assert all(d1 <= d2 + 1e-12 for d1, d2 in zip(deltas, deltas[1:]))
    rep = ric_exact(a, min(3, n))
    sub = a[:, list(rep.witness_support)]
    eig = sym_eigenvalues(sub.T @ sub)
    assert max(eig[-1] - 1, 1 - eig[0]) == pytest.approx(rep.delta, abs=1e-10)
    assert rep.delta == pytest.approx(max(rep.lambda_max - 1, 1 - rep.lambda_min), abs=0)


def test_rip_sandwich(rng):
    a = unit_columns(rng, 8, 10)
    k = 3
    delta = ric_exact(a, k).delta
    for _ in range(1000):
        x = np.zeros(10)
        x[rng.choice(10, k, replace=False)] = rng.standard_normal(k)
        energy = np.sum((a @ x) ** 2)
        nx = np.sum(x * x)
        assert (1 - delta - 1e-9) * nx <= energy <= (1 + delta + 1e-9) * nx


# --- condition and lemma -----------------------------------------------------------

def test_condition_examples():
    assert theorem1_condition(0.40, 2)
    assert not theorem1_condition(1 / math.sqrt(2), 2)
    for k in (1, 2, 3, 7, 50):
        assert not theorem1_condition(1 / (math.sqrt(k) + 1), k)
        assert theorem1_condition(math.nextafter(1 / (math.sqrt(k) + 1), 0), k)
    with pytest.raises(ValueError):
        theorem1_condition(-0.1, 2)


def test_counterexample_sits_between_thresholds():
    for k in range(2, 30):
        assert 1 / math.sqrt(k) > rip.sufficiency_threshold(k)


def test_lemma_on_counterexample():
    rep = check_lemma1(build_matrix(2), build_signal(2), 1 / math.sqrt(2))
    assert rep.s0 == pytest.approx(1.0, abs=1e-15)
    assert rep.max_off_support == pytest.approx(1.0, abs=1e-15)
    assert not rep.conclusion_holds
    assert not rep.condition_holds
    # both bounds still hold: 1 <= (1/sqrt2)*sqrt2 and 1 >= (1 - 1/sqrt2)*sqrt2/sqrt2
    assert rep.eq1_holds and rep.eq2_holds


def test_lemma_identity():
    rep = check_lemma1(np.eye(5), SparseSignal([0, 2.0, 0, -1.0, 0]), 0.0)
    assert rep.max_off_support == 0.0
    assert rep.conclusion_holds and rep.condition_holds
    assert rep.s0 == 2.0
    assert rep.eq2_lower_bound == pytest.approx(math.sqrt(5) / math.sqrt(2))
    assert rep.eq1_upper_bound == 0.0


def test_lemma_bounds_on_conditioned_instances():
    seen = 0
    for seed in range(60):
        r = np.random.default_rng(seed)
        a = unit_columns(r, 200, 12)
        delta = ric_exact(a, 3).delta
        if not theorem1_condition(delta, 2):
            continue
        seen += 1
        for _ in range(20):
            x = SparseSignal.from_support(12, sorted(r.choice(12, 2, replace=False)), r.standard_normal(2))
            rep = check_lemma1(a, x, delta)
            assert rep.conclusion_holds
            assert rep.s0 >= rep.eq2_lower_bound - 1e-12
            assert rep.max_off_support <= rep.eq1_upper_bound + 1e-12
    assert seen >= 10


def test_lemma_bounds_hold_without_condition(rng):
    # the two bounds need only the RIC itself; the strict conclusion needs the condition
    for _ in range(20):
        a = unit_columns(rng, 6, 9)
        k = 2
        delta = ric_exact(a, k + 1).delta
        if delta >= 1:
            continue
        x = SparseSignal.from_support(9, sorted(rng.choice(9, k, replace=False)), rng.standard_normal(k))
        rep = check_lemma1(a, x, delta)
        assert rep.eq1_holds and rep.eq2_holds


def test_lemma_dimension_mismatch():
    with pytest.raises(DimensionError):
        check_lemma1(np.eye(3), SparseSignal([1.0, 0.0]), 0.0)


@pytest.mark.skipif(not NUMBA_ENABLED, reason="timing target assumes the compiled kernel")
def test_acceptance_sized_scan_is_fast(rng):
    import time

    a = unit_columns(rng, 12, 18)
    ric_exact(a, 4)
    start = time.perf_counter()
    ric_exact(a, 4)
    assert time.perf_counter() - start < 0.5
