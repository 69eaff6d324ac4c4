import itertools
from math import log2, sqrt

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohgme import measures as ms
from cohgme.core import (
    Bipartition,
    DensityMatrix,
    PureState,
    basis_state,
    enumerate_bipartitions,
    random_local_unitary,
    random_pure_state,
    schmidt_vector,
)
from cohgme.errors import NotADiagonalCorrelationState, NotASimplexVector, ValidationError

KINDS = [ms.concurrence(), ms.gbc(), ms.entropy()]


def simplex(draw_size=st.integers(2, 6)):
    return draw_size.flatmap(
        lambda n: st.lists(st.floats(0, 1), min_size=n, max_size=n)
        .filter(lambda v: sum(v) > 1e-3)
        .map(lambda v: np.array(v) / sum(v)))


def test_eval_f_examples():
    assert ms.eval_f(ms.concurrence(), [0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    assert ms.eval_f(ms.entropy(), [0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    assert ms.eval_f(ms.gbc(), [0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)
    for f in KINDS:
        assert ms.eval_f(f, [1, 0, 0]) == 0
        assert ms.eval_f(f, [0, 0, 1, 0]) == 0


def test_eval_f_against_direct_formulas():
    rng = np.random.default_rng(3)
    for _ in range(100):
        p = rng.dirichlet(np.ones(rng.integers(2, 6)))
        cross = sum(p[i] * p[j] for i in range(p.size) for j in range(p.size) if i != j)
        assert ms.eval_f(ms.concurrence(), p) == pytest.approx(sqrt(2 * cross), abs=1e-12)
        d = 3
        assert ms.eval_f(ms.gbc(d), p) == pytest.approx(sqrt(d / (d - 1) * cross), abs=1e-12)
        assert ms.eval_f(ms.entropy(), p) == pytest.approx(-sum(x * log2(x) for x in p if x > 0), abs=1e-12)


def test_eval_f_rejects_off_simplex():
    with pytest.raises(NotASimplexVector):
        ms.eval_f(ms.concurrence(), [0.5, 0.6])
    with pytest.raises(NotASimplexVector):
        ms.eval_f(ms.entropy(), [1.1, -0.1])
    with pytest.raises(ValidationError):
        ms.ConcaveFunction("renyi")


@settings(max_examples=200, deadline=None)
@given(simplex(), st.randoms(use_true_random=False))
def test_symmetric(p, rnd):
    q = p.copy()
    rnd.shuffle(q)
    for f in KINDS:
        assert ms.eval_f(f, q) == pytest.approx(ms.eval_f(f, p), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 6).flatmap(lambda n: st.tuples(simplex(st.just(n)), simplex(st.just(n)))))
def test_concave_midpoint(pq):
    p, q = pq
    for f in KINDS:
        mid = ms.eval_f(f, (p + q) / 2)
        assert mid >= (ms.eval_f(f, p) + ms.eval_f(f, q)) / 2 - 1e-9


@settings(max_examples=200, deadline=None)
@given(simplex())
def test_vanishes_only_at_vertices(p):
    # entries below the clamp count as zero
    vertex = np.count_nonzero(p >= ms.ZERO_CLAMP) <= 1
    for f in KINDS:
        v = ms.eval_f(f, p)
        if vertex:
            assert v == 0
        else:
            assert v > 0


def test_coherence_examples():
    plus = PureState.from_vector([1, 1])
    np.testing.assert_allclose(ms.coherence_vector(plus), [0.5, 0.5])
    np.testing.assert_allclose(ms.coherence_vector(basis_state(0, [2])), [1, 0])
    psi = PureState((2,), [0.6, 0.8])
    np.testing.assert_allclose(ms.coherence_vector(psi), [0.36, 0.64], atol=1e-15)
    assert ms.coherence_pure(ms.concurrence(), plus) == pytest.approx(1)
    for f in KINDS:
        assert ms.coherence_pure(f, basis_state(2, [3])) == 0
    assert ms.coherence_pure(ms.concurrence(), psi) == pytest.approx(2 * 0.6 * 0.8, abs=1e-14)


def test_l1_coherence():
    rho = DensityMatrix((2,), np.array([[0.5, 0.4], [0.4, 0.5]]))
    assert ms.l1_coherence(rho) == pytest.approx(0.8)
    assert ms.l1_coherence(DensityMatrix((3,), np.diag([0.2, 0.3, 0.5]))) == 0
    for d in (2, 3, 5):
        assert ms.l1_coherence(DensityMatrix((d,), np.full((d, d), 1 / d))) == pytest.approx(d - 1)


def test_qubit_concurrence_coherence_equals_l1():
    for seed in range(100):
        psi = random_pure_state([2], seed=seed)
        c0, c1 = psi.amplitudes
        assert ms.coherence_pure(ms.concurrence(), psi) == pytest.approx(2 * abs(c0 * c1), abs=1e-12)
        assert ms.l1_coherence(psi.dm()) == pytest.approx(2 * abs(c0 * c1), abs=1e-12)


def test_gme_examples(ghz3, w3):
    f = ms.concurrence()
    for g in enumerate_bipartitions(3):
        assert ms.e_f_gamma_pure(f, ghz3, g) == pytest.approx(1, abs=1e-12)
        assert ms.e_f_gamma_pure(f, w3, g) == pytest.approx(2 * sqrt(2) / 3, abs=1e-12)
    assert ms.e_min_gme_pure(f, ghz3) == pytest.approx(1, abs=1e-12)
    assert ms.g_geo_gme_pure(f, ghz3) == pytest.approx(1, abs=1e-12)
    assert ms.e_min_gme_pure(f, w3) == pytest.approx(2 * sqrt(2) / 3, abs=1e-12)
    assert ms.g_geo_gme_pure(f, w3) == pytest.approx(2 * sqrt(2) / 3, abs=1e-12)
    h = -(1 / 3) * log2(1 / 3) - (2 / 3) * log2(2 / 3)
    assert ms.e_min_gme_pure(ms.entropy(), w3) == pytest.approx(h, abs=1e-12)


def test_alpha_beta_ghz():
    a, b = 0.6, 0.8
    v = np.zeros(8)
    v[0], v[7] = a, b
    psi = PureState((2, 2, 2), v)
    for g in enumerate_bipartitions(3):
        assert ms.e_f_gamma_pure(ms.concurrence(), psi, g) == pytest.approx(2 * a * b, abs=1e-12)


def test_biseparable_zero():
    bell = np.array([1, 0, 0, 1]) / sqrt(2)
    psi = PureState((2, 2, 2), np.kron(bell, [0.6, 0.8]))
    for f in KINDS:
        val, gamma = ms.e_min_gme_pure(f, psi, return_argmin=True)
        assert val == 0
        assert str(gamma) == "12|3"
        assert ms.e_f_gamma_pure(f, psi, gamma) == 0
        assert ms.g_geo_gme_pure(f, psi) == 0
    assert ms.e_f_gamma_pure(ms.concurrence(), psi, Bipartition((1,), 3)) > 0


def test_argmin_tie_goes_to_first(ghz3):
    _, gamma = ms.e_min_gme_pure(ms.concurrence(), ghz3, return_argmin=True)
    assert str(gamma) == "1|23"


def test_gbc_uses_bipartition_dimension():
    # 2 x 3 bipartite state with Schmidt vector (1/2, 1/2): smaller side is a qubit
    v = np.zeros(6)
    v[0] = v[4] = 1 / sqrt(2)
    psi = PureState((2, 3), v)
    g = Bipartition((1,), 2)
    assert ms.e_f_gamma_pure(ms.gbc(7), psi, g) == pytest.approx(1.0, abs=1e-12)


def _c_alpha_oracle(n):
    subsets = {frozenset(s) for k in range(1, n) for s in itertools.combinations(range(n), k)}
    return len({frozenset([s, frozenset(range(n)) - s]) for s in subsets})


def test_c_alpha():
    assert ms.c_alpha(3) == 3
    assert ms.c_alpha(4) == 7
    for n in range(2, 11):
        assert ms.c_alpha(n) == 2 ** (n - 1) - 1 == _c_alpha_oracle(n) == len(enumerate_bipartitions(n))
    with pytest.raises(ValidationError):
        ms.c_alpha(1)


def test_min_geo_max_ordering():
    rng = np.random.default_rng(11)
    for k in range(1000):
        dims = [[2, 2, 2], [2, 2, 2, 2], [2, 3, 2]][k % 3]
        psi = random_pure_state(dims, rng)
        for f in KINDS:
            lo = ms.e_min_gme_pure(f, psi)
            mid = ms.g_geo_gme_pure(f, psi)
            hi = ms.max_e_gamma_pure(f, psi)
            assert lo - 1e-9 <= mid <= hi + 1e-9


def test_e_gamma_local_unitary_invariance():
    for seed in range(100):
        psi = random_pure_state([2, 2, 2], seed=seed)
        u = random_local_unitary([2, 2, 2], seed=500 + seed)
        moved = PureState((2, 2, 2), u @ psi.amplitudes)
        for f in KINDS:
            for g in enumerate_bipartitions(3):
                assert ms.e_f_gamma_pure(f, moved, g) == pytest.approx(ms.e_f_gamma_pure(f, psi, g), abs=1e-9)


def test_e_min_zero_iff_product_across_some_cut():
    rng = np.random.default_rng(4)
    for k in range(200):
        if k % 2:
            psi = random_pure_state([2, 2, 2], rng)
        else:
            a = random_pure_state([2, 2], rng).amplitudes
            b = random_pure_state([2], rng).amplitudes
            psi = PureState((2, 2, 2), np.kron(b, a) if k % 4 else np.kron(a, b))
        product = any(schmidt_vector(psi, g).max() > 1 - 1e-9 for g in enumerate_bipartitions(3))
        for f in KINDS:
            assert (ms.e_min_gme_pure(f, psi) < 1e-6) == product


def test_geo_mean_underflow_returns_zero():
    vals = np.array([[1e-301, 0.5, 0.5]])
    assert ms._geo_mean(vals)[0] == 0
    assert ms._geo_mean(np.array([[0.25, 1.0]]))[0] == pytest.approx(0.5)


def test_xstate_gme_concurrence(ghz3):
    m = np.zeros((8, 8))
    m[0, 0] = m[7, 7] = 0.5
    m[0, 7] = m[7, 0] = 0.4
    assert ms.xstate_gme_concurrence(DensityMatrix((2, 2, 2), m)) == pytest.approx(0.8)
    assert ms.xstate_gme_concurrence(ghz3.dm()) == pytest.approx(1.0)
    diag = DensityMatrix((2, 2, 2), np.diag([0.3, 0, 0, 0, 0, 0, 0, 0.7]))
    assert ms.xstate_gme_concurrence(diag) == 0
    with pytest.raises(NotADiagonalCorrelationState):
        ms.xstate_gme_concurrence(DensityMatrix((2, 2, 2), np.eye(8) / 8))


def test_repeated_digit_indices():
    np.testing.assert_array_equal(ms.repeated_digit_indices((2, 2, 2)), [0, 7])
    np.testing.assert_array_equal(ms.repeated_digit_indices((3, 3)), [0, 4, 8])
    np.testing.assert_array_equal(ms.repeated_digit_indices((2, 3)), [0, 4])
