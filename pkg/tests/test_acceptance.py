"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (also repeated in the
terminal summary). Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import csv
import time

import numpy as np
import pytest

from cohgme import measures as ms
from cohgme.cli import main
from cohgme.core import (
    DensityMatrix,
    PureState,
    enumerate_bipartitions,
    random_density_matrix,
    random_local_unitary,
    random_pure_state,
    schmidt_vector,
)
from cohgme.hardy import (
    XStateParams,
    build_xstate,
    hardy_closed_form,
    hardy_from_state,
    maximize_hardy,
)
from cohgme.roof import (
    RoofConfig,
    brute_force_roof,
    coherence_measure,
    convex_roof,
    e_min_gme_measure,
    g_geo_gme_measure,
)
from cohgme.uio import build_uio, convert

from conftest import record

pytestmark = pytest.mark.acceptance


def test_criterion_1_theorem3_pure_exact():
    rng = np.random.default_rng(2024)
    combos = [(d, n) for d in (2, 3, 4) for n in (2, 3)]
    worst = 0.0
    for k in range(200):
        d, n = combos[k % len(combos)]
        psi = random_pure_state([d], rng)
        conv = convert(psi, n)
        for f in (ms.concurrence(), ms.gbc(d), ms.entropy()):
            c = ms.coherence_pure(f, psi)
            worst = max(worst, abs(c - ms.e_min_gme_pure(f, conv)), abs(c - ms.g_geo_gme_pure(f, conv)))
    ok = worst <= 1e-10
    record(1, ok, f"200 pure states, 3 functions, max |C - E| = {worst:.2e} (tol 1e-10)")
    assert ok


def test_criterion_2_theorem3_mixed_roofs():
    cfg = RoofConfig(restarts=4)
    f = ms.concurrence()
    worst = 0.0
    t0 = time.perf_counter()
    for seed in range(20):
        rho = random_density_matrix([2], 2, seed=seed)
        l1 = ms.l1_coherence(rho)
        c = convex_roof(coherence_measure(f), rho, cfg).value
        e = convex_roof(e_min_gme_measure(f), convert(rho, 3), cfg).value
        worst = max(worst, abs(c - l1), abs(e - l1))
    ok = worst <= 2e-3
    record(2, ok, f"20 rank-2 qubits, max |roof - l1| = {worst:.2e} (tol 2e-3), "
                  f"{time.perf_counter() - t0:.0f}s")
    assert ok


def test_criterion_3_geo_above_min():
    cfg = RoofConfig(restarts=2)
    f = ms.concurrence()
    worst = np.inf
    t0 = time.perf_counter()
    for seed in range(50):
        rho = random_density_matrix([2, 2, 2], 1 + seed % 2, seed=seed)
        e = convex_roof(e_min_gme_measure(f), rho, cfg).value
        g = convex_roof(g_geo_gme_measure(f), rho, cfg).value
        worst = min(worst, g - e)
    ok = worst >= -2e-3
    record(3, ok, f"50 three-qubit states, min(G_geo - E_min) = {worst:.2e} (need >= -2e-3), "
                  f"{time.perf_counter() - t0:.0f}s")
    assert ok


def test_criterion_4_hardy_cross_oracle():
    rng = np.random.default_rng(77)
    worst = 0.0
    for _ in range(10_000):
        p = rng.uniform(0, 1)
        params = XStateParams(p, rng.uniform(0, np.sqrt(p * (1 - p))))
        angles = rng.uniform(0, np.pi, 4)
        worst = max(worst, abs(hardy_closed_form(angles, params)
                               - hardy_from_state(build_xstate(params), angles)))
    ok = worst <= 1e-12
    record(4, ok, f"10^4 points, max |closed form - Born rule| = {worst:.2e} (tol 1e-12)")
    assert ok


def test_criterion_5_hardy_sign_structure(tmp_path):
    t0 = time.perf_counter()
    out = tmp_path / "sweep.csv"
    assert main(["hardy", "sweep", "--p-steps", "21", "--r-steps", "21", "--restarts", "32",
                 "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 21 * 21
    zero = [float(r["h_max"]) for r in rows if float(r["r"]) == 0]
    positive = [float(r["h_max"]) for r in rows if float(r["r"]) >= 0.02]
    seed_only = maximize_hardy(XStateParams(0.5, 0.4), restarts=1).h_max
    ok = max(zero) <= 1e-8 and min(positive) > 1e-6 and seed_only > 0
    record(5, ok, f"21x21 sweep: max h(r=0) = {max(zero):.2e} (<= 1e-8), "
                  f"min h(r>=0.02) = {min(positive):.2e} (> 1e-6) over {len(positive)} cells, "
                  f"seed-only h(0.5, 0.4) = {seed_only:.4f}, {time.perf_counter() - t0:.0f}s")
    assert ok


def test_criterion_6_structural_invariants():
    failures = []
    for d in (2, 3, 4):
        for n in (2, 3, 4):
            op = build_uio(d, [d] * (n - 1))
            if not (op.is_unitary() and op.is_permutation()):
                failures.append(f"uio d={d} N={n}")
    for n in range(2, 11):
        if ms.c_alpha(n) != 2 ** (n - 1) - 1:
            failures.append(f"c_alpha({n})")

    rng = np.random.default_rng(6)
    lu_worst = 0.0
    for k in range(1000):
        dims = [[2, 2, 2], [2, 3, 2], [3, 3]][k % 3]
        psi = random_pure_state(dims, rng)
        moved = PureState(tuple(dims), random_local_unitary(dims, rng) @ psi.amplitudes)
        for g in enumerate_bipartitions(len(dims)):
            lu_worst = max(lu_worst, np.abs(schmidt_vector(psi, g) - schmidt_vector(moved, g)).max())
    if lu_worst > 1e-9:
        failures.append(f"local-unitary invariance {lu_worst:.1e}")

    cfg = RoofConfig(restarts=2)
    cases = [(coherence_measure(ms.entropy()), [2]), (coherence_measure(ms.concurrence()), [3]),
             (e_min_gme_measure(ms.concurrence()), [2, 2, 2])]
    gap = -np.inf
    for i, (meas, dims) in enumerate(cases):
        r1 = random_density_matrix(dims, 2, seed=300 + i)
        r2 = random_density_matrix(dims, 2, seed=400 + i)
        v1, v2 = convex_roof(meas, r1, cfg).value, convex_roof(meas, r2, cfg).value
        for t in (0.25, 0.5, 0.75):
            mix = DensityMatrix(tuple(dims), t * r1.matrix + (1 - t) * r2.matrix)
            gap = max(gap, convex_roof(meas, mix, cfg).value - (t * v1 + (1 - t) * v2))
    if gap > 2e-3:
        failures.append(f"convexity gap {gap:.1e}")

    ok = not failures
    record(6, ok, f"UIO d,N<=4; c_alpha n=2..10; LU invariance on 1000 states (max {lu_worst:.1e}); "
                  f"convexity max excess {gap:.1e} (tol 2e-3)" + (f"; failed: {failures}" if failures else ""))
    assert ok


def test_criterion_7_brute_force_oracle():
    t0 = time.perf_counter()
    meas = coherence_measure(ms.entropy())
    lo, hi = np.inf, -np.inf
    for seed in range(10):
        rho = random_density_matrix([2], 2, seed=700 + seed)
        opt = convex_roof(meas, rho, RoofConfig(seed=seed)).value
        grid = brute_force_roof(meas, rho)
        lo, hi = min(lo, opt - grid), max(hi, opt - grid)
    ok = hi <= 1e-6 and lo >= -1e-2
    record(7, ok, f"10 rank-2 qubits, optimizer - oracle in [{lo:.2e}, {hi:.2e}] "
                  f"(need [-1e-2, 1e-6]), {time.perf_counter() - t0:.0f}s")
    assert ok
