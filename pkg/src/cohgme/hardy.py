"""Hardy-type tripartite nonlocality test for the X-states
``p|000><000| + r(|000><111| + |111><000|) + (1-p)|111><111|``.

Each party measures one of two projective qubit observables set by an
angle ``t``: outcome 0 is the projector onto ``cos t|0> + sin t|1>`` and
outcome 1 onto ``sin t|0> - cos t|1>``. Party 1 uses ``theta1`` (setting 0)
and ``theta2`` (setting 1); parties 2 and 3 share ``theta3`` and ``theta4``.
The tested combination is

    H = p(000|000) - p(000|100) - p(000|010) - p(000|001)
        - p(110|110) - p(101|101)

with ``p(abc|xyz)`` the probability of outcomes ``abc`` for settings ``xyz``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from math import cos, sin, sqrt
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .core import DensityMatrix
from .errors import PositivityViolated, ValidationError
from .measures import xstate_gme_concurrence

SEED_ANGLES = (np.pi / 2, np.pi / 2, 3 * np.pi / 4, 0.0)
VIOLATION_THRESHOLD = 1e-6

# (outcomes, settings) of the subtracted probabilities
_NEGATIVE_TERMS = (
    ((0, 0, 0), (1, 0, 0)),
    ((0, 0, 0), (0, 1, 0)),
    ((0, 0, 0), (0, 0, 1)),
    ((1, 1, 0), (1, 1, 0)),
    ((1, 0, 1), (1, 0, 1)),
)


@dataclass(frozen=True)
class XStateParams:
    p: float
    r: float

    def __post_init__(self):
        p, r = float(self.p), float(self.r)
        if not 0 <= p <= 1:
            raise PositivityViolated(f"p = {p} outside [0, 1]")
        if r < 0:
            raise ValidationError("r is the modulus of the coherence and must be >= 0")
        if r * r > p * (1 - p) + 1e-12:
            raise PositivityViolated(f"r^2 = {r * r:.6g} exceeds p(1-p) = {p * (1 - p):.6g}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class HardyResult:
    h_max: float
    angles: tuple[float, float, float, float]
    params: XStateParams
    restarts: int
    converged: bool = True


def build_xstate(params: XStateParams) -> DensityMatrix:
    m = np.zeros((8, 8))
    m[0, 0], m[7, 7] = params.p, 1 - params.p
    m[0, 7] = m[7, 0] = params.r
    return DensityMatrix((2, 2, 2), m)


def qubit_state(params: XStateParams) -> DensityMatrix:
    """The single-qubit state whose conversion is :func:`build_xstate`."""
    p, r = params.p, params.r
    return DensityMatrix((2,), np.array([[p, r], [r, 1 - p]]))


def _projector(t: float, outcome: int) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    v = np.array([c, s]) if outcome == 0 else np.array([s, -c])
    return np.outer(v, v)


def _party_angles(angles: Sequence[float]) -> list[tuple[float, float]]:
    if len(angles) == 4:
        t1, t2, t3, t4 = angles
        return [(t1, t2), (t3, t4), (t3, t4)]
    if len(angles) == 6:
        return [(angles[0], angles[1]), (angles[2], angles[3]), (angles[4], angles[5])]
    raise ValidationError("expected 4 shared angles or 6 free angles")


def joint_probability(rho: DensityMatrix, angles, outcomes, settings) -> float:
    op = np.eye(1)
    for (a0, a1), c, x in zip(_party_angles(angles), outcomes, settings):
        op = np.kron(op, _projector(a1 if x else a0, c))
    return float(np.trace(rho.matrix @ op).real)


def hardy_from_state(rho: DensityMatrix, angles: Sequence[float]) -> float:
    """Born-rule evaluation of ``H`` on any three-qubit state.

    ``angles`` is ``(theta1, .., theta4)``, or six angles (two per party)
    for the unshared variant.
    """
    if rho.dims != (2, 2, 2):
        raise ValidationError(f"three-qubit state required, got dims {rho.dims}")
    h = joint_probability(rho, angles, (0, 0, 0), (0, 0, 0))
    for outcomes, settings in _NEGATIVE_TERMS:
        h -= joint_probability(rho, angles, outcomes, settings)
    return h


def hardy_closed_form(angles: Sequence[float], params: XStateParams) -> float:
    t1, t2, t3, t4 = (float(a) for a in angles)
    p, r = params.p, params.r
    s1, c1 = sin(t1), cos(t1)
    s2, c2 = sin(t2), cos(t2)
    s3, c3 = sin(t3), cos(t3)
    s4, c4 = sin(t4), cos(t4)
    return (
        (p - 1) * s3**2 * (2 * c2**2 * c4**2 + (s2**2 - s1**2) * s3**2 + 2 * s1**2 * s4**2)
        + p * c3**2 * (c1**2 * (c3**2 - 2 * c4**2) - c2**2 * c3**2 - 2 * s2**2 * s4**2)
        + r * sin(2 * t3) * (c1 * s1 * (c3 * s3 - sin(2 * t4))
                             - c2 * s2 * (c3 * s3 + sin(2 * t4)))
    )


def _wrap(angles) -> tuple[float, ...]:
    # every term depends on the angles through 2*theta only
    return tuple(float(a) for a in np.mod(angles, np.pi))


def maximize_hardy(params: XStateParams, restarts: int = 32, seed: int = 0,
                   free_angles: bool = False) -> HardyResult:
    """Multistart Nelder-Mead ascent of ``H``.

    The first start is ``SEED_ANGLES``; the rest are uniform on
    ``[0, pi]^4``. With ``free_angles`` the six-angle Born-rule objective
    is used instead of the shared-angle closed form.
    """
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    if free_angles:
        rho = build_xstate(params)
        dim = 6
        seed_x = np.array(SEED_ANGLES[:2] + SEED_ANGLES[2:] + SEED_ANGLES[2:])

        def neg(x):
            return -hardy_from_state(rho, x)
    else:
        dim = 4
        seed_x = np.array(SEED_ANGLES)

        def neg(x):
            return -hardy_closed_form(x, params)

    rng = np.random.default_rng(seed)
    best_val, best_x, all_ok = -np.inf, seed_x, True
    for i in range(restarts):
        x0 = seed_x if i == 0 else rng.uniform(0, np.pi, dim)
        simplex = np.vstack([x0, x0 + 0.3 * np.eye(dim)])
        x, fx, ok = x0, neg(x0), False
        for _ in range(4):
            res = minimize(neg, x, method="Nelder-Mead",
                           options=dict(initial_simplex=simplex, xatol=1e-8, fatol=1e-11,
                                        maxiter=4000 * dim))
            gain = fx - res.fun
            if res.fun <= fx:
                x, fx = res.x, res.fun
            if res.success and gain < 1e-9:
                ok = True
                break
            simplex = np.vstack([x, x + 0.05 * np.eye(dim)])
        all_ok &= ok
        if -fx > best_val + 1e-15:
            best_val, best_x = -fx, x
    angles = _wrap(best_x)
    h = hardy_from_state(build_xstate(params), angles) if free_angles else hardy_closed_form(angles, params)
    return HardyResult(h, angles, params, restarts, all_ok)


def sweep_grid(p_steps: int, r_steps: int) -> list[tuple[int, int, float, float]]:
    """Cells ``(i, j, p, r)`` with ``p`` in ``[0, 0.5]`` and ``r`` in ``[0, sqrt(p(1-p))]``."""
    if p_steps < 2 or r_steps < 2:
        raise ValidationError("sweeps need at least two steps per axis")
    cells = []
    for i, p in enumerate(np.linspace(0, 0.5, p_steps)):
        rmax = sqrt(p * (1 - p))
        for j, r in enumerate(np.linspace(0, rmax, r_steps)):
            cells.append((i, j, float(p), min(float(r), rmax)))
    return cells


def sweep_hardy(p_steps: int = 21, r_steps: int = 21, restarts: int = 32,
                seed: int = 0) -> list[HardyResult]:
    """Maximize ``H`` on every grid cell, ordered by ``(p index, r index)``.

    Cell ``k`` uses seed ``seed + k`` so cells are independent.
    """
    return [maximize_hardy(XStateParams(p, r), restarts, seed + k)
            for k, (_, _, p, r) in enumerate(sweep_grid(p_steps, r_steps))]


CSV_COLUMNS = ("p", "r", "h_max", "theta1", "theta2", "theta3", "theta4", "converged")


def _g(x: float) -> str:
    return f"{x:.12g}"


def sweep_to_csv(rows: Sequence[HardyResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for res in rows:
        w.writerow([_g(res.params.p), _g(res.params.r), _g(res.h_max),
                    *(_g(a) for a in res.angles), str(res.converged).lower()])
    return buf.getvalue()


def monotone_in_r(rows: Sequence[HardyResult], p: float, tol: float = 1e-9) -> bool:
    """Whether ``h_max`` is nondecreasing in ``r`` along the row at ``p``."""
    vals = [res.h_max for res in sorted(rows, key=lambda res: res.params.r)
            if abs(res.params.p - p) < 1e-12]
    return all(b >= a - tol for a, b in zip(vals, vals[1:]))


def gmnl_gms_flags(params: XStateParams, restarts: int = 32, seed: int = 0,
                   result: HardyResult | None = None) -> dict:
    """Nonlocality, steering and GME flags for one X-state.

    ``gmnl`` is computed from the maximized ``H``; ``gms`` copies it because
    the two are equivalent on this family (asserted, not computed);
    ``gme_positive`` uses the closed-form GME concurrence ``2r``. A
    precomputed ``result`` for the same state skips the maximization.
    """
    res = result if result is not None else maximize_hardy(params, restarts, seed)
    gmnl = res.h_max > VIOLATION_THRESHOLD
    return {
        "gmnl": bool(gmnl),
        "gms": bool(gmnl),
        "gme_positive": bool(xstate_gme_concurrence(build_xstate(params)) > 1e-9),
        "h_max": res.h_max,
        "provenance": {"gmnl": "computed", "gms": "asserted_equivalent_to_gmnl",
                       "gme_positive": "computed"},
    }
