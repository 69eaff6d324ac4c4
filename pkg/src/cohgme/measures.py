"""Concave functions on the probability simplex and the pure-state measures
built from them (coherence, bipartite entanglement, min- and geo-GME).

Batched helpers (``*_batch``) take a stack of state vectors of shape
``(m, D)`` and are what the convex-roof optimizer calls in its inner loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, prod
from typing import Sequence

import numpy as np

from .core import (
    Bipartition,
    DensityMatrix,
    PureState,
    all_schmidt_vectors,
    enumerate_bipartitions,
    schmidt_vectors,
)
from .errors import NotADiagonalCorrelationState, NotASimplexVector, ValidationError

ZERO_CLAMP = 1e-12
SIMPLEX_TOL = 1e-9
KINDS = ("concurrence", "gbc", "entropy")


@dataclass(frozen=True)
class ConcaveFunction:
    """One of the named symmetric concave functions.

    ``kind`` is ``"concurrence"``, ``"gbc"`` or ``"entropy"``. For ``"gbc"``
    the normalization uses ``d_min``; when it is ``None`` the length of the
    probability vector is used. Measures evaluated across a bipartition
    always pass the smaller side dimension explicitly.
    """

    kind: str
    d_min: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown concave function {self.kind!r}; expected one of {KINDS}")
        if self.d_min is not None and self.d_min < 2:
            raise ValidationError("d_min must be at least 2")

    def __call__(self, p) -> float:
        return eval_f(self, p)

    def batch(self, p: np.ndarray, d_min: int | None = None) -> np.ndarray:
        """Evaluate on each row of ``p`` (no simplex check)."""
        p = np.where(p < ZERO_CLAMP, 0.0, p)
        s = p.sum(axis=-1, keepdims=True)
        p = p / np.where(s > 0, s, 1.0)
        if self.kind == "entropy":
            with np.errstate(divide="ignore", invalid="ignore"):
                terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
            return np.maximum(-terms.sum(axis=-1), 0.0)
        # sum_{i != j} p_i p_j as sum_i p_i * (sum of the others); s^2 - sum p^2
        # cancels badly near a vertex
        zero = np.zeros(p.shape[:-1] + (1,))
        before = np.concatenate([zero, np.cumsum(p[..., :-1], axis=-1)], axis=-1)
        after = np.concatenate([np.flip(np.cumsum(np.flip(p[..., 1:], -1), axis=-1), -1), zero], axis=-1)
        cross = (p * (before + after)).sum(axis=-1)
        if self.kind == "concurrence":
            return np.sqrt(2 * cross)
        d = d_min if d_min is not None else (self.d_min or p.shape[-1])
        return np.sqrt(d / (d - 1) * cross)


def concurrence() -> ConcaveFunction:
    return ConcaveFunction("concurrence")


def gbc(d_min: int | None = None) -> ConcaveFunction:
    return ConcaveFunction("gbc", d_min)


def entropy() -> ConcaveFunction:
    return ConcaveFunction("entropy")


def eval_f(f: ConcaveFunction, p, d_min: int | None = None) -> float:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise NotASimplexVector("expected a nonempty 1-D probability vector")
    if p.min() < -SIMPLEX_TOL or abs(p.sum() - 1) > SIMPLEX_TOL:
        raise NotASimplexVector(f"{p} is not on the probability simplex")
    if f.kind == "gbc" and (d_min or f.d_min or p.size) < 2:
        raise ValidationError("GBC needs d_min >= 2")
    return float(f.batch(p[None, :], d_min)[0])


def coherence_vector(psi: PureState) -> np.ndarray:
    return np.abs(psi.amplitudes) ** 2


def coherence_pure(f: ConcaveFunction, psi: PureState) -> float:
    return eval_f(f, coherence_vector(psi))


def l1_coherence(rho: DensityMatrix) -> float:
    a = np.abs(rho.matrix)
    return float(a.sum() - np.trace(a))


def e_f_gamma_pure(f: ConcaveFunction, psi: PureState, gamma: Bipartition) -> float:
    return float(e_gamma_batch(f, psi.amplitudes[None, :], psi.dims, gamma)[0])


def e_gamma_batch(f: ConcaveFunction, states: np.ndarray, dims: Sequence[int], gamma: Bipartition) -> np.ndarray:
    lam = schmidt_vectors(states, dims, gamma)
    return f.batch(lam, d_min=min(gamma.side_dims(dims)))


def _all_gammas(f: ConcaveFunction, states: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    """Matrix of E_gamma values, shape ``(m, n_bipartitions)``."""
    lams = all_schmidt_vectors(states, dims)
    return np.stack([f.batch(lam, d_min=lam.shape[-1]) for lam in lams], axis=-1)


def e_min_gme_batch(f, states, dims) -> np.ndarray:
    return _all_gammas(f, states, dims).min(axis=-1)


def g_geo_gme_batch(f, states, dims) -> np.ndarray:
    return _geo_mean(_all_gammas(f, states, dims))


def coherence_batch(f, states, dims=None) -> np.ndarray:
    return f.batch(np.abs(states) ** 2)


def _geo_mean(vals: np.ndarray) -> np.ndarray:
    # log domain; any factor at or below 1e-300 makes the mean zero
    ok = (vals > 1e-300).all(axis=-1)
    safe = np.where(vals > 1e-300, vals, 1.0)
    return np.where(ok, np.exp(np.log(safe).mean(axis=-1)), 0.0)


def e_min_gme_pure(f: ConcaveFunction, psi: PureState, return_argmin: bool = False):
    """Minimum of ``E_gamma`` over all bipartitions.

    With ``return_argmin`` the minimizing bipartition is returned too; ties go
    to the first bipartition in canonical order.
    """
    vals = _all_gammas(f, psi.amplitudes[None, :], psi.dims)[0]
    k = int(np.argmin(vals))
    if return_argmin:
        return float(vals[k]), enumerate_bipartitions(psi.n_parties)[k]
    return float(vals[k])


def c_alpha(n: int) -> int:
    """Normalizing exponent of the geometric mean: number of unordered bipartitions."""
    if n < 2:
        raise ValidationError(f"need at least two parties, got {n}")
    if n % 2:
        return sum(comb(n, m) for m in range(1, (n - 1) // 2 + 1))
    return sum(comb(n, m) for m in range(1, (n - 2) // 2 + 1)) + comb(n, n // 2) // 2


def g_geo_gme_pure(f: ConcaveFunction, psi: PureState) -> float:
    vals = _all_gammas(f, psi.amplitudes[None, :], psi.dims)[0]
    return float(_geo_mean(vals[None, :])[0])


def max_e_gamma_pure(f: ConcaveFunction, psi: PureState) -> float:
    return float(_all_gammas(f, psi.amplitudes[None, :], psi.dims)[0].max())


def repeated_digit_indices(dims: Sequence[int]) -> np.ndarray:
    """Flat indices of ``|ii...i>`` for ``i < min(dims)``."""
    strides = [prod(dims[k + 1:]) for k in range(len(dims))]
    return np.array([i * sum(strides) for i in range(min(dims))])


def compress_diagonal_correlations(rho: DensityMatrix, tol: float = 1e-12) -> np.ndarray:
    """Return ``s`` with ``rho = sum_ij s_ij |ii..i><jj..j|``.

    Raises :class:`NotADiagonalCorrelationState` if ``rho`` has weight
    outside the repeated-digit rows and columns.
    """
    idx = repeated_digit_indices(rho.dims)
    outside = np.abs(rho.matrix).copy()
    outside[np.ix_(idx, idx)] = 0
    if outside.max() > tol:
        raise NotADiagonalCorrelationState(
            f"entry of size {outside.max():.3g} outside the repeated-digit support")
    return rho.matrix[np.ix_(idx, idx)]


def xstate_gme_concurrence(rho: DensityMatrix) -> float:
    """Sum of off-diagonal moduli of the compressed matrix.

    This is the GME concurrence when every party is a qubit.
    """
    a = np.abs(compress_diagonal_correlations(rho))
    return float(a.sum() - np.trace(a))
