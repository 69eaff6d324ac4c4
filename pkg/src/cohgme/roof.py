"""Convex-roof extension of pure-state measures to mixed states.

Decompositions of a rank-``r`` state are parameterized by ``m x r``
isometries ``V``: the unnormalized members are ``sqrt(p_j)|psi_j> =
sum_k V_jk sqrt(lambda_k)|e_k>``. ``V`` is taken as the first ``r`` columns
of ``exp(A)`` with ``A`` anti-Hermitian, so the search space is unconstrained
``R^(m*m)``. Every value returned by :func:`convex_roof` is attained by an
explicit decomposition and is therefore an upper bound on the roof.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from . import measures as ms
from .core import Bipartition, DensityMatrix, PureState, EIG_CLAMP
from .errors import NotAnIsometry, RankMismatch, RankTooHigh, ValidationError

MEASURE_TAGS = ("coherence", "e_min_gme", "e_gamma", "g_geo_gme")
MIN_WEIGHT = 1e-14


@dataclass(frozen=True)
class RoofMeasure:
    """A pure-state functional that can be lifted by the convex roof."""

    tag: str
    f: ms.ConcaveFunction
    gamma: Bipartition | None = None

    def __post_init__(self):
        if self.tag not in MEASURE_TAGS:
            raise ValidationError(f"unknown roof measure {self.tag!r}")
        if self.tag == "e_gamma" and self.gamma is None:
            raise ValidationError("e_gamma needs a bipartition")

    def batch(self, states: np.ndarray, dims) -> np.ndarray:
        if self.tag == "coherence":
            return ms.coherence_batch(self.f, states)
        if self.tag == "e_gamma":
            return ms.e_gamma_batch(self.f, states, dims, self.gamma)
        if self.tag == "e_min_gme":
            return ms.e_min_gme_batch(self.f, states, dims)
        return ms.g_geo_gme_batch(self.f, states, dims)

    def __call__(self, psi: PureState) -> float:
        return float(self.batch(psi.amplitudes[None, :], psi.dims)[0])


def coherence_measure(f):
    return RoofMeasure("coherence", f)


def e_min_gme_measure(f):
    return RoofMeasure("e_min_gme", f)


def g_geo_gme_measure(f):
    return RoofMeasure("g_geo_gme", f)


def e_gamma_measure(f, gamma):
    return RoofMeasure("e_gamma", f, gamma)


@dataclass(frozen=True)
class Decomposition:
    weights: np.ndarray
    states: tuple[PureState, ...]

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.min() < 0 or abs(w.sum() - 1) > 1e-10:
            raise ValidationError("weights are not a probability vector")
        if len(self.states) != w.size:
            raise ValidationError("one weight per state required")
        object.__setattr__(self, "weights", w)

    def mix(self) -> np.ndarray:
        return sum(p * np.outer(s.amplitudes, s.amplitudes.conj())
                   for p, s in zip(self.weights, self.states))

    def average(self, measure: RoofMeasure) -> float:
        return float(sum(p * measure(s) for p, s in zip(self.weights, self.states)))


@dataclass
class RoofConfig:
    """Optimization envelope for :func:`convex_roof`.

    ``ensemble_size=None`` means ``min(rank**2, 16)`` (at least ``rank``).
    """

    ensemble_size: int | None = None
    restarts: int = 16
    max_iterations: int = 2000
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValidationError("restarts must be >= 1")
        if self.ensemble_size is not None and self.ensemble_size < 1:
            raise ValidationError("ensemble_size must be >= 1")

    def size_for(self, rank: int) -> int:
        if self.ensemble_size is None:
            return max(rank, min(rank * rank, 16))
        if self.ensemble_size < rank:
            raise ValidationError(f"ensemble size {self.ensemble_size} below state rank {rank}")
        return self.ensemble_size


@dataclass
class RoofResult:
    value: float
    decomposition: Decomposition
    converged: bool
    restart_values: list[float] = field(default_factory=list)
    best_restart: int = 0
    evaluations: int = 0
    params: np.ndarray | None = None
    ensemble_size: int = 1


# isometry parameterization -------------------------------------------------


def n_params(m: int) -> int:
    return m * m


@lru_cache(maxsize=None)
def _hermitian_basis(m: int) -> np.ndarray:
    """``(m*m, m, m)`` basis mapping parameters to the Hermitian generator."""
    basis = np.zeros((m * m, m, m), dtype=np.complex128)
    for i in range(m):
        basis[i, i, i] = 1
    iu = list(zip(*np.triu_indices(m, 1)))
    k = len(iu)
    for n, (i, j) in enumerate(iu):
        # A_ij = x + i y  ->  H = -i A has H_ij = y - i x
        basis[m + n, i, j], basis[m + n, j, i] = -1j, 1j
        basis[m + k + n, i, j], basis[m + k + n, j, i] = 1, 1
    return basis.reshape(m * m, m * m)


def antihermitian(params: np.ndarray, m: int) -> np.ndarray:
    """Anti-Hermitian matrix from ``m*m`` reals: ``m`` imaginary diagonal
    entries, then real and imaginary parts of the strict upper triangle."""
    return 1j * _hermitian(params, m)


def _hermitian(params: np.ndarray, m: int) -> np.ndarray:
    return (np.asarray(params, float) @ _hermitian_basis(m)).reshape(m, m)


def isometry_from_params(params: np.ndarray, m: int, r: int) -> np.ndarray:
    w, q = np.linalg.eigh(_hermitian(params, m))
    u = (q * np.exp(1j * w)) @ q.conj().T
    return u[:, :r]


def embed_params(params: np.ndarray, m: int, new_m: int) -> np.ndarray:
    """Parameters for ``new_m`` whose isometry is the old one padded with zero rows."""
    if new_m < m:
        raise ValidationError("can only embed into a larger ensemble")
    a = antihermitian(np.asarray(params, float), m)
    big = np.zeros((new_m, new_m), dtype=np.complex128)
    big[:m, :m] = a
    iu = np.triu_indices(new_m, 1)
    return np.concatenate([big[np.diag_indices(new_m)].imag, big[iu].real, big[iu].imag])


def _spectral(rho: DensityMatrix):
    w, v = rho.eigh()
    r = int(np.count_nonzero(w > EIG_CLAMP))
    return w[:r], v[:, :r]


def _members(v: np.ndarray, lam: np.ndarray, vecs: np.ndarray):
    """Weights and normalized member vectors (rows) for isometry ``v``."""
    x = v @ (np.sqrt(lam)[:, None] * vecs.T)
    w = np.einsum("ij,ij->i", x.conj(), x).real
    keep = w >= MIN_WEIGHT
    return w[keep], x[keep] / np.sqrt(w[keep])[:, None]


def decomposition_from_isometry(rho: DensityMatrix, v) -> Decomposition:
    v = np.asarray(v, dtype=np.complex128)
    lam, vecs = _spectral(rho)
    if v.ndim != 2 or v.shape[1] != lam.size:
        raise RankMismatch(f"isometry has {v.shape[-1]} columns, state rank is {lam.size}")
    if np.abs(v.conj().T @ v - np.eye(v.shape[1])).max() > 1e-9:
        raise NotAnIsometry("V^dagger V differs from the identity")
    w, x = _members(v, lam, vecs)
    w = w / w.sum()
    return Decomposition(w, tuple(PureState(rho.dims, row / np.linalg.norm(row)) for row in x))


def _objective(measure: RoofMeasure, rho: DensityMatrix, m: int) -> Callable[[np.ndarray], float]:
    lam, vecs = _spectral(rho)
    r = lam.size
    b = np.sqrt(lam)[:, None] * vecs.T
    dims = rho.dims

    def fun(params):
        x = isometry_from_params(params, m, r) @ b
        w = np.einsum("ij,ij->i", x.conj(), x).real
        keep = w >= MIN_WEIGHT
        w = w[keep]
        states = x[keep] / np.sqrt(w)[:, None]
        return float(w @ measure.batch(states, dims))

    return fun


def _result(measure, rho, m, params, value, **kw) -> RoofResult:
    lam, _ = _spectral(rho)
    dec = decomposition_from_isometry(rho, isometry_from_params(params, m, lam.size))
    return RoofResult(value=value, decomposition=dec, params=np.asarray(params), ensemble_size=m, **kw)


def convex_roof(measure: RoofMeasure, rho: DensityMatrix, cfg: RoofConfig | None = None,
                warm_start: RoofResult | None = None) -> RoofResult:
    """Minimize the ensemble average of ``measure`` over decompositions of ``rho``.

    Restart 0 starts from the eigendecomposition (or from ``warm_start``
    embedded into the current ensemble size, when given); the other restarts
    start from random isometries drawn from seed-derived substreams. Each
    restart is a Nelder-Mead search; the best restart wins, ties going to
    the lower index.
    """
    cfg = cfg or RoofConfig()
    lam, vecs = _spectral(rho)
    r = lam.size
    if r == 1:
        psi = PureState(rho.dims, vecs[:, 0])
        val = measure(psi)
        return RoofResult(val, Decomposition(np.ones(1), (psi,)), True, [val], 0, 1,
                          np.zeros(1), 1)

    m = cfg.size_for(r)
    fun = _objective(measure, rho, m)
    k = n_params(m)
    streams = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)

    x_first = np.zeros(k)
    if warm_start is not None and warm_start.params is not None and warm_start.ensemble_size > 1:
        x_first = embed_params(warm_start.params, warm_start.ensemble_size, m)

    best = (np.inf, 0, x_first)
    values, evals, converged = [], 0, False
    for i, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        x0 = x_first if i == 0 else rng.normal(scale=np.pi / 2, size=k)
        x, val, n, ok = _descend(fun, x0, cfg, rng)
        values.append(val)
        evals += n
        converged |= ok
        if val < best[0] - 1e-12:
            best = (val, i, x)

    val, i, x = best
    return _result(measure, rho, m, x, val, converged=converged, restart_values=values,
                   best_restart=i, evaluations=evals)


def _descend(fun, x0, cfg: RoofConfig, rng, step: float = 0.4, rounds: int = 3):
    """Nelder-Mead from ``x0``, re-seeded with a fresh simplex at the optimum
    until a round gains less than ``cfg.tol``."""
    k = x0.size
    x, fx = x0, fun(x0)
    evals, ok = 1, False
    if fx <= 0:
        # the objective is nonnegative, nothing left to gain
        return x, fx, evals, True
    budget = cfg.max_iterations
    for _ in range(rounds):
        simplex = np.vstack([x, x + step * np.eye(k)])
        res = minimize(fun, x, method="Nelder-Mead",
                       options=dict(initial_simplex=simplex, maxiter=budget, xatol=1e-4,
                                    fatol=cfg.tol * 0.1, adaptive=True))
        evals += res.nfev
        gain = fx - res.fun
        if res.fun < fx:
            x, fx = res.x, float(res.fun)
        if res.success and gain < cfg.tol:
            ok = True
            break
        step /= 2
    return x, fx, evals, ok


# brute-force oracle --------------------------------------------------------


def _givens(m: int, i: int, j: int, theta: float, phi: float) -> np.ndarray:
    g = np.eye(m, dtype=np.complex128)
    c, s = np.cos(theta), np.sin(theta)
    g[i, i], g[j, j] = c, c
    g[i, j] = -np.exp(1j * phi) * s
    g[j, i] = np.exp(-1j * phi) * s
    return g


_ORACLE_PAIRS = {2: [(0, 1)], 3: [(0, 1), (0, 2), (1, 2)], 4: [(0, 1), (1, 2), (2, 3)]}


def brute_force_roof(measure: RoofMeasure, rho: DensityMatrix, grid_resolution: int = 64,
                     coarse_resolution: int = 5) -> float:
    """Grid-search upper bound on the roof for states of rank <= 2, dimension <= 4.

    Two-member ensembles scan the full ``(theta, phi)`` family of 2x2
    unitaries at ``grid_resolution`` points per angle. Three- and
    four-member ensembles scan products of three Givens rotations at
    ``coarse_resolution`` points per angle.
    """
    w, v = np.linalg.eigh(rho.matrix)
    w, v = w[::-1], v[:, ::-1]
    r = int(np.count_nonzero(w > EIG_CLAMP))
    if r > 2 or rho.dim > 4:
        raise RankTooHigh(f"oracle handles rank <= 2 and dimension <= 4 (got rank {r}, dim {rho.dim})")
    if r == 1:
        return measure(PureState.from_vector(v[:, 0], rho.dims))
    b = np.sqrt(w[:2])[:, None] * v[:, :2].T

    best = np.inf
    for m in (2, 3, 4):
        res = grid_resolution if m == 2 else coarse_resolution
        thetas = np.linspace(0, np.pi / 2, res)
        phis = np.linspace(0, 2 * np.pi, 2 * res, endpoint=False)
        pairs = _ORACLE_PAIRS[m]
        isos = []
        for angles in itertools.product(*([thetas, phis] * len(pairs))):
            u = np.eye(m, dtype=np.complex128)
            for (i, j), th, ph in zip(pairs, angles[::2], angles[1::2]):
                u = u @ _givens(m, i, j, th, ph)
            isos.append(u[:, :2])
        isos = np.array(isos)
        for chunk in np.array_split(isos, max(1, len(isos) // 4096)):
            x = chunk @ b  # (n, m, D)
            wt = np.einsum("nij,nij->ni", x.conj(), x).real
            flat = x.reshape(-1, x.shape[-1])
            wf = wt.reshape(-1)
            vals = np.zeros_like(wf)
            ok = wf >= MIN_WEIGHT
            vals[ok] = measure.batch(flat[ok] / np.sqrt(wf[ok])[:, None], rho.dims)
            best = min(best, float((wt * vals.reshape(wt.shape)).sum(axis=1).min()))
    return best
