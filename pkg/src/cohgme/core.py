"""State containers, tensor algebra, reductions and Schmidt data.

Parties are numbered ``1..N``. The computational basis is ordered
big-endian: party 1 is the most significant digit.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyKeepSet,
    IndexOutOfRange,
    InvalidRank,
    NotHermitian,
    NotNormalized,
    NotPositive,
    TraceNotOne,
    ValidationError,
)

TOL = 1e-10
EIG_CLAMP = 1e-12


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 2 for d in dims):
        raise DimensionMismatch(f"subsystem dimensions must each be >= 2, got {dims}")
    return dims


@dataclass(frozen=True)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        amp = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amp.size != prod(dims):
            raise DimensionMismatch(f"{amp.size} amplitudes for dims {dims}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1) > TOL:
            raise NotNormalized(f"state norm {norm!r} differs from 1")
        amp.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_vector(cls, vec, dims: Sequence[int] | None = None) -> "PureState":
        """Normalize ``vec`` and wrap it. ``dims`` defaults to a single system."""
        vec = np.asarray(vec, dtype=np.complex128).reshape(-1)
        if dims is None:
            dims = (vec.size,)
        return cls(tuple(dims), vec / np.linalg.norm(vec))

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    def dm(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = _check_dims(self.dims)
        m = np.array(self.matrix, dtype=np.complex128)
        _validate_matrix(m, dims)
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (descending, clamped at zero) and matching eigenvectors."""
        w, v = np.linalg.eigh(self.matrix)
        w, v = w[::-1], v[:, ::-1]
        return np.where(w < EIG_CLAMP, 0.0, w), v

    def rank(self) -> int:
        w, _ = self.eigh()
        return int(np.count_nonzero(w > EIG_CLAMP))


def _validate_matrix(m: np.ndarray, dims: tuple[int, ...]) -> None:
    side = prod(dims)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix of shape {m.shape} is not square")
    if m.shape[0] != side:
        raise DimensionMismatch(f"matrix side {m.shape[0]} != prod(dims) = {side}")
    if np.abs(m - m.conj().T).max() > TOL:
        raise NotHermitian("matrix is not Hermitian")
    tr = np.trace(m).real
    if abs(tr - 1) > TOL:
        raise TraceNotOne(f"trace {tr!r} differs from 1")
    wmin = np.linalg.eigvalsh(m).min()
    if wmin < -TOL:
        raise NotPositive(f"minimum eigenvalue {wmin!r} is negative")


def validate_density_matrix(m, dims: Sequence[int]) -> DensityMatrix:
    """Check ``m`` and return it as a :class:`DensityMatrix`.

    Nothing is repaired: any violation raises the matching
    :class:`~cohgme.errors.ValidationError` subclass.
    """
    return DensityMatrix(tuple(dims), np.asarray(m, dtype=np.complex128))


def tensor_product(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    return DensityMatrix(a.dims + b.dims, np.kron(a.matrix, b.matrix))


def basis_state(index: int, dims: Sequence[int]) -> PureState:
    vec = np.zeros(prod(dims), dtype=np.complex128)
    vec[index] = 1
    return PureState(tuple(dims), vec)


def _parties(keep: Iterable[int], n: int) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise EmptyKeepSet("at least one party must be kept")
    if keep[0] < 1 or keep[-1] > n:
        raise IndexOutOfRange(f"party indices {keep} outside 1..{n}")
    return keep


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced state on the parties in ``keep`` (1-based)."""
    n = rho.n_parties
    keep = _parties(keep, n)
    drop = [k for k in range(1, n + 1) if k not in keep]
    t = rho.matrix.reshape(rho.dims * 2)
    # bra axes sit at offset n; trace dropped parties highest-index first so
    # the remaining axis numbers stay valid
    for k in reversed(drop):
        cur = t.ndim // 2
        t = np.trace(t, axis1=k - 1, axis2=k - 1 + cur)
    d = prod(rho.dims[k - 1] for k in keep)
    out = t.reshape(d, d)
    out = (out + out.conj().T) / 2
    return DensityMatrix(tuple(rho.dims[k - 1] for k in keep), out)


@dataclass(frozen=True, order=True)
class Bipartition:
    """Unordered split ``gamma | complement``, stored with party 1 in ``gamma``."""

    gamma: tuple[int, ...]
    n_parties: int

    def __post_init__(self):
        n = int(self.n_parties)
        g = tuple(sorted(set(int(k) for k in self.gamma)))
        if n < 2:
            raise ValidationError("a bipartition needs at least two parties")
        if not g or len(g) >= n or g[0] < 1 or g[-1] > n:
            raise ValidationError(f"{g} is not a nonempty proper subset of 1..{n}")
        if 1 not in g:
            g = tuple(k for k in range(1, n + 1) if k not in g)
        object.__setattr__(self, "gamma", g)
        object.__setattr__(self, "n_parties", n)

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(k for k in range(1, self.n_parties + 1) if k not in self.gamma)

    def side_dims(self, dims: Sequence[int]) -> tuple[int, int]:
        return (prod(dims[k - 1] for k in self.gamma),
                prod(dims[k - 1] for k in self.complement))

    def __str__(self):
        return "".join(map(str, self.gamma)) + "|" + "".join(map(str, self.complement))


@lru_cache(maxsize=None)
def _bipartitions(n: int) -> tuple[Bipartition, ...]:
    rest = range(2, n + 1)
    return tuple(Bipartition((1,) + extra, n)
                 for size in range(0, n - 1)
                 for extra in itertools.combinations(rest, size))


def enumerate_bipartitions(n: int) -> list[Bipartition]:
    """All ``2**(n-1) - 1`` canonical bipartitions of ``n`` parties.

    Ordered by size of ``gamma``, then lexicographically.
    """
    if n < 2:
        raise ValidationError(f"need at least two parties, got {n}")
    return list(_bipartitions(n))


@lru_cache(maxsize=None)
def _split_plan(dims: tuple[int, ...], gamma: Bipartition) -> tuple[tuple[int, ...], int, int]:
    """Axis order putting the smaller side first, and the two side dimensions."""
    dg, dr = gamma.side_dims(dims)
    first, second = (gamma.gamma, gamma.complement) if dg <= dr else (gamma.complement, gamma.gamma)
    order = (0,) + first + second
    return order, min(dg, dr), max(dg, dr)


def _reduced_small_side(states: np.ndarray, dims: tuple[int, ...], gamma: Bipartition) -> np.ndarray:
    order, small, big = _split_plan(dims, gamma)
    m = states.shape[0]
    a = states.reshape((m,) + dims).transpose(order).reshape(m, small, big)
    return a @ a.conj().transpose(0, 2, 1)


def _spectra(red: np.ndarray) -> np.ndarray:
    w = np.linalg.eigvalsh(red)[..., ::-1]
    w = np.where(w < EIG_CLAMP, 0.0, w)
    return w / w.sum(axis=-1, keepdims=True)


def schmidt_vectors(states: np.ndarray, dims: Sequence[int], gamma: Bipartition) -> np.ndarray:
    """Batched Schmidt vectors, shape ``(m, min(d_gamma, d_rest))``.

    Uses the eigenvalues of the smaller reduced density matrix; tiny
    eigenvalues are clamped to zero and each row renormalized.
    """
    return _spectra(_reduced_small_side(np.atleast_2d(states), tuple(dims), gamma))


def all_schmidt_vectors(states: np.ndarray, dims: Sequence[int]) -> list[np.ndarray]:
    """Schmidt vectors of every state under every canonical bipartition.

    Reduced matrices of equal size are diagonalized in one batched call.
    Returns one ``(m, d_small)`` array per bipartition, in canonical order.
    """
    dims = tuple(dims)
    states = np.atleast_2d(states)
    gammas = _bipartitions(len(dims))
    groups: dict[int, list[int]] = {}
    for k, g in enumerate(gammas):
        groups.setdefault(_split_plan(dims, g)[1], []).append(k)
    out: list[np.ndarray] = [None] * len(gammas)  # type: ignore[list-item]
    for ks in groups.values():
        red = np.stack([_reduced_small_side(states, dims, gammas[k]) for k in ks])
        spec = _spectra(red)
        for k, s in zip(ks, spec):
            out[k] = s
    return out


def schmidt_vector(psi: PureState, gamma: Bipartition) -> np.ndarray:
    if gamma.n_parties != psi.n_parties:
        raise DimensionMismatch(f"bipartition of {gamma.n_parties} parties for a {psi.n_parties}-party state")
    return schmidt_vectors(psi.amplitudes[None, :], psi.dims, gamma)[0]


def random_pure_state(dims: Sequence[int], seed=None) -> PureState:
    rng = np.random.default_rng(seed)
    d = prod(dims)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(tuple(dims), z / np.linalg.norm(z))


def random_density_matrix(dims: Sequence[int], rank: int | None = None, seed=None) -> DensityMatrix:
    """Normalized ``G G^dagger`` with ``G`` a ``D x rank`` complex Ginibre matrix."""
    d = prod(dims)
    rank = d if rank is None else int(rank)
    if not 1 <= rank <= d:
        raise InvalidRank(f"rank {rank} outside 1..{d}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    m = g @ g.conj().T
    m = (m + m.conj().T) / 2
    return DensityMatrix(tuple(dims), m / np.trace(m).real)


def random_local_unitary(dims: Sequence[int], seed=None) -> np.ndarray:
    """Kronecker product of independent Haar unitaries, one per party."""
    from scipy.stats import unitary_group

    rng = np.random.default_rng(seed)
    u = np.eye(1)
    for d in dims:
        u = np.kron(u, unitary_group.rvs(d, random_state=rng))
    return u


# JSON state format -------------------------------------------------------


def state_to_json(state: PureState | DensityMatrix) -> dict:
    if isinstance(state, PureState):
        a = state.amplitudes
        return {"dims": list(state.dims), "amp_re": a.real.tolist(), "amp_im": a.imag.tolist()}
    m = state.matrix
    return {"dims": list(state.dims), "matrix_re": m.real.tolist(), "matrix_im": m.imag.tolist()}


def state_from_json(obj: dict) -> PureState | DensityMatrix:
    try:
        dims = obj["dims"]
        if "amp_re" in obj:
            amp = np.asarray(obj["amp_re"], float) + 1j * np.asarray(obj.get("amp_im", 0.0), float)
            return PureState(tuple(dims), amp)
        m = np.asarray(obj["matrix_re"], float) + 1j * np.asarray(obj.get("matrix_im", 0.0), float)
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed state object: {exc}") from exc
    return validate_density_matrix(m, dims)


def load_state(path: str | Path) -> PureState | DensityMatrix:
    with open(path) as fh:
        return state_from_json(json.load(fh))


def save_state(state: PureState | DensityMatrix, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_json(state), fh)
        fh.write("\n")


def as_density_matrix(state: PureState | DensityMatrix) -> DensityMatrix:
    return state.dm() if isinstance(state, PureState) else state


def pure_part(rho: DensityMatrix, tol: float = 1e-10) -> PureState | None:
    """Return the state vector if ``rho`` is pure (up to ``tol``), else None."""
    w, v = rho.eigh()
    if w[0] < 1 - tol:
        return None
    return PureState.from_vector(v[:, 0], rho.dims)
