"""Controlled-permutation unitary that maps a qudit and ``N-1`` ancillas in
``|0>`` onto an ``N``-partite state with the same coherence as GME."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Sequence

import numpy as np

from . import measures as ms
from .core import DensityMatrix, PureState, basis_state, pure_part, tensor_product
from .errors import AncillaTooSmall, IndexOutOfRange, ValidationError
from .roof import (
    RoofConfig,
    coherence_measure,
    convex_roof,
    e_min_gme_measure,
    g_geo_gme_measure,
)


@dataclass(frozen=True)
class UioOperator:
    d: int
    ancilla_dims: tuple[int, ...]
    matrix: np.ndarray

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.d,) + self.ancilla_dims

    def is_unitary(self, tol: float = 1e-10) -> bool:
        u = self.matrix
        return bool(np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() <= tol)

    def is_permutation(self) -> bool:
        u = self.matrix
        binary = np.all((u == 0) | (u == 1))
        return bool(binary and np.all(np.count_nonzero(u, axis=0) == 1)
                    and np.all(np.count_nonzero(u, axis=1) == 1))


def permutation_operator(i: int, dim: int) -> np.ndarray:
    """Transposition of ``|0>`` and ``|i>`` (identity for ``i == 0``)."""
    if not 0 <= i < dim:
        raise IndexOutOfRange(f"basis index {i} outside 0..{dim - 1}")
    p = np.eye(dim)
    p[[0, i]] = p[[i, 0]]
    return p


def build_uio(d: int, ancilla_dims: Sequence[int]) -> UioOperator:
    """``U = sum_i |i><i| (x) sigma_i (x) ... (x) sigma_i`` over the ancillas."""
    ancilla_dims = tuple(int(a) for a in ancilla_dims)
    if d < 2 or not ancilla_dims:
        raise ValidationError("need d >= 2 and at least one ancilla")
    small = [a for a in ancilla_dims if a < d]
    if small:
        raise AncillaTooSmall(f"ancilla dimensions {small} smaller than d = {d}")
    side = d * prod(ancilla_dims)
    u = np.zeros((side, side))
    for i in range(d):
        proj = np.zeros((d, d))
        proj[i, i] = 1
        block = np.eye(1)
        for a in ancilla_dims:
            block = np.kron(block, permutation_operator(i, a))
        u += np.kron(proj, block)
    return UioOperator(d, ancilla_dims, u)


def _ancilla_state(ancilla_dims) -> DensityMatrix:
    return basis_state(0, ancilla_dims).dm()


def convert(rho: DensityMatrix | PureState, n_parties: int,
            ancilla_dims: Sequence[int] | None = None):
    """Apply the conversion to ``rho (x) |0><0|^(N-1)``.

    A :class:`PureState` input gives a :class:`PureState` output.
    """
    if n_parties < 2:
        raise ValidationError("conversion needs N >= 2")
    if len(rho.dims) != 1:
        raise ValidationError("the input must be a single system")
    d = rho.dims[0]
    ancilla_dims = tuple(ancilla_dims) if ancilla_dims is not None else (d,) * (n_parties - 1)
    if len(ancilla_dims) != n_parties - 1:
        raise ValidationError(f"expected {n_parties - 1} ancilla dimensions")
    u = build_uio(d, ancilla_dims)
    if isinstance(rho, PureState):
        vec = np.kron(rho.amplitudes, basis_state(0, ancilla_dims).amplitudes)
        return PureState(u.dims, u.matrix @ vec)
    big = tensor_product(rho, _ancilla_state(ancilla_dims))
    out = u.matrix @ big.matrix @ u.matrix.T
    return DensityMatrix(u.dims, (out + out.conj().T) / 2)


@dataclass
class Theorem3Report:
    coherence: float
    e_min_gme: float
    g_geo_gme: float
    methods: dict = field(default_factory=dict)

    @property
    def max_discrepancy(self) -> float:
        v = (self.coherence, self.e_min_gme, self.g_geo_gme)
        return max(abs(a - b) for a in v for b in v)

    def as_dict(self) -> dict:
        return {"coherence": self.coherence, "e_min_gme": self.e_min_gme,
                "g_geo_gme": self.g_geo_gme, "max_discrepancy": self.max_discrepancy,
                "methods": dict(self.methods)}


def _closed_form_applies(f: ms.ConcaveFunction, d: int, n_parties: int) -> bool:
    # the l1 identity needs qubits; GBC matches concurrence only while every
    # bipartition has a qubit on its smaller side, i.e. N <= 3
    return d == 2 and (f.kind == "concurrence" or (f.kind == "gbc" and n_parties <= 3))


def check_theorem3(rho: DensityMatrix | PureState, f: ms.ConcaveFunction, n_parties: int,
                   cfg: RoofConfig | None = None, closed_forms: bool = True) -> Theorem3Report:
    """Coherence of ``rho`` next to both GME measures of its converted state.

    Pure inputs are evaluated exactly. With ``closed_forms`` a qubit input
    under the concurrence or GBC function is scored by its l1 coherence and
    by :func:`~cohgme.measures.xstate_gme_concurrence`; anything else goes
    through :func:`~cohgme.roof.convex_roof`. ``methods`` records which path
    produced each number.
    """
    d = rho.dims[0]
    if f.kind == "gbc":
        f = ms.gbc(d)
    if isinstance(rho, DensityMatrix):
        psi = pure_part(rho)
        rho_dm = rho
    else:
        psi, rho_dm = rho, rho.dm()

    if psi is not None:
        conv = convert(psi, n_parties)
        return Theorem3Report(ms.coherence_pure(f, psi), ms.e_min_gme_pure(f, conv),
                              ms.g_geo_gme_pure(f, conv),
                              {"coherence": "closed_form", "e_min_gme": "closed_form",
                               "g_geo_gme": "closed_form"})

    conv = convert(rho_dm, n_parties)
    if closed_forms and _closed_form_applies(f, d, n_parties):
        x = ms.xstate_gme_concurrence(conv)
        return Theorem3Report(ms.l1_coherence(rho_dm), x, x,
                              {"coherence": "closed_form", "e_min_gme": "closed_form",
                               "g_geo_gme": "closed_form"})

    cfg = cfg or RoofConfig()
    c = convex_roof(coherence_measure(f), rho_dm, cfg).value
    e = convex_roof(e_min_gme_measure(f), conv, cfg).value
    g = convex_roof(g_geo_gme_measure(f), conv, cfg).value
    return Theorem3Report(c, e, g, {"coherence": "roof", "e_min_gme": "roof", "g_geo_gme": "roof"})
