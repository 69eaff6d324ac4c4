"""Named example states, written to disk by ``cohgme fixtures``."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .core import DensityMatrix, PureState, save_state
from .hardy import XStateParams, build_xstate, qubit_state

_S2 = 1 / np.sqrt(2)


def plus() -> PureState:
    return PureState((2,), [_S2, _S2])


def ghz3() -> PureState:
    v = np.zeros(8)
    v[0] = v[7] = _S2
    return PureState((2, 2, 2), v)


def bisep3() -> PureState:
    """Bell pair on parties 1, 2 with party 3 in ``|0>``."""
    v = np.zeros(8)
    v[0b000] = v[0b110] = _S2
    return PureState((2, 2, 2), v)


def diag() -> DensityMatrix:
    return DensityMatrix((2,), np.diag([0.7, 0.3]))


FIXTURES = {
    "plus.json": plus,
    "ghz3.json": ghz3,
    "bisep3.json": bisep3,
    "eq11_r04.json": lambda: qubit_state(XStateParams(0.5, 0.4)),
    "eq12_r04.json": lambda: build_xstate(XStateParams(0.5, 0.4)),
    "diag.json": diag,
}


def write_fixtures(directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in FIXTURES.items():
        path = directory / name
        save_state(build(), path)
        written.append(path)
    return written
