"""Command-line front end.

Single-value reports are JSON on stdout (or ``--out``); sweeps are CSV.
Whenever ``--out`` is given a ``<out>.manifest.json`` is written next to it.
Diagnostics go to stderr; the exit status is nonzero on any error or on a
failed check.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from . import measures as ms
from .core import (
    DensityMatrix,
    PureState,
    load_state,
    pure_part,
    random_density_matrix,
    random_pure_state,
    save_state,
    state_to_json,
)
from .errors import ValidationError
from .fixtures import write_fixtures
from .hardy import XStateParams, gmnl_gms_flags, maximize_hardy, sweep_hardy, sweep_to_csv
from .roof import RoofConfig, RoofResult, RoofMeasure, convex_roof
from .uio import check_theorem3, convert


def _version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "0+unknown"


def _f(kind: str) -> ms.ConcaveFunction:
    return ms.ConcaveFunction(kind)


def _roof_cfg(args) -> RoofConfig:
    return RoofConfig(ensemble_size=args.roof_m, restarts=args.roof_restarts,
                      max_iterations=args.roof_iters, tol=args.roof_tol, seed=args.seed)


def _roof_report(res: RoofResult) -> dict:
    dec = res.decomposition
    return {
        "value": res.value,
        "method": "roof",
        "converged": res.converged,
        "restart_values": res.restart_values,
        "decomposition": [
            {"weight": float(p), **state_to_json(s)} for p, s in zip(dec.weights, dec.states)
        ],
    }


def cmd_coh(args) -> dict:
    state = load_state(args.state)
    if args.measure == "l1":
        rho = state.dm() if isinstance(state, PureState) else state
        return {"value": ms.l1_coherence(rho), "method": "closed_form", "measure": "l1"}
    if state.n_parties != 1:
        raise ValidationError("coherence is defined here for single-system states")
    f = _f(args.measure)
    psi = state if isinstance(state, PureState) else pure_part(state)
    if psi is not None:
        return {"value": ms.coherence_pure(f, psi), "method": "closed_form", "measure": args.measure}
    out = _roof_report(convex_roof(RoofMeasure("coherence", f), state, _roof_cfg(args)))
    out["measure"] = args.measure
    return out


def cmd_gme(args) -> dict:
    state = load_state(args.state)
    if state.n_parties < 2:
        raise ValidationError("GME needs at least two parties")
    f = _f(args.measure)
    psi = state if isinstance(state, PureState) else pure_part(state)
    tag = "e_min_gme" if args.kind == "min" else "g_geo_gme"
    if psi is not None:
        val = ms.e_min_gme_pure(f, psi) if args.kind == "min" else ms.g_geo_gme_pure(f, psi)
        out = {"value": val, "method": "closed_form"}
    else:
        out = _roof_report(convex_roof(RoofMeasure(tag, f), state, _roof_cfg(args)))
    out.update(measure=args.measure, kind=args.kind)
    return out


def cmd_uio(args) -> dict:
    state = load_state(args.state)
    if not args.out:
        raise ValidationError("uio needs --out for the converted state")
    conv = convert(state, args.parties)
    save_state(conv, args.out)
    return {"written": str(args.out), "dims": list(conv.dims)}


def _trial_state(kind: str, dim: int, rank: int, rng_seed) -> DensityMatrix | PureState:
    if kind == "pure":
        return random_pure_state([dim], rng_seed)
    if kind == "incoherent":
        w = np.random.default_rng(rng_seed).dirichlet(np.ones(dim))
        return DensityMatrix((dim,), np.diag(w))
    return random_density_matrix([dim], rank, rng_seed)


def cmd_check_theorem3(args) -> dict:
    f = _f(args.measure)
    cfg = _roof_cfg(args)
    trials = []
    for i, ss in enumerate(np.random.SeedSequence(args.seed).spawn(args.trials)):
        rho = _trial_state(args.states, args.dim, args.rank, ss)
        rep = check_theorem3(rho, f, args.parties, cfg, closed_forms=not args.roof_only)
        d = rep.as_dict()
        d.update(trial=i, passed=rep.max_discrepancy <= args.tol)
        trials.append(d)
    return {"trials": trials, "all_passed": all(t["passed"] for t in trials), "tol": args.tol}


def cmd_hardy_max(args) -> dict:
    params = XStateParams(args.p, args.r)
    res = maximize_hardy(params, args.restarts, args.seed, free_angles=args.free_angles)
    flags = gmnl_gms_flags(params, args.restarts, args.seed, result=res)
    return {
        "p": params.p, "r": params.r, "h_max": res.h_max, "angles": list(res.angles),
        "converged": res.converged, "method": "free_angles" if args.free_angles else "closed_form",
        "flags": flags,
    }


def cmd_hardy_sweep(args) -> str:
    return sweep_to_csv(sweep_hardy(args.p_steps, args.r_steps, args.restarts, args.seed))


def cmd_fixtures(args) -> dict:
    paths = write_fixtures(args.out or "fixtures")
    return {"written": [str(p) for p in paths]}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    p.add_argument("--out", type=Path, default=None, help="write data here instead of stdout")
    p.add_argument("--json", action="store_true", help="emit JSON (default for reports)")


def _roof_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--roof-m", type=int, default=None, help="ensemble size (default rank^2, max 16)")
    p.add_argument("--roof-restarts", type=int, default=16)
    p.add_argument("--roof-iters", type=int, default=2000)
    p.add_argument("--roof-tol", type=float, default=1e-6)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cohgme", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coh", help="coherence of a single-system state")
    _common(p)
    _roof_flags(p)
    p.add_argument("--state", required=True)
    p.add_argument("--measure", choices=["concurrence", "gbc", "entropy", "l1"], default="concurrence")
    p.set_defaults(func=cmd_coh)

    p = sub.add_parser("gme", help="min- or geo-GME of a multipartite state")
    _common(p)
    _roof_flags(p)
    p.add_argument("--state", required=True)
    p.add_argument("--measure", choices=["concurrence", "gbc", "entropy"], default="concurrence")
    p.add_argument("--kind", choices=["min", "geo"], default="min")
    p.set_defaults(func=cmd_gme)

    p = sub.add_parser("uio", help="convert a qudit state into an N-partite state")
    _common(p)
    p.add_argument("--state", required=True)
    p.add_argument("--parties", type=int, default=3)
    p.set_defaults(func=cmd_uio)

    p = sub.add_parser("check-theorem3", help="coherence vs. GME of converted random states")
    _common(p)
    _roof_flags(p)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--rank", type=int, default=2)
    p.add_argument("--parties", type=int, default=3)
    p.add_argument("--measure", choices=["concurrence", "gbc", "entropy"], default="concurrence")
    p.add_argument("--states", choices=["mixed", "pure", "incoherent"], default="mixed")
    p.add_argument("--tol", type=float, default=2e-3)
    p.add_argument("--roof-only", action="store_true", help="never use closed forms for mixed states")
    p.set_defaults(func=cmd_check_theorem3)

    p = sub.add_parser("fixtures", help="write the named example states (default dir ./fixtures)")
    _common(p)
    p.set_defaults(func=cmd_fixtures)

    hardy = sub.add_parser("hardy", help="Hardy-type nonlocality of the special X-states")
    hsub = hardy.add_subparsers(dest="hardy_command", required=True)
    p = hsub.add_parser("max", help="maximize H at one (p, r)")
    _common(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--free-angles", action="store_true",
                   help="six independent angles instead of the shared-angle family")
    p.set_defaults(func=cmd_hardy_max)
    p = hsub.add_parser("sweep", help="maximize H over a (p, r) grid, CSV output")
    _common(p)
    p.add_argument("--p-steps", type=int, default=21)
    p.add_argument("--r-steps", type=int, default=21)
    p.add_argument("--restarts", type=int, default=32)
    p.set_defaults(func=cmd_hardy_sweep)
    return parser


def _digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _manifest(args, argv, elapsed: float) -> dict:
    flags = {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k != "func"}
    inputs = {}
    if getattr(args, "state", None):
        inputs[str(args.state)] = _digest(args.state)
    return {"command": args.command, "argv": list(argv), "flags": flags, "seed": args.seed,
            "version": _version(), "inputs_sha256": inputs, "wall_seconds": elapsed}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        result = args.func(args)
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"cohgme: error: {exc}", file=sys.stderr)
        return 1

    text = result if isinstance(result, str) else json.dumps(result, indent=2, sort_keys=True) + "\n"
    # uio and fixtures use --out for the files they create
    if args.out and args.func not in (cmd_uio, cmd_fixtures):
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    if args.out:
        side = Path(str(args.out).rstrip("/") + ".manifest.json")
        side.write_text(json.dumps(_manifest(args, argv, time.perf_counter() - t0), indent=2,
                                   sort_keys=True) + "\n")

    if isinstance(result, dict) and result.get("all_passed") is False:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
