"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad flags, 3 input does not
follow its schema, 4 input is well-formed but unusable (degenerate point,
grid too small, zero charge).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

import jsonschema
import numpy as np

from . import acceptance, fierz, spherical, stress
from .bilinear import SpinorJet, bilinear_jet
from .clifford import corrupted_basis, use_basis, verify_appendix_a
from .errors import FierzStressError, SchemaError
from .report import IdentityReport, residual_from

EXIT_OK, EXIT_FAIL, EXIT_FLAGS, EXIT_SCHEMA, EXIT_DATA = 0, 1, 2, 3, 4

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_SPINOR = {"type": "array", "items": _COMPLEX, "minItems": 4, "maxItems": 4}

JET_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["psi", "dpsi"],
    "properties": {
        "psi": _SPINOR,
        "dpsi": {"type": "array", "items": _SPINOR, "minItems": 4, "maxItems": 4},
        "A": {"type": "array", "items": {"type": "number"}, "minItems": 4, "maxItems": 4},
        "dA": {"type": "array", "items": {"type": "number"}, "minItems": 16, "maxItems": 16},
        "mass": {"type": "number"},
        "charge": {"type": "number"},
    },
}


@dataclass(frozen=True)
class RunConfig:
    seed: int = acceptance.DEFAULT_SEED
    trials: int = 1000
    tol: float = 1e-9
    sign: int = 1
    mass: float | None = None
    charge: float | None = None
    format: str = "json"
    allow_degenerate: bool = False
    out: str | None = None


# --- parsing ---------------------------------------------------------------

def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return v


def _finite_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError("must be finite")
    return v


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=acceptance.DEFAULT_SEED)
    common.add_argument("--trials", type=_positive_int, default=None)
    common.add_argument("--tol", type=_positive_float, default=1e-9)
    common.add_argument("--sign", choices=("plus", "minus"), default="plus")
    common.add_argument("--mass", type=_finite_float, default=None)
    common.add_argument("--charge", type=_finite_float, default=None)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--allow-degenerate", action="store_true")
    common.add_argument("--out", metavar="PATH", default=None)

    p = argparse.ArgumentParser(prog="fierzstress",
                                description="Fierz-current stress-energy laboratory.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("identities", parents=[common],
                   help="run the Dirac and Fierz identity suites on random inputs")
    s = sub.add_parser("stress", parents=[common], help="stress-energy tensors for a JSON jet")
    s.add_argument("input", help="JSON file with psi, dpsi and optionally A, dA, mass, charge")
    g = sub.add_parser("spherical", parents=[common], help="evaluate a reduced (t, r) CSV grid")
    g.add_argument("input", help="CSV with columns t, r, sigma, omega_im, j_a, j_b")
    g.add_argument("--r-floor", type=_positive_float, default=spherical.FDConfig().r_floor)
    t = sub.add_parser("selftest", parents=[common], help="run the acceptance suite")
    t.add_argument("--corrupt-basis", action="store_true", help=argparse.SUPPRESS)
    return p


def _config(args, default_format="json") -> RunConfig:
    return RunConfig(
        seed=args.seed,
        trials=args.trials if args.trials is not None else 1000,
        tol=args.tol,
        sign=1 if args.sign == "plus" else -1,
        mass=args.mass,
        charge=args.charge,
        format=args.format or default_format,
        allow_degenerate=args.allow_degenerate,
        out=args.out,
    )


def _emit(text, cfg: RunConfig):
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _report_csv(rep: IdentityReport):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "residual", "raw_residual", "scale", "samples", "tol", "passed"])
    for e in rep.entries:
        w.writerow([e.name, repr(e.max_abs), repr(e.raw_max_abs), repr(e.scale), e.samples,
                    repr(e.effective_tol(rep.tol)), int(e.passed(rep.tol))])
    return buf.getvalue()


# --- commands ----------------------------------------------------------------

def cmd_identities(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    rep = IdentityReport(cfg.tol, title="identities")
    rep.extend(verify_appendix_a(tol=cfg.tol).entries)
    rep.extend(fierz.fierz_suite(rng, cfg.trials, tol=cfg.tol).entries)
    n = cfg.trials
    dj, j, k = rng.standard_normal((n, 4, 4)), rng.standard_normal((n, 4)), rng.standard_normal((n, 4))
    rep.add(residual_from("Levi-Civita combinatorial identity",
                          np.abs(stress.combinatorial_residual(dj, j, k)).reshape(n, -1),
                          stress.combinatorial_scale(dj, j, k)))
    if cfg.format == "csv":
        _emit(_report_csv(rep), cfg)
    else:
        d = rep.to_dict()
        d.update(seed=cfg.seed, trials=cfg.trials)
        _emit(_dumps(d), cfg)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _complex(v):
    return complex(v[0], v[1])


def load_jet_json(text):
    """Parse and validate a jet file; returns the jet and a dict of field data."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"invalid JSON: {e}") from None
    try:
        jsonschema.validate(data, JET_SCHEMA)
    except jsonschema.ValidationError as e:
        path = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise SchemaError(f"{path}: {e.message}") from None
    psi = np.array([_complex(c) for c in data["psi"]])
    dpsi = np.array([[_complex(c) for c in row] for row in data["dpsi"]])
    try:
        jet = SpinorJet(psi, dpsi)
    except ValueError as e:
        raise SchemaError(str(e)) from None
    A = np.array(data.get("A", [0.0] * 4), dtype=float)
    dA = np.array(data.get("dA", [0.0] * 16), dtype=float).reshape(4, 4)
    mass, q = float(data.get("mass", 0.0)), float(data.get("charge", 1.0))
    if not np.all(np.isfinite(np.concatenate([A, dA.ravel(), [mass, q]]))):
        raise SchemaError("A, dA, mass and charge must be finite")
    return jet, dict(A=A, dA=dA, mass=mass, q=q)


def _tensor(t):
    t = np.asarray(t)
    return {"real": np.real(t).tolist(), "max_imag": float(np.abs(np.imag(t)).max(initial=0.0))}


def cmd_stress(path, cfg: RunConfig) -> int:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    jet, f = load_jet_json(text)
    mass = f["mass"] if cfg.mass is None else cfg.mass
    q = f["q"] if cfg.charge is None else cfg.charge
    em = stress.EMField(f["A"], f["dA"], q, mass)
    scale = float(stress.stress_scale(jet, em))
    canonical = stress.canonical_tensor(jet)
    bel = stress.belinfante_spinor(jet)
    md = stress.assemble_md(jet, em, "spinor")
    out = {
        "input": {"mass": mass, "charge": q},
        "scale": scale,
        "canonical": _tensor(canonical),
        "belinfante_spinor": _tensor(bel),
        "maxwell_dirac_spinor_route": _tensor(md),
        "lagrangian_spinor": float(np.real(stress.spinor_lagrangian(jet, em))),
    }
    problems = []
    try:
        bj = bilinear_jet(jet)
        bel_b = stress.belinfante_bilinear(bj)
        B = stress.b_field(bj, em)
        md_b = stress.assemble_md(jet, em, "bilinear", bjet=bj)
        L_b = stress.bilinear_lagrangian(bj, B, em.params)
        out.update(
            degenerate=False,
            belinfante_bilinear=_tensor(bel_b),
            maxwell_dirac_bilinear_route=_tensor(md_b),
            B=np.real(B).tolist(),
            lagrangian_bilinear=float(np.real(L_b)),
            residuals={
                "belinfante_routes": float(np.abs(bel_b - bel).max()) / scale,
                "maxwell_dirac_routes": float(np.abs(md_b - md).max()) / scale,
                "lagrangian_routes": float(abs(L_b - stress.spinor_lagrangian(jet, em))) / scale,
            },
        )
    except FierzStressError as e:
        problems.append(str(e))
        out.update(degenerate=True, belinfante_bilinear=None, maxwell_dirac_bilinear_route=None,
                   B=None, lagrangian_bilinear=None, residuals=None, problem=str(e))
    if cfg.format == "csv":
        _emit(_stress_csv(out), cfg)
    else:
        _emit(_dumps(out), cfg)
    if problems and not cfg.allow_degenerate:
        print(f"error: {problems[0]} (use --allow-degenerate to accept)", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def _stress_csv(out):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["quantity", "mu", "nu", "value"])
    for key in ("canonical", "belinfante_spinor", "belinfante_bilinear",
                "maxwell_dirac_spinor_route", "maxwell_dirac_bilinear_route"):
        t = out.get(key)
        if t is None:
            continue
        for m in range(4):
            for n in range(4):
                w.writerow([key, m, n, repr(t["real"][m][n])])
    for key in ("lagrangian_spinor", "lagrangian_bilinear"):
        if out.get(key) is not None:
            w.writerow([key, "", "", repr(out[key])])
    return buf.getvalue()


def cmd_spherical(path, cfg: RunConfig, r_floor) -> int:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    grid = spherical.GridTable.from_csv(text)
    p = spherical.SphericalParams(cfg.sign, 1.0 if cfg.charge is None else cfg.charge,
                                  1.0 if cfg.mass is None else cfg.mass)
    res = spherical.grid_evaluate(grid, p, spherical.FDConfig(r_floor=r_floor))
    if cfg.format == "json":
        _emit(_dumps(res.to_dict()), cfg)
    else:
        _emit(res.to_csv(), cfg)
    flagged = int(np.count_nonzero(res.flags))
    if flagged and not cfg.allow_degenerate:
        print(f"warning: {flagged} node(s) flagged", file=sys.stderr)
    return EXIT_OK


def cmd_selftest(cfg: RunConfig, trials, corrupt=False) -> int:
    if corrupt:
        with use_basis(corrupted_basis()):
            rep = acceptance.run_acceptance(cfg.seed, trials)
    else:
        rep = acceptance.run_acceptance(cfg.seed, trials)
    if cfg.format == "json":
        _emit(rep.to_json() + "\n", cfg)
    else:
        lines = list(rep.lines())
        lines.append(f"{'PASS' if rep.passed else 'FAIL'}  selftest ({rep.elapsed:.1f}s)")
        _emit("\n".join(lines) + "\n", cfg)
    return EXIT_OK if rep.passed else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_FLAGS
    try:
        if args.command == "identities":
            return cmd_identities(_config(args))
        if args.command == "stress":
            return cmd_stress(args.input, _config(args))
        if args.command == "spherical":
            return cmd_spherical(args.input, _config(args, "csv"), args.r_floor)
        if args.command == "selftest":
            cfg = _config(args, "text")
            trials = args.trials if args.trials is not None else acceptance.DEFAULT_TRIALS
            return cmd_selftest(cfg, trials, args.corrupt_basis)
    except SchemaError as e:
        print(f"schema error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except FierzStressError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_FLAGS


if __name__ == "__main__":
    sys.exit(main())
