"""Command-line entry point.

Every subcommand writes one JSON report to stdout. Exit codes: 0 success,
2 malformed input, 3 numeric failure (singular matrix, no convergence, ...).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .cmatrix import eigenvalues, frobenius_norm, jordan_block, matrix_from_json, matrix_to_json
from .errors import NumericError
from .funcalc import Contour, contour_eval
from .harness import HarnessConfig, verify_theorem
from .matrix_dyn import (
    ClassifyParams,
    bounded_orbit,
    classify_matrix_spectral,
    iterate_matrix,
    jordan_chevalley,
    jordan_iterate_closed_form,
    power_map_classify,
    power_map_differential_eigenvalues,
)
from .poly import format_poly, parse_poly
from .render import GridSpec, Mode, RenderParams, SliceFamily, render_grid, save_render
from .scalar_dyn import classify_neighborhood, classify_point
from .wordmap import iterate_system, parse_system, tuple_from_json, tuple_to_json

SCHEMA_VERSION = 1


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def _complex_arg(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise InputError(f"expected re,im but got {text!r}")


def _complex_list(text: str) -> list[complex]:
    return [_complex_arg(t.strip()) for t in text.split(";") if t.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise InputError(f"expected comma-separated integers, got {text!r}") from None


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg}") from None


def _load_matrix(path: str) -> np.ndarray:
    try:
        return matrix_from_json(_load_json(path))
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _cjson(z: complex):
    return [_num(z.real), _num(z.imag)]


def _num(x: float):
    return x if math.isfinite(x) else "overflow"


def _mjson(A) -> dict:
    d = matrix_to_json(A)
    d["entries"] = [[[_num(re), _num(im)] for re, im in row] for row in d["entries"]]
    return d


# --- subcommands ----------------------------------------------------------

def cmd_classify_scalar(a):
    p = parse_poly(a.poly)
    z = _complex_arg(a.z)
    c = classify_point(p, z, a.max_iter, a.eps)
    result = c.to_json()
    if a.delta is not None:
        nb = classify_neighborhood(p, z, a.delta, a.max_iter, a.eps)
        result["julia_proximate"] = nb.proximate
        result["undecided"] = nb.undecided
    return {"poly": format_poly(p), "z": _cjson(z)}, result, {}


def cmd_classify_matrix(a):
    p = parse_poly(a.poly)
    X = _load_matrix(a.matrix)
    params = ClassifyParams(a.delta, a.max_iter, a.eps)
    if a.gl:
        if not p.is_power_map:
            raise InputError("--gl applies to power maps only (use power:M)")
        mc = power_map_classify(p.degree, X, params)
    else:
        mc = classify_matrix_spectral(p, X, params)
    inputs = {"poly": format_poly(p), "matrix": _mjson(X), "gl": a.gl, "delta": a.delta}
    return inputs, mc.to_json(), {}


def cmd_orbit(a):
    p = parse_poly(a.poly)
    X = _load_matrix(a.matrix)
    orbit = iterate_matrix(p, X, a.m)
    status = bounded_orbit(p, X, max(a.m, 1), a.bound)
    result = {
        "iterates": [_mjson(Y) for Y in orbit],
        "norms": [_num(frobenius_norm(Y)) for Y in orbit],
        "truncated": orbit.escaped,
        "bounded_orbit": status.to_json(),
    }
    return {"poly": format_poly(p), "matrix": _mjson(X), "m": a.m, "bound": a.bound}, result, {}


def cmd_jordan_iterate(a):
    p = parse_poly(a.poly)
    alpha = _complex_arg(a.alpha)
    closed = jordan_iterate_closed_form(p, alpha, a.size, a.m)
    brute = iterate_matrix(p, jordan_block(alpha, a.size), a.m)
    residuals = {}
    if not brute.escaped:
        direct = brute[-1]
        residuals["relative_frobenius_error"] = frobenius_norm(closed - direct) / max(
            frobenius_norm(direct), 1e-300
        )
    inputs = {"poly": format_poly(p), "alpha": _cjson(alpha), "size": a.size, "m": a.m}
    return inputs, {"closed_form": _mjson(closed)}, residuals


def cmd_diff_power(a):
    eigs = _complex_list(a.eigs)
    if not eigs:
        raise InputError("--eigs needs at least one value")
    mu = power_map_differential_eigenvalues(a.M, a.m, eigs)
    # finite-difference check of d(X -> X^{M^m}) at diag(eigs)
    N = a.M ** a.m
    g = np.diag(np.array(eigs, dtype=np.complex128))
    base = np.linalg.matrix_power(g, N)
    h = 1e-6
    worst = 0.0
    n = len(eigs)
    for i in range(n):
        for j in range(n):
            E = np.zeros((n, n), dtype=np.complex128)
            E[i, j] = 1
            fd = (np.linalg.matrix_power(g + h * E, N)[i, j] - base[i, j]) / h
            worst = max(worst, abs(fd - mu[i, j]) / max(abs(mu[i, j]), 1e-300))
    inputs = {"M": a.M, "m": a.m, "eigs": [_cjson(z) for z in eigs]}
    result = {"mu": [[_cjson(z) for z in row] for row in mu]}
    return inputs, result, {"finite_difference_relative_error": worst}


def cmd_jordan_chevalley(a):
    X = _load_matrix(a.matrix)
    jc = jordan_chevalley(X, a.tol, a.nodes)
    result = {
        "semisimple": _mjson(jc.semisimple),
        "nilpotent": _mjson(jc.nilpotent),
        "cluster_centers": [_cjson(z) for z in jc.centers],
    }
    return {"matrix": _mjson(X), "tol": a.tol}, result, dict(jc.residuals)


def cmd_funcalc_check(a):
    p = parse_poly(a.poly)
    X = _load_matrix(a.matrix)
    if a.center is not None and a.radius is not None:
        center, radius = _complex_arg(a.center), a.radius
    else:
        ev = list(eigenvalues(X))
        center = sum(ev) / len(ev)
        radius = 1.5 * max(abs(z - center) for z in ev) + 0.5
    quad = contour_eval(p, X, Contour.circle(center, radius, a.nodes), m=a.m)
    direct = iterate_matrix(p, X, a.m)[-1]
    err = frobenius_norm(quad - direct)
    inputs = {
        "poly": format_poly(p),
        "m": a.m,
        "matrix": _mjson(X),
        "nodes": a.nodes,
        "contour": {"center": _cjson(center), "radius": radius},
    }
    result = {
        "quadrature_result": _mjson(quad),
        "direct_result": _mjson(direct),
        "frobenius_error": _num(err),
    }
    return inputs, result, {"frobenius_error": err}


def cmd_word_iterate(a):
    try:
        S = parse_system(a.words, a.kind)
        tup = tuple_from_json(_load_json(a.tuple))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    traj = iterate_system(S, tup, a.m)
    result = {"trajectory": [tuple_to_json(t)["matrices"] for t in traj], "final": tuple_to_json(traj[-1])}
    inputs = {"kind": a.kind, "words": [str(c) for c in S.components], "tuple": tuple_to_json(tup), "m": a.m}
    return inputs, result, {}


def _family(text: str) -> SliceFamily:
    if text == "scalar":
        return SliceFamily.scalar()
    if text.startswith("jordan:"):
        try:
            return SliceFamily.jordan(int(text.split(":", 1)[1]))
        except ValueError as exc:
            raise InputError(f"bad jordan family {text!r}: {exc}") from None
    if text.startswith("affine:"):
        files = text.split(":", 1)[1].split(",")
        if len(files) != 2:
            raise InputError("affine family needs affine:<fileA>,<fileB>")
        try:
            return SliceFamily.affine(_load_matrix(files[0]), _load_matrix(files[1]))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    raise InputError(f"unknown family {text!r}")


def cmd_render(a):
    p = parse_poly(a.poly)
    family = _family(a.family)
    try:
        spec = GridSpec(_complex_arg(a.center), a.width, a.height or a.width, a.px, a.px_h or a.px)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    params = RenderParams(max_iter=a.max_iter, orbit_iter=a.orbit_iter)
    grid = render_grid(p, spec, family, Mode(a.mode), params, workers=a.threads)
    meta = save_render(a.out, p, grid, family, params)
    inputs = {"poly": format_poly(p), "family": family.describe(), "mode": a.mode,
              "grid": spec.to_json(), "out": a.out}
    return inputs, {"sidecar": meta["sidecar"], "histogram": meta["histogram"]}, {}


def cmd_verify_theorem(a):
    p = parse_poly(a.poly)
    cfg = HarnessConfig(margin=a.margin, cond_max=a.cond_max, delta=a.delta)
    eigs = _complex_list(a.eigs) if a.eigs else None
    blocks = _int_list(a.blocks) if a.blocks else None
    try:
        report = verify_theorem(p, a.n, a.trials, a.seed, cfg, eigs, blocks, a.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    inputs = {"poly": format_poly(p), "n": a.n, "trials": a.trials}
    return inputs, report, {"disagreements": float(len(report["disagreements"]))}


# --- wiring ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="matfatou", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    def scalar_opts(sp):
        sp.add_argument("--max-iter", type=int, default=2000)
        sp.add_argument("--eps", type=float, default=1e-9)

    sp = add("classify-scalar", cmd_classify_scalar, "classify a point of the plane")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--z", required=True, help="re,im")
    sp.add_argument("--delta", type=float, default=None, help="also run the boundary-proximity test")
    scalar_opts(sp)

    sp = add("classify-matrix", cmd_classify_matrix, "spectral Fatou/Julia verdict for a matrix")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--gl", action="store_true", help="require X invertible (power maps on GL_n)")
    sp.add_argument("--delta", type=float, default=1e-3)
    scalar_opts(sp)

    sp = add("orbit", cmd_orbit, "iterate a matrix")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--bound", type=float, default=1e8)

    sp = add("jordan-iterate", cmd_jordan_iterate, "closed-form p^m of a Jordan block")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--alpha", required=True, help="re,im (use --alpha=-1,0 for negatives)")
    sp.add_argument("--size", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)

    sp = add("diff-power", cmd_diff_power, "differential eigenvalues of the power map")
    sp.add_argument("--M", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--eigs", required=True, help="semicolon-separated re,im values")

    sp = add("jordan-chevalley", cmd_jordan_chevalley, "semisimple + nilpotent split")
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--nodes", type=int, default=128)

    sp = add("funcalc-check", cmd_funcalc_check, "contour quadrature vs direct p^m(X)")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--matrix", required=True)
    sp.add_argument("--nodes", type=int, default=128)
    sp.add_argument("--center", default=None, help="re,im of the contour circle")
    sp.add_argument("--radius", type=float, default=None)

    sp = add("word-iterate", cmd_word_iterate, "exact iteration of a word system")
    sp.add_argument("--kind", choices=["group", "algebra"], required=True)
    sp.add_argument("--words", required=True, help='e.g. "x2 ; x1^2*x2"')
    sp.add_argument("--tuple", required=True)
    sp.add_argument("--m", type=int, required=True)

    sp = add("render", cmd_render, "render a verdict grid to PPM + JSON sidecar")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--family", default="scalar", help="scalar | jordan:<s> | affine:<fileA>,<fileB>")
    sp.add_argument("--mode", choices=[m.value for m in Mode], default="spectral")
    sp.add_argument("--center", default="0,0")
    sp.add_argument("--width", type=float, default=4.0)
    sp.add_argument("--height", type=float, default=None)
    sp.add_argument("--px", type=int, default=256)
    sp.add_argument("--px-h", type=int, default=None)
    sp.add_argument("--max-iter", type=int, default=2000)
    sp.add_argument("--orbit-iter", type=int, default=200)
    sp.add_argument("--out", required=True)
    sp.add_argument("--threads", type=int, default=1, help="worker processes over row blocks")

    sp = add("verify-theorem", cmd_verify_theorem, "randomized spectral-vs-orbit cross-check")
    sp.add_argument("--poly", required=True)
    sp.add_argument("--n", type=int, default=2)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--margin", type=float, default=0.05)
    sp.add_argument("--cond-max", type=float, default=100.0)
    sp.add_argument("--delta", type=float, default=1e-3)
    sp.add_argument("--eigs", default=None, help="force one eigenvalue per block")
    sp.add_argument("--blocks", default=None, help="force Jordan block sizes, e.g. 2,1")
    sp.add_argument("--workers", type=int, default=1)
    return ap


def _sanitize(obj):
    if isinstance(obj, float):
        return _num(obj)
    if isinstance(obj, complex):
        return _cjson(obj)
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, np.generic):
        return _sanitize(obj.item())
    return obj


def _emit(doc: dict, out) -> None:
    out.write(json.dumps(_sanitize(doc), sort_keys=True, allow_nan=False) + "\n")
    if "error" in doc:
        print(f"matfatou: {doc['error']['type']}: {doc['error']['message']}", file=sys.stderr)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    command = argv[0] if argv else None
    base = {"schema_version": SCHEMA_VERSION, "version": __version__, "command": command}
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "fn", None) is None:
            raise InputError("a subcommand is required")
        inputs, result, residuals = args.fn(args)
    except InputError as exc:
        _emit({**base, "error": {"type": "InputError", "message": str(exc)}}, out)
        return 2
    except NumericError as exc:
        _emit({**base, "error": {"type": type(exc).__name__, "message": str(exc)}}, out)
        return 3
    except ValueError as exc:
        _emit({**base, "error": {"type": "InputError", "message": str(exc)}}, out)
        return 2
    except OverflowError as exc:
        _emit({**base, "error": {"type": "Overflow", "message": str(exc)}}, out)
        return 3
    doc = {
        **base,
        "command": args.command,
        "inputs_echo": inputs,
        "result": result,
        "residuals": residuals,
        "seed": getattr(args, "seed", None),
    }
    _emit(doc, out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
