"""Command-line entry point: ``krein <subcommand> ...``.

Tables go to ``--out`` (or stdout) as CSV with a header row, or as JSON with
``--format json``.  The one-line summary goes to stderr so piped CSV stays
clean.  Exit status: 0 pass, 1 a report failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .errors import KreinError
from .families import AlphaFamily
from .propagation import green, phi_values
from .reports import SCHEMA_VERSION, Report
from .scales import (Power, PowerLog, alpha_plus, c_phi, c_plus, check_heat_moment_bounds, check_jensen_bounds,
                     check_trace_sandwich)
from .spectral import dirichlet_eigs, heat_trace, reconstruct_from_spectrum, spectral_measure
from .strings import default_grid

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _emit(args, header, rows, payload=None):
    if args.format == "json":
        doc = payload if payload is not None else {
            "schema_version": SCHEMA_VERSION, "columns": list(header),
            "rows": [[float(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in rows]}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = io.format_csv(header, rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _summary(msg: str):
    print(msg, file=sys.stderr)


def _need(args, name):
    v = getattr(args, name, None)
    if v is None:
        raise InputError(f"--{name.replace('_', '-')} is required")
    return v


def _string(args):
    return io.load_string(_need(args, "string"))


def _grid(args, default):
    return io.parse_grid(args.grid) if args.grid else np.asarray(default, dtype=float)


def _parse_phi(spec: str):
    """``power:K``, ``powerlog:ALPHA,C`` or a JSON file holding a scale-function object."""
    if spec.startswith("power:"):
        return Power(float(spec[6:]))
    if spec.startswith("powerlog:"):
        a, c = spec[9:].split(",")
        return PowerLog(float(a), float(c))
    return io.scale_from_dict(json.loads(Path(spec).read_text()))


def _report_exit(rep: Report, args) -> int:
    if args.out or args.format == "json":
        text = rep.to_json() + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
    _summary(rep.summary())
    return EXIT_PASS if rep.passed else EXIT_FAIL


# subcommands

def cmd_phi(args):
    s = _string(args)
    lam = _need(args, "lam")
    grid = _grid(args, default_grid(s, n=64))
    grid = grid[grid <= s.l]
    val, der = phi_values(s, lam, grid)
    _emit(args, ("x", "phi", "phi_plus"), zip(grid, np.atleast_1d(val), np.atleast_1d(der)))
    _summary(f"phi at lambda={lam!r} on {grid.size} points")
    return EXIT_PASS


def cmd_green(args):
    s = _string(args)
    lam = _need(args, "lam")
    grid = _grid(args, default_grid(s, n=16))
    grid = grid[grid < s.l]
    g = np.asarray(green(s, lam, grid[:, None], grid[None, :]))
    rows = [[x, *row] for x, row in zip(grid, g)]
    _emit(args, ["x\\y", *(repr(float(y)) for y in grid)], rows)
    _summary(f"Green function at lambda={lam!r} on a {grid.size}x{grid.size} grid")
    return EXIT_PASS


def cmd_eigs(args):
    s = _string(args)
    a = _need(args, "a")
    es = dirichlet_eigs(s, a, args.method)
    _emit(args, ("k", "mu", "norm"), ((k + 1, m, n) for k, (m, n) in enumerate(zip(es.eigenvalues, es.eigennorms))))
    _summary(f"{es.eigenvalues.size} eigenvalues; mu_1 = {float(es.eigenvalues[0])!r}")
    return EXIT_PASS


def cmd_spectrum(args):
    s = _string(args)
    sig = spectral_measure(s, args.a, args.method)
    payload = io.spectrum_to_dict(sig) if args.format == "json" else None
    _emit(args, ("xi", "weight"), zip(sig.xi, sig.weights), payload)
    _summary(f"{sig.n_atoms} atoms, total mass {sig.total_mass!r}")
    return EXIT_PASS


def cmd_heat(args):
    if args.spectrum:
        sig = io.load_spectrum(args.spectrum)
    else:
        sig = spectral_measure(_string(args), args.a, args.method)
    t = _grid(args, np.geomspace(1e-2, 1e2, 25))
    if np.any(t <= 0):
        raise InputError("heat-trace times must be positive")
    _emit(args, ("t", "p"), zip(t, np.atleast_1d(heat_trace(sig, t))))
    _summary(f"heat trace at {t.size} times")
    return EXIT_PASS


def cmd_roundtrip(args):
    """From a string: forward, inverse, and compare up to translation.  From a spectrum: inverse only."""
    a = 0.0 if args.a is None else args.a
    if args.spectrum:
        sig = io.load_spectrum(args.spectrum)
        rec = reconstruct_from_spectrum(sig, a if sig.boundary is None else sig.boundary)
        payload = io.string_to_dict(rec) if args.format == "json" else None
        _emit(args, ("x", "w"), zip(rec.positions, rec.masses), payload)
        _summary(f"reconstructed {rec.n_atoms} atoms")
        return EXIT_PASS
    s = _string(args)
    sig = spectral_measure(s)
    rec = reconstruct_from_spectrum(sig, a)
    if rec.n_atoms != s.n_atoms:
        _summary(f"atom count changed: {s.n_atoms} -> {rec.n_atoms}")
        return EXIT_FAIL
    offset = float(np.mean(rec.positions - s.positions))
    dev = max(float(np.max(np.abs(rec.positions - offset - s.positions))),
              float(np.max(np.abs(rec.masses - s.masses) / s.masses)))
    rows = [(x0, w0, x1, w1) for x0, w0, x1, w1 in zip(s.positions, s.masses, rec.positions, rec.masses)]
    _emit(args, ("x", "w", "x_reconstructed", "w_reconstructed"), rows)
    ok = dev <= args.tol
    _summary(f"shift {offset!r}, max deviation {dev:.3e} ({'PASS' if ok else 'FAIL'})")
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_scale(args):
    ph = _parse_phi(args.phi)
    if args.action == "constants":
        xs = _grid(args, [0.25, 0.5, 2.0, 4.0, 10.0])
        if np.any(xs <= 0):
            raise InputError("C_+ is sampled at positive points")
        rows = [(x, c_plus(ph, float(x))) for x in xs]
        ap, cp = float(alpha_plus(ph)), float(c_phi(ph))
        payload = {"schema_version": SCHEMA_VERSION, "C_plus": [[float(x), v] for x, v in rows],
                   "alpha_plus": ap, "C_phi": cp}
        _emit(args, ("x", "C_plus"), rows, payload if args.format == "json" else None)
        _summary(f"alpha_plus = {ap!r}, C_phi = {cp!r}")
        return EXIT_PASS
    lam = -1.0 if args.lam is None else args.lam
    s = _string(args)
    a = s.l if args.a is None else args.a
    if math.isinf(a):
        raise InputError("--a is required for strings with l = inf")
    if args.action == "verify-jensen":
        rep = check_jensen_bounds(1.0 / dirichlet_eigs(s, a).eigenvalues, ph, args.samples, args.seed)
    elif args.action == "verify-sandwich":
        rep = check_trace_sandwich(s, a, lam)
    else:
        rep = check_heat_moment_bounds(s, ph, lam, boundary=a, split=min(a, s.l_plus))
    return _report_exit(rep, args)


def cmd_converge(args):
    from .correspondence import SpectrumSequence, StringSequence, check_conditions

    doc = io.load_manifest(_need(args, "manifest"))
    inputs, params = doc["inputs"], dict(doc.get("parameters", {}))
    boundary = params.pop("boundary", None)
    tol = params.pop("tol", 1e-3)
    if "strings" in inputs:
        items = [io.load_string(p) for p in inputs["strings"]]
        limit = io.load_string(inputs["limit"]) if "limit" in inputs else None
        seq = StringSequence(items, limit, boundary)
    else:
        items = [io.load_spectrum(p) for p in inputs["spectra"]]
        limit = io.load_spectrum(inputs["limit"]) if "limit" in inputs else None
        seq = SpectrumSequence(items, limit)
    ph = io.scale_from_dict(doc["phi"]) if "phi" in doc else None
    rep = check_conditions(seq, doc["conditions"], ph, tol, **params)
    text = rep.to_json() + "\n"
    out = args.out or doc.get("output")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    _summary(", ".join(f"{k}: {'PASS' if r.passed else 'FAIL'}" for k, r in sorted(rep.conditions.items())))
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_asymptotics(args):
    from .asymptotics import verify_heat_trace_asymptotics

    ladder = tuple(int(v) for v in io.parse_grid(args.atoms))
    lo, hi = (float(v) for v in args.twindow.split(","))
    rep = verify_heat_trace_asymptotics(AlphaFamily(args.alpha), args.k, args.xmin, args.xmax, ladder,
                                        (lo, hi), tol=args.tol)
    rows = [(r["n_atoms"], r["ratio_min"], r["ratio_max"], r["max_dev"]) for r in rep.details["ladder"]]
    _emit(args, ("n_atoms", "ratio_min", "ratio_max", "max_dev"), rows,
          rep.to_dict() if args.format == "json" else None)
    _summary(rep.summary())
    return EXIT_PASS if rep.passed else EXIT_FAIL


def cmd_mc(args):
    from .stochastic import verify_mgf_identity, verify_occupation_identity, verify_tilted_identity

    s = _string(args)
    a = s.l if args.a is None else args.a
    lam = -1.0 if args.lam is None else args.lam
    if args.action == "verify-mgf":
        rep = verify_mgf_identity(s, a, lam, args.samples, args.seed)
    elif args.action == "verify-tilted":
        rep = verify_tilted_identity(s, a, lam, _parse_phi(args.phi), args.samples, args.seed)
    else:
        rep = verify_occupation_identity(s, lambda t: t * np.exp(-t), args.samples, args.seed,
                                         None if args.a is None else a)
    return _report_exit(rep, args)


def cmd_selftest(args):
    from .acceptance import run

    numbers = [int(v) for v in args.only.split(",")] if args.only else None
    results = run(numbers, stream=sys.stdout)
    failed = [r.number for r in results if not r.passed]
    if args.out:
        doc = {"schema_version": SCHEMA_VERSION,
               "criteria": [{"number": r.number, "title": r.title, "passed": r.passed, "summary": r.summary}
                            for r in results]}
        Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    _summary(f"{len(results) - len(failed)}/{len(results)} criteria passed"
             + (f"; failed: {', '.join(map(str, failed))}" if failed else ""))
    return EXIT_PASS if not failed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--string", help="string JSON file")
    common.add_argument("--spectrum", help="spectral measure JSON file")
    common.add_argument("--out", help="write the table or report here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=200_000)
    common.add_argument("--lambda", dest="lam", type=float)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--grid", help="lo:hi:n, geom:lo:hi:n or a comma list")
    common.add_argument("--a", type=float, help="Dirichlet boundary point")
    common.add_argument("--method", choices=("kernel", "tridiagonal"), default="kernel")

    p = argparse.ArgumentParser(prog="krein", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, helptext in [
        ("phi", cmd_phi, "phi and its right derivative on a grid: x,phi,phi_plus"),
        ("green", cmd_green, "Green function matrix on a grid"),
        ("eigs", cmd_eigs, "Dirichlet eigenvalues at --a: k,mu,norm"),
        ("spectrum", cmd_spectrum, "spectral measure atoms: xi,weight"),
        ("heat", cmd_heat, "heat trace: t,p"),
        ("roundtrip", cmd_roundtrip, "spectrum -> string (and back, for --string input)"),
        ("selftest", cmd_selftest, "run the acceptance suite"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.set_defaults(fn=fn)
    sub.choices["selftest"].add_argument("--only", help="comma list of criterion numbers")

    sp = sub.add_parser("scale", parents=[common], help="scale-function constants and inequality checks")
    sp.add_argument("action", choices=("constants", "verify-sandwich", "verify-jensen", "verify-heat-moment"))
    sp.add_argument("--phi", default="power:2", help="power:K, powerlog:ALPHA,C or a JSON file")
    sp.set_defaults(fn=cmd_scale)

    sp = sub.add_parser("converge", parents=[common], help="convergence conditions from a manifest")
    sp.add_argument("manifest")
    sp.set_defaults(fn=cmd_converge)

    sp = sub.add_parser("asymptotics", parents=[common], help="power-law heat trace under refinement")
    sp.add_argument("--alpha", type=float, default=2.0)
    sp.add_argument("--k", type=float)
    sp.add_argument("--xmin", type=float, default=-50.0)
    sp.add_argument("--xmax", type=float, default=-1e-3)
    sp.add_argument("--atoms", default="250,500,1000,2000")
    sp.add_argument("--twindow", default="5,50")
    sp.set_defaults(fn=cmd_asymptotics, tol=0.1)

    sp = sub.add_parser("mc", parents=[common], help="Monte Carlo identities")
    sp.add_argument("action", choices=("verify-mgf", "verify-tilted", "verify-occupation"))
    sp.add_argument("--phi", default="power:2")
    sp.set_defaults(fn=cmd_mc)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    try:
        return args.fn(args)
    except (InputError, KreinError, ValueError, OSError, json.JSONDecodeError) as e:
        print(f"krein {args.command}: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
