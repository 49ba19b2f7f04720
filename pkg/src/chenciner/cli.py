"""Command-line front end: ``chenciner <analyze|curves|simulate|diagram|verify>``.

Exit codes
----------
0 success, 1 property failure (verify) or other analysis error,
2 configuration error, 3 point or window outside the validity disk
(including sign inversion of L2), 4 infeasible sign profile,
5 model not degenerate, 6 implicit-function hypothesis violated,
7 invalid orbit start, 8 diagram resolution below the minimum.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .classifier import classify
from .config import ConfigError, ModelConfig, load_config
from .curves import CurveKind, coefficient_table, trace_curve
from .diagram import MIN_RESOLUTION, build_diagram, enumerate_case
from .errors import (
    ChencinerError,
    DiagramError,
    InfeasibleProfile,
    IftViolation,
    InvalidStart,
    NotDegenerate,
    OutOfValidityRadius,
    SignInversion,
)
from .normal_form import Degeneracy, check_degeneracy, evaluate
from .render import render_orbit_svg, render_svg
from .simulator import SimulationConfig, iterate_orbit
from .verify import PROPERTIES, random_models, run_properties

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_VALIDITY = 3
EXIT_INFEASIBLE = 4
EXIT_NOT_DEGENERATE = 5
EXIT_IFT = 6
EXIT_INVALID_START = 7
EXIT_RESOLUTION = 8


class ResolutionTooSmall(DiagramError):
    pass


_EXIT_MAP = (
    (ConfigError, EXIT_CONFIG),
    (ResolutionTooSmall, EXIT_RESOLUTION),
    (OutOfValidityRadius, EXIT_VALIDITY),
    (SignInversion, EXIT_VALIDITY),
    (DiagramError, EXIT_VALIDITY),
    (InfeasibleProfile, EXIT_INFEASIBLE),
    (NotDegenerate, EXIT_NOT_DEGENERATE),
    (IftViolation, EXIT_IFT),
    (InvalidStart, EXIT_INVALID_START),
)


def exit_code_for(exc: BaseException) -> int:
    for cls, code in _EXIT_MAP:
        if isinstance(exc, cls):
            return code
    return EXIT_FAILURE


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    outputs: list[str] = field(default_factory=list)
    diagnostics: list[dict] = field(default_factory=list)

    def warn(self, kind: str, message: str) -> None:
        self.diagnostics.append({"kind": kind, "message": message})


def _digest(command: str, cfg: ModelConfig | None, flags: dict) -> str:
    payload = {"command": command, "config": cfg.to_dict() if cfg else None, "flags": flags}
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()


def _num(x) -> str:
    return format(float(x), ".17g")


def _exact(x) -> str:
    return f"{x.numerator}/{x.denominator}" if isinstance(x, Fraction) else ""


def write_atomic(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _emit(report: RunReport, out: Path, name: str, text: str) -> None:
    path = out / name
    write_atomic(path, text)
    report.outputs.append(str(path))


def _print_report(report: RunReport, fmt: str, payload: dict | None = None) -> None:
    if fmt == "json":
        doc = dict(payload or {})
        doc["report"] = asdict(report)
        print(json.dumps(doc, indent=2, sort_keys=True, default=str))
        return
    for d in report.diagnostics:
        print(f"diagnostic [{d['kind']}]: {d['message']}")
    for o in report.outputs:
        print(f"wrote {o}")
    print(f"inputs digest: {report.inputs_digest}")


# ---------------------------------------------------------------- analyze


def cmd_analyze(args) -> int:
    cfg = load_config(args.config)
    m = cfg.to_model()
    report = RunReport("analyze", _digest("analyze", cfg, {"point": args.point}))
    ev = evaluate(m, tuple(args.point))
    inv = classify(ev, float(m.L0), cfg.band)
    circles = [
        {"radius": c.radius, "y": c.y, "stability": c.stability.value, "multiplier": c.multiplier}
        for c in inv.circles
    ]
    result = {
        "alpha1": args.point[0], "alpha2": args.point[1],
        "beta1": ev.beta1, "beta2": ev.beta2, "L2": ev.l2, "Delta": ev.delta,
        "region": inv.region, "origin": inv.origin.value, "origin_mode": inv.origin_mode.value,
        "circles": circles,
    }
    if args.format == "json":
        _print_report(report, "json", {"analysis": result})
    elif args.format == "csv":
        rows = [["scalar", k, _num(result[k]), ""] for k in ("alpha1", "alpha2", "beta1", "beta2", "L2", "Delta")]
        rows.append(["scalar", "region", str(inv.region), ""])
        rows.append(["origin", inv.origin.value, "0", inv.origin_mode.value])
        rows.extend(["circle", c["stability"], _num(c["radius"]), _num(c["multiplier"])] for c in circles)
        sys.stdout.write(_csv_text(["kind", "name", "value", "extra"], rows))
    else:
        for k in ("beta1", "beta2", "L2", "Delta"):
            print(f"{k:7s} = {result[k]:.17g}")
        print(f"region  = {inv.region}")
        print(f"origin  = {inv.origin.value} ({inv.origin_mode.value})")
        if circles:
            print(f"{'radius':>22s}  {'stability':<24s}  multiplier")
            for c in circles:
                print(f"{c['radius']:22.17g}  {c['stability']:<24s}  {c['multiplier']:.17g}")
        else:
            print("no invariant circles")
        _print_report(report, "text")
    return EXIT_OK


# ----------------------------------------------------------------- curves


def _default_window(m, fraction: float = 0.5) -> tuple[float, float]:
    h = fraction * m.epsilon
    return -h, h


def cmd_curves(args) -> int:
    cfg = load_config(args.config)
    m = cfg.to_model()
    if check_degeneracy(m) is not Degeneracy.DEGENERATE:
        raise NotDegenerate(float(m.determinant))
    window = tuple(args.window) if args.window else _default_window(m)
    flags = {"window": window, "grid": args.grid}
    report = RunReport("curves", _digest("curves", cfg, flags))
    table = coefficient_table(m)
    case = enumerate_case(m)
    for w in case.warnings:
        report.warn("gamma_zero" if w.startswith("gamma_zero") else "assumption", w)
    verdict = "Case1 (L0 a01 > 0, m4 > c4)" if case.case == "Case1" else "Case2 (L0 a01 < 0, m4 < c4)"

    out = Path(args.out)
    rows = [[k, _num(v), _exact(v)] for k, v in table.items()]
    _emit(report, out, "curves.csv", _csv_text(["coefficient", "value", "exact"], rows))
    grid = [window[0] + (window[1] - window[0]) * i / (args.grid - 1) for i in range(args.grid)] if args.grid > 1 else [
        0.5 * (window[0] + window[1])
    ]
    tol = cfg.tol("trace_tol")
    for kind in CurveKind:
        tr = trace_curve(m, kind, grid, trace_tol=tol)
        for a1, reason in tr.failures:
            report.warn("trace", f"{kind.value} at alpha1 = {a1:.17g}: {reason}")
        rows = [[_num(p.alpha1), _num(p.alpha2), _num(r)] for p, r in zip(tr.points, tr.residuals)]
        _emit(report, out, f"trace_{kind.value}.csv", _csv_text(["alpha1", "alpha2", "residual"], rows))

    if args.format == "json":
        payload = {"coefficients": {k: {"value": float(v), "exact": _exact(v)} for k, v in table.items()},
                   "case": case.case, "label": case.label}
        _print_report(report, "json", payload)
    else:
        for k, v in table.items():
            exact = _exact(v)
            print(f"{k:12s} = {float(v):.17g}" + (f"  ({exact})" if exact else ""))
        print(f"verdict: {verdict}")
        print(f"diagram case: {case.label or 'non-generic'}")
        _print_report(report, "text")
    return EXIT_OK


# --------------------------------------------------------------- simulate


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    m = cfg.to_model()
    flags = {"point": args.point, "rho0": args.rho0, "phi0": args.phi0, "steps": args.steps}
    report = RunReport("simulate", _digest("simulate", cfg, flags))
    sim = SimulationConfig(max_steps=args.steps, convergence_tol=cfg.tol("convergence_tol"))
    p = tuple(args.point)
    orbit = iterate_orbit(m, p, args.rho0, args.phi0, sim)
    ev = evaluate(m, p)
    try:
        inv = classify(ev, float(m.L0), cfg.band)
        circles, region = inv.circles, inv.region
    except InfeasibleProfile as exc:
        report.warn("classification", str(exc))
        circles, region = (), None

    out = Path(args.out)
    xs, ys = orbit.cartesian
    rows = [
        [str(n), _num(r), _num(f), _num(x), _num(y)]
        for n, (r, f, x, y) in enumerate(zip(orbit.rho, orbit.phi, xs, ys))
    ]
    _emit(report, out, "orbit.csv", _csv_text(["n", "rho", "phi", "x", "y"], rows))
    _emit(report, out, "orbit.svg", render_orbit_svg(orbit, circles, region, sim.escape_radius))
    if args.format == "json":
        _print_report(report, "json", {"verdict": str(orbit.verdict), "steps": orbit.steps_used, "region": region})
    else:
        print(f"verdict: {orbit.verdict}")
        print(f"steps: {orbit.steps_used}")
        if region is not None:
            print(f"region: {region}")
        _print_report(report, "text")
    return EXIT_OK


# ---------------------------------------------------------------- diagram


def cmd_diagram(args) -> int:
    cfg = load_config(args.config)
    m = cfg.to_model()
    if args.resolution < MIN_RESOLUTION:
        raise ResolutionTooSmall(f"resolution {args.resolution} is below the minimum {MIN_RESOLUTION}")
    if args.window:
        window = tuple(args.window)
    else:
        lo, hi = _default_window(m)
        window = (lo, hi, lo, hi)
    flags = {"window": window, "resolution": args.resolution}
    report = RunReport("diagram", _digest("diagram", cfg, flags))
    spec = build_diagram(m, window, args.resolution, band=cfg.band, trace_tol=cfg.tol("trace_tol"))
    for d in spec.diagnostics:
        report.warn("diagram", d)

    out = Path(args.out)
    _emit(report, out, "diagram.svg", render_svg(spec))
    rows = [[_num(a1), _num(a2), "" if r is None else str(r)] for a1, a2, r in spec.cells()]
    _emit(report, out, "regions.csv", _csv_text(["alpha1", "alpha2", "region_id"], rows))
    if spec.case is not None:
        case_text = spec.case.summary()
    else:
        case_text = "label: none (model is not degenerate)\n"
    case_text += f"R1: {spec.annotations['R1']} (Delta {spec.annotations['delta_R1']})\n"
    case_text += f"R2: {spec.annotations['R2']} (Delta {spec.annotations['delta_R2']})\n"
    _emit(report, out, "case.txt", case_text)
    regions = sorted(spec.regions)
    if args.format == "json":
        _print_report(report, "json", {"regions": regions, "label": spec.case.label if spec.case else None})
    else:
        print(f"regions: {', '.join(map(str, regions))}")
        print(f"diagram case: {spec.case.label if spec.case and spec.case.label else 'non-generic'}")
        _print_report(report, "text")
    return EXIT_OK


# ----------------------------------------------------------------- verify


def cmd_verify(args) -> int:
    if args.random is not None:
        if args.random <= 0:
            raise ConfigError("--random", "must be positive")
        models = random_models(args.random, args.seed)
        cfg = None
    elif args.config:
        cfg = load_config(args.config)
        models = [cfg.to_model()]
    else:
        raise ConfigError("config", "give a config path or --random N")
    flags = {"random": args.random, "seed": args.seed}
    report = RunReport("verify", _digest("verify", cfg, flags))
    results = run_properties(models, seed=args.seed)
    failed = [r for r in results if not r.passed]

    if failed:
        first = failed[0]
        detail = first.failures[0]
        dump = {
            "property": first.name,
            "details": detail,
            "model": ModelConfig.from_model(models[detail["model"]]).to_dict(),
        }
        if args.out:
            _emit(report, Path(args.out), "counterexample.json", json.dumps(dump, indent=2, sort_keys=True, default=str) + "\n")
        report.warn("counterexample", json.dumps(dump, sort_keys=True, default=str))

    if args.format == "json":
        table = [{"property": r.name, "checked": r.checked, "skipped": r.skipped, "failures": len(r.failures),
                  "passed": r.passed} for r in results]
        _print_report(report, "json", {"properties": table, "passed": not failed})
    else:
        print(f"{'property':24s} {'checked':>8s} {'skipped':>8s} {'failed':>7s}  result")
        for r in results:
            print(f"{r.name:24s} {r.checked:8d} {r.skipped:8d} {len(r.failures):7d}  {'pass' if r.passed else 'FAIL'}")
        _print_report(report, "text")
    return EXIT_FAILURE if failed else EXIT_OK


# ------------------------------------------------------------------ main


def _finite(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("value must be finite")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chenciner", description="Degenerate Chenciner bifurcation analysis.")
    sub = parser.add_subparsers(dest="command", required=True)
    fmt = dict(choices=("text", "csv", "json"), default="text", help="output format")

    p = sub.add_parser("analyze", help="classify one parameter point")
    p.add_argument("config")
    p.add_argument("--point", nargs=2, type=_finite, metavar=("A1", "A2"), required=True)
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("curves", help="expansion coefficients and traces of B1, B2, C")
    p.add_argument("config")
    p.add_argument("--window", nargs=2, type=_finite, metavar=("A1MIN", "A1MAX"))
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--out", default=".")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("simulate", help="iterate one orbit")
    p.add_argument("config")
    p.add_argument("--point", nargs=2, type=_finite, metavar=("A1", "A2"), required=True)
    p.add_argument("--rho0", type=_finite, default=0.1)
    p.add_argument("--phi0", type=_finite, default=0.0)
    p.add_argument("--steps", type=int, default=1_000_000)
    p.add_argument("--out", default=".")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("diagram", help="sampled bifurcation diagram")
    p.add_argument("config")
    p.add_argument("--window", nargs=4, type=_finite, metavar=("A1MIN", "A1MAX", "A2MIN", "A2MAX"))
    p.add_argument("--resolution", type=int, default=64)
    p.add_argument("--out", default=".")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("verify", help="run the property suite")
    p.add_argument("config", nargs="?")
    p.add_argument("--random", type=int, metavar="N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--format", **fmt)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "steps", 1) <= 0:
        print("error: config: --steps must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ChencinerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
