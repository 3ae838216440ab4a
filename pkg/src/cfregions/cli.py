"""Command-line front end.

Every command prints one JSON report on standard output.  Exit codes:
0 success, 1 certificate failure, 2 malformed input, 3 domain error or
invalid request.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import dataclasses
import json
import math
import os
import sys
import time
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import engine, regions, sweep
from .engine import ElementSequence
from .errors import CFracError, DomainError, InvalidCertificateRequest, SectorTooWideError
from .projective import INF, ExtendedComplex, Sector

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DOMAIN = 0, 1, 2, 3
TOL_ENV = "CFRAC_DEFAULT_TOL"


class ParseError(Exception):
    pass


# -- wire format ------------------------------------------------------------


def encode_complex(z: Any) -> Any:
    if isinstance(z, ExtendedComplex):
        z = z.value()
    z = complex(z)
    if cmath.isinf(z):
        return "inf"
    return {"re": z.real, "im": z.imag}


def decode_complex(obj: Any, where: str) -> complex:
    if obj == "inf":
        return complex(math.inf, 0)
    if isinstance(obj, bool):
        raise ParseError(f"{where}: expected a number or {{re, im}} object")
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, dict) and "re" in obj:
        re, im = obj["re"], obj.get("im", 0)
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
            return complex(re, im)
    raise ParseError(f"{where}: expected a number or {{re, im}} object, got {obj!r}")


def _count(obj: dict) -> int:
    n = obj.get("count")
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("'count' must be an integer")
    if n < 1:
        raise DomainError("'count' must be at least 1")
    return n


def parse_sequence_spec(obj: Any) -> ElementSequence:
    """Build an :class:`ElementSequence` from a decoded SequenceSpec object."""
    if not isinstance(obj, dict):
        raise ParseError("sequence spec must be a JSON object")
    kind = obj.get("kind")
    sector = None
    if "sector_half_angle" in obj:
        theta = obj["sector_half_angle"]
        if not isinstance(theta, (int, float)) or isinstance(theta, bool):
            raise ParseError("'sector_half_angle' must be a number (radians)")
        sector = Sector(float(theta))
    if kind == "list":
        elems = obj.get("elements")
        if not isinstance(elems, list):
            raise ParseError("'elements' must be a list")
        values = [decode_complex(e, f"elements[{i}]") for i, e in enumerate(elems)]
        return ElementSequence.from_list(values, sector)
    if kind == "geometric":
        for key in ("b0", "ratio"):
            if key not in obj:
                raise ParseError(f"geometric spec needs '{key}'")
        return ElementSequence.geometric(
            decode_complex(obj["b0"], "b0"), decode_complex(obj["ratio"], "ratio"), _count(obj), sector
        )
    if kind == "constant":
        if "b" not in obj:
            raise ParseError("constant spec needs 'b'")
        return ElementSequence.constant(decode_complex(obj["b"], "b"), _count(obj), sector)
    raise ParseError(f"unknown sequence kind {kind!r}")


def load_spec(path: str) -> tuple:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read spec {path!r}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON in {path!r}: {exc}") from exc
    return obj, parse_sequence_spec(obj)


def _jsonable(value: Any) -> Any:
    if isinstance(value, (complex, ExtendedComplex)):
        return encode_complex(value)
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if dataclasses.is_dataclass(value):
        return _jsonable(dataclasses.asdict(value))
    return value


def fmt(x: float) -> str:
    """Round-trip decimal formatting for CSV cells."""
    return format(x, ".17g")


# -- helpers ----------------------------------------------------------------


def default_slack() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return regions.DEFAULT_SLACK
    try:
        value = float(raw)
    except ValueError as exc:
        raise ParseError(f"{TOL_ENV}={raw!r} is not a number") from exc
    if not value >= 0:
        raise DomainError(f"{TOL_ENV} must be non-negative")
    return value


def _slack(args: argparse.Namespace) -> float:
    if getattr(args, "tol", None) is not None:
        if not args.tol >= 0:
            raise DomainError("--tol must be non-negative")
        return args.tol
    return default_slack()


def _seed_point(args: argparse.Namespace) -> ExtendedComplex:
    if args.w_inf:
        return INF
    return ExtendedComplex.of(complex(args.w_re, args.w_im))


def _theta(seq: ElementSequence) -> tuple:
    """Declared sector half-angle, else the smallest sector holding every element."""
    if seq.sector is not None:
        return seq.sector.half_angle, "declared"
    return max(abs(cmath.phase(b)) for b in seq.elements), "inferred"


def _disk(theorem: str, C: float) -> regions.Disk:
    return regions.OriginDisk(C) if theorem == "origin" else regions.ShiftedDisk(C)


def _minimal_constant(theorem: str, ps: list, qs: list, theta: Optional[float]) -> tuple:
    if theorem == "origin":
        return regions.origin_sup(ps, qs), regions.origin_disk_constant(ps, qs, theta)
    return regions.shifted_sup(ps, qs), regions.shifted_disk_constant(ps, qs)


def _check_origin_theta(theorem: str, theta: float) -> None:
    if theorem == "origin" and theta >= regions.QUARTER_PI:
        raise SectorTooWideError(
            f"sector half-angle {theta!r} >= pi/4: the origin-disk bound does not hold there "
            "(sharpness example p = q = t e^{i pi/4}, z = t^(-1/3) e^{i pi/4}; run 'counterexample')"
        )


def _theorem_theta(theorem: str, seq: ElementSequence) -> tuple:
    theta, source = _theta(seq)
    _check_origin_theta(theorem, theta)
    if theorem == "shifted" and source == "inferred":
        return None, "none"
    return theta, source


# -- commands ---------------------------------------------------------------


def cmd_eval(args: argparse.Namespace) -> tuple:
    spec, seq = load_spec(args.spec)
    n = seq.count if args.n is None else args.n
    w = _seed_point(args)
    results: dict = {"mode": args.mode, "n": n}
    if args.mode == "convergent":
        if n < 1:
            raise DomainError("convergents are indexed from 1")
        results["value"] = engine.convergent_at(seq, n, w)
    elif args.mode == "tail":
        tails = engine.tail_sequence(seq, n, w)
        results["tails"] = [{"index": n - j, "value": t} for j, t in enumerate(tails)]
        results["value"] = tails[-1]
    else:
        results["value"] = engine.reverse_sequence(seq, n, w)
        results["index"] = n + 1
    inputs = {"spec": spec, "n": n, "w": w, "mode": args.mode}
    return {"inputs": inputs, "results": results, "seed": None, "tolerances": {}}, EXIT_OK


def cmd_certify(args: argparse.Namespace) -> tuple:
    spec, seq = load_spec(args.spec)
    slack = _slack(args)
    theta, theta_source = _theorem_theta(args.theorem, seq)
    w = _seed_point(args)
    if args.target == "tails":
        N = seq.count // 2 if args.n is None else args.n
        if N < 1 or 2 * N > seq.count:
            raise InvalidCertificateRequest(f"need 1 <= N and 2N <= {seq.count}, got N={N}")
        ps, qs = regions.convergent_pairs(seq, N)
    else:
        N = None
        pairs = regions.reverse_pairs if args.target == "reverse" else regions.convergent_pairs
        ps, qs = pairs(seq)
    sup, c_min = _minimal_constant(args.theorem, ps, qs, theta)
    C = c_min if args.C is None else args.C
    disk = _disk(args.theorem, C)
    if args.target == "convergents":
        cert = regions.certify_even_convergents(seq, w, disk, theta, slack)
    elif args.target == "reverse":
        cert = regions.certify_odd_reverse(seq, w, disk, theta, slack)
    else:
        cert = regions.certify_even_tails(seq, N, w, disk, theta, slack)
    inputs = {
        "spec": spec,
        "theorem": args.theorem,
        "target": args.target,
        "w": w,
        "C": args.C,
        "N": N,
        "theta": theta,
        "theta_source": theta_source,
    }
    results = {"certificate": cert, "minimal_C": c_min, "C_was_computed": args.C is None}
    report = {"inputs": inputs, "results": results, "seed": None, "tolerances": {"slack": slack}}
    return report, EXIT_OK if cert.passed else EXIT_FAIL


def cmd_counterexample(args: argparse.Namespace) -> tuple:
    if args.steps < 1:
        raise DomainError("--steps must be at least 1")
    if not (0 < args.t_min <= args.t_max <= 0.5):
        raise DomainError(f"need 0 < t_min <= t_max <= 1/2, got [{args.t_min!r}, {args.t_max!r}]")
    ts = np.linspace(args.t_min, args.t_max, args.steps)
    rows = [regions.counterexample_eval(float(t)) for t in ts]
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["t", "lhs_squared", "threshold", "violates"])
            for r in rows:
                out.writerow([fmt(r.t), fmt(r.lhs_squared), fmt(r.threshold), "true" if r.violates else "false"])
    worst_rel = max(abs(r.lhs_squared - r.closed_form) / r.closed_form for r in rows)
    results = {
        "steps": len(rows),
        "violations": sum(r.violates for r in rows),
        "max_closed_form_rel_diff": worst_rel,
        "rows": [
            {"t": r.t, "lhs_squared": r.lhs_squared, "threshold": r.threshold, "violates": r.violates}
            for r in rows
        ],
        "csv": args.csv,
    }
    inputs = {"t_min": args.t_min, "t_max": args.t_max, "steps": args.steps}
    return {"inputs": inputs, "results": results, "seed": None, "tolerances": {}}, EXIT_OK


def cmd_region_grid(args: argparse.Namespace) -> tuple:
    if args.resolution < 2:
        raise DomainError("--resolution must be at least 2")
    spec, seq = load_spec(args.spec)
    slack = _slack(args)
    theta, theta_source = _theorem_theta(args.theorem, seq)
    ps, qs = regions.convergent_pairs(seq)
    _, c_min = _minimal_constant(args.theorem, ps, qs, theta)
    C = c_min if args.C is None else args.C
    disk = _disk(args.theorem, C)
    if disk.radius * (1 + 1e-12) < c_min:
        raise InvalidCertificateRequest(f"radius {C!r} is below the admissible constant {c_min!r}")
    R = C if args.grid_radius is None else args.grid_radius
    if not R > 0:
        raise DomainError("--grid-radius must be positive")
    sector = Sector(theta, arg_tol=slack) if theta is not None else None
    state = engine.state_at(seq, 2 * len(ps))
    axis = np.linspace(-R, R, args.resolution)
    rows, skipped = [], 0
    for y in axis:
        for x in axis:
            w = complex(disk.center + x, y)
            if not disk.contains(w, slack) or (sector is not None and w not in sector):
                skipped += 1
                continue
            val = state.at(w)
            ok = disk.contains(val, slack) and (sector is None or val in sector)
            rows.append((w, val.value(), ok))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["w_re", "w_im", "val_re", "val_im", "in_disk"])
            for w, v, ok in rows:
                out.writerow([fmt(w.real), fmt(w.imag), fmt(v.real), fmt(v.imag), "true" if ok else "false"])
    inside = sum(ok for *_, ok in rows)
    results = {
        "C": C,
        "depth": 2 * len(ps),
        "grid_points": args.resolution**2,
        "evaluated": len(rows),
        "skipped": skipped,
        "in_disk": inside,
        "in_disk_fraction": inside / len(rows) if rows else None,
        "csv": args.csv,
    }
    inputs = {
        "spec": spec,
        "theorem": args.theorem,
        "grid_radius": R,
        "resolution": args.resolution,
        "theta": theta,
        "theta_source": theta_source,
    }
    report = {"inputs": inputs, "results": results, "seed": None, "tolerances": {"slack": slack}}
    return report, EXIT_OK if inside == len(rows) else EXIT_FAIL


def cmd_sweep(args: argparse.Namespace) -> tuple:
    slack = _slack(args)
    if args.theta_max is not None and args.theorem == "origin":
        _check_origin_theta("origin", args.theta_max)
    res = sweep.run_sweep(args.theorem, args.samples, args.seed, args.theta_max, slack)
    inputs = {"theorem": args.theorem, "samples": args.samples, "theta_max": res.theta_max}
    results = {
        "violations": res.violations,
        "sector_violations": res.sector_violations,
        "worst_margin": res.worst_margin,
        "worst_sample": res.worst_sample,
    }
    report = {"inputs": inputs, "results": results, "seed": res.seed, "tolerances": {"slack": slack}}
    bad = res.violations or res.sector_violations
    return report, EXIT_FAIL if bad else EXIT_OK


# -- argument parsing -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse already exits with 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cfregions", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def seeded(p: argparse.ArgumentParser) -> None:
        p.add_argument("--w-re", type=float, default=0.0, help="real part of the seed w")
        p.add_argument("--w-im", type=float, default=0.0, help="imaginary part of the seed w")
        p.add_argument("--w-inf", action="store_true", help="use w = infinity")

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tol", type=float, default=None, help=f"membership slack (default 1e-9, or ${TOL_ENV})")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing to the report")

    p = sub.add_parser("eval", help="convergents, tail or reverse values")
    p.add_argument("--spec", required=True)
    p.add_argument("--n", type=int, default=None, help="index (default: element count)")
    p.add_argument("--mode", choices=("convergent", "tail", "reverse"), default="convergent")
    seeded(p)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("certify", help="certify a disk value region")
    p.add_argument("--spec", required=True)
    p.add_argument("--theorem", choices=("origin", "shifted"), required=True)
    p.add_argument("--target", choices=("convergents", "reverse", "tails"), default="convergents")
    p.add_argument("--C", type=float, default=None, help="disk radius (default: minimal admissible)")
    p.add_argument("--n", type=int, default=None, help="tail pair count N (seed sits at index 2N)")
    seeded(p)
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("counterexample", help="sweep the pi/4 sharpness example")
    p.add_argument("--t-min", type=float, default=0.01)
    p.add_argument("--t-max", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--csv", default=None)
    common(p)
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("region-grid", help="even convergents over a grid of admissible seeds")
    p.add_argument("--spec", required=True)
    p.add_argument("--theorem", choices=("origin", "shifted"), required=True)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--grid-radius", type=float, default=None, help="half-width of the grid (default: C)")
    p.add_argument("--resolution", type=int, default=21)
    p.add_argument("--csv", default=None)
    common(p)
    p.set_defaults(func=cmd_region_grid)

    p = sub.add_parser("sweep", help="randomized check of a disk theorem")
    p.add_argument("--theorem", choices=("origin", "shifted"), required=True)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=sweep.DEFAULT_SEED)
    p.add_argument("--theta-max", type=float, default=None)
    common(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except ParseError as exc:
        print(f"cfregions {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CFracError, OSError) as exc:
        print(f"cfregions {args.command}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    report = {"command": args.command, **report}
    if args.timing:
        report["timing"] = {"elapsed_s": time.perf_counter() - start}
    json.dump(_jsonable(report), sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
