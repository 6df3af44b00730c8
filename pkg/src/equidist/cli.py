"""Command-line entry point: ``equidist <subcommand> [flags]``.

Reports are JSON with sorted keys and a ``"schema"`` field, written to
``--out`` (stdout by default).  Exit status is 0 on success or pass, 2 when
an experiment ran and missed its threshold, and 1 on usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, lattice
from .config import RunConfig
from .discrepancy import (
    ModOneSequence,
    erdos_turan_bound,
    escape_step,
    extreme_discrepancy,
    weyl_sum,
)
from .errors import EquidistError
from .exact import ExactScalar, GeneratorSet, IrrationalGenerator
from .experiments import (
    SCHEMA,
    a_set_shrinkage,
    taylor_fiber_check,
    verify_lp_norm,
    verify_poly_equidist,
    verify_weyl_1d,
)
from .functions import LpNormSpec, Polynomial, lp_directional_derivative, lp_norm_values
from .measures import classify, distance_to_uniform, histogram_svg, pushforward_mod1

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# -- argument parsing helpers ----------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


_SCALED_NAME = re.compile(r"^\s*([-+]?[0-9/]+)\s*\*\s*([A-Za-z_]\w*)\s*$")


def parse_scalar(text: str, precision: int) -> ExactScalar:
    """``"1/2"``, ``"sqrt2"``, ``"3/4*pi"`` or a JSON scalar document."""
    text = text.strip()
    try:
        return ExactScalar.of(Fraction(text))
    except ValueError:
        pass
    if re.fullmatch(r"[A-Za-z_]\w*", text):
        return IrrationalGenerator.known(text, precision).scalar()
    m = _SCALED_NAME.match(text)
    if m:
        return IrrationalGenerator.known(m.group(2), precision).scalar().scale(Fraction(m.group(1)))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        raise UsageError(f"cannot parse scalar {text!r}") from None
    return ExactScalar.from_json(doc, GeneratorSet(precision=precision))


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _load_polynomial(path: str) -> Polynomial:
    doc = _load_json(path)
    try:
        return Polynomial.from_json(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _read_column(path: str, exact: bool = False) -> list:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    out = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not row[0].strip() or row[0].lstrip().startswith("#"):
            continue
        try:
            out.append(Fraction(row[0].strip()) if exact else float(row[0]))
        except ValueError:
            raise UsageError(f"{path}:{lineno}: not a number: {row[0]!r}") from None
    return out


def _read_sequence(path: str, exact: bool) -> ModOneSequence:
    vals = _read_column(path, exact)
    if exact:
        return ModOneSequence(tuple(v % 1 for v in vals))
    return ModOneSequence.from_reals(np.asarray(vals, dtype=float))


def _read_points(path: str, n: int) -> list[tuple[int, ...]]:
    text = Path(path).read_text()
    pts = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or row[0].lstrip().startswith("#"):
            continue
        try:
            pt = tuple(int(c) for c in row)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: expected integers") from None
        if len(pt) != n:
            raise UsageError(f"{path}:{lineno}: expected {n} coordinates, got {len(pt)}")
        pts.append(pt)
    return pts


def _cap(args, n: int):
    if args.cap_center is None:
        if args.cap_angle is not None:
            raise UsageError("--cap-angle needs --cap-center")
        return None
    if len(args.cap_center) != n:
        raise UsageError(f"--cap-center has {len(args.cap_center)} coordinates, expected {n}")
    return lattice.SphericalCap.around(args.cap_center, math.pi if args.cap_angle is None else args.cap_angle)


def _jsonable(x):
    if isinstance(x, Fraction):
        return {"exact": f"{x.numerator}/{x.denominator}", "float": float(x)}
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    return x


def _emit(doc: dict, out: str | None) -> None:
    doc = dict(doc)
    doc.setdefault("schema", SCHEMA)
    text = json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"
    _write(text, out)


def _write(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# -- subcommands ------------------------------------------------------------------------


def cmd_eval(args, cfg: RunConfig) -> int:
    doc = _load_json(args.spec)
    if "p" in doc:
        try:
            spec = LpNormSpec.from_json(doc)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"{args.spec}: {exc}") from None
        pts = _points_arg(args, spec.dimension)
        vals = lp_norm_values(np.asarray(pts, dtype=np.int64), spec.p)
        rows = [{"point": list(p), "value": float(v), "mod1": float(v % 1)} for p, v in zip(pts, vals)]
        _emit({"command": "eval", "function": spec.to_json(), "values": rows}, args.out)
        return EXIT_OK
    F = _load_polynomial(args.spec)
    pts = _points_arg(args, F.dimension)
    rows = []
    for p in pts:
        v = F.evaluate(p)
        # print no more digits than the generator approximations support
        digits = 30 if v.is_rational else max(1, min(30, math.floor(v.available_digits()) - 2))
        rows.append({"point": list(p), "value": v.to_json(), "text": str(v),
                     "mod1": str(v.mod_one_approx(digits))})
    _emit({"command": "eval", "function": F.to_json(), "values": rows}, args.out)
    return EXIT_OK


def _points_arg(args, n: int) -> list[tuple[int, ...]]:
    if args.point is not None and args.points is not None:
        raise UsageError("give either --point or --points, not both")
    if args.point is not None:
        if len(args.point) != n:
            raise UsageError(f"--point has {len(args.point)} coordinates, expected {n}")
        return [tuple(args.point)]
    if args.points is not None:
        return _read_points(args.points, n)
    raise UsageError("one of --point or --points is required")


def cmd_discrepancy(args, cfg: RunConfig) -> int:
    seq = _read_sequence(args.input, args.exact)
    rep = extreme_discrepancy(seq)
    _emit({"command": "discrepancy", "N": rep.N, "extreme": rep.extreme, "star": rep.star}, args.out)
    return EXIT_OK


def cmd_weyl_sum(args, cfg: RunConfig) -> int:
    if args.h == 0:
        raise UsageError("h must be nonzero")
    seq = _read_sequence(args.input, args.exact)
    _emit({"command": "weyl-sum", "N": seq.N, "h": args.h, "value": weyl_sum(seq, args.h)}, args.out)
    return EXIT_OK


def cmd_et_bound(args, cfg: RunConfig) -> int:
    if args.K < 1:
        raise UsageError("K must be >= 1")
    seq = _read_sequence(args.input, False)
    _emit({"command": "et-bound", "N": seq.N, "K": args.K, "bound": erdos_turan_bound(seq, args.K)}, args.out)
    return EXIT_OK


def cmd_a_set(args, cfg: RunConfig) -> int:
    a = float(parse_scalar(args.a, cfg.precision).frac())
    if not 0 < args.eps:
        raise UsageError("eps must be positive")
    k = escape_step(a, args.d, args.eps, args.N, cfg.grid, not args.no_refine)
    _emit({"command": "a-set", "a": a, "d": args.d, "N": args.N, "eps": args.eps, "grid": cfg.grid,
           "refine": not args.no_refine, "in_A": k is None, "escape_step": k}, args.out)
    return EXIT_OK


def cmd_enumerate(args, cfg: RunConfig) -> int:
    cap = _cap(args, args.dim)
    if cap is None:
        chunks = lattice.iter_ball_chunks(args.dim, args.radius, budget=cfg.budget)
    else:
        chunks = lattice.iter_cone_chunks(lattice.ConeRegion(cap, args.radius), budget=cfg.budget)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    count = 0
    for chunk in chunks:
        w.writerows(chunk.tolist())
        count += len(chunk)
    _write(buf.getvalue(), args.out)
    if args.report:
        _emit({"command": "enumerate", "dim": args.dim, "radius": args.radius, "count": count,
               "cap": None if cap is None else {"center": list(cap.center), "angle": cap.angle}}, args.report)
    return EXIT_OK


def cmd_pushforward(args, cfg: RunConfig) -> int:
    n = args.dim
    cap = _cap(args, n)
    if args.fn == "lp":
        if args.p is None:
            raise UsageError("--fn lp needs --p")
        spec = LpNormSpec(args.p, n)
        if not 0 <= args.j < n:
            raise UsageError(f"--j must lie in 0..{n - 1}")
        if cap is None:
            pts = lattice.sample_orthant(n, args.samples, cfg.seed)
        else:
            pts = lattice.sample_cap(cap, args.samples, cfg.seed)
        m = pushforward_mod1(lambda s: lp_directional_derivative(spec, s, args.j), pts, cfg.bins)
        fn = {"fn": "lp", "p": args.p, "j": args.j}
    else:
        c = float(parse_scalar(args.value, cfg.precision))
        pts = lattice.sample_orthant(n, args.samples, cfg.seed) if cap is None else lattice.sample_cap(cap, args.samples, cfg.seed)
        m = pushforward_mod1(lambda s: np.full(len(s), c), pts, cfg.bins)
        fn = {"fn": "const", "value": args.value}
    if args.svg:
        Path(args.svg).write_text(histogram_svg(m))
    doc = {"command": "pushforward", **m.to_json(), "function": fn, "dim": n, "seed": cfg.seed,
           "samples": args.samples, "classification": classify(m),
           "distance_to_uniform": distance_to_uniform(m).to_json(),
           "cap": None if cap is None else {"center": list(cap.center), "angle": cap.angle}}
    _emit(doc, args.out)
    return EXIT_OK


def cmd_experiment(args, cfg: RunConfig) -> int:
    kind = args.experiment
    if kind == "poly":
        F = _load_polynomial(args.spec)
        cap = _cap(args, F.dimension)
        rep = verify_poly_equidist(F, args.radii, args.threshold, cap, args.workers, cfg.budget)
    elif kind == "lp":
        rep = verify_lp_norm(args.p, args.n, args.radii, args.threshold, args.samples, cfg.seed,
                             cfg.bins, args.workers, cfg.budget)
    elif kind == "weyl1d":
        rep = verify_weyl_1d(parse_scalar(args.a, cfg.precision), args.d, args.N, args.threshold)
    elif kind == "a-set":
        rep = a_set_shrinkage(args.d, args.eps, args.N, args.samples, cfg.seed, cfg.grid,
                              not args.no_refine, args.workers)
    elif kind == "taylor":
        if args.spec is not None:
            f = _load_polynomial(args.spec)
            n = f.dimension
            if args.v is None or len(args.v) != n:
                raise UsageError(f"polynomial fibers need --v with {n} integers")
            v = tuple(args.v)
        else:
            n = args.n
            f = LpNormSpec(args.p, n)
            v = args.j
        cap = _cap(args, n) or lattice.SphericalCap.full(n)
        rep = taylor_fiber_check(f, cap, v, args.T, args.N0, args.count, cfg.seed, cfg.budget)
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown experiment {kind!r}")
    _emit(rep.to_json(), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- parser -----------------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration")
    g.add_argument("--seed", type=int, default=None, help="RNG seed (64-bit, default 0)")
    g.add_argument("--bins", type=int, default=None, help="histogram bins (default 64)")
    g.add_argument("--grid", type=int, default=None, help="A-set coefficient grid (default 64)")
    g.add_argument("--precision", type=int, default=None, help="decimal digits for named constants (default 64)")
    g.add_argument("--budget", type=int, default=None, help="max lattice points (default $EQUIDIST_BUDGET or 2e7)")
    g.add_argument("--workers", type=int, default=1, help="threads for chunked work (results do not depend on it)")
    g.add_argument("--out", default=None, help="output file (default stdout)")
    return p


def _add_cap(p):
    p.add_argument("--cap-center", type=_floats, default=None, help="cap direction, comma-separated floats")
    p.add_argument("--cap-angle", type=float, default=None, help="cap angular radius in radians (default pi)")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="equidist", description="Equidistribution mod 1 of functions on lattice points.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("eval", parents=[common], help="evaluate a polynomial or l^p spec exactly")
    p.add_argument("--spec", required=True, help="JSON function spec")
    p.add_argument("--point", type=_ints, default=None, help="one integer point, comma-separated")
    p.add_argument("--points", default=None, help="CSV of integer points")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("discrepancy", parents=[common], help="extreme and star discrepancy of a sequence")
    p.add_argument("--in", dest="input", required=True, help="CSV, one value per line (reduced mod 1)")
    p.add_argument("--exact", action="store_true", help="read values as exact rationals")
    p.set_defaults(func=cmd_discrepancy)

    p = sub.add_parser("weyl-sum", parents=[common], help="|(1/N) sum exp(2 pi i h x_n)|")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--h", type=int, required=True, help="nonzero integer frequency")
    p.add_argument("--exact", action="store_true")
    p.set_defaults(func=cmd_weyl_sum)

    p = sub.add_parser("et-bound", parents=[common], help="Erdos-Turan upper bound on the discrepancy")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--K", type=int, required=True, help="number of frequencies")
    p.set_defaults(func=cmd_et_bound)

    p = sub.add_parser("a-set", parents=[common], help="membership of a in A^d(N, eps)")
    p.add_argument("--a", required=True, help="scalar, e.g. 0.4142 or sqrt2")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--no-refine", action="store_true", help="skip the doubled-grid recheck")
    p.set_defaults(func=cmd_a_set)

    p = sub.add_parser("enumerate", parents=[common], help="lattice points of a ball or cone as CSV")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--radius", type=float, required=True)
    _add_cap(p)
    p.add_argument("--report", default=None, help="also write a JSON summary here")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("pushforward", parents=[common], help="histogram of g mod 1 under cap measure")
    p.add_argument("--fn", choices=["lp", "const"], default="lp")
    p.add_argument("--p", type=float, default=None, help="l^p exponent for --fn lp")
    p.add_argument("--j", type=int, default=0, help="0-based coordinate of the partial derivative")
    p.add_argument("--value", default="0", help="constant for --fn const")
    p.add_argument("--dim", type=int, default=2)
    _add_cap(p)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--svg", default=None, help="also write an SVG bar chart")
    p.set_defaults(func=cmd_pushforward)

    p = sub.add_parser("experiment", help="end-to-end experiments with pass/fail verdicts")
    exp = p.add_subparsers(dest="experiment", metavar="EXPERIMENT", parser_class=_Parser)
    exp.required = True

    e = exp.add_parser("poly", parents=[common], help="polynomial mod 1 over lattice balls")
    e.add_argument("--spec", required=True)
    e.add_argument("--radii", type=_floats, required=True)
    e.add_argument("--threshold", type=float, default=None)
    _add_cap(e)
    e = exp.add_parser("lp", parents=[common], help="l^p norm mod 1 over lattice balls")
    e.add_argument("--p", type=float, required=True)
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--radii", type=_floats, required=True)
    e.add_argument("--threshold", type=float, default=None)
    e.add_argument("--samples", type=int, default=100_000, help="samples for the hypothesis gate")
    e = exp.add_parser("weyl1d", parents=[common], help="a n^d mod 1 along a dyadic ladder")
    e.add_argument("--a", required=True)
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--N", type=int, required=True)
    e.add_argument("--threshold", type=float, default=None)
    e = exp.add_parser("a-set", parents=[common], help="fraction of sampled a left in A^d(N, eps)")
    e.add_argument("--d", type=int, required=True)
    e.add_argument("--eps", type=float, required=True)
    e.add_argument("--N", type=_ints, required=True, help="comma-separated ladder of N")
    e.add_argument("--samples", type=int, default=512)
    e.add_argument("--no-refine", action="store_true")
    e = exp.add_parser("taylor", parents=[common], help="Taylor model error along lattice fibers")
    e.add_argument("--p", type=float, default=2.0)
    e.add_argument("--n", type=int, default=2)
    e.add_argument("--j", type=int, default=0, help="0-based fiber coordinate for l^p")
    e.add_argument("--spec", default=None, help="polynomial spec instead of an l^p norm")
    e.add_argument("--v", type=_ints, default=None, help="integer fiber direction for --spec")
    e.add_argument("--T", type=float, required=True)
    e.add_argument("--N0", type=int, required=True)
    e.add_argument("--count", type=int, default=256)
    _add_cap(e)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_env(seed=args.seed, bins=args.bins, grid=args.grid,
                                 precision=args.precision, budget=args.budget)
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        return args.func(args, cfg)
    except (UsageError, EquidistError, ValueError, KeyError, TypeError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"equidist {args.command}: error: {msg}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
