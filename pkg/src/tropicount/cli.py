"""Command-line interface: ``tropicount {trop,count,lift,expect}``.

Exit codes: 0 ok, 2 parse error, 3 budget exceeded, 4 not regular / not
semiregular / lifting precondition failed, 5 characteristic precondition.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import __version__
from .count import (
    NOT_SEMIREGULAR,
    count_univariate,
    regular_count,
    root_count_upper_bound,
    semiregular_at,
    weight_from_string,
)
from .errors import BudgetExceeded, CharacteristicError, HenselError, ParseError
from .expect import (
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    ResidueModel,
    expectation_bounds,
    expected_roots,
    simulate_expected_roots,
)
from .hensel import enumerate_and_lift
from .poly import parse
from .residue import DEFAULT_BRUTE_FORCE_BUDGET
from .tropical import DEFAULT_PAIR_BUDGET, format_weight, newton_lower_hull, prevariety_points, tropicalize
from .valued import FieldDescriptor, to_fraction

EXIT_OK, EXIT_PARSE, EXIT_BUDGET, EXIT_NOT_REGULAR, EXIT_CHAR = 0, 2, 3, 4, 5
SCHEMA_VERSION = 1


# -- JSON helpers ---------------------------------------------------------------


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, tuple) else ",".join(map(str, k)): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def emit(payload: dict, as_json: bool, text: str, out=None) -> None:
    out = out or sys.stdout
    if as_json:
        out.write(json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _schema(cmd):
    return f"tropicount.{cmd}/{SCHEMA_VERSION}"


def _load(args):
    if args.file == "-":
        text = sys.stdin.read()
    else:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    field = FieldDescriptor.parse(args.field) if args.field else None
    return parse(text, field=field, precision=getattr(args, "precision", None))


# -- trop -----------------------------------------------------------------------


def cmd_trop(args) -> int:
    F = _load(args)
    prev = prevariety_points(F, budget=args.pair_budget)
    payload = {
        "schema": _schema("trop"),
        "field": str(F.field),
        "n": F.n,
        "status": prev.status,
        "points": [list(w) for w in prev.points],
        "witness": prev.witness,
        "polynomials": [],
    }
    lines = []
    if prev.finite:
        lines.append(f"{prev.status}; points: [{', '.join(format_weight(w) for w in prev.points)}]")
    else:
        lines.append(f"infinite; witness: pairs {prev.witness['pairs']}, "
                     f"points {[format_weight(w) for w in prev.witness['points']]}")
    for f in F:
        entry = {"polynomial": str(f), "terms": len(f)}
        if F.n == 1:
            hull = newton_lower_hull(f)
            entry["hull_vertices"] = [list(v) for v in hull.vertices]
            entry["slopes"] = hull.slopes
            entry["trop"] = hull.trop
            lines.append(f"{f}: Trop = {{{', '.join(str(x) for x in hull.trop)}}}; "
                         f"vertices {list(hull.vertices)}; slopes {[str(s) for s in hull.slopes]}")
        if prev.finite:
            entry["tr_at_points"] = [tropicalize(f, w) for w in prev.points]
        payload["polynomials"].append(entry)
    emit(payload, args.json, "\n".join(lines))
    return EXIT_OK


# -- count ----------------------------------------------------------------------


def _point_payload(pc):
    d = pc.data
    out = {"w": list(pc.w), "contribution": pc.contribution}
    if d is None:
        return out
    if hasattr(d, "snf"):
        out.update({
            "M": [list(r) for r in d.M],
            "snf": d.snf.as_dict(),
            "rho": list(d.rho) if d.rho is not None else None,
            "condition": d.condition,
        })
    else:
        out.update({"gap": d.gap, "rho": d.rho, "method": d.method, "on_points": list(d.on_points)})
    return out


def _count_report_payload(rep, mode):
    return {
        "schema": _schema("count"),
        "mode": mode,
        "regular": rep.regular,
        "total": rep.total,
        "per_point": [_point_payload(pc) for pc in rep.per_point],
        "failure": rep.failure,
        "fallback_used": rep.fallback_used,
    }


def _count_report_text(rep):
    lines = [f"regular: {'yes' if rep.regular else 'no'}"]
    if rep.total is not None:
        lines.append(f"total: {rep.total}")
    for pc in rep.per_point:
        lines.append(f"  w={format_weight(pc.w)}: {pc.contribution}")
    if rep.failure:
        kind = rep.failure["kind"]
        where = f" at {format_weight(rep.failure['w'])}" if "w" in rep.failure else ""
        lines.append(f"failure: {kind}{where}")
    if rep.fallback_used:
        lines.append("note: brute-force fallback used on non-binomial segments")
    return "\n".join(lines)


def cmd_count(args) -> int:
    F = _load(args)
    if args.at is not None:
        w = weight_from_string(args.at)
        rep = semiregular_at(F, w, budget=args.budget)
        payload = {
            "schema": _schema("semireg"),
            "status": rep.status,
            "w": list(rep.w),
            "count": rep.count,
            "residue_zeros": [list(z) for z in rep.residue_zeros],
            "witness": list(rep.witness) if rep.witness else None,
            "initial_forms": list(rep.initial_forms),
        }
        text = f"{rep.status}, {rep.count}"
        if rep.residue_zeros:
            text += f"\nresidue zeros: {[tuple(z) for z in rep.residue_zeros]}"
        if rep.witness:
            text += f"\ndegenerate zero: {tuple(rep.witness)}"
        emit(payload, args.json, text)
        return EXIT_NOT_REGULAR if rep.status == NOT_SEMIREGULAR else EXIT_OK
    if args.bound:
        b = root_count_upper_bound(F, tight=not args.loose)
        payload = {"schema": _schema("bound"), "bound": b, "tight": not args.loose}
        emit(payload, args.json, f"bound: {'infinite' if b == math.inf else b}")
        return EXIT_OK
    if args.univariate:
        if F.n != 1:
            raise ParseError("--univariate needs a single polynomial in one variable", 1, 1)
        rep = count_univariate(F[0], fallback=args.fallback)
        mode = "univariate"
    else:
        rep = regular_count(F, pair_budget=args.pair_budget)
        mode = "regular"
    emit(_count_report_payload(rep, mode), args.json, _count_report_text(rep))
    return EXIT_OK if rep.regular or (rep.fallback_used and rep.total is not None) else EXIT_NOT_REGULAR


# -- lift -----------------------------------------------------------------------


def cmd_lift(args) -> int:
    F = _load(args)
    lifted = enumerate_and_lift(F, precision=args.precision, budget=args.budget)
    roots = []
    lines = [f"{len(lifted)} root(s) in (K*)^{F.n}, precision {F.field.precision}"]
    for L in lifted:
        entry = {
            "w": list(L.w),
            "xbar": list(L.xbar),
            "valuations": [int(x.valuation) for x in L.point],
            "digits": L.digits(),
            "residual_valuations": list(L.residual_valuations),
            "iterations": L.iterations,
        }
        if F.field.kind == "qp":
            entry["rational"] = [to_fraction(x) for x in L.point]
        roots.append(entry)
        coords = "; ".join(
            f"v={int(x.valuation)} digits {tuple(x.digits)}" for x in L.point
        )
        res = ", ".join(str(jsonable(r)) for r in L.residual_valuations)
        lines.append(f"  w={format_weight(L.w)} xbar={L.xbar}: {coords} (residual valuation {res})")
    payload = {"schema": _schema("lift"), "field": str(F.field), "precision": F.field.precision, "roots": roots}
    emit(payload, args.json, "\n".join(lines))
    return EXIT_OK


# -- expect ---------------------------------------------------------------------


def _support(text):
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParseError(f"bad support {text!r}", 1, 1) from None


def cmd_expect(args) -> int:
    A = _support(args.support)
    lo, hi = expectation_bounds(len(A))
    if args.simulate:
        Ms = [int(m) for m in str(args.M).split(",")]
        rows = []
        lines = [f"simulation A={A} p={args.p} trials={args.trials} seed={args.seed}",
                 "M\tmean\tsigma\tskip_rate\tband"]
        for M in Ms:
            s = simulate_expected_roots(A, args.p, M, args.trials, seed=args.seed, jobs=args.jobs)
            rows.append({
                "M": M, "mean": s.mean, "sigma": s.sigma, "skipped": s.skipped,
                "skip_rate": s.skip_rate, "band": s.band, "fallback_draws": s.fallback_draws,
            })
            lines.append(f"{M}\t{s.mean:.6f}\t{s.sigma:.6f}\t{s.skip_rate:.6f}\t{s.band:.6f}")
        payload = {"schema": _schema("simulate"), "A": list(A), "p": args.p, "trials": args.trials,
                   "seed": args.seed, "rows": rows}
        emit(payload, args.json, "\n".join(lines))
        return EXIT_OK
    model = ResidueModel.parse(args.model)
    rep = expected_roots(A, model, samples=args.samples, seed=args.seed, jobs=args.jobs)
    payload = {
        "schema": _schema("expect"),
        "A": list(A),
        "model": rep.model,
        "E": rep.E,
        "E_float": float(rep.E),
        "sigma": rep.sigma,
        "confidence_halfwidth": rep.confidence_halfwidth,
        "samples": rep.samples,
        "seed": rep.seed,
        "exact": rep.exact,
        "per_B": [{"B": list(B), "P": P, "inner": s} for B, (P, s) in rep.per_B.items()],
        "P_interior": {str(a): P for a, P in rep.P_interior.items()},
        "one_plus_sum_Pi": rep.one_plus_sum_Pi,
        "bounds": {"lower": lo, "upper": hi},
    }
    exact = " (exact)" if rep.exact else f" +- {rep.confidence_halfwidth:.6f}"
    lines = [f"E = {float(rep.E):.6f}{exact}", f"model {rep.model}, samples {rep.samples}, seed {rep.seed}",
             f"bounds: {lo} <= E <= {hi:.6f}"]
    for B, (P, s) in rep.per_B.items():
        lines.append(f"  B={B}: P={float(P):.6f} inner={s}")
    emit(payload, args.json, "\n".join(lines))
    return EXIT_OK


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tropicount", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def system_cmd(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("file", help="system file, or - for stdin")
        sp.add_argument("--field", help="field if the file has no header, e.g. qp:7")
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--pair-budget", type=int, default=DEFAULT_PAIR_BUDGET)
        sp.add_argument("--budget", type=int, default=DEFAULT_BRUTE_FORCE_BUDGET,
                        help="maximum p^n for residue brute force")
        return sp

    system_cmd("trop", "tropical prevariety and Newton polygon data").set_defaults(fn=cmd_trop)

    sp = system_cmd("count", "semiregularity, regularity and root counts")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--at", metavar="W", help="run the semiregularity test at weight W, e.g. 0,1/2")
    mode.add_argument("--regular", action="store_true", help="regularity test and total count (default)")
    mode.add_argument("--univariate", action="store_true", help="Newton polygon count")
    mode.add_argument("--bound", action="store_true", help="a-priori upper bound")
    sp.add_argument("--loose", action="store_true", help="with --bound: use the pair-choice bound")
    sp.add_argument("--fallback", action="store_true",
                    help="with --univariate: brute-force segments with interior points")
    sp.set_defaults(fn=cmd_count)

    sp = system_cmd("lift", "list all zeros lifted to the working precision")
    sp.add_argument("--precision", type=int, help="number of digits N")
    sp.set_defaults(fn=cmd_lift)

    sp = sub.add_parser("expect", help="expected number of roots for a support")
    sp.add_argument("support", help="comma-separated exponents, e.g. 0,1,2")
    sp.add_argument("--model", default="ac", help="ac, real or fp:<p>")
    sp.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--simulate", action="store_true", help="direct simulation over random coefficients")
    sp.add_argument("--p", type=int, default=7, help="residue characteristic for --simulate")
    sp.add_argument("--M", default="10,40,160", help="valuation bounds for --simulate")
    sp.add_argument("--trials", type=int, default=10**5)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(fn=cmd_expect)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except HenselError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_NOT_REGULAR
    except CharacteristicError as exc:
        print(f"characteristic precondition: {exc}", file=sys.stderr)
        return EXIT_CHAR
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
