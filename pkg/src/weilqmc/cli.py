"""Command-line front end.

Exit status: 0 success, 1 a bound or identity check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .charsums import BudgetExceededError, verify_walsh, verify_weil_prime
from .finitefield import FieldParams, find_field_poly
from .integrands import load_spec, spec_from_dict, spec_to_dict
from .modarith import is_prime, primes_between
from .pointsets import (
    PointSet,
    gen_walsh_pset,
    gen_walsh_pset_fast,
    gen_weil_pset,
    gen_weil_pset_exponents,
    gen_weil_pset_fast,
    tent_transform,
)
from .quadrature import (
    BoundQuery,
    aliasing_check,
    bound_terms,
    error,
    fitted_slope,
    info_complexity,
    point_set_for,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2
FAMILIES = ("weil", "weil-fast", "weil-exponents", "tent", "walsh", "walsh-fast")
CSV_COLUMNS = ["N", "s", "space", "function", "error", "bound", "norm", "ratio", "certified"]


class UsageError(Exception):
    pass


# --- argument helpers ----------------------------------------------------------------


def _real(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _int_range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from exc


def _field(args) -> FieldParams:
    if getattr(args, "field", None):
        return FieldParams.from_string(args.field)
    if args.b is None or args.m is None:
        raise UsageError("Walsh families need --b and --m (or --field)")
    primitive = getattr(args, "family", "") == "walsh-fast"
    return find_field_poly(args.b, args.m, primitive_required=primitive)


def _open_out(path: str | None):
    return open(path, "w", newline="") if path else _NoClose(sys.stdout)


class _NoClose:
    def __init__(self, fh):
        self.fh = fh

    def __enter__(self):
        return self.fh

    def __exit__(self, *exc):
        self.fh.flush()


def _plain(obj: Any) -> Any:
    """Strict-JSON version of ``obj``: non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item"):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    return obj


def _dump_json(obj: Any, path: str | None):
    with _open_out(path) as fh:
        json.dump(_plain(obj), fh, indent=2, allow_nan=False)
        fh.write("\n")


def _config(args) -> dict[str, Any]:
    return _plain({k: v for k, v in vars(args).items() if k != "func"})


# --- gen -------------------------------------------------------------------------------


def _build_points(args) -> PointSet:
    fam = args.family
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always")
        if fam in ("walsh", "walsh-fast"):
            gen = gen_walsh_pset if fam == "walsh" else gen_walsh_pset_fast
            return gen(_field(args), args.s, args.exponents)
        if args.prime is None:
            raise UsageError("--prime is required for this family")
        N = args.prime
        if not is_prime(N):
            raise UsageError(f"N must be prime, got {N}")
        if fam == "weil":
            return gen_weil_pset(N, args.s)
        if fam == "weil-fast":
            return gen_weil_pset_fast(N, args.s, args.exponents)
        if fam == "weil-exponents":
            if not args.exponents:
                raise UsageError("--exponents is required for weil-exponents")
            return gen_weil_pset_exponents(N, args.exponents)
        return tent_transform(gen_weil_pset(N, args.s))


def format_points(P: PointSet, digits: int | None = None) -> str:
    """One point per line, coordinates as ``r/denom`` or as decimals."""
    d = P.denom
    lines = []
    for row in P.residues:
        if digits is None:
            lines.append(" ".join(f"{int(r)}/{d}" for r in row))
        else:
            lines.append(" ".join(f"{int(r) / d:.{digits}f}" for r in row))
    return "\n".join(lines) + "\n"


def cmd_gen(args) -> int:
    P = _build_points(args)
    if args.format == "json":
        _dump_json(
            {"config": _config(args), "metadata": P.metadata(), "denom": P.denom, "residues": P.residues.tolist()},
            args.out,
        )
    else:
        with _open_out(args.out) as fh:
            fh.write(format_points(P, args.digits))
    return EXIT_OK


# --- verify ------------------------------------------------------------------------------


def _verify(args, run) -> int:
    mode = "sampled" if args.samples is not None else "exhaustive"
    try:
        report = run(
            mode=mode,
            samples=args.samples or 0,
            seed=args.seed,
            budget=args.budget,
            force_sample=args.force_sample,
        )
    except BudgetExceededError as exc:
        raise UsageError(f"{exc}; pass --samples K or --force-sample") from exc
    report["config"] = _config(args)
    _dump_json(report, args.out)
    return EXIT_OK if report["violations"] == 0 else EXIT_VIOLATION


def cmd_verify_weil(args) -> int:
    if not is_prime(args.prime):
        raise UsageError(f"N must be prime, got {args.prime}")
    if not 1 <= args.s < args.prime:
        raise UsageError(f"need 1 <= s < N, got s={args.s}, N={args.prime}")

    def run(mode, samples, seed, budget, force_sample):
        return verify_weil_prime(
            args.prime, args.s, mode, samples or args.fallback_samples, seed, budget, force_sample
        )

    return _verify(args, run)


def cmd_verify_walsh(args) -> int:
    params = _field(args)

    def run(mode, samples, seed, budget, force_sample):
        return verify_walsh(
            params, args.s, mode, samples or args.fallback_samples, seed, budget, force_sample, args.exponents
        )

    return _verify(args, run)


# --- converge ------------------------------------------------------------------------------


def _read_header_config(path: str) -> dict[str, Any]:
    with open(path) as fh:
        for line in fh:
            if line.startswith("# config: "):
                return json.loads(line[len("# config: "):])
    raise UsageError(f"no '# config:' header in {path}")


def _sizes(args, spec) -> list[int]:
    s = spec.dim or 1
    if args.space == "W":
        # Walsh coefficients are tied to their field, so each spec has one size
        N = spec.field.order
        return [N] if N > s else []
    if args.auto:
        return [N for N in primes_between(11, 997) if N > s * s]
    if not args.primes:
        raise UsageError("give --primes LO..HI or --auto")
    lo, hi = args.primes
    return [N for N in primes_between(lo, hi) if N > s]


def cmd_converge(args) -> int:
    if args.config:
        cfg = _read_header_config(args.config)
        args.space, args.auto = cfg["space"], cfg["auto"]
        args.primes = tuple(cfg["primes"]) if cfg["primes"] else None
        specs = [(name, spec_from_dict(d)) for name, d in cfg["specs"]]
    else:
        if not args.function:
            raise UsageError("give --function SPEC.json (repeatable) or --config FILE")
        specs = []
        for path in args.function:
            try:
                sp = load_spec(path)
            except (OSError, ValueError) as exc:
                raise UsageError(f"cannot read spec {path}: {exc}") from exc
            specs.append((sp.name or os.path.splitext(os.path.basename(path))[0], sp))
    args.space = args.space.upper()
    jobs = []
    for name, spec in specs:
        if {"K": "fourier", "C": "cosine", "W": "walsh"}[args.space] != spec.basis:
            raise UsageError(f"spec {name} ({spec.basis}) does not belong to space {args.space}")
        for N in _sizes(args, spec):
            jobs.append((N, name, spec))

    def run(job):
        N, name, spec = job
        s = spec.dim or 1
        return error(spec, point_set_for(args.space, N, s, spec.field), name)

    threads = max(1, int(os.environ.get("THREADS", "1") or 1))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        reports = list(pool.map(run, jobs))
    reports.sort(key=lambda r: (r.N, r.function))
    config = {
        "command": "converge",
        "space": args.space,
        "primes": list(args.primes) if args.primes else None,
        "auto": bool(args.auto),
        "specs": [[name, spec_to_dict(sp)] for name, sp in specs],
    }
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())
    for name, _ in specs:
        slope = fitted_slope([r for r in reports if r.function == name])
        buf.write(f"# fitted_slope {name}: {'nan' if slope is None else repr(slope)}\n")
    with _open_out(args.out) as fh:
        fh.write(buf.getvalue())
    bad = [r for r in reports if r.certified and r.ratio > 1 + 1e-12]
    bad += [r for r in reports if r.identity_error > 1e-12]
    if bad:
        print(f"{len(bad)} rows violate the bound or the error identity", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


# --- bound / complexity / aliasing ------------------------------------------------------------


def cmd_bound(args) -> int:
    q = BoundQuery(args.space, args.n, args.s, args.alpha, args.p, tuple(args.exponents) if args.exponents else None, args.b)
    weil, alias = bound_terms(q)
    _dump_json(
        {
            "config": _config(args),
            "bound": max(weil, alias),
            "character_sum_term": weil,
            "aliasing_term": alias,
            "nontrivial": max(weil, alias) < 1,
        },
        args.out,
    )
    return EXIT_OK


def cmd_complexity(args) -> int:
    N = info_complexity(args.eps, args.s, args.alpha, args.p, args.space, args.b)
    _dump_json(
        {
            "config": _config(args),
            "N": N,
            "note": "upper bound on the QMC information complexity N(eps, s)",
            "weil_term_nontrivial": args.s * args.s <= N,
        },
        args.out,
    )
    return EXIT_OK


def cmd_aliasing(args) -> int:
    try:
        spec = load_spec(args.function)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read spec {args.function}: {exc}") from exc
    results = [aliasing_check(spec, L, args.budget) for L in args.L]
    _dump_json({"config": _config(args), "results": results}, args.out)
    ok = all(r["agree"] and r["compliant"] for r in results)
    return EXIT_OK if ok else EXIT_VIOLATION


# --- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="weilqmc", description="Weil-sum quadrature point sets and bounds.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a point set")
    g.add_argument("--family", choices=FAMILIES, default="weil")
    g.add_argument("--prime", type=int)
    g.add_argument("--s", type=int, required=True)
    g.add_argument("--exponents", type=_int_list)
    g.add_argument("--b", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--field", help='field parameters "b,m,p0,...,pm"')
    g.add_argument("--digits", type=int, help="print decimals with this many digits")
    g.add_argument("--format", choices=("text", "json"), default="text")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    def verify_flags(p):
        p.add_argument("--s", type=int, required=True)
        p.add_argument("--exhaustive", action="store_true", help="enumerate every wave vector (default)")
        p.add_argument("--samples", type=int, help="sample this many wave vectors instead")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=10**8, help="max wave vectors in exhaustive mode")
        p.add_argument("--force-sample", action="store_true", help="sample when over budget")
        p.add_argument("--fallback-samples", type=int, default=100_000, help=argparse.SUPPRESS)
        p.add_argument("--out")

    vw = sub.add_parser("verify-weil", help="check the prime-field Weil bound")
    vw.add_argument("--prime", type=int, required=True)
    verify_flags(vw)
    vw.set_defaults(func=cmd_verify_weil)

    vl = sub.add_parser("verify-walsh", help="check the Walsh-sum bound")
    vl.add_argument("--b", type=int)
    vl.add_argument("--m", type=int)
    vl.add_argument("--field")
    vl.add_argument("--exponents", type=_int_list)
    verify_flags(vl)
    vl.set_defaults(func=cmd_verify_walsh)

    c = sub.add_parser("converge", help="error table over a range of point counts")
    c.add_argument("--space", choices=("K", "C", "W", "k", "c", "w"), default="K")
    c.add_argument("--function", action="append", help="SeriesSpec JSON file (repeatable)")
    c.add_argument("--primes", type=_int_range, help="LO..HI")
    c.add_argument("--auto", action="store_true", help="all primes 11..997 above s^2")
    c.add_argument("--config", help="rerun with the configuration stored in a previous CSV")
    c.add_argument("--out")
    c.set_defaults(func=cmd_converge)

    b = sub.add_parser("bound", help="evaluate a worst-case error bound")
    b.add_argument("--space", choices=("K", "C", "W"), default="K")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--s", type=int, required=True)
    b.add_argument("--alpha", type=_real, default=1.0)
    b.add_argument("--p", type=_real, default=math.inf)
    b.add_argument("--b", type=int)
    b.add_argument("--exponents", type=_int_list)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bound)

    x = sub.add_parser("complexity", help="smallest N with bound <= eps")
    x.add_argument("--eps", type=_real, required=True)
    x.add_argument("--s", type=int, required=True)
    x.add_argument("--alpha", type=_real, default=1.0)
    x.add_argument("--p", type=_real, default=math.inf)
    x.add_argument("--space", choices=("K", "C", "W"), default="K")
    x.add_argument("--b", type=int)
    x.add_argument("--out")
    x.set_defaults(func=cmd_complexity)

    a = sub.add_parser("aliasing", help="check the aliasing identity and bound")
    a.add_argument("--function", required=True)
    a.add_argument("--L", type=_int_list, required=True, help="comma-separated grid sizes")
    a.add_argument("--budget", type=int, default=10**7)
    a.add_argument("--out")
    a.set_defaults(func=cmd_aliasing)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
