"""Command-line front end.

Exit codes: 0 success, 1 input/validation error, 2 computation error,
3 a verification that ran to completion but found a mismatch.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from .algebra import ModelError, ModelSpec, MomentQuery
from .diagrams import (
    SizeLimitError,
    crossing_number,
    enumerate_pairings,
    is_catalan,
    q_wick_moment,
    scalar_recursion_moment,
)
from .engine import DepthExceededError, MomentEvaluator, all_queries
from .exactmath import QPoly, format_poly, format_rational, poly_eval, to_rational
from .fock import FockModel, NotPSDError, TruncationOverflow, numeric_moment

DEFAULT_CAP = 12
FORCE_CAP = 16
FOCK_DEFAULT_QS = ("-9/10", "-1/2", "0", "1/2", "9/10")
FOCK_RTOL = 1e-9


class InputError(Exception):
    """Bad command-line input or model file; exit status 1."""


class VerificationFailed(Exception):
    """A cross-check found a discrepancy; exit status 3."""


def random_psd_cov(d: int, rng: random.Random, spread: int = 2) -> list:
    """Rational positive-definite ``B B^T + I`` with small integer ``B``."""
    b = [[rng.randint(-spread, spread) for _ in range(d)] for _ in range(d)]
    return [
        [Fraction(sum(b[i][k] * b[j][k] for k in range(d)) + (i == j)) for j in range(d)]
        for i in range(d)
    ]


def load_model(args) -> ModelSpec:
    if args.random is not None:
        rng = random.Random(args.seed)
        return ModelSpec(args.random, random_psd_cov(args.random, rng))
    if args.model is None:
        raise InputError("a model is required: --model PATH (or '-') or --random D")
    if args.model == "-":
        text, name = sys.stdin.read(), "<stdin>"
    else:
        try:
            with open(args.model, encoding="utf-8") as fh:
                text, name = fh.read(), args.model
        except OSError as exc:
            raise InputError(f"cannot read model file: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{name}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return ModelSpec.from_dict(data)
    except ModelError as exc:
        raise InputError(f"{name}: {exc}") from exc


def parse_word_arg(text, spec: ModelSpec) -> MomentQuery:
    if not text:
        raise InputError("--word is required for this subcommand")
    sigma, pos = [], 0
    for item in text.split(","):
        tok = item.strip()
        if not tok.lstrip("+").isdigit():
            raise InputError(f"--word: bad index {tok!r} at position {pos}")
        v = int(tok)
        if not 1 <= v <= spec.d:
            raise InputError(f"--word: index {v} at position {pos} outside 1..{spec.d}")
        sigma.append(v)
        pos += len(item) + 1
    return MomentQuery(tuple(sigma))


def parse_q_list(text) -> list:
    if text is None or text == "symbolic":
        return []
    try:
        return [to_rational(x) for x in text.split(",")]
    except (ValueError, TypeError) as exc:
        raise InputError(f"--q: {exc}") from exc


def eval_points(args, spec: ModelSpec) -> list:
    qs = parse_q_list(args.q)
    if not qs and args.q is None and spec.q is not None:
        qs = [spec.q]
    return qs


def poly_payload(query, poly: QPoly, qs, route: str) -> dict:
    return {
        "query": list(query.sigma),
        "route": route,
        "polynomial": [format_rational(c) for c in poly.coeffs],
        "text": format_poly(poly),
        "evaluations": {format_rational(q): format_rational(poly_eval(poly, q)) for q in qs},
    }


def emit_poly(args, query, poly: QPoly, qs, route: str, out):
    if args.json:
        out.write(json.dumps(poly_payload(query, poly, qs, route)) + "\n")
        return
    out.write(format_poly(poly) + "\n")
    for q in qs:
        out.write(f"at q={format_rational(q)}: {format_rational(poly_eval(poly, q))}\n")


def _cap(args) -> int:
    return FORCE_CAP if args.force else DEFAULT_CAP


def _check_cap(query, args):
    if len(query) > _cap(args):
        hint = "" if args.force else " (use --force to allow up to 16)"
        raise SizeLimitError(f"word length {len(query)} exceeds the cap {_cap(args)}{hint}")


def cmd_moment(args, out):
    spec = load_model(args)
    query = parse_word_arg(args.word, spec)
    poly = MomentEvaluator(spec).moment(query)
    emit_poly(args, query, poly, eval_points(args, spec), "engine", out)


def cmd_wick(args, out):
    spec = load_model(args)
    query = parse_word_arg(args.word, spec)
    _check_cap(query, args)
    poly = q_wick_moment(spec, query, limit=_cap(args), workers=args.threads)
    emit_poly(args, query, poly, eval_points(args, spec), "wick", out)


def cmd_recursion(args, out):
    spec = load_model(args)
    query = parse_word_arg(args.word, spec)
    _check_cap(query, args)
    poly = scalar_recursion_moment(spec, query, limit=_cap(args))
    emit_poly(args, query, poly, eval_points(args, spec), "recursion", out)


def _table_chunk(payload):
    spec_dict, sigmas = payload
    ev = MomentEvaluator(ModelSpec.from_dict(spec_dict))
    return [ev.moment(s).coeffs for s in sigmas]


def _chunks(items, n):
    size = max(1, -(-len(items) // n))
    return [items[i:i + size] for i in range(0, len(items), size)]


def compute_table(spec: ModelSpec, max_order: int, threads: int = 1) -> list:
    sigmas = [q.sigma for q in all_queries(spec.d, max_order)]
    if threads <= 1:
        ev = MomentEvaluator(spec)
        return [(s, ev.moment(s)) for s in sigmas]
    results = []
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_table_chunk, [(spec.to_dict(), c) for c in _chunks(sigmas, threads)])
        for part in parts:
            results.extend(QPoly(c) for c in part)
    return list(zip(sigmas, results))


def cmd_table(args, out):
    spec = load_model(args)
    if args.max_order is None or args.max_order < 1:
        raise InputError("--max-order must be a positive integer")
    qs = eval_points(args, spec)
    rows = compute_table(spec, args.max_order, args.threads)
    for sigma, poly in rows:
        if args.json:
            out.write(json.dumps(poly_payload(MomentQuery(sigma), poly, qs, "engine")) + "\n")
        else:
            out.write(f"{','.join(map(str, sigma))} -> {format_poly(poly)}\n")


def cmd_diagrams(args, out):
    if args.size is None:
        raise InputError("--size is required")
    limit = FORCE_CAP if args.force else DEFAULT_CAP
    for g in enumerate_pairings(args.size, limit=limit):
        c = crossing_number(g)
        if args.json:
            out.write(json.dumps({"diagram": str(g), "crossings": c}) + "\n")
        else:
            out.write(f"{g}\t{c}\n")


def parse_eps(text) -> tuple:
    if not text:
        raise InputError("--eps is required, e.g. --eps=-1,-1,1,1")
    items = [t.strip() for t in text.split(",")] if "," in text else list(text.strip())
    eps = []
    for pos, t in enumerate(items):
        if t in ("-", "-1"):
            eps.append(-1)
        elif t in ("+", "1", "+1"):
            eps.append(1)
        else:
            raise InputError(f"--eps: bad sign {t!r} at position {pos}")
    return tuple(eps)


def cmd_catalan(args, out):
    eps = parse_eps(args.eps)
    if len(eps) % 2:
        raise InputError(f"--eps: length {len(eps)} is odd")
    verdict = is_catalan(eps)
    if args.json:
        out.write(json.dumps({"eps": list(eps), "catalan": verdict}) + "\n")
    else:
        out.write(("catalan" if verdict else "not catalan") + "\n")


def verify_routes(spec: ModelSpec, max_order: int, threads: int = 1):
    """Engine, q-Wick sum and pair-removal recursion on every word; first mismatch or None."""
    table = compute_table(spec, max_order, threads)
    for sigma, poly in table:
        wick = q_wick_moment(spec, sigma, limit=FORCE_CAP)
        rec = scalar_recursion_moment(spec, sigma, limit=FORCE_CAP)
        if not poly == wick == rec:
            return sigma, poly, wick, rec
    return None


def cmd_verify(args, out):
    spec = load_model(args)
    if args.max_order is None or args.max_order < 1:
        raise InputError("--max-order must be a positive integer")
    if args.max_order > _cap(args):
        raise SizeLimitError(f"--max-order {args.max_order} exceeds the cap {_cap(args)}")
    if not spec.is_scalar_gaussian:
        raise InputError("verify needs a zero-mean model without preservation commutators")
    bad = verify_routes(spec, args.max_order, args.threads)
    n = sum(spec.d ** k for k in range(1, args.max_order + 1))
    if bad is None:
        out.write(f"PASS: {n} words up to order {args.max_order}, three routes agree\n")
        return
    sigma, a, b, c = bad
    out.write(
        f"FAIL at {','.join(map(str, sigma))}: engine {format_poly(a)}; "
        f"wick {format_poly(b)}; recursion {format_poly(c)}\n"
    )
    raise VerificationFailed()


def cmd_fock_check(args, out):
    spec = load_model(args)
    query = parse_word_arg(args.word, spec)
    qs = parse_q_list(args.q) or [to_rational(x) for x in FOCK_DEFAULT_QS]
    poly = MomentEvaluator(spec).moment(query)
    ok = True
    rows = []
    for q in qs:
        if not -1 <= q <= 1:
            raise InputError(f"--q: {format_rational(q)} outside [-1, 1]")
        model = FockModel.from_spec(spec, float(q), len(query))
        num = numeric_moment(model, query)
        sym = float(poly_eval(poly, q))
        err = abs(num - sym)
        good = err <= FOCK_RTOL * max(1.0, abs(sym))
        ok &= good
        rows.append((q, sym, num, err, good))
    for q, sym, num, err, good in rows:
        if args.json:
            out.write(json.dumps({"q": format_rational(q), "symbolic": sym, "numeric": num,
                                  "abs_error": err, "ok": good}) + "\n")
        else:
            out.write(f"q={format_rational(q)}\tsymbolic={sym:.12g}\tnumeric={num:.12g}\t"
                      f"err={err:.2e}\t{'ok' if good else 'MISMATCH'}\n")
    if not ok:
        raise VerificationFailed()


COMMANDS = {
    "moment": cmd_moment,
    "wick": cmd_wick,
    "recursion": cmd_recursion,
    "table": cmd_table,
    "diagrams": cmd_diagrams,
    "catalan": cmd_catalan,
    "verify": cmd_verify,
    "fock-check": cmd_fock_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", help="model JSON file, '-' for stdin")
    common.add_argument("--random", type=int, metavar="D", help="random positive-definite model of dimension D")
    common.add_argument("--seed", type=int, default=0, help="seed for --random")
    common.add_argument("--word", help="comma-separated coordinates, e.g. 1,2,1,2")
    common.add_argument("--q", help="rational evaluation point(s) or 'symbolic'; use --q=-1/2 for negatives")
    common.add_argument("--max-order", type=int, dest="max_order")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--force", action="store_true", help="raise the pairing cap from 12 to 16")
    common.add_argument("--threads", type=int, default=1, help="worker processes")
    common.add_argument("--size", type=int, help="ground set size for 'diagrams'")
    common.add_argument("--eps", help="sign sequence for 'catalan', e.g. --eps=-1,-1,1,1 or --eps=--++")

    parser = argparse.ArgumentParser(prog="qmoments", description="Exact q-commutator moment engine.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        COMMANDS[args.command](args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (DepthExceededError, NotPSDError, SizeLimitError, TruncationOverflow) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailed:
        return 3
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
