"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 invalid input, 3 a size
bound was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from fractions import Fraction
from math import comb, factorial
from typing import Sequence

from . import identities
from .errors import BoundExceeded, InvalidInput
from .main_bijection import (
    AlphaElement,
    BetaTuple,
    beta_to_gamma,
    enumerate_beta,
    main_bijection,
    main_bijection_inverse,
)
from .quotient_tree import build_quotient, enumerate_compatible_orders, export_dot
from .signseq import CauchyParams, Pairing, enumerate_noncrossing_pairings, epsilon_i, pairing_from_json

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_BOUND = 0, 1, 2, 3
JOBS_ENV = "CAUCHYTREES_JOBS"
DEFAULT_CAUCHY = [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2), (1, 3), (2, 3)]


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _read_json(path: str | None):
    try:
        if path in (None, "-"):
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"input is not valid JSON: {exc}") from None


@contextmanager
def _output(path: str | None):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


@contextmanager
def _tracer(path: str | None):
    if path is None:
        yield None
        return
    with open(path, "w") as fh:
        yield lambda rec: fh.write(dumps(rec) + "\n")


def _params(args) -> CauchyParams:
    if args.l is None:
        raise InvalidInput("--l is required for this command")
    return CauchyParams.parse(args.l)


def _report(out, ok: bool, text: str) -> bool:
    print(f"{text} {'OK' if ok else 'FAIL'}", file=out)
    return ok


def _verify(args, out) -> int:
    ok = True
    what = args.what
    if what in ("m2", "m3"):
        fn = identities.cauchy_rhs_m2 if what == "m2" else identities.cauchy_rhs_m3
        base = 4 if what == "m2" else 27
        lmax = args.lmax if args.lmax is not None else (10 if what == "m2" else 6)
        for l in range(1, lmax + 1):
            got = fn(l)
            ok &= _report(out, got == base ** l, f"l={l} rhs={got} expected={base ** l}")
    elif what in ("cauchy", "moments"):
        cases = [_params(args)] if args.l else [CauchyParams.equal(l, m) for l, m in DEFAULT_CAUCHY]
        for params in cases:
            equal = len(set(params.lengths)) == 1
            count = identities.count_alpha(params, jobs=args.jobs)
            if what == "cauchy":
                expected = params.m ** (params.m * params.l(1)) if equal else len(enumerate_beta(params))
                tag = "" if args.l else f"l={params.l(1)} m={params.m} "
                ok &= _report(out, count == expected, f"{tag}count={count} expected={expected}")
            else:
                if not equal:
                    raise InvalidInput("moments need equal block lengths")
                l, m = params.l(1), params.m
                got = identities.moment(l, m, jobs=args.jobs)
                expected = Fraction(m ** (m * l), factorial(m * l + 1))
                ok &= _report(out, got == expected, f"l={l} m={m} moment={got} expected={expected}")
    elif what == "pitman":
        qmax = args.qmax if args.qmax is not None else 6
        for q in range(1, qmax + 1):
            n, bij = identities.check_pitman(2 * q)
            ok &= _report(out, bij and n == comb(2 * q, q), f"2q={2 * q} sequences={n} bijective={bij}")
        for l in range(qmax + 1):
            fibers = identities.cauchy_fibers(l)
            expected = {p: comb(2 * p, p) * comb(2 * (l - p), l - p) for p in range(l + 1)}
            text = "fibers=" + ",".join(str(fibers[p]) for p in sorted(fibers))
            ok &= _report(out, fibers == expected, f"l={l} {text}")
    return EXIT_OK if ok else EXIT_FAIL


def _map(args, out) -> int:
    params = _params(args)
    alpha = AlphaElement.from_json(_read_json(args.input))
    with _tracer(args.trace) as trace:
        b = main_bijection(alpha.pairing, alpha.order, params, trace)
    obj = {"B": b.to_json()}
    if args.gamma:
        obj["gamma"] = list(beta_to_gamma(b, params))
    print(dumps(obj), file=out)
    return EXIT_OK


def _beta_from_json(obj) -> BetaTuple:
    blocks = obj.get("B") if isinstance(obj, dict) else obj
    if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
        raise InvalidInput('expected {"B": [[...], ...]} or a list of lists')
    return BetaTuple.of(blocks)


def _invert(args, out) -> int:
    params = _params(args)
    b = _beta_from_json(_read_json(args.input))
    with _tracer(args.trace) as trace:
        pairing, order = main_bijection_inverse(b, params, trace)
    alpha = AlphaElement(epsilon_i(params, params.m), pairing, order)
    print(dumps(alpha.to_json()), file=out)
    return EXIT_OK


def _alpha_for(args) -> list[str]:
    eps, pairs, bound = args
    p = Pairing(pairs)
    return [dumps(AlphaElement(eps, p, o).to_json())
            for o in enumerate_compatible_orders(build_quotient(eps, p), bound)]


def _enumerate(args, out) -> int:
    params = _params(args)
    if args.side == "alpha":
        if params.L > args.max_vertices:
            raise BoundExceeded(f"{params.L} vertices exceeds the enumeration bound {args.max_vertices}")
        eps = epsilon_i(params, params.m)
        work = [(eps, p.pairs, args.max_vertices) for p in enumerate_noncrossing_pairings(eps)]
        if args.jobs > 1:
            with ProcessPoolExecutor(args.jobs) as pool:
                chunks = list(pool.map(_alpha_for, work))
        else:
            chunks = [_alpha_for(w) for w in work]
        lines = [line for chunk in chunks for line in chunk]
    else:
        betas = enumerate_beta(params)
        if args.side == "beta":
            lines = [dumps({"B": b.to_json()}) for b in betas]
        else:
            lines = [dumps(list(beta_to_gamma(b, params))) for b in betas]
    for line in lines:
        print(line, file=out)
    return EXIT_OK


def _export_dot(args, out) -> int:
    obj = _read_json(args.input)
    eps, p = pairing_from_json(obj)
    labels = None
    if "order" in obj:
        labels = AlphaElement.from_json(obj).tree().labels
    out.write(export_dot(build_quotient(eps, p), labels))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    try:
        default_jobs = int(os.environ.get(JOBS_ENV, "1"))
    except ValueError:
        default_jobs = 1
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--l", help="block lengths, comma separated, e.g. 1,2")
    common.add_argument("--jobs", type=int, default=default_jobs,
                        help=f"worker processes (default from ${JOBS_ENV}, else 1)")
    common.add_argument("--output", "-o", help="output file (default stdout)")

    parser = argparse.ArgumentParser(prog="cauchytrees", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="check the counting identities")
    v.add_argument("--what", required=True, choices=["m2", "m3", "cauchy", "moments", "pitman"])
    v.add_argument("--lmax", type=int)
    v.add_argument("--qmax", type=int)
    v.set_defaults(func=_verify)

    for name, func, helptext in (
        ("map", _map, "pairing and order to a tuple of sets"),
        ("invert", _invert, "tuple of sets back to a pairing and order"),
    ):
        c = sub.add_parser(name, parents=[common], help=helptext)
        c.add_argument("--input", "-i", help="input JSON file (default stdin)")
        c.add_argument("--trace", help="write step records as JSON lines to this file")
        if name == "map":
            c.add_argument("--gamma", action="store_true", help="also emit the sequence encoding")
        c.set_defaults(func=func)

    e = sub.add_parser("enumerate", parents=[common], help="stream one side as JSON lines")
    e.add_argument("--side", required=True, choices=["alpha", "beta", "gamma"])
    e.add_argument("--max-vertices", type=int, default=12)
    e.set_defaults(func=_enumerate)

    d = sub.add_parser("export-dot", parents=[common], help="Graphviz rendering of a tree")
    d.add_argument("--input", "-i", help="JSON with epsilon and pairs, optionally order")
    d.set_defaults(func=_export_dot)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be positive", file=sys.stderr)
        return EXIT_INVALID
    try:
        with _output(args.output) as out:
            return args.func(args, out)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BoundExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOUND
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
