"""Exact checks of the counting identities, and the path toys behind the m = 2 case."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import accumulate, product
from math import comb, factorial
from typing import Iterable, Sequence

from .errors import BoundExceeded, InvalidInput
from .quotient_tree import build_quotient, count_compatible_orders
from .signseq import CauchyParams, Pairing, as_signs, enumerate_noncrossing_pairings, epsilon_i

PathSequence = tuple[int, ...]


def multinomial(*parts: int) -> int:
    out, total = 1, 0
    for k in parts:
        if k < 0:
            return 0
        total += k
        out *= comb(total, k)
    return out


def cauchy_rhs_m2(l: int) -> int:
    """Sum over p + q = l of C(2p, p) C(2q, q)."""
    return sum(comb(2 * p, p) * comb(2 * (l - p), l - p) for p in range(l + 1))


def cauchy_rhs_m3_terms(l: int) -> tuple[int, int]:
    """The two sums on the right-hand side of the m = 3 identity, evaluated separately."""
    first = sum(multinomial(p, p, p) * multinomial(l - p, l - p, l - p) for p in range(l + 1))
    second = 0
    for p in range(l):
        for q in range(l - p):
            r = l - 1 - p - q
            for r1 in range(r + q + 2):
                q1 = r + q + 1 - r1
                for p2 in range(p + r + 2):
                    r2 = p + r + 1 - p2
                    second += (multinomial(p, p, p2) * multinomial(q, q, q1)
                               * multinomial(r, r1, r2))
    return first, 3 * second


def cauchy_rhs_m3(l: int) -> int:
    return sum(cauchy_rhs_m3_terms(l))


def _count_for(args) -> int:
    eps, pairs = args
    return count_compatible_orders(build_quotient(eps, Pairing(pairs)))


def count_alpha(params: CauchyParams, max_length: int = 24, jobs: int = 1) -> int:
    """Pairs (pairing, compatible order) for ``epsilon_m``, counted tree by tree."""
    eps = epsilon_i(params, params.m)
    if len(eps) > max_length:
        raise BoundExceeded(f"sign sequence of length {len(eps)} exceeds {max_length}")
    work = [(eps, p.pairs) for p in enumerate_noncrossing_pairings(eps)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return sum(pool.map(_count_for, work, chunksize=max(1, len(work) // (4 * jobs))))
    return sum(map(_count_for, work))


def moment(l: int, m: int, **kw) -> Fraction:
    """count_alpha for m equal blocks of length l, divided by (ml + 1)!."""
    return Fraction(count_alpha(CauchyParams.equal(l, m), **kw), factorial(m * l + 1))


def as_path(steps: Iterable[int]) -> PathSequence:
    return as_signs(steps)


def pitman_transform(t: Sequence[int]) -> PathSequence:
    """Steps of ``Z_s = T_s - 2 min_{r <= s} T_r`` evaluated at integer times."""
    T = [0, *accumulate(as_path(t))]
    low = list(accumulate(T, min))
    Z = [x - 2 * lo for x, lo in zip(T, low)]
    return tuple(b - a for a, b in zip(Z, Z[1:]))


def all_paths(n: int) -> list[PathSequence]:
    return list(product((1, -1), repeat=n))


def is_nonnegative(path: Sequence[int]) -> bool:
    return all(x >= 0 for x in accumulate(path))


def check_pitman(two_q: int) -> tuple[int, bool]:
    """Number of zero-sum paths of length ``two_q`` and whether the transform bijects them
    onto the paths with nonnegative partial sums."""
    zero_sum = [p for p in all_paths(two_q) if sum(p) == 0]
    image = [pitman_transform(p) for p in zero_sum]
    target = {p for p in all_paths(two_q) if is_nonnegative(p)}
    return len(zero_sum), len(set(image)) == len(image) and set(image) == target


def cauchy_decompose(x: Sequence[int]) -> tuple[int, PathSequence, PathSequence]:
    """Split at the last return to zero: ``x = y + z`` with ``len(y) = 2p``."""
    x = as_path(x)
    if len(x) % 2 != 1 or sum(x) <= 0:
        raise InvalidInput("path must have odd length and positive sum")
    sums = [0, *accumulate(x)]
    two_p = max(i for i, s in enumerate(sums) if s == 0)
    return two_p // 2, x[:two_p], x[two_p:]


def cauchy_fibers(l: int) -> dict[int, int]:
    """How many positive-sum paths of length 2l + 1 decompose with each value of p."""
    fibers = {p: 0 for p in range(l + 1)}
    seen = set()
    for x in all_paths(2 * l + 1):
        if sum(x) <= 0:
            continue
        p, y, z = cauchy_decompose(x)
        assert sum(y) == 0 and all(s > 0 for s in accumulate(z))
        seen.add((p, y, z))
        fibers[p] += 1
    assert len(seen) == sum(fibers.values())
    return fibers


def arcsine_exact_cdf(l: int, x: Fraction) -> Fraction:
    """Probability that the last zero of a uniform positive-sum path of length
    2l + 1, rescaled to [0, 1], falls before ``x``."""
    x = Fraction(x)
    return sum(
        (Fraction(comb(2 * p, p) * comb(2 * (l - p), l - p), 4 ** l)
         for p in range(l + 1) if 2 * p < x * (2 * l + 1)),
        Fraction(0),
    )
