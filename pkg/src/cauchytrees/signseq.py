"""Sign sequences of oriented polygons and their pairings.

Indices are 1-based: a sign sequence ``eps`` of length ``k`` describes the
polygon edges ``e_1 .. e_k`` and ``eps[i - 1]`` is the sign of ``e_i``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import accumulate
from typing import Iterable, Sequence

from .errors import InvalidInput, NotCatalanError, PairingError

SignSequence = tuple[int, ...]


def as_signs(seq: Iterable[int]) -> SignSequence:
    signs = tuple(int(x) for x in seq)
    for x in signs:
        if x not in (1, -1):
            raise InvalidInput(f"sign entries must be +1 or -1, got {x}")
    return signs


def is_catalan(s: Sequence[int]) -> bool:
    """True iff the entries sum to zero and no prefix sum is negative."""
    total = 0
    for x in s:
        total += x
        if total < 0:
            return False
    return total == 0


@dataclass(frozen=True, order=True)
class Pairing:
    """A perfect matching of polygon-edge indices.

    Stored canonically as a sorted tuple of sorted pairs, so equality and
    hashing are structural.
    """

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        canon = []
        for p in self.pairs:
            i, j = (int(x) for x in p)
            if i == j:
                raise PairingError(f"pair ({i}, {j}) is degenerate")
            canon.append((min(i, j), max(i, j)))
        canon.sort()
        seen = [x for p in canon for x in p]
        if len(seen) != len(set(seen)):
            raise PairingError("pairs are not disjoint")
        object.__setattr__(self, "pairs", tuple(canon))

    @classmethod
    def of(cls, pairs: Iterable[Iterable[int]]) -> "Pairing":
        return cls(tuple(tuple(p) for p in pairs))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __contains__(self, pair) -> bool:
        i, j = pair
        return (min(i, j), max(i, j)) in self.pairs

    def support(self) -> set[int]:
        return {x for p in self.pairs for x in p}

    def partner(self, i: int) -> int:
        for a, b in self.pairs:
            if a == i:
                return b
            if b == i:
                return a
        raise KeyError(i)

    def is_perfect_on(self, k: int) -> bool:
        return self.support() == set(range(1, k + 1))

    def is_compatible(self, s: Sequence[int]) -> bool:
        return all(s[i - 1] + s[j - 1] == 0 for i, j in self.pairs)

    def is_noncrossing(self) -> bool:
        for a, b in self.pairs:
            for c, d in self.pairs:
                if a < c < b < d:
                    return False
        return True

    def to_json(self) -> list[list[int]]:
        return [list(p) for p in self.pairs]


def check_pairing(s: Sequence[int], p: Pairing, *, noncrossing: bool = True) -> None:
    """Raise PairingError unless ``p`` is a compatible (non-crossing) pairing of ``s``."""
    if not p.is_perfect_on(len(s)):
        raise PairingError(f"pairing does not cover 1..{len(s)} exactly")
    if not p.is_compatible(s):
        bad = next((i, j) for i, j in p if s[i - 1] + s[j - 1] != 0)
        raise PairingError(f"pair {bad} joins edges of equal sign")
    if noncrossing and not p.is_noncrossing():
        raise PairingError("pairing is crossing")


@dataclass(frozen=True)
class CauchyParams:
    """Weakly increasing block lengths ``l_1 <= ... <= l_m``."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        lengths = tuple(int(x) for x in self.lengths)
        if not lengths:
            raise InvalidInput("at least one length is required")
        if any(x < 1 for x in lengths):
            raise InvalidInput("lengths must be positive")
        if any(a > b for a, b in zip(lengths, lengths[1:])):
            raise InvalidInput("lengths must be weakly increasing")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def parse(cls, text: str) -> "CauchyParams":
        try:
            return cls(tuple(int(x) for x in text.split(",") if x.strip()))
        except ValueError as exc:
            raise InvalidInput(f"cannot parse lengths {text!r}: {exc}") from None

    @classmethod
    def equal(cls, l: int, m: int) -> "CauchyParams":
        return cls((l,) * m)

    @property
    def m(self) -> int:
        return len(self.lengths)

    @property
    def L(self) -> int:
        return sum(self.lengths) + 1

    def l(self, i: int) -> int:
        return self.lengths[i - 1]

    def prefix(self, n: int) -> int:
        """l_1 + ... + l_n."""
        return sum(self.lengths[:n])


def epsilon_i(params: CauchyParams, i: int) -> SignSequence:
    """The sign sequence of length ``2 (l_1 + ... + l_i)``; ``i = 0`` gives ``()``."""
    if not 0 <= i <= params.m:
        raise InvalidInput(f"index {i} outside 0..{params.m}")
    head: list[int] = []
    for j in range(i, 0, -1):
        head += [(-1) ** (i - j)] * params.l(j)
    tail: list[int] = []
    for j in range(1, i + 1):
        tail += [(-1) ** (i - j + 1)] * params.l(j)
    return tuple(head + tail)


def _bracket_match(s: Sequence[int], positions: Sequence[int]) -> list[tuple[int, int]]:
    stack: list[int] = []
    out = []
    for pos in positions:
        if s[pos - 1] == 1:
            stack.append(pos)
        else:
            if not stack:
                raise NotCatalanError("unpaired subsequence has a negative prefix sum")
            out.append((stack.pop(), pos))
    if stack:
        raise NotCatalanError("unpaired subsequence does not sum to zero")
    return out


def catalan_pairing(s: Sequence[int]) -> Pairing:
    """The unique compatible pairing whose quotient tree has every vertex above the root."""
    s = as_signs(s)
    if not is_catalan(s):
        raise NotCatalanError(f"{s} is not a Catalan sequence")
    return Pairing(tuple(_bracket_match(s, range(1, len(s) + 1))))


def catalan_complete(s: Sequence[int], partial: Iterable[Iterable[int]]) -> Pairing:
    """Extend ``partial`` by bracket-matching the unpaired positions of ``s`` in index order."""
    s = as_signs(s)
    partial = Pairing.of(partial)
    used = partial.support()
    if not used <= set(range(1, len(s) + 1)):
        raise PairingError("partial pairing refers to positions outside the sequence")
    free = [i for i in range(1, len(s) + 1) if i not in used]
    return Pairing(partial.pairs + tuple(_bracket_match(s, free)))


def enumerate_noncrossing_pairings(s: Sequence[int]) -> list[Pairing]:
    """All compatible non-crossing pairings of ``s`` in lexicographic order.

    Position ``a`` of an interval is matched with each compatible ``j`` and the
    two resulting intervals are solved independently, so every output is
    non-crossing by construction.
    """
    s = as_signs(s)
    k = len(s)
    if k % 2:
        return []

    @lru_cache(maxsize=None)
    def solve(lo: int, hi: int) -> tuple[tuple[tuple[int, int], ...], ...]:
        if lo > hi:
            return ((),)
        out = []
        for j in range(lo + 1, hi + 1, 2):
            if s[lo - 1] + s[j - 1] != 0:
                continue
            for inner in solve(lo + 1, j - 1):
                for outer in solve(j + 1, hi):
                    out.append(((lo, j),) + inner + outer)
        return tuple(out)

    result = sorted(Pairing(p) for p in solve(1, k))
    return result


def prefix_sums(s: Sequence[int]) -> list[int]:
    return list(accumulate(s))


def signs_to_json(s: Sequence[int]) -> list[int]:
    return [int(x) for x in s]


def pairing_to_json(s: Sequence[int], p: Pairing) -> dict:
    return {"epsilon": signs_to_json(s), "pairs": p.to_json()}


def pairing_from_json(obj: dict) -> tuple[SignSequence, Pairing]:
    try:
        s = as_signs(obj["epsilon"])
        p = Pairing.of(obj["pairs"])
    except (KeyError, TypeError) as exc:
        raise InvalidInput(f"malformed pairing JSON: {exc}") from None
    return s, p
