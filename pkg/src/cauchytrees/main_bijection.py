"""MainBijection: pairs (pairing, compatible order) to constrained set tuples.

The forward map peels the polygon one stage at a time.  At stage ``i`` the
tree belongs to the sign sequence ``epsilon_i``; the small bijection moves
the labels, the part of the tree above the root yields ``B_i``, the first and
last ``l_i`` polygon edges are dropped, orientations and the label order
flip, and the freed edges are glued back with fresh artificial labels.

Artificial labels live outside ``1..L`` on the side that is "smaller" for
the current comparator: negative integers while the order is the usual one,
integers above ``L`` while it is reversed.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence

from .errors import BoundExceeded, CorruptedState, InvalidInput, NotInDomain
from .quotient_tree import build_quotient, enumerate_compatible_orders
from .signseq import (
    CauchyParams,
    Pairing,
    as_signs,
    catalan_complete,
    enumerate_noncrossing_pairings,
    epsilon_i,
)
from .small_bijection import LabeledTree, Trace, small_bijection, small_bijection_inverse


@dataclass(frozen=True)
class BetaTuple:
    blocks: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(frozenset(int(x) for x in b) for b in self.blocks))

    @classmethod
    def of(cls, blocks: Iterable[Iterable[int]]) -> "BetaTuple":
        return cls(tuple(frozenset(b) for b in blocks))

    def __iter__(self):
        return iter(self.blocks)

    def __len__(self):
        return len(self.blocks)

    def to_json(self) -> list[list[int]]:
        return [sorted(b) for b in self.blocks]


def check_beta(b: BetaTuple, params: CauchyParams) -> None:
    """Raise NotInDomain naming the violated condition."""
    if len(b) != params.m:
        raise NotInDomain(f"expected {params.m} sets, got {len(b)}")
    seen: set[int] = set()
    for idx, block in enumerate(b.blocks, 1):
        if seen & block:
            raise NotInDomain(f"B_{idx} overlaps an earlier set")
        seen |= block
    if seen != set(range(1, params.L + 1)):
        raise NotInDomain(f"sets do not partition 1..{params.L}")
    total = 0
    for n in range(1, params.m):
        total += len(b.blocks[n - 1])
        if total > params.prefix(n):
            raise NotInDomain(
                f"prefix constraint violated at n={n}: B_1..B_{n} hold {total} elements, "
                f"at most {params.prefix(n)} allowed"
            )


def is_valid_beta(b: BetaTuple, params: CauchyParams) -> bool:
    try:
        check_beta(b, params)
    except NotInDomain:
        return False
    return True


def check_gamma(g: Sequence[int], params: CauchyParams) -> None:
    if len(g) != params.L or any(not 1 <= a <= params.m for a in g):
        raise NotInDomain(f"sequence must have {params.L} entries in 1..{params.m}")
    for n in range(1, params.m):
        count = sum(1 for a in g if a <= n)
        if count > params.prefix(n):
            raise NotInDomain(
                f"prefix constraint violated at n={n}: {count} entries <= {n}, "
                f"allowed {params.prefix(n)}"
            )


def beta_to_gamma(b: BetaTuple, params: CauchyParams) -> tuple[int, ...]:
    check_beta(b, params)
    where = {x: j for j, block in enumerate(b.blocks, 1) for x in block}
    return tuple(where[x] for x in range(1, params.L + 1))


def gamma_to_beta(g: Sequence[int], params: CauchyParams) -> BetaTuple:
    g = tuple(int(a) for a in g)
    check_gamma(g, params)
    return BetaTuple.of({r for r, a in enumerate(g, 1) if a == j} for j in range(1, params.m + 1))


def is_generalized_parking(seq: Sequence[int], params: CauchyParams) -> bool:
    """Parking-function form of the constraint on ``a~_r = m + 1 - a_r``.

    With ``b`` the sorted sequence, require ``b_{1 + l_m + ... + l_{m-j+1}} <= j``
    for ``j = 1..m``.
    """
    b = sorted(seq)
    if len(b) != params.L or any(x < 1 for x in b):
        return False
    pos = 0
    for j in range(1, params.m + 1):
        pos += params.l(params.m - j + 1)
        if b[pos] > j:  # 0-based index pos is the 1-based 1 + pos
            return False
    return True


def enumerate_beta(params: CauchyParams, max_size: int = 10**6) -> list[BetaTuple]:
    """Every valid tuple, ordered lexicographically by its sequence encoding."""
    if params.m ** params.L > max_size:
        raise BoundExceeded(f"{params.m}^{params.L} candidate sequences exceeds {max_size}")
    out = []
    for g in product(range(1, params.m + 1), repeat=params.L):
        ok = all(sum(1 for a in g if a <= n) <= params.prefix(n) for n in range(1, params.m))
        if ok:
            out.append(gamma_to_beta(g, params))
    return out


@dataclass(frozen=True)
class AlphaElement:
    """A pairing for ``epsilon_m`` and a compatible order.

    ``order[j]`` is the rank (1 = smallest) of the j-th vertex in preorder.
    """

    epsilon: tuple[int, ...]
    pairing: Pairing
    order: tuple[int, ...]

    def tree(self) -> LabeledTree:
        t = build_quotient(self.epsilon, self.pairing)
        if sorted(self.order) != list(range(1, len(t.vertices) + 1)):
            raise NotInDomain(f"order must be a permutation of 1..{len(t.vertices)}")
        return LabeledTree(t, dict(zip(t.vertices, self.order)))

    @classmethod
    def from_tree(cls, lt: LabeledTree) -> "AlphaElement":
        t = lt.tree
        return cls(t.epsilon, t.pairing, tuple(lt.labels[v] for v in t.vertices))

    def to_json(self) -> dict:
        return {"epsilon": list(self.epsilon), "pairs": self.pairing.to_json(), "order": list(self.order)}

    @classmethod
    def from_json(cls, obj: dict) -> "AlphaElement":
        try:
            return cls(as_signs(obj["epsilon"]), Pairing.of(obj["pairs"]),
                       tuple(int(x) for x in obj["order"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed alpha element: {exc}") from None


def check_alpha(a: AlphaElement, params: CauchyParams) -> LabeledTree:
    if a.epsilon != epsilon_i(params, params.m):
        raise NotInDomain("epsilon does not match the block lengths")
    lt = a.tree()
    if not lt.is_compatible():
        raise NotInDomain("order is not compatible with the edge orientations")
    return lt


def enumerate_alpha(params: CauchyParams, max_vertices: int = 12) -> list[AlphaElement]:
    eps = epsilon_i(params, params.m)
    if params.L > max_vertices:
        raise BoundExceeded(f"{params.L} vertices exceeds the enumeration bound {max_vertices}")
    return [
        AlphaElement(eps, p, order)
        for p in enumerate_noncrossing_pairings(eps)
        for order in enumerate_compatible_orders(build_quotient(eps, p), max_vertices)
    ]


@dataclass(frozen=True)
class IntermediatePoint:
    """State between loop iterations: a tree for ``epsilon_i`` and ``B_{i+1}, ..., B_m``."""

    tree: LabeledTree
    i: int
    suffix: tuple[frozenset, ...]
    params: CauchyParams


def validate_point(pt: IntermediatePoint) -> bool:
    lt, i, params = pt.tree, pt.i, pt.params
    m, L = params.m, params.L
    t = lt.tree
    if not 0 <= i <= m or len(pt.suffix) != m - i:
        return False
    # 1: tree belongs to epsilon_i (the pairing itself was validated on build)
    if t.epsilon != epsilon_i(params, i):
        return False
    # 2
    genuine = {v: lab for v, lab in lt.labels.items() if 1 <= lab <= L}
    V = [v for v in t.vertices if v not in genuine]
    # 3
    if i == m:
        if V:
            return False
    else:
        up = t.up_set()
        Vs = set(V)
        if t.root not in Vs or not Vs <= up:
            return False
        if any(t.parent[v] not in Vs for v in Vs if v != t.root):
            return False
        if any(e.upper in Vs and e.lower not in Vs for e in t.edges):
            return False
    # 4
    for y in genuine:
        for x in genuine:
            if t.precedes(x, y) and not lt.key(x) < lt.key(y):
                return False
    # 5
    pieces = [set(b) for b in pt.suffix] + [set(genuine.values())]
    union: set[int] = set()
    for piece in pieces:
        if union & piece:
            return False
        union |= piece
    if union != set(range(1, L + 1)):
        return False
    # 6
    for n in range(i + 1, m + 1):
        have = sum(len(b) for b in pt.suffix[n - i - 1:])
        if have < sum(params.lengths[n - 1:]) + 1:
            return False
    # artificial labels follow preorder
    art = [v for v in t.vertices if v in lt.labels and v not in genuine]
    return sorted(art, key=lt.key) == art


def _artificial(n: int, reversed_: bool, L: int) -> list[int]:
    """``n`` fresh labels, increasing in the effective order and below all of 1..L."""
    if reversed_:
        return [L + n - j for j in range(n)]
    return [-n + j for j in range(n)]


def _stage_forward(lt: LabeledTree, i: int, params: CauchyParams, trace: Trace | None):
    L = params.L
    lt = small_bijection(lt, trace)
    t = lt.tree
    up = t.up_set()
    B_i = frozenset(lab for v, lab in lt.labels.items() if v in up and 1 <= lab <= L)
    if any(not 1 <= lab <= L for v, lab in lt.labels.items() if v not in up):
        raise CorruptedState("an artificial label survived outside the part above the root")
    keep = {frozenset(t.members[v]): lab for v, lab in lt.labels.items() if v not in up}
    kept = [e.pair for e in t.edges if not (e.lower in up and e.upper in up)]

    li, k = params.l(i), t.k
    if any(x <= li or x > k - li for pair in kept for x in pair):
        raise CorruptedState("an edge next to the root is still glued")
    new_eps = tuple(-x for x in t.epsilon[li:k - li])
    if new_eps != epsilon_i(params, i - 1):
        raise CorruptedState("trimmed and flipped signs differ from epsilon_{i-1}")
    pairing = catalan_complete(new_eps, [(a - li, b - li) for a, b in kept])
    new = build_quotient(new_eps, pairing)

    labels = {}
    free = []
    for v in new.vertices:
        lab = keep.pop(frozenset(j + li for j in new.members[v]), None)
        if lab is None:
            free.append(v)
        else:
            labels[v] = lab
    if keep:
        raise CorruptedState("a labeled vertex was destroyed by the stage")
    reversed_ = not lt.reversed
    labels.update(zip(free, _artificial(len(free), reversed_, L)))
    if trace is not None:
        trace({"direction": "main-forward", "stage": i, "B": sorted(B_i),
               "up_size": len(up), "artificial": len(up) - len(B_i)})
    return LabeledTree(new, labels, reversed_), B_i


def _stage_backward(lt: LabeledTree, i: int, B_i: frozenset, params: CauchyParams,
                    trace: Trace | None):
    L = params.L
    t = lt.tree
    loose = {v for v in t.vertices if not 1 <= lt.labels.get(v, 0) <= L}
    keep = {frozenset(t.members[v]): lab for v, lab in lt.labels.items() if v not in loose}
    kept = [e.pair for e in t.edges if not (e.lower in loose and e.upper in loose)]

    li = params.l(i)
    new_eps = epsilon_i(params, i)
    if new_eps[li:len(new_eps) - li] != tuple(-x for x in t.epsilon):
        raise CorruptedState("epsilon_i does not extend the flipped signs")
    pairing = catalan_complete(new_eps, [(a + li, b + li) for a, b in kept])
    new = build_quotient(new_eps, pairing)

    labels = {}
    free = []
    for v in new.vertices:
        lab = keep.pop(frozenset(j - li for j in new.members[v]), None)
        if lab is None:
            free.append(v)
        else:
            labels[v] = lab
    if keep:
        raise CorruptedState("a labeled vertex was destroyed while undoing the stage")
    reversed_ = not lt.reversed
    n_art = len(free) - len(B_i)
    if n_art < 0:
        raise NotInDomain(f"B_{i} has more elements than the part above the root")
    key = (lambda x: -x) if reversed_ else (lambda x: x)
    pool = _artificial(n_art, reversed_, L) + sorted(B_i, key=key)
    labels.update(zip(free, pool))
    if trace is not None:
        trace({"direction": "main-backward", "stage": i, "B": sorted(B_i),
               "up_size": len(free), "artificial": n_art})
    return small_bijection_inverse(LabeledTree(new, labels, reversed_), trace)


def run_main_bijection(
    alpha: AlphaElement, params: CauchyParams, trace: Trace | None = None
) -> Iterator[IntermediatePoint]:
    """Intermediate points for ``i = m, m-1, ..., 0``."""
    lt = check_alpha(alpha, params)
    blocks: list[frozenset] = []
    yield IntermediatePoint(lt, params.m, (), params)
    for i in range(params.m, 0, -1):
        lt, B_i = _stage_forward(lt, i, params, trace)
        blocks.insert(0, B_i)
        yield IntermediatePoint(lt, i - 1, tuple(blocks), params)


def run_main_bijection_inverse(
    b: BetaTuple, params: CauchyParams, trace: Trace | None = None
) -> Iterator[IntermediatePoint]:
    """Intermediate points for ``i = 0, 1, ..., m``."""
    check_beta(b, params)
    reversed_ = params.m % 2 == 1
    t = build_quotient((), Pairing())
    lt = LabeledTree(t, {t.root: _artificial(1, reversed_, params.L)[0]}, reversed_)
    yield IntermediatePoint(lt, 0, b.blocks, params)
    for i in range(1, params.m + 1):
        lt = _stage_backward(lt, i, b.blocks[i - 1], params, trace)
        yield IntermediatePoint(lt, i, b.blocks[i:], params)


def main_bijection(
    pairing: Pairing, order: Sequence[int], params: CauchyParams, trace: Trace | None = None
) -> BetaTuple:
    alpha = AlphaElement(epsilon_i(params, params.m), Pairing.of(pairing), tuple(order))
    *_, last = run_main_bijection(alpha, params, trace)
    out = BetaTuple(last.suffix)
    check_beta(out, params)
    return out


def main_bijection_inverse(
    b: BetaTuple, params: CauchyParams, trace: Trace | None = None
) -> tuple[Pairing, tuple[int, ...]]:
    *_, last = run_main_bijection_inverse(b, params, trace)
    lt = last.tree
    if not (lt.is_fully_labeled() and lt.is_compatible() and not lt.reversed):
        raise CorruptedState("inverse run did not end on a compatible order")
    alpha = AlphaElement.from_tree(lt)
    return alpha.pairing, alpha.order
