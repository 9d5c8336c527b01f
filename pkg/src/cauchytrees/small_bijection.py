"""SmallBijection and its inverse, run as chains of intermediate triples.

An intermediate triple is a labeled quotient tree together with a
distinguished vertex ``S``.  ``forward_step`` either advances ``S`` to the
next vertex above the root or rewrites the tree by regluing two edges;
``backward_step`` undoes exactly one forward step.  Starting from ``S = R`` on
a tree whose labels respect the arrows, iterating ``forward_step`` ends on a
tree whose labels agree with the preorder on the vertices above the root.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

from .errors import CorruptedState, InvalidInput, NotInDomain, PairingError
from .quotient_tree import Bay, QuotientTree, build_quotient, leaf_bay_pairing
from .reglue import unglue_reglue
from .signseq import is_catalan

Trace = Callable[[dict], None]


@dataclass(frozen=True)
class LabeledTree:
    """A quotient tree with injective integer labels.

    With ``reversed`` set, a smaller vertex is one with a numerically larger
    label.  Some vertices may be unlabeled while the main bijection is in
    flight; the small bijection needs every vertex labeled.
    """

    tree: QuotientTree
    labels: Mapping[int, int]
    reversed: bool = False

    def __post_init__(self):
        labels = {int(v): int(lab) for v, lab in self.labels.items()}
        unknown = set(labels) - set(self.tree.vertices)
        if unknown:
            raise InvalidInput(f"labels on unknown vertices {sorted(unknown)}")
        if len(set(labels.values())) != len(labels):
            raise InvalidInput("labels must be injective")
        object.__setattr__(self, "labels", labels)

    def __hash__(self):
        return hash((self.tree, tuple(sorted(self.labels.items())), self.reversed))

    def label_key(self, label: int) -> int:
        return -label if self.reversed else label

    def key(self, v: int) -> int:
        return self.label_key(self.labels[v])

    def vertex_with_label(self, label: int) -> int:
        for v, lab in self.labels.items():
            if lab == label:
                return v
        raise KeyError(label)

    def is_fully_labeled(self) -> bool:
        return len(self.labels) == len(self.tree.vertices)

    def is_compatible(self) -> bool:
        """Labels increase along every arrow-reversed edge (x preceding y gives x < y)."""
        return all(self.key(e.lower) < self.key(e.upper) for e in self.tree.edges)


@dataclass(frozen=True)
class IntermediateTriple:
    tree: LabeledTree
    S: int


def in_set_a(lt: LabeledTree) -> bool:
    return is_catalan(lt.tree.epsilon) and lt.is_fully_labeled() and lt.is_compatible()


def in_set_b(lt: LabeledTree) -> bool:
    t = lt.tree
    if not (is_catalan(t.epsilon) and lt.is_fully_labeled()):
        return False
    up = t.up_set()
    if sorted(up, key=lt.key) != sorted(up):
        return False
    return all(
        lt.key(e.lower) < lt.key(e.upper)
        for e in t.edges
        if e.lower not in up and e.upper not in up
    )


def validate_triple(lt: LabeledTree, S: int) -> bool:
    t = lt.tree
    if not lt.is_fully_labeled() or S not in lt.labels:
        return False
    key = lt.key
    R = t.root
    up = t.up_set()
    if S not in up or key(R) > key(S):
        return False
    low = sorted((x for x in up if key(x) <= key(S)), key=key)
    if low != sorted(low):
        return False
    for e in t.edges:
        v, w = e.lower, e.upper
        if key(v) > key(w):
            if v in up or w == R or w not in up:
                return False
            if any(key(S) < key(x) < key(v) for x in up):
                return False
    return True


def _check_triple(tr: IntermediateTriple) -> None:
    if not validate_triple(tr.tree, tr.S):
        raise NotInDomain("not an intermediate triple")


def _coincidence_frontier(lt: LabeledTree) -> int:
    """Largest x above the root such that labels follow preorder on everything above R up to x."""
    up = sorted(lt.tree.up_set(), key=lt.key)
    best = up[0]
    for idx in range(1, len(up)):
        prefix = up[: idx + 1]
        if prefix == sorted(prefix):
            best = up[idx]
    return best


def _rebuild(t: QuotientTree, e1, e2) -> QuotientTree:
    pairing = unglue_reglue(t.epsilon, t.pairing, e1, e2)
    try:
        return build_quotient(t.epsilon, pairing)
    except PairingError as exc:
        raise CorruptedState(f"reglue produced a non-tree pairing: {exc}") from None


def _relabel(lt: LabeledTree, new: QuotientTree, removed: set, swap_last: bool = False):
    """Carry untouched labels to ``new`` and hand the removed ones out in preorder."""
    old = lt.tree
    carry = {frozenset(old.members[v]): lab for v, lab in lt.labels.items() if v not in removed}
    labels = {}
    free = []
    for v in new.vertices:
        lab = carry.pop(frozenset(new.members[v]), None)
        if lab is None:
            free.append(v)
        else:
            labels[v] = lab
    pool = sorted((lt.labels[v] for v in removed), key=lt.label_key)
    if carry or len(pool) != len(free):
        raise CorruptedState(
            f"{len(free)} unlabeled vertices after reglue for {len(pool)} removed labels"
        )
    if swap_last:
        pool[-2], pool[-1] = pool[-1], pool[-2]
    labels.update(zip(free, pool))
    moves = [[lab, v_old, new_v] for v_old in sorted(removed)
             for new_v, lab in labels.items() if lab == lt.labels[v_old]]
    return LabeledTree(new, labels, lt.reversed), moves, free


def _emit(trace, direction, t, new, roles, e1, e2, moves, S_label):
    if trace is None:
        return
    removed = {tuple(e1), tuple(e2)}
    trace({
        "direction": direction,
        "epsilon": list(t.epsilon),
        **{name: v for name, v in roles.items()},
        "S_label": S_label,
        "removed": sorted(list(p) for p in removed),
        "added": sorted(list(p) for p in set(new.pairing) - set(t.pairing)),
        "label_moves": moves,
    })


def forward_step(tr: IntermediateTriple, trace: Trace | None = None) -> IntermediateTriple | None:
    """One forward transformation; ``None`` once the triple is terminal."""
    _check_triple(tr)
    lt, S = tr.tree, tr.S
    t, key = lt.tree, lt.key
    up = t.up_set()
    above = [x for x in up if x != t.root and key(x) > key(S)]
    if not above:
        return None
    D = min(above, key=key)
    if validate_triple(lt, D):
        return IntermediateTriple(lt, D)

    if _coincidence_frontier(lt) != S:
        raise CorruptedState("S is not the end of the preorder-agreeing prefix")
    U = sorted(x for x in up if key(x) <= key(D))
    pos = U.index(D)
    if pos + 1 == len(U):
        raise CorruptedState("D has no preorder successor in U")
    C = U[pos + 1]
    A = t.parent[C]
    sibs = [c for c in t.children[A] if c in U]
    ci = sibs.index(C)
    if ci == 0:
        raise CorruptedState("C has no left sibling in U")
    B = sibs[ci - 1]
    assert leaf_bay_pairing(t, U).get(D) == Bay(A, B, C)

    e1 = t.edge_between(B, A).pair
    e2 = t.edge_between(C, A).pair
    new = _rebuild(t, e1, e2)
    new_lt, moves, _ = _relabel(lt, new, {A, B, C, D})
    S_label = lt.labels[S]
    out = IntermediateTriple(new_lt, new_lt.vertex_with_label(S_label))
    _emit(trace, "forward", t, new, {"A": A, "B": B, "C": C, "D": D}, e1, e2, moves, S_label)
    if not validate_triple(out.tree, out.S):
        raise CorruptedState("forward rewrite left the set of intermediate triples")
    return out


def backward_step(tr: IntermediateTriple, trace: Trace | None = None) -> IntermediateTriple | None:
    """One backward transformation; ``None`` once ``S`` is the root."""
    _check_triple(tr)
    lt, S = tr.tree, tr.S
    t, key = lt.tree, lt.key
    up = t.up_set()
    below = [x for x in up if key(x) < key(S)]
    if not below:
        return None
    S2 = max(below, key=key)
    if validate_triple(lt, S2):
        return IntermediateTriple(lt, S2)

    bad = [
        (e.upper, e.lower)
        for e in t.edges
        if key(e.upper) < key(e.lower) and any(key(S2) < key(x) < key(e.lower) for x in up)
    ]
    if not bad:
        raise CorruptedState("no offending edge although the previous S fails")
    B, D = max(bad, key=lambda bd: key(bd[1]))
    if any(key(S) < key(x) < key(D) for x in up):
        raise CorruptedState("a vertex above the root lies strictly between S and D")
    if t.parent.get(D) != B or t.parent.get(B) is None:
        raise CorruptedState("offending edge is not a child edge below a non-root vertex")
    A = t.parent[B]
    U = {D} | {x for x in up if key(x) <= key(S)}
    sibs = [c for c in t.children[B] if c in U]
    di = sibs.index(D)
    C = None
    if di:
        bay = Bay(B, sibs[di - 1], D)
        leaves = [leaf for leaf, b in leaf_bay_pairing(t, U, flipped=[(B, D)]).items() if b == bay]
        if len(leaves) != 1:
            raise CorruptedState("bay at B has no matching leaf")
        C = leaves[0]
    removed = {A, B, D} | ({C} if C is not None else set())

    e1 = t.edge_between(B, A).pair
    e2 = t.edge_between(B, D).pair
    new = _rebuild(t, e1, e2)
    new_lt, moves, free = _relabel(lt, new, removed, swap_last=True)
    # the largest removed label goes back to the former D
    top = free[-2]
    if C is not None:
        assert new.members[top] == t.members[C]
    else:
        assert new.parent[top] == free[0]

    S_label = lt.labels[S]
    out = IntermediateTriple(new_lt, new_lt.vertex_with_label(S_label))
    roles = {"A": A, "B": B, "D": D} | ({"C": C} if C is not None else {})
    _emit(trace, "backward", t, new, roles, e1, e2, moves, S_label)
    if not validate_triple(out.tree, out.S):
        raise CorruptedState("backward rewrite left the set of intermediate triples")
    return out


def forward_run(lt: LabeledTree, trace: Trace | None = None) -> Iterator[IntermediateTriple]:
    """Every triple visited by the forward iteration, starting with ``S = R``."""
    if not in_set_a(lt):
        raise NotInDomain("labels are not compatible with the arrows (or signs not Catalan)")
    tr: IntermediateTriple | None = IntermediateTriple(lt, lt.tree.root)
    while tr is not None:
        yield tr
        tr = forward_step(tr, trace)


def backward_run(lt: LabeledTree, trace: Trace | None = None) -> Iterator[IntermediateTriple]:
    if not in_set_b(lt):
        raise NotInDomain("labeled tree is not in the image set of the small bijection")
    up = lt.tree.up_set()
    tr: IntermediateTriple | None = IntermediateTriple(lt, max(up, key=lt.key))
    while tr is not None:
        yield tr
        tr = backward_step(tr, trace)


def small_bijection(lt: LabeledTree, trace: Trace | None = None) -> LabeledTree:
    *_, last = forward_run(lt, trace)
    if not in_set_b(last.tree):
        raise CorruptedState("forward run ended outside the image set")
    return last.tree


def small_bijection_inverse(lt: LabeledTree, trace: Trace | None = None) -> LabeledTree:
    *_, last = backward_run(lt, trace)
    if last.S != lt.tree.root or not in_set_a(last.tree):
        raise CorruptedState("backward run ended outside the source set")
    return last.tree
