"""Quotient trees of oriented polygons glued along a non-crossing pairing.

A vertex of the quotient is a class of polygon vertices; it is named by the
smallest polygon-vertex index it contains.  Because the walk
``v_1, v_2, ..., v_k, v_1`` meets each class first at its smallest index,
comparing vertex names is exactly the preorder (first-visit order).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from math import comb
from typing import Collection, Iterable, NamedTuple, Sequence

from scipy.cluster.hierarchy import DisjointSet

from .errors import BoundExceeded, InvalidInput
from .signseq import Pairing, as_signs, check_pairing


class Edge(NamedTuple):
    """A tree edge; the arrow points from ``upper`` to ``lower`` (``lower`` precedes ``upper``)."""

    pair: tuple[int, int]
    lower: int
    upper: int

    @property
    def ends(self) -> frozenset:
        return frozenset((self.lower, self.upper))


class Bay(NamedTuple):
    """The corner at ``vertex`` between two consecutive children."""

    vertex: int
    left: int
    right: int


class QuotientTree:
    """The planar rooted oriented tree obtained by gluing a polygon along a pairing.

    Instances are immutable by convention and compare equal when built from
    the same signs and pairing.
    """

    def __init__(self, epsilon, pairing, members, edges):
        self.epsilon: tuple[int, ...] = epsilon
        self.pairing: Pairing = pairing
        self.members: dict[int, tuple[int, ...]] = members
        self.edges: tuple[Edge, ...] = edges
        self.vertices: tuple[int, ...] = tuple(sorted(members))
        self.root = 1
        self._class_of = {i: v for v, ms in members.items() for i in ms}
        self._edge_at = {e.ends: e for e in edges}

        adj: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e in edges:
            adj[e.lower].append(e.upper)
            adj[e.upper].append(e.lower)
        self.parent: dict[int, int | None] = {self.root: None}
        stack = [self.root]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in self.parent:
                    self.parent[w] = v
                    stack.append(w)
        self.children: dict[int, tuple[int, ...]] = {
            v: tuple(sorted(w for w in adj[v] if self.parent.get(w) == v))
            for v in self.vertices
        }

        # below[y] = {x : x precedes-or-equals y}, found by walking along arrows
        down: dict[int, list[int]] = {v: [] for v in self.vertices}
        for e in edges:
            down[e.upper].append(e.lower)
        self._below: dict[int, frozenset] = {}
        for y in self.vertices:
            seen = {y}
            stack = [y]
            while stack:
                for x in down[stack.pop()]:
                    if x not in seen:
                        seen.add(x)
                        stack.append(x)
            self._below[y] = frozenset(seen)

    def __eq__(self, other):
        if not isinstance(other, QuotientTree):
            return NotImplemented
        return self.epsilon == other.epsilon and self.pairing == other.pairing

    def __hash__(self):
        return hash((self.epsilon, self.pairing))

    def __repr__(self):
        classes = ", ".join("{" + ",".join(map(str, self.members[v])) + "}" for v in self.vertices)
        return f"QuotientTree({classes})"

    def __len__(self):
        return len(self.vertices)

    @property
    def k(self) -> int:
        return len(self.epsilon)

    def vertex_of(self, i: int) -> int:
        """The vertex containing polygon vertex ``v_i`` (``v_{k+1}`` is ``v_1``)."""
        if self.k and i == self.k + 1:
            i = 1
        try:
            return self._class_of[i]
        except KeyError:
            raise InvalidInput(f"no polygon vertex v_{i}") from None

    def _check(self, *vs):
        for v in vs:
            if v not in self.members:
                raise InvalidInput(f"unknown vertex {v}")

    def preceq(self, x: int, y: int) -> bool:
        """x precedes-or-equals y: one can travel from y to x along the arrows."""
        self._check(x, y)
        return x in self._below[y]

    def precedes(self, x: int, y: int) -> bool:
        return x != y and self.preceq(x, y)

    def up_set(self) -> frozenset:
        """The vertices x with R preceding-or-equal x."""
        return frozenset(x for x in self.vertices if self.root in self._below[x])

    def edge_between(self, u: int, v: int) -> Edge:
        try:
            return self._edge_at[frozenset((u, v))]
        except KeyError:
            raise InvalidInput(f"vertices {u} and {v} are not adjacent") from None

    def points_to_parent(self, v: int) -> bool:
        """True iff the edge from ``v`` to its parent carries its arrow toward the parent."""
        return self.edge_between(v, self.parent[v]).lower == self.parent[v]

    def subtree(self, v: int) -> list[int]:
        out = [v]
        for c in self.children[v]:
            out += self.subtree(c)
        return out

    def journey(self) -> list[int]:
        """Vertices met along the polygon walk v_1, ..., v_k, v_1."""
        if not self.k:
            return [self.root]
        return [self.vertex_of(i) for i in range(1, self.k + 2)]


def build_quotient(s: Sequence[int], p: Pairing | Iterable[Iterable[int]]) -> QuotientTree:
    s = as_signs(s)
    if not isinstance(p, Pairing):
        p = Pairing.of(p)
    check_pairing(s, p, noncrossing=True)
    k = len(s)
    if k == 0:
        return QuotientTree(s, p, {1: (1,)}, ())

    def nxt(i):
        return i + 1 if i < k else 1

    ds = DisjointSet(range(1, k + 1))
    for i, j in p:
        ds.merge(i, nxt(j))
        ds.merge(nxt(i), j)
    members = {}
    for cls in ds.subsets():
        ms = tuple(sorted(cls))
        members[ms[0]] = ms
    class_of = {i: ms[0] for ms in members.values() for i in ms}

    edges = []
    for i, j in p:
        a, b = class_of[i], class_of[nxt(i)]
        # eps(i) = +1: the arrow runs from v_{i+1} to v_i
        edges.append(Edge((i, j), a, b) if s[i - 1] == 1 else Edge((i, j), b, a))
    t = QuotientTree(s, p, members, tuple(edges))
    assert len(t.vertices) == k // 2 + 1 and len(t.parent) == len(t.vertices)
    return t


@dataclass(frozen=True)
class VertexOrderings:
    order: tuple[int, ...]
    rank: dict
    relation: frozenset  # pairs (x, y) with x strictly preceding y

    def precedes(self, x, y) -> bool:
        return (x, y) in self.relation


def preorder(t: QuotientTree) -> VertexOrderings:
    relation = frozenset((x, y) for y in t.vertices for x in t._below[y] if x != y)
    return VertexOrderings(t.vertices, {v: v for v in t.vertices}, relation)


def reaches(t: QuotientTree, x: int, y: int) -> bool:
    return t.preceq(x, y)


def _journey_events(children, root):
    events = []

    def visit(v):
        kids = children[v]
        for idx, c in enumerate(kids):
            if idx:
                events.append(("bay", Bay(v, kids[idx - 1], c)))
            visit(c)
        if not kids and v != root:
            events.append(("leaf", v))

    visit(root)
    return events


def leaf_bay_pairing(
    t: QuotientTree,
    vertices: Collection[int] | None = None,
    flipped: Iterable[Iterable[int]] = (),
) -> dict[int, Bay]:
    """Pair each leaf with the first bay met after it on the left-hand walk.

    ``vertices`` restricts the walk to a subtree containing the root; edges
    listed in ``flipped`` have their orientation reversed first.  Every edge
    of the resulting tree must point toward the root.
    """
    sub = set(t.vertices if vertices is None else vertices)
    t._check(*sub)
    flips = {frozenset(e) for e in flipped}
    if t.root not in sub or len(sub) < 2:
        raise InvalidInput("subtree must contain the root and at least two vertices")
    for x in sub - {t.root}:
        par = t.parent[x]
        if par not in sub:
            raise InvalidInput(f"vertex {x} is cut off from the root")
        toward = t.points_to_parent(x) != (frozenset((x, par)) in flips)
        if not toward:
            raise InvalidInput(f"edge {par}-{x} does not point toward the root")
    children = {v: tuple(c for c in t.children[v] if c in sub) for v in sub}
    events = _journey_events(children, t.root)
    leaves = [x for kind, x in events if kind == "leaf"]
    bays = [x for kind, x in events if kind == "bay"]
    kinds = [kind for kind, _ in events]
    assert kinds == ["leaf", "bay"] * len(bays) + ["leaf"], kinds
    return dict(zip(leaves, bays))


def count_compatible_orders(t: QuotientTree) -> int:
    """Number of total orders extending the arrow order.

    Tree DP: ``f[v][j]`` counts orders of the subtree of ``v`` with exactly
    ``j`` vertices placed before ``v``.  Children are merged one at a time,
    constraining the child to land after or before ``v`` according to the
    orientation of the connecting edge.
    """
    f: dict[int, list[int]] = {}
    for v in reversed(_bfs(t)):
        g = [1]
        for c in t.children[v]:
            h = f.pop(c)
            sv, sc = len(g), len(h)
            child_after = not t.points_to_parent(c)  # v precedes c
            suffix = [0] * (sc + 1)
            for idx in range(sc - 1, -1, -1):
                suffix[idx] = suffix[idx + 1] + h[idx]
            new = [0] * (sv + sc)
            for a, ga in enumerate(g):
                if not ga:
                    continue
                for b in range(sc + 1):
                    ok = suffix[b] if child_after else suffix[0] - suffix[b]
                    if ok:
                        ways = comb(a + b, a) * comb(sv - 1 - a + sc - b, sc - b)
                        new[a + b] += ga * ways * ok
            g = new
        f[v] = g
    return sum(f[t.root])


def _bfs(t: QuotientTree) -> list[int]:
    out = [t.root]
    for v in out:
        out.extend(t.children[v])
    return out


def enumerate_compatible_orders(t: QuotientTree, max_vertices: int = 12) -> list[tuple[int, ...]]:
    """Every compatible total order, as positions (1 = smallest) of the vertices in preorder."""
    n = len(t.vertices)
    if n > max_vertices:
        raise BoundExceeded(f"{n} vertices exceeds the enumeration bound {max_vertices}")
    preds = {y: {x for x in t._below[y] if x != y} for y in t.vertices}
    out = []
    seq: list[int] = []
    placed: set[int] = set()

    def extend():
        if len(seq) == n:
            pos = {v: idx + 1 for idx, v in enumerate(seq)}
            out.append(tuple(pos[v] for v in t.vertices))
            return
        for v in t.vertices:
            if v not in placed and preds[v] <= placed:
                seq.append(v)
                placed.add(v)
                extend()
                placed.discard(v)
                seq.pop()

    extend()
    return out


def brute_force_orders(t: QuotientTree) -> list[tuple[int, ...]]:
    """Permutation filter; exponential, kept as an independent check."""
    vs = t.vertices
    rel = preorder(t).relation
    out = []
    for perm in permutations(range(1, len(vs) + 1)):
        pos = dict(zip(vs, perm))
        if all(pos[x] < pos[y] for x, y in rel):
            out.append(perm)
    return out


def tree_to_json(t: QuotientTree) -> dict:
    return {
        "epsilon": list(t.epsilon),
        "pairs": t.pairing.to_json(),
        "root": t.root,
        "vertices": [list(t.members[v]) for v in t.vertices],
        "edges": [
            {"from": e.upper, "to": e.lower, "polygon_edges": list(e.pair)}
            for e in sorted(t.edges)
        ],
    }


def export_dot(t: QuotientTree, labels: dict | None = None) -> str:
    """Graphviz digraph; each edge is drawn in the direction of its arrow."""
    lines = ["digraph quotient {"]
    for v in t.vertices:
        name = "v" + ",v".join(map(str, t.members[v]))
        if labels is not None and v in labels:
            name += f"\\n{labels[v]}"
        shape = "doublecircle" if v == t.root else "circle"
        lines.append(f'  {v} [label="{name}", shape={shape}];')
    for e in sorted(t.edges):
        i, j = e.pair
        lines.append(f'  {e.upper} -> {e.lower} [label="e{i}|e{j}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
