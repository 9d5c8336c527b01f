"""Independent oracles shared by the test modules.

Nothing here calls the library's own validity predicates: reachability
comes from networkx, pairings from filtering all perfect matchings, and
set membership from the definitions applied to every permutation.
"""

from itertools import permutations, product

import networkx as nx

from cauchytrees.main_bijection import BetaTuple
from cauchytrees.quotient_tree import build_quotient, enumerate_compatible_orders
from cauchytrees.signseq import enumerate_noncrossing_pairings
from cauchytrees.small_bijection import LabeledTree


def catalan_sequences(max_len):
    out = []
    for k in range(0, max_len + 1, 2):
        for s in product((1, -1), repeat=k):
            sums = [sum(s[:i + 1]) for i in range(k)]
            if all(x >= 0 for x in sums) and sum(s) == 0:
                out.append(s)
    return out


def all_matchings(points):
    points = list(points)
    if not points:
        yield []
        return
    a = points[0]
    for j in range(1, len(points)):
        rest = points[1:j] + points[j + 1:]
        for m in all_matchings(rest):
            yield [(a, points[j])] + m


def brute_pairings(s):
    """Compatible non-crossing pairings by filtering every perfect matching."""
    out = []
    for m in all_matchings(range(1, len(s) + 1)):
        if any(s[i - 1] + s[j - 1] != 0 for i, j in m):
            continue
        if any(a < c < b < d for a, b in m for c, d in m):
            continue
        out.append(sorted(m))
    return sorted(out)


def arrow_graph(t):
    g = nx.DiGraph()
    g.add_nodes_from(t.vertices)
    for e in t.edges:
        g.add_edge(e.upper, e.lower)
    return g


def below(t):
    """below[y] = vertices x with x preceding-or-equal y."""
    g = arrow_graph(t)
    return {y: nx.descendants(g, y) | {y} for y in t.vertices}


def up_set(t):
    b = below(t)
    return {x for x in t.vertices if t.root in b[x]}


def in_b_oracle(t, labels, reversed_=False):
    key = (lambda v: -labels[v]) if reversed_ else (lambda v: labels[v])
    b = below(t)
    up = up_set(t)
    ups = sorted(up)
    if any(key(x) >= key(y) for x, y in zip(ups, ups[1:])):
        return False
    rest = [v for v in t.vertices if v not in up]
    return all(key(x) < key(y) for y in rest for x in rest if x != y and x in b[y])


def in_a_oracle(t, labels):
    b = below(t)
    return all(labels[x] < labels[y] for y in t.vertices for x in b[y] if x != y)


def set_a(s):
    out = []
    for p in enumerate_noncrossing_pairings(s):
        t = build_quotient(s, p)
        for order in enumerate_compatible_orders(t):
            out.append(LabeledTree(t, dict(zip(t.vertices, order))))
    return out


def set_b(s):
    out = []
    for p in enumerate_noncrossing_pairings(s):
        t = build_quotient(s, p)
        for perm in permutations(range(1, len(t.vertices) + 1)):
            labels = dict(zip(t.vertices, perm))
            if in_b_oracle(t, labels):
                out.append(LabeledTree(t, labels))
    return out


def beta_oracle(params):
    """Tuples of sets straight from the definition: every assignment of 1..L to blocks."""
    out = set()
    for g in product(range(1, params.m + 1), repeat=params.L):
        blocks = [frozenset(r for r, a in enumerate(g, 1) if a == j) for j in range(1, params.m + 1)]
        if all(sum(len(b) for b in blocks[:n]) <= sum(params.lengths[:n]) for n in range(1, params.m)):
            out.add(BetaTuple(tuple(blocks)))
    return out


def triple_oracle(lt, S):
    """The three defining properties of an intermediate triple, from scratch."""
    t = lt.tree
    key = lt.key
    b = below(t)
    up = up_set(t)
    R = t.root
    if S not in up or key(R) > key(S):
        return False
    low = sorted((x for x in up if key(x) <= key(S)), key=key)
    if low != sorted(low):
        return False
    for e in t.edges:
        v, w = e.lower, e.upper
        if key(v) > key(w):
            if R in b[v] or not (R in b[w] and w != R):
                return False
            if any(key(S) < key(x) < key(v) for x in up):
                return False
    return True


def run_measure(tr):
    lt = tr.tree
    return sum(1 for x in up_set(lt.tree) if lt.key(x) >= lt.key(tr.S))


def check_inclusion(run):
    """Lemma: U grows, new elements come after the old in both orders, the part above R shrinks.

    Vertices of different trees are matched through their labels.  Pairs of
    triples any number of steps apart are checked.
    """
    def lower_part(tr):
        lt = tr.tree
        return {lt.labels[v] for v in up_set(lt.tree) if lt.key(v) <= lt.key(tr.S)}

    for idx, a in enumerate(run):
        for b in run[idx + 1:]:
            U, U2 = lower_part(a), lower_part(b)
            assert U <= U2
            ta, tb = a.tree, b.tree
            # matched by label, the earlier tree's preorder only agrees across a single step
            trees = (ta, tb) if b is run[idx + 1] else (tb,)
            for new in U2 - U:
                for old in U:
                    assert ta.label_key(old) < ta.label_key(new)
                    for lt in trees:
                        assert lt.vertex_with_label(old) < lt.vertex_with_label(new)
            above_a = {ta.labels[v] for v in up_set(ta.tree)}
            above_b = {tb.labels[v] for v in up_set(tb.tree)}
            assert above_a >= above_b


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n])
