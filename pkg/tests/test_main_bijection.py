from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from cauchytrees.errors import NotInDomain, PairingError
from cauchytrees.main_bijection import (
    AlphaElement,
    BetaTuple,
    IntermediatePoint,
    beta_to_gamma,
    check_gamma,
    enumerate_alpha,
    enumerate_beta,
    gamma_to_beta,
    is_generalized_parking,
    main_bijection,
    main_bijection_inverse,
    run_main_bijection,
    run_main_bijection_inverse,
    validate_point,
)
from cauchytrees.quotient_tree import build_quotient
from cauchytrees.signseq import CauchyParams, Pairing, enumerate_noncrossing_pairings, epsilon_i
from cauchytrees.small_bijection import LabeledTree

from conftest import beta_oracle, in_a_oracle

CORE = [(1,), (2,), (1, 1), (2, 2), (1, 2), (1, 1, 1)]
EXTRA = [(3,), (2, 3), (3, 3), (1, 1, 2), (1, 2, 2), (1, 1, 1, 1), (2, 2, 2)]


def B(*blocks):
    return BetaTuple.of(blocks)


def test_single_block():
    params = CauchyParams((1,))
    (a,) = enumerate_alpha(params)
    assert main_bijection(a.pairing, a.order, params) == B({1, 2})


def test_two_blocks_of_one():
    params = CauchyParams((1, 1))
    alphas = enumerate_alpha(params)
    image = {main_bijection(a.pairing, a.order, params) for a in alphas}
    assert image == {B(set(), {1, 2, 3}), B({1}, {2, 3}), B({2}, {1, 3}), B({3}, {1, 2})}


@pytest.mark.parametrize("lengths, count", [((1, 1), 4), ((1, 2), 5), ((1,), 1), ((2, 2), 16)])
def test_enumerate_beta_counts(lengths, count):
    params = CauchyParams(lengths)
    betas = enumerate_beta(params)
    assert len(betas) == count
    assert set(betas) == beta_oracle(params)


def _stage_records(trace_log, direction):
    return {r["stage"]: r for r in trace_log if r["direction"] == direction}


@pytest.mark.parametrize("lengths", CORE + EXTRA, ids=str)
def test_exhaustive(lengths):
    params = CauchyParams(lengths)
    alphas = enumerate_alpha(params)
    betas = enumerate_beta(params)
    assert len(alphas) == len(betas)
    if len(set(lengths)) == 1:
        assert len(alphas) == params.m ** (params.m * lengths[0])
    image = {}
    for a in alphas:
        log = []
        fwd = list(run_main_bijection(a, params, log.append))
        assert [p.i for p in fwd] == list(range(params.m, -1, -1))
        assert all(validate_point(p) for p in fwd)
        b = BetaTuple(fwd[-1].suffix)
        assert b not in image
        image[b] = a

        back_log = []
        bwd = list(run_main_bijection_inverse(b, params, back_log.append))
        assert all(validate_point(p) for p in bwd)
        assert [p.tree for p in bwd] == [p.tree for p in reversed(fwd)]
        assert AlphaElement.from_tree(bwd[-1].tree) == a

        # |U| - |B_i| artificial labels are made when a stage is undone
        f, g = _stage_records(log, "main-forward"), _stage_records(back_log, "main-backward")
        assert sorted(f) == sorted(g) == list(range(1, params.m + 1))
        for i in f:
            assert f[i]["artificial"] == g[i]["artificial"] == f[i]["up_size"] - len(f[i]["B"])
    assert set(image) == set(betas)
    for b in betas:
        pairing, order = main_bijection_inverse(b, params)
        assert (pairing, order) == (image[b].pairing, image[b].order)
        assert main_bijection(pairing, order, params) == b


@pytest.mark.parametrize("lengths", CORE, ids=str)
def test_stage_structure(lengths):
    params = CauchyParams(lengths)
    L = params.L
    for a in enumerate_alpha(params):
        for pt in run_main_bijection(a, params):
            lt, i = pt.tree, pt.i
            t = lt.tree
            assert t.epsilon == epsilon_i(params, i)
            assert t.pairing.is_compatible(t.epsilon)
            assert lt.reversed == ((params.m - i) % 2 == 1)
            art = [v for v in t.vertices if not 1 <= lt.labels[v] <= L]
            if lt.reversed:
                assert all(lt.labels[v] > L for v in art)
            else:
                assert all(lt.labels[v] < 1 for v in art)
            # preorder-first artificial vertex gets the label smallest in the effective order
            assert [lt.labels[v] for v in art] == sorted((lt.labels[v] for v in art), key=lt.label_key)


def test_reversed_stage_labels_look_like_the_figure():
    # m = 2: after the first stage the order is reversed and the artificial labels
    # count down from the top along the preorder, e.g. 5 < 4 < ... in the effective order
    params = CauchyParams((1, 2))
    seen = False
    for a in enumerate_alpha(params):
        pt = list(run_main_bijection(a, params))[1]
        lt = pt.tree
        art = [lt.labels[v] for v in lt.tree.vertices if lt.labels[v] > params.L]
        if len(art) >= 2:
            assert art == sorted(art, reverse=True)
            assert art[-1] == params.L + 1
            assert all(lt.key(v) < lt.key(w) for v in lt.tree.vertices for w in lt.tree.vertices
                       if lt.labels[v] > params.L >= lt.labels[w] >= 1)
            seen = True
    assert seen


def test_validate_point_rejects():
    params = CauchyParams((1, 1))
    for a in enumerate_alpha(params):
        pts = list(run_main_bijection(a, params))
        good = pts[1]
        genuine = [lab for lab in good.tree.labels.values() if 1 <= lab <= params.L]
        if genuine:
            break
    assert validate_point(good)
    overlap = IntermediatePoint(good.tree, good.i, (good.suffix[0] | {genuine[0]},), params)
    assert not validate_point(overlap)
    assert not validate_point(IntermediatePoint(good.tree, good.i, (), params))
    assert not validate_point(IntermediatePoint(pts[0].tree, 1, good.suffix, params))


def test_validate_point_endpoints():
    params = CauchyParams((1, 2))
    for a in enumerate_alpha(params):
        lt = a.tree()
        assert validate_point(IntermediatePoint(lt, params.m, (), params))
    for b in enumerate_beta(params):
        (first, *_) = run_main_bijection_inverse(b, params)
        assert first.i == 0 and validate_point(first)


def test_rejects_invalid_inputs():
    params = CauchyParams((1, 1))
    with pytest.raises(NotInDomain, match="prefix"):
        main_bijection_inverse(B({1, 2}, {3}), params)
    with pytest.raises(NotInDomain):
        main_bijection_inverse(B({1}, {2}), params)
    with pytest.raises(NotInDomain, match="compatible"):
        main_bijection(Pairing.of([(1, 2), (3, 4)]), (3, 1, 2), params)
    with pytest.raises(NotInDomain):
        main_bijection(Pairing.of([(1, 2), (3, 4)]), (1, 2, 2), params)
    with pytest.raises(PairingError):
        main_bijection(Pairing.of([(1, 3), (2, 4)]), (1, 2, 3), params)


@pytest.mark.parametrize("g, m, blocks", [
    ((2, 1, 2), 2, ({2}, {1, 3})),
    ((2, 2, 2), 2, (set(), {1, 2, 3})),
    ((3, 3, 3, 3), 3, (set(), set(), {1, 2, 3, 4})),
])
def test_gamma_examples(g, m, blocks):
    lengths = {2: (1, 1), 3: (1, 1, 1)}[m]
    params = CauchyParams(lengths)
    assert beta_to_gamma(B(*blocks), params) == g
    assert gamma_to_beta(g, params) == B(*blocks)


def _small_params():
    out = []
    for m in range(1, 4):
        for lengths in product(range(1, 6), repeat=m):
            if list(lengths) == sorted(lengths) and sum(lengths) + 1 <= 6:
                out.append(CauchyParams(lengths))
    return out


@pytest.mark.parametrize("params", _small_params(), ids=lambda p: str(p.lengths))
def test_gamma_roundtrip_and_parking_view(params):
    for g in product(range(1, params.m + 1), repeat=params.L):
        try:
            check_gamma(g, params)
            valid = True
        except NotInDomain:
            valid = False
        parked = tuple(params.m + 1 - a for a in g)
        assert is_generalized_parking(parked, params) == valid
        if valid:
            b = gamma_to_beta(g, params)
            assert beta_to_gamma(b, params) == g
    for b in enumerate_beta(params):
        assert gamma_to_beta(beta_to_gamma(b, params), params) == b


def test_alpha_json_roundtrip():
    params = CauchyParams((1, 2))
    for a in enumerate_alpha(params):
        assert AlphaElement.from_json(a.to_json()) == a
        assert in_a_oracle(a.tree().tree, a.tree().labels)


@st.composite
def alpha_elements(draw):
    params = CauchyParams(draw(st.sampled_from([(1, 1, 2), (1, 2, 2), (2, 2, 2), (1, 1, 1, 2), (1, 3)])))
    eps = epsilon_i(params, params.m)
    p = draw(st.sampled_from(enumerate_noncrossing_pairings(eps)))
    t = build_quotient(eps, p)
    preds = {y: {e.lower for e in t.edges if e.upper == y} for y in t.vertices}
    order, placed = [], set()
    while len(order) < len(t.vertices):
        avail = [v for v in t.vertices if v not in placed and preds[v] <= placed]
        v = avail[draw(st.integers(0, len(avail) - 1))]
        order.append(v)
        placed.add(v)
    rank = {v: j for j, v in enumerate(order, 1)}
    return params, AlphaElement.from_tree(LabeledTree(t, rank))


@settings(max_examples=80, deadline=None)
@given(alpha_elements())
def test_random_roundtrip(case):
    params, a = case
    b = main_bijection(a.pairing, a.order, params)
    assert b in beta_oracle(params)
    assert main_bijection_inverse(b, params) == (a.pairing, a.order)
