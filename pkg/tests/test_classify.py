import json
import random

import pytest

from wgroup import cgroup as cg
from wgroup.axioms import verify_axioms
from wgroup.classify import (
    LEAF,
    AxiomFailure,
    Ext,
    Free,
    TreeSyntaxError,
    build,
    classify,
    enumerate_trees,
    frattini_log2,
    from_json,
    is_canonical,
    order_log2,
    parse_tree,
    rank,
    realizable,
    realize,
    size,
    to_json,
)
from wgroup.formats import parse_word
from wgroup.orderspace import (
    SpaceOfOrderings,
    components,
    equivalent,
    quotient_by_translations,
    random_basis_change,
    translation_group,
)

from conftest import trees

E2L = Ext(2, LEAF)
TWO_E2 = Free((E2L, E2L))


def test_encoding_and_parse():
    assert LEAF.encode() == "L"
    assert E2L.encode() == "E2(L)"
    assert TWO_E2.encode() == "F(E2(L),E2(L))"
    t = Free((Ext(1, Free((LEAF, LEAF))), LEAF))
    assert t.encode() == "F(E1(F(L,L)),L)"
    assert parse_tree(" F(L,E1(F(L,L))) ") == t
    for tree in trees(5):
        assert parse_tree(tree.encode()) == tree


def test_free_nodes_flatten_and_sort():
    nested = Free((LEAF, Free((E2L, LEAF))))
    assert nested.children == (E2L, LEAF, LEAF)


@pytest.mark.parametrize(
    "text,col",
    [("", 1), ("X", 1), ("E(L)", 2), ("E2L", 3), ("F(L)", 4), ("F(L,L", 6), ("L)", 2),
     ("E1(E1(L))", 4), ("F(F(L,L),L)", 3), ("E0(L)", 4)],
)
def test_parse_errors_carry_position(text, col):
    with pytest.raises(TreeSyntaxError) as info:
        parse_tree(text)
    assert info.value.position + 1 == col


def test_invalid_nodes():
    with pytest.raises(ValueError):
        Ext(0, LEAF)
    with pytest.raises(ValueError):
        Ext(1, E2L)
    with pytest.raises(ValueError):
        Free((LEAF,))


def test_json_round_trip():
    assert to_json(LEAF) == {"kind": "leaf"}
    assert to_json(E2L) == {"kind": "ext", "m": 2, "child": {"kind": "leaf"}}
    for t in trees(5):
        assert from_json(json.dumps(to_json(t))) == t
    with pytest.raises(ValueError):
        from_json({"kind": "tree"})


@pytest.mark.parametrize(
    "tree,r,order,phi,count",
    [(LEAF, 1, 1, 0, 1), (E2L, 3, 5, 2, 4), (TWO_E2, 6, 19, 13, 8), (Free((LEAF, LEAF)), 2, 3, 1, 2)],
)
def test_formulas(tree, r, order, phi, count):
    assert (rank(tree), order_log2(tree), frattini_log2(tree), size(tree)) == (r, order, phi, count)


def test_enumeration_counts():
    counts = [len(enumerate_trees(k)) for k in range(1, 7)]
    assert counts == [1, 2, 4, 8, 16, 33]
    assert all(is_canonical(t) for t in enumerate_trees(6))
    assert not is_canonical(Ext(1, LEAF))
    assert not is_canonical(Ext(1, Free((LEAF, LEAF))))
    assert len({t.encode() for t in enumerate_trees(6)}) == 33


def test_build_examples(conn4, two_comp, sap2, leaf):
    assert build(LEAF) == leaf
    assert equivalent(build(Free((LEAF, LEAF))), sap2) is not None
    assert equivalent(build(E2L), conn4) is not None
    assert equivalent(build(TWO_E2), two_comp) is not None
    assert build(TWO_E2).dim == 6


def test_classify_examples(conn4, two_comp, leaf, sap2):
    assert classify(leaf) == LEAF
    assert classify(sap2) == Free((LEAF, LEAF))
    assert classify(conn4, max_len=6) == E2L
    assert classify(two_comp) == TWO_E2


def test_classify_propagates_axiom_failure():
    from conftest import nonrealizable_candidate

    with pytest.raises(AxiomFailure) as info:
        classify(nonrealizable_candidate(), max_len=4)
    assert info.value.report.axiom4_witness is not None


@pytest.mark.parametrize("tree", enumerate_trees(5), ids=lambda t: t.encode())
def test_round_trip_and_group_side(tree):
    space = build(tree)
    assert space.size == size(tree)
    assert classify(space) == tree
    assert verify_axioms(space, 5).ok
    rng = random.Random(tree.encode())
    moved, _ = random_basis_change(space, rng)
    assert classify(moved) == tree
    p = realize(tree)
    assert p.n == rank(tree)
    assert cg.quotient_order(p) == order_log2(tree)
    info = cg.frattini(p)
    assert info.log2_order == frattini_log2(tree)
    assert info.equals_commutator
    assert len(cg.involution_classes(p)) == space.size
    assert equivalent(cg.extract_candidate_space(p), space) is not None


@pytest.mark.parametrize("tree", [t for t in enumerate_trees(5) if isinstance(t, Ext)], ids=lambda t: t.encode())
def test_ext_count_identity(tree):
    space = build(tree)
    t = translation_group(space)
    assert t.dim == tree.m
    assert space.size == 2 ** t.dim * quotient_by_translations(space).size
    assert classify(quotient_by_translations(space)) == tree.child
    assert cg.center_of_even_subgroup(realize(tree)).order4_rank == tree.m


@pytest.mark.parametrize("tree", [t for t in enumerate_trees(5) if isinstance(t, Free)], ids=lambda t: t.encode())
def test_free_rank_additivity(tree):
    parts = components(build(tree))
    assert sorted(classify(c).encode() for c in parts) == [c.encode() for c in tree.children]


def test_realize_examples(g_two):
    p = realize(LEAF)
    assert p.n == 1 and cg.quotient_order(p) == 1
    q = realize(E2L)
    assert q.n == 3 and cg.quotient_order(q) == 5
    assert cg.center_of_even_subgroup(q).order4_rank == 2
    r = realize(TWO_E2)
    assert r.n == 6 and cg.quotient_order(r) == 19 == cg.quotient_order(g_two)


def test_realizable_examples(g_conn4, nonrealizable):
    v = realizable(g_conn4)
    assert v.consistent and v.tree == E2L
    assert v.presented_log2 == v.required_log2 == 5
    assert "consistent" in v.summary

    v = realizable(nonrealizable)
    assert not v.consistent
    assert v.axioms.axiom4_witness is not None
    assert v.tree == Free((LEAF,) * 6)
    assert (v.presented_log2, v.required_log2) == (14, 21)
    assert any("order obstruction" in r for r in v.reasons)
    assert v.summary.startswith("not realizable")

    one = cg.PresentedCGroup(1, (parse_word("s1^2", 1),))
    assert realizable(one).consistent


def test_realizable_without_minus_one():
    p = cg.PresentedCGroup(2, tuple(parse_word(w, 2) for w in ("s1^2", "s2^2", "[s1,s2]")))
    v = realizable(p)
    assert not v.consistent and v.reasons[0].startswith("no -1")
    with pytest.raises(ValueError):
        realizable(cg.PresentedCGroup(1, ()))
