import random
from itertools import product

import pytest
from hypothesis import given, settings, strategies as st

from wgroup import f2algebra as f2
from wgroup.classify import LEAF, Ext, Free, build, enumerate_trees, rank as tree_rank
from wgroup.f2algebra import from_bits as B
from wgroup.orderspace import (
    NotASubspace,
    SpaceError,
    SpaceOfOrderings,
    component_members,
    components,
    equivalent,
    evaluate,
    is_connected,
    isometric,
    normalize,
    pullback,
    quotient_by_translations,
    random_basis_change,
    rank,
    scale,
    signature,
    simply_connected,
    subspace,
    translation_group,
    value_set,
    x_alpha,
    x_alpha_members,
)

from conftest import generated_spaces, raw_conn4, small_valid_spaces


def brute_binary(space, a, b):
    return {
        c for c in range(1 << space.dim)
        if all(evaluate(s, c) in (evaluate(s, a), evaluate(s, b)) for s in space.chars)
    }


def test_evaluate_examples(conn4):
    assert evaluate(B("110"), 0) == 1
    assert evaluate(B("110"), B("011")) == -1
    assert all(evaluate(s, conn4.minus_one) == -1 for s in conn4.chars)
    with pytest.raises(f2.DimensionError):
        evaluate(B("110"), B("1011"), 3)


def test_space_construction_errors():
    with pytest.raises(SpaceError):
        SpaceOfOrderings(2, B("10"), ())
    with pytest.raises(SpaceError):
        SpaceOfOrderings(2, 0, (B("10"),))
    with pytest.raises(SpaceError):
        SpaceOfOrderings(2, B("10"), (B("10"), B("10")))


def test_value_set_small_cases(conn4):
    assert value_set(conn4, [B("011")]) == {B("011")}
    assert value_set(conn4, [0, 0]) == {0}
    b2, b3 = B("010"), B("001")
    assert value_set(conn4, [b2, b3]) == brute_binary(conn4, b2, b3)
    with pytest.raises(SpaceError):
        value_set(conn4, [])


def test_value_set_matches_definition_for_ternary_forms(conn4):
    for f in product(range(8), repeat=3):
        inner = brute_binary(conn4, f[1], f[2])
        expected = set().union(*(brute_binary(conn4, f[0], t) for t in inner))
        assert value_set(conn4, f) == expected


def test_signature_examples():
    raw = raw_conn4()
    b2, b3 = B("010"), B("001")
    assert signature(B("100"), [b2, b3, b2 ^ b3]) == 3
    for s in raw.chars:
        assert signature(s, [0, 0]) == 2
        for a in range(8):
            assert signature(s, [a, a ^ raw.minus_one]) == 0


def test_isometric_examples(conn4):
    a, b = B("011"), B("010")
    assert isometric(conn4, [a, b], [a, b])
    assert isometric(conn4, [a, b], [b, a])
    assert not isometric(conn4, [0, 0], [0, conn4.minus_one])
    assert not isometric(conn4, [0], [0, 0])


@settings(max_examples=40, deadline=None)
@given(small_valid_spaces(), st.data())
def test_value_sets_contain_entries_and_scale(space, data):
    n = space.dim
    f = data.draw(st.lists(st.integers(0, (1 << n) - 1), min_size=1, max_size=3))
    c = data.draw(st.integers(0, (1 << n) - 1))
    d = value_set(space, f)
    assert set(f) <= d
    assert value_set(space, scale(c, f)) == {c ^ x for x in d}


@settings(max_examples=40, deadline=None)
@given(small_valid_spaces(), st.data())
def test_signature_parity_and_bound(space, data):
    f = data.draw(st.lists(st.integers(0, (1 << space.dim) - 1), min_size=1, max_size=5))
    for s in space.chars:
        sig = signature(s, f)
        assert abs(sig) <= len(f)
        assert (sig - len(f)) % 2 == 0


def test_subspace_examples(two_comp, conn4):
    assert equivalent(subspace(two_comp, two_comp.chars), two_comp) is not None
    raw = SpaceOfOrderings(6, 0b111111, (32, 16, 8, 4, 2, 1, 0b111000, 0b000111))
    x1 = subspace(raw, [32, 16, 8])
    assert x1.size == 4 and x1.dim == 3
    assert equivalent(x1, conn4) is not None
    one = subspace(conn4, [conn4.chars[0]])
    assert (one.dim, one.size) == (1, 1)


def test_subspace_errors(conn4, two_comp):
    with pytest.raises(SpaceError):
        subspace(conn4, [B("001")])
    # a set of characters whose span picks up further characters of X
    from wgroup.orderspace import _restrict

    with pytest.raises(NotASubspace):
        _restrict(two_comp, (B("100000"), B("101000"), B("110000")))
    assert set(subspace(two_comp, [B("100000"), B("101000"), B("110000")]).chars) == {4, 5, 6, 7}


def test_x_alpha_examples(conn4):
    assert x_alpha(conn4, 0) == normalize(conn4)
    raw = raw_conn4()
    assert x_alpha_members(raw, B("110")) == set(raw.chars)
    raw_two = SpaceOfOrderings(6, 0b111111, (32, 16, 8, 4, 2, 1, 0b111000, 0b000111))
    # sigma1 * (e1 + e4) = sigma4, so the set is the pair {sigma1, sigma4}
    assert x_alpha_members(raw_two, 32 ^ 4) == {32, 4}
    assert x_alpha(raw_two, 0b110110) is None


def test_simply_connected_examples(conn4, sap2):
    raw = raw_conn4()
    assert simply_connected(raw, B("100"), B("010"))
    assert not simply_connected(sap2, *sap2.chars)
    assert not simply_connected(raw, B("100"), B("100"))
    with pytest.raises(SpaceError):
        simply_connected(raw, B("100"), B("011"))


def test_component_examples(conn4, two_comp, sap2):
    comps = components(two_comp)
    assert [c.size for c in comps] == [4, 4]
    assert all(equivalent(c, conn4) for c in comps)
    assert len(components(conn4)) == 1
    assert [c.size for c in components(sap2)] == [1, 1]
    members = component_members(two_comp)
    assert members == sorted(members)


def test_translation_examples(conn4, two_comp):
    assert set(translation_group(raw_conn4())) == {0, B("110"), B("101"), B("011")}
    assert translation_group(conn4).dim == 2
    assert translation_group(two_comp).dim == 0


def test_quotient_examples(conn4, two_comp, sap2):
    q = quotient_by_translations(conn4)
    assert (q.dim, q.size) == (1, 1)
    with pytest.raises(SpaceError):
        quotient_by_translations(two_comp)
    with pytest.raises(SpaceError):
        quotient_by_translations(build(LEAF))
    # Ext(1, two orderings) is the same space as Ext(2, Leaf): the whole dim-2 group translates.
    s = build(Ext(1, Free((LEAF, LEAF))))
    assert translation_group(s).dim == 2
    assert quotient_by_translations(s).size == 1


def test_equivalent_examples(conn4):
    rng = random.Random(3)
    for _ in range(10):
        image, phi = random_basis_change(conn4, rng)
        found = equivalent(conn4, image)
        assert found is not None
        assert {pullback(found, s) for s in image.chars} == set(conn4.chars)
    three = SpaceOfOrderings.canonical(3, (B("100"), B("110"), B("101")))
    assert equivalent(conn4, three) is None


def test_equivalent_rejects_different_trees():
    a = build(Free((Ext(2, LEAF), LEAF, LEAF)))
    b = build(Free((Ext(1, Free((LEAF, LEAF, LEAF))), LEAF)))
    assert a.size != b.size or equivalent(a, b) is None
    c = build(Free((LEAF,) * 4))
    d = build(Ext(1, Free((LEAF, LEAF, LEAF))))
    assert equivalent(c, d) is None


def test_normalize_moves_minus_one_first():
    raw = raw_conn4()
    canon = normalize(raw)
    assert canon.is_canonical
    assert all(s >> 2 for s in canon.chars)
    assert equivalent(canon, build(Ext(2, LEAF))) is not None


# -- invariants over generated spaces ------------------------------------------------

SPACES = generated_spaces()


def test_generated_pool_is_large_enough():
    assert len(SPACES) >= 200


@pytest.mark.parametrize("tree,space", SPACES[:66], ids=lambda v: getattr(v, "encode", lambda: "")())
def test_rank_additivity(tree, space):
    comps = components(space)
    assert rank(space) == sum(rank(c) for c in comps) == tree_rank(tree)


def test_connected_rank_gt1_has_translations():
    for _, space in SPACES:
        if is_connected(space) and rank(space) > 1:
            assert translation_group(space).dim >= 1


def test_translations_are_positive_at_minus_one():
    for _, space in SPACES:
        for a in translation_group(space):
            assert evaluate(a, space.minus_one) == 1


def test_quotient_is_disconnected_and_counts():
    for _, space in SPACES:
        if space.size > 1 and is_connected(space):
            q = quotient_by_translations(space)
            assert space.size == len(translation_group(space)) * q.size
            if q.size > 1:
                assert not is_connected(q)


def test_translation_basis_criterion():
    rng = random.Random(11)
    for _, space in SPACES[:120]:
        # a spanning subset of X, chosen greedily in random order
        chars = list(space.chars)
        rng.shuffle(chars)
        basis, acc = [], f2.zero_subspace(space.dim)
        for s in chars:
            if acc.add(s).dim > acc.dim:
                basis.append(s)
                acc = acc.add(s)
        trans = set(translation_group(space))
        for tau in range(1 << space.dim):
            if all((s ^ tau) in space for s in basis) and rank(space) == space.dim:
                assert tau in trans


def _alpha_rank(space, alpha):
    members = x_alpha_members(space, alpha)
    return f2.rank(members) if members else 0


def test_x_alpha_family_properties():
    checked = 0
    for _, space in SPACES[:120]:
        if space.dim > 5:
            continue
        alphas = range(1 << space.dim)
        fam = {a: x_alpha_members(space, a) for a in alphas}
        ranks = {a: _alpha_rank(space, a) for a in alphas}
        for a, members in fam.items():
            assert all((s ^ a) in members for s in members)
            if members:
                x_alpha(space, a)  # is a subspace
        for a in alphas:
            for b in alphas:
                xa, xb = fam[a], fam[b]
                for s in space.chars:
                    quad = {s, s ^ a, s ^ b, s ^ a ^ b}
                    if len(quad) == 4 and quad <= set(space.chars):
                        assert xa <= xb or xb <= xa
                        break
                if ranks[a] >= 3 and ranks[b] >= 3:
                    inter = xa & xb
                    assert not inter or len(inter) >= 2
                    if inter and a and b:
                        assert any(g and xa <= fam[g] and xb <= fam[g] for g in alphas)
                checked += 1
    assert checked > 1000


def test_classification_trees_enumerate():
    assert len(enumerate_trees(5)) == 16
