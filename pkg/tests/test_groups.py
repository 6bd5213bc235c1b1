import itertools
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soficbench.groups import (CoSoficChain, FiniteGroup, GroupTooLarge, NotNormal, Permutation, Subgroup,
                               chain_product, core_chain, cyclic_group, dihedral_group, direct_product,
                               from_permutation_generators, hamming, left_regular_rep, normal_core,
                               quotient, right_coset_transversal, right_cosets, separable_chain,
                               symmetric_group, trivial_group)


def perms_of(n):
    return st.permutations(list(range(n))).map(Permutation)


def brute_compose(p, q):
    # apply q first
    return tuple(p[q[i]] for i in range(len(p)))


# --- permutations -----------------------------------------------------------


@given(st.integers(1, 9).flatmap(lambda n: st.tuples(perms_of(n), perms_of(n))))
def test_mul_is_composition(pq):
    p, q = pq
    assert (p * q).tolist() == list(brute_compose(p.tolist(), q.tolist()))


@given(st.integers(1, 9).flatmap(perms_of))
def test_inverse(p):
    e = Permutation.identity(p.degree)
    assert p * p.inverse() == e and p.inverse() * p == e


@given(st.integers(1, 8).flatmap(lambda n: st.tuples(perms_of(n), perms_of(n), perms_of(n))))
def test_hamming_is_a_metric(pqr):
    p, q, r = pqr
    assert hamming(p, p) == 0
    assert hamming(p, q) == hamming(q, p)
    assert hamming(p, r) <= hamming(p, q) + hamming(q, r)
    assert (hamming(p, q) == 0) == (p == q)
    # left and right invariance
    assert hamming(r * p, r * q) == hamming(p, q) == hamming(p * r, q * r)


@given(st.integers(1, 9).flatmap(lambda n: st.tuples(perms_of(n), perms_of(n))))
def test_hamming_counts_points(pq):
    p, q = pq
    a, b = p.tolist(), q.tolist()
    assert hamming(p, q) == Fraction(sum(x != y for x, y in zip(a, b)), len(a))
    assert isinstance(hamming(p, q), Fraction)


def test_cycles_and_fixed_points():
    p = Permutation.from_cycles(6, [(0, 1, 2), (3, 4)])
    assert p.tolist() == [1, 2, 0, 4, 3, 5]
    assert p.fixed_points() == 1
    assert sorted(p.cycle_type()) == [1, 2, 3]


def test_bad_permutations_rejected():
    with pytest.raises(ValueError):
        Permutation([0, 0, 1])
    with pytest.raises(ValueError):
        hamming(Permutation.identity(2), Permutation.identity(3))


def test_permutations_hashable():
    assert len({Permutation([1, 0]), Permutation([1, 0]), Permutation([0, 1])}) == 2


# --- finite groups ----------------------------------------------------------


GROUPS = {
    "C1": trivial_group(),
    "C5": cyclic_group(5),
    "C12": cyclic_group(12),
    "S3": symmetric_group(3),
    "S4": symmetric_group(4),
    "D4": dihedral_group(4),
    "D6": dihedral_group(6),
}


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_axioms(name):
    G = GROUPS[name]
    G.check_axioms()
    n = G.order
    for a, b, c in itertools.product(range(n), repeat=3):
        if n > 12 and (a + b + c) % 5:
            continue
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))
    assert all(G.mul(0, a) == a == G.mul(a, 0) for a in range(n))
    assert all(G.mul(a, G.inv(a)) == 0 for a in range(n))


def test_orders_and_element_orders():
    assert [GROUPS[k].order for k in ("C1", "C5", "C12", "S3", "S4", "D4", "D6")] == [1, 5, 12, 6, 24, 8, 12]
    # S4 has 9 involutions, 8 elements of order 3, 6 of order 4
    orders = Counter(GROUPS["S4"].element_order(a) for a in GROUPS["S4"].elements())
    assert orders == {1: 1, 2: 9, 3: 8, 4: 6}
    assert Counter(GROUPS["D4"].element_order(a) for a in range(8)) == {1: 1, 2: 5, 4: 2}


def test_symmetric_group_matches_itertools():
    G = symmetric_group(4)
    brute = set(itertools.permutations(range(4)))
    assert {tuple(p.tolist()) for p in G.perms} == brute
    for a, b in itertools.product(range(24), repeat=2):
        assert tuple(G.perms[G.mul(a, b)].tolist()) == brute_compose(G.perms[a].tolist(), G.perms[b].tolist())


def test_power_and_conj():
    G = GROUPS["S4"]
    for a in G.elements():
        x = 0
        for k in range(6):
            assert G.power(a, k) == x
            x = G.mul(x, a)
        assert G.power(a, -1) == G.inv(a)
        for g in G.elements():
            assert G.conj(g, a) == G.mul(G.mul(g, a), G.inv(g))


def test_from_table_rejects_non_groups():
    with pytest.raises(ValueError):
        FiniteGroup.from_table([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        # identity not at index 0
        FiniteGroup.from_table([[1, 0], [0, 1]])


def test_order_cap():
    a = Permutation.from_cycles(8, [tuple(range(8))])
    b = Permutation.from_cycles(8, [(0, 1)])
    with pytest.raises(GroupTooLarge):
        from_permutation_generators([a, b], 8, cap=1000)


# --- subgroups, cosets, quotients ---------------------------------------------


def all_subgroups(G):
    seen = set()
    out = []
    for a, b in itertools.combinations_with_replacement(G.elements(), 2):
        S = Subgroup.generated(G, [a, b])
        if S._set not in seen:
            seen.add(S._set)
            out.append(S)
    return out


def brute_core(G, H):
    inter = set(G.elements())
    for g in G.elements():
        inter &= {G.mul(G.mul(g, h), G.inv(g)) for h in H.elements}
    return inter


@pytest.mark.parametrize("name", ["S3", "S4", "D4", "D6", "C12"])
def test_normal_core_brute(name):
    G = GROUPS[name]
    for H in all_subgroups(G):
        C = normal_core(G, H)
        assert C._set == brute_core(G, H)
        assert C.is_normal()
        assert C.issubset(H)


def test_s3_index3_core_trivial():
    G = GROUPS["S3"]
    H = Subgroup.generated(G, [1])
    assert H.order == 2 and H.index == 3
    assert normal_core(G, H).elements == (0,)


@pytest.mark.parametrize("name", ["S3", "S4", "D6"])
def test_right_cosets_partition(name):
    G = GROUPS[name]
    for H in all_subgroups(G):
        cosets = right_cosets(G, H)
        assert len(cosets) == H.index
        assert sorted(x for c in cosets for x in c) == list(G.elements())
        for c in cosets:
            rep = c[0]
            assert set(c) == {G.mul(h, rep) for h in H.elements}
        T = right_coset_transversal(G, H)
        assert sorted(T) == sorted(min(c) for c in cosets)
        assert 0 in T


def test_subgroup_validation():
    G = GROUPS["S3"]
    with pytest.raises(ValueError):
        Subgroup(G, (0, 2))  # a 3-cycle alone is not closed
    assert Subgroup.whole(G).order == 6
    assert Subgroup.trivial(G).order == 1


@pytest.mark.parametrize("name", ["S4", "D4", "D6", "C12"])
def test_quotient_homomorphism(name):
    G = GROUPS[name]
    for N in all_subgroups(G):
        if not N.is_normal():
            with pytest.raises(NotNormal):
                quotient(G, N)
            continue
        q = quotient(G, N)
        assert q.target.order == G.order // N.order
        for a, b in itertools.product(G.elements(), repeat=2):
            assert q(G.mul(a, b)) == q.target.mul(q(a), q(b))
        assert {a for a in G.elements() if q(a) == 0} == N._set
        assert all(q(s) == i for i, s in enumerate(q.section))


# --- regular representation and products --------------------------------------


@pytest.mark.parametrize("name", sorted(GROUPS))
def test_regular_rep_free_and_faithful(name):
    G = GROUPS[name]
    reps = left_regular_rep(G)
    assert len({p.key() for p in reps}) == G.order
    for a in G.elements():
        assert (reps[a].fixed_points() == 0) == (a != 0)
        for b in G.elements():
            assert reps[a] * reps[b] == reps[G.mul(a, b)]


def test_direct_product_brute():
    G1, G2 = GROUPS["S3"], GROUPS["C5"]
    P = direct_product(G1, G2)
    assert P.group.order == 30
    for x, y in itertools.product(P.group.elements(), repeat=2):
        (a1, b1), (a2, b2) = P.split(x), P.split(y)
        assert P.split(P.group.mul(x, y)) == (G1.mul(a1, a2), G2.mul(b1, b2))
    assert all(P.pair(*P.split(x)) == x for x in P.group.elements())
    assert P.pair(2, 3) == 2 * 5 + 3


# --- co-sofic chains ----------------------------------------------------------


def test_core_chain_shape():
    G = GROUPS["S4"]
    H = Subgroup.generated(G, [1])
    c = core_chain(G, H)
    assert len(c) == 1 and c.target._set == H._set
    assert c.stages[0][1]._set == brute_core(G, H)


def test_chain_validation():
    G = GROUPS["S4"]
    subs = sorted(all_subgroups(G), key=lambda S: -S.order)
    A4 = next(S for S in subs if S.order == 12)
    V4 = next(S for S in subs if S.order == 4 and S.is_normal())
    c = separable_chain(G, [A4, V4])
    assert [s[0].order for s in c.stages] == [12, 4]
    with pytest.raises(ValueError):
        separable_chain(G, [V4, A4])  # not decreasing
    with pytest.raises(ValueError):
        CoSoficChain(G, ((A4, Subgroup.trivial(G)),), V4)  # wrong intersection


def test_chain_product_invariants():
    S3, D4 = GROUPS["S3"], GROUPS["D4"]
    H1 = Subgroup.generated(S3, [1])
    c1 = separable_chain(S3, [Subgroup.whole(S3), H1])
    D4subs = all_subgroups(D4)
    K = next(S for S in D4subs if S.order == 2 and not S.is_normal())
    M = next(S for S in D4subs if S.order == 4 and K.issubset(S))
    c2 = separable_chain(D4, [M, K])
    P, c = chain_product(c1, c2)
    c.validate()
    assert len(c) == 2
    assert c.target.order == H1.order * K.order
    for (G, Hs), (G1, H1_), (G2, H2) in zip(c.stages, c1.stages, c2.stages):
        assert G.order == G1.order * G2.order and Hs.order == H1_.order * H2.order
        assert Hs.is_normal()


def test_chain_product_pads_shorter():
    S3 = GROUPS["S3"]
    H = Subgroup.generated(S3, [1])
    c1 = core_chain(S3, H)
    c2 = separable_chain(S3, [Subgroup.whole(S3), H])
    P, c = chain_product(c1, c2)
    assert len(c) == 2
    assert c.stages[1][0].order == H.order * H.order


@settings(max_examples=30)
@given(st.sampled_from(["S3", "S4", "D4", "D6"]), st.data())
def test_quotient_of_core_is_finite_stage(name, data):
    G = GROUPS[name]
    H = data.draw(st.sampled_from(all_subgroups(G)))
    c = core_chain(G, H)
    q = c.quotient_at(0)
    assert q.target.order * c.stages[0][1].order == G.order
