import pytest

from soficbench import amalgam as am
from soficbench import embeddings as emb
from soficbench.amalgam import GraphSpec
from soficbench.builder import all_subgroups
from soficbench.groups import (CoSoficChain, Subgroup, core_chain, cyclic_group, dihedral_group,
                               separable_chain, symmetric_group)

S3 = symmetric_group(3)
H2 = Subgroup.generated(S3, [1])


def _check(e, R=2):
    rep = emb.embedding_report("x", e, R=R)
    assert rep.multiplicative, rep.failures
    assert rep.injective, rep.failures
    assert rep.standard_form, rep.failures
    return rep


@pytest.mark.parametrize("A", all_subgroups(S3), ids=lambda A: f"order{A.order}-{A.elements}")
def test_sub_amalgam_into_double(A):
    e = emb.SubAmalgamEmbedding(S3, A, H2)
    rep = _check(e)
    # the image of the identity is the identity, and lengths are preserved
    assert rep.images[0].is_identity()
    for x, ix in zip(rep.domain_ball, rep.images):
        assert len(ix) == len(x)
        assert emb.embed_sub_amalgam(x, e) == ix


def test_sub_amalgam_infinite_dihedral_ball():
    # two order-2 factors over the trivial group: the ball of radius R has 2R+1 elements
    A = Subgroup(S3, (0, 3))
    e = emb.SubAmalgamEmbedding(S3, A, H2)
    for R in range(5):
        assert len(am.ball(e.domain, R=R)) == 2 * R + 1


@pytest.mark.parametrize("K", [cyclic_group(2), cyclic_group(3), S3], ids=["C2", "C3", "S3"])
def test_product_embedding(K):
    e = emb.ProductEmbedding(S3, H2, K)
    rep = _check(e)
    for x, (nf, k) in zip(rep.domain_ball, rep.images):
        assert emb.embed_product(x, e) == (nf, k)
        assert len(nf) == len(x)


def test_product_embedding_second_coordinate():
    K = cyclic_group(3)
    e = emb.ProductEmbedding(S3, H2, K)
    P = e.P
    x = am.normalize([(0, P.pair(2, 1)), (1, P.pair(2, 2)), (0, P.pair(5, 1))], e.domain)
    assert e(x)[1] == (1 + 2 + 1) % 3


GRAPHS = {
    "edge": GraphSpec([0, 1], [(0, 1)]),
    "loop": GraphSpec([0], [(0, 0)]),
    "path3": GraphSpec([0, 1, 2], [(0, 1), (1, 2)]),
    "theta": GraphSpec([0, 1], [(0, 1), (0, 1), (1, 0)]),
}


@pytest.mark.parametrize("name", sorted(GRAPHS))
def test_double_into_line(name):
    spec = am.decompose_graph(GRAPHS[name], S3, H2)
    e = emb.LineEmbedding(spec)
    rep = _check(e)
    g = GRAPHS[name]
    assert len(e.codomain.factors) == len(g.vertices) + len(g.non_tree_edges())
    for x, ix in zip(rep.domain_ball, rep.images):
        assert emb.embed_double_into_line(x, e) == ix


def test_line_assignment_order():
    spec = am.decompose_graph(GRAPHS["theta"], S3, H2)
    e = emb.LineEmbedding(spec)
    assert e.assignment == {0: 0, 1: 1, "e1": 2, "e2": 3}


def test_line_embedding_needs_graph_spec():
    with pytest.raises(ValueError):
        emb.LineEmbedding(am.double_spec(S3, H2, (0, 1)))


# --- stagewise ------------------------------------------------------------------


def test_stagewise_core_chain():
    spec = am.double_spec(S3, H2, (0, 1))
    data = emb.cosofic_stage_data(core_chain(S3, H2), H2)
    e = emb.StagewiseEmbedding(spec, data)
    _check(e)
    for x in am.ball(spec, R=3):
        for sw, (_, Hi) in zip(emb.stagewise_embed(x, spec, data), data.stages):
            assert emb.stage_word_is_standard(sw, Hi)
            assert len(sw.letters) == len(x)


def test_stagewise_two_stage_chain():
    G = symmetric_group(4)
    subs = all_subgroups(G)
    V4 = next(S for S in subs if S.order == 4 and S.is_normal())
    chain = CoSoficChain(G, ((V4, V4), (V4, Subgroup.trivial(G))), V4)
    spec = am.double_spec(G, V4, (0, 1))
    data = emb.cosofic_stage_data(chain, V4)
    assert [L.order for L, _ in data.stages] == [6 * 24, 24 * 24]
    _check(emb.StagewiseEmbedding(spec, data), R=1)


def test_stagewise_early_stage_improper():
    # with G_0 = A4 an element of A4 outside V4 is still inside the stage-0 amalgamated subgroup
    G = symmetric_group(4)
    subs = all_subgroups(G)
    A4 = next(S for S in subs if S.order == 12)
    V4 = next(S for S in subs if S.order == 4 and S.is_normal())
    spec = am.double_spec(G, V4, (0, 1))
    data = emb.cosofic_stage_data(separable_chain(G, [A4, V4]), V4)
    g = next(x for x in A4.elements if x not in V4)
    with pytest.raises(emb.ImproperSequence):
        emb.stagewise_embed(am.normalize([(0, g)], spec), spec, data)
    h = next(x for x in G.elements() if x not in A4)
    assert len(emb.stagewise_embed(am.normalize([(0, h)], spec), spec, data)) == 2


def test_improper_sequence():
    spec = am.double_spec(S3, H2, (0, 1))
    data = emb.StageData(((S3, H2),), ((0, 1),), {g: (0,) for g in S3.elements()})
    x = am.normalize([(0, 2)], spec)
    with pytest.raises(emb.ImproperSequence):
        emb.stagewise_embed(x, spec, data)
    with pytest.raises(ValueError):
        emb.StageData(((S3, H2),), (), {})


# --- co-sofic membership ------------------------------------------------------------


CASES = [
    (S3, [H2]),
    (S3, [Subgroup.whole(S3), H2]),
    (dihedral_group(4), None),
    (symmetric_group(4), None),
    (dihedral_group(6), None),
]


@pytest.mark.parametrize("G,subs", CASES, ids=["S3-core", "S3-two", "D4", "S4", "D6"])
def test_cosofic_membership_agrees(G, subs):
    chains = []
    if subs is not None:
        chains.append(separable_chain(G, subs))
    else:
        for S in all_subgroups(G):
            chains.append(core_chain(G, S))
    for c in chains:
        for g in G.elements():
            assert emb.cosofic_member(g, c) == (g in c.target)
            k = emb.escape_stage(g, c)
            assert (k is None) == (g in c.target)
            if k is not None:
                assert not emb.in_stage(g, c, k)
                assert all(emb.in_stage(g, c, j) for j in range(k))


def test_stage_map_values():
    c = core_chain(S3, H2)
    q = c.quotient_at(0)
    for g in S3.elements():
        assert emb.cosofic_stage_map(g, c, 0) == (q(g), g)
    with pytest.raises(IndexError):
        emb.cosofic_stage_map(0, c, 1)
