import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from soficbench import amalgam as am
from soficbench import builder as bd
from soficbench.amalgam import GraphSpec
from soficbench.approx import verify
from soficbench.groups import Subgroup, cyclic_group, dihedral_group, symmetric_group

S3 = symmetric_group(3)
H2 = Subgroup.generated(S3, [1])
EDGE = GraphSpec([0, 1], [(0, 1)])
LOOP = GraphSpec([0], [(0, 0)])


def brute_subgroup_count(G):
    n = G.order
    count = 0
    for mask in range(1 << n):
        if not mask & 1:
            continue
        S = [a for a in range(n) if mask >> a & 1]
        if all(mask >> G.mul(a, b) & 1 for a in S for b in S):
            count += 1
    return count


@pytest.mark.parametrize("G", [S3, dihedral_group(4), cyclic_group(6)], ids=["S3", "D4", "C6"])
def test_all_subgroups_brute(G):
    subs = bd.all_subgroups(G)
    assert len(subs) == brute_subgroup_count(G)
    assert len({S._set for S in subs}) == len(subs)


def test_all_subgroups_s4():
    assert len(bd.all_subgroups(symmetric_group(4))) == 30


def _is_action(K, rows):
    d = len(rows[0])
    for a, b in itertools.product(K.elements(), repeat=2):
        ab = rows[K.mul(a, b)]
        if any(ab[p] != rows[a][rows[b][p]] for p in range(d)):
            return False
    return all(rows[0][p] == p for p in range(d))


@pytest.mark.parametrize("orbits", [1, 2, 3, 5])
def test_orbit_type_actions_extend_free_h_action(orbits):
    spec = am.double_spec(S3, H2, (0, 1))
    fac = spec.factors[0]
    ot = bd._OrbitTypes(fac, 2)
    sigma = bd.free_h_action(spec.common, orbits)
    kinds = ot.types(2 * orbits)
    assert kinds
    rng = random.Random(1)
    labels = list(itertools.islice(bd._relabellings(orbits, 2), 20))
    labels += [bd._random_relabelling(orbits, 2, rng) for _ in range(10)]
    for k in kinds:
        for order, bases in labels:
            rows = ot.action(fac, k, order, bases)
            assert _is_action(S3, rows)
            for h in range(2):
                assert rows[fac.embed(h)] == sigma[h]


def test_orbit_types_exclude_h_fixing_stabilisers():
    fac = am.double_spec(S3, H2, (0, 1)).factors[0]
    ot = bd._OrbitTypes(fac, 2)
    # stabilisers meeting no conjugate of H: trivial and the 3-cycles
    assert sorted(L.order for L in ot.stabilisers) == [1, 3]
    assert ot.types(6) == [(0,), (1, 1, 1)]
    assert ot.types(3) == []


def test_free_h_action_is_free():
    C4 = cyclic_group(4)
    acts = bd.free_h_action(C4, 3)
    for h in range(1, 4):
        assert all(acts[h][p] != p for p in range(12))


# --- truncation ---------------------------------------------------------------


def test_truncation_default_and_injective():
    spec = am.decompose_graph(LOOP, S3, H2)
    t = bd.truncate_Z(spec, 2)
    assert t.N == 5
    B = am.ball(spec, R=2)
    assert len({t.map_form(w) for w in B}) == len(B)
    for x, y in itertools.product(B[:20], repeat=2):
        assert t.map_form(am.multiply(x, y, spec)) == am.multiply(t.map_form(x), t.map_form(y), t.spec)


def test_truncation_collision():
    spec = am.decompose_graph(LOOP, S3, H2)
    with pytest.raises(bd.TruncationCollision):
        bd.truncate_Z(spec, 2, N=2)


def test_truncation_without_z_is_identity():
    spec = am.decompose_graph(EDGE, S3, H2)
    t = bd.truncate_Z(spec, 3)
    assert t.spec is spec
    B = am.ball(spec, R=2)
    assert all(t.map_form(w) == w for w in B)


# --- quotients ----------------------------------------------------------------


@pytest.mark.parametrize("graph", [EDGE, LOOP], ids=["edge", "loop"])
def test_seed_quotient_is_a_homomorphism(graph):
    spec = am.decompose_graph(graph, S3, H2)
    t = bd.truncate_Z(spec, 2)
    bundle = bd.seed_quotient(t)
    for c in bundle.components:
        c.check(t.spec)


def test_separate_components_are_homomorphisms():
    spec = am.decompose_graph(EDGE, S3, H2)
    t = bd.truncate_Z(spec, 3)
    targets = [w for w in am.ball(spec, R=3) if not w.is_identity()]
    bundle = bd.separate(t, targets, bd.seed_quotient(t))
    assert not bundle.unseparated
    for c in bundle.components:
        c.check(t.spec)
    assert all(bundle.separates(w) for w in targets)


def test_separate_reports_budget_exhaustion():
    spec = am.decompose_graph(EDGE, S3, H2)
    t = bd.truncate_Z(spec, 2)
    targets = [w for w in am.ball(spec, R=2) if not w.is_identity()]
    bundle = bd.separate(t, targets, bd.seed_quotient(t), budget=0)
    assert bundle.unseparated
    assert not any(bundle.separates(w) for w in bundle.unseparated)


def test_image_group_closure_and_regular_rep():
    spec = am.decompose_graph(EDGE, S3, H2)
    t = bd.truncate_Z(spec, 2)
    targets = [w for w in am.ball(spec, R=2) if not w.is_identity()]
    bundle = bd.separate(t, targets, bd.seed_quotient(t))
    Q = bd.ImageGroup(t, bundle)
    # brute closure of the letter rows, as tuples
    gens = {tuple(r) for r in Q.letter_rows.values()}
    seen = {tuple(range(Q.degree))}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = tuple(g[p] for p in x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    assert len(seen) == Q.order
    for w in targets:
        p = Q.regular(w)
        assert p.fixed_points() == 0
    for a, b in itertools.product(range(min(Q.order, 12)), repeat=2):
        ra = np.asarray(Q.regular_row(Q.rows[a]))
        rb = np.asarray(Q.regular_row(Q.rows[b]))
        assert (ra[rb] == np.asarray(Q.regular_row(Q.rows[Q.mul(a, b)]))).all()


# --- end to end ---------------------------------------------------------------


@pytest.mark.parametrize("graph,R", [(EDGE, 2), (LOOP, 1), (GraphSpec([0, 1, 2], [(0, 1), (1, 2), (2, 0)]), 1)],
                         ids=["edge", "loop", "triangle"])
def test_build_is_exact_and_reverifies(graph, R):
    cert = bd.build_approximation(graph, S3, H2, R, Fraction(1, 10))
    assert cert.report.mult_defect == 0 and cert.report.free_defect == 0 and cert.report.unital
    again = verify(cert.approx, cert.F, Fraction(1, 1000))
    assert again.passed and again.mult_defect == 0
    assert cert.approx.degree == cert.image_order


def test_build_other_groups():
    D4 = dihedral_group(4)
    K = Subgroup.generated(D4, [next(a for a in D4.elements() if D4.element_order(a) == 2)])
    cert = bd.build_approximation(EDGE, D4, K, 2, "1/10")
    assert cert.report.passed and cert.report.free_defect == 0


def test_build_deterministic():
    a = bd.build_approximation(LOOP, S3, H2, 1, "1/10")
    b = bd.build_approximation(LOOP, S3, H2, 1, "1/10")
    assert a.input_digest == b.input_digest
    assert a.approx == b.approx


def test_incomplete_separation_carries_partial_certificate():
    with pytest.raises(bd.IncompleteSeparation) as info:
        bd.build_approximation(EDGE, S3, H2, 2, "1/10", budget=0)
    exc = info.value
    assert exc.unseparated and exc.certificate.approx is None
    assert exc.certificate.components


def test_find_separator():
    spec = am.decompose_graph(LOOP, S3, H2)
    assert bd.find_separator(spec, []) is None
    w = [("e0", (0, 1)), (0, 2), ("e0", (0, -1)), (0, 5)]
    hom = bd.find_separator(spec, w)
    assert hom is not None and hom(w) != hom([])


def test_digest_depends_on_instance():
    d1 = bd.instance_digest(S3, H2, EDGE, 2, "1/10")
    assert d1 == bd.instance_digest(S3, H2, EDGE, 2, Fraction(1, 10))
    assert d1 != bd.instance_digest(S3, H2, EDGE, 3, "1/10")
    assert d1.startswith("sha256:")
