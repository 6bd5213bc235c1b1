"""Explicit approximations for balls in graph-of-groups doubles with finite vertex group.

Pipeline: decompose the graph into an amalgam, truncate every ``Z`` coordinate
mod ``N = 2R+1``, find finite permutation quotients of the truncated amalgam
that keep every ball element non-trivial, and pull back the left regular
representation of the resulting finite image group.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterator, Sequence

import numpy as np

from . import amalgam as am
from .amalgam import AmalgamSpec, FiniteFactor, Letter, NormalForm, ZFactor
from .approx import ApproxMap, DefectReport, pullback, verify
from .groups import (FiniteGroup, GroupTooLarge, Permutation, Subgroup, cyclic_group,
                     direct_product)

DEFAULT_BUDGET = 2_000_000
DEFAULT_DEGREE_CAP = 100_000
DEFAULT_IMAGE_CAP = 100_000


class TruncationCollision(RuntimeError):
    pass


class IncompleteSeparation(RuntimeError):
    def __init__(self, certificate: "Certificate", unseparated: list):
        super().__init__(f"incomplete separation: {len(unseparated)} ball elements not separated")
        self.certificate = certificate
        self.unseparated = unseparated


# ---------------------------------------------------------------------------
# Truncation of Z coordinates
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class TruncatedSpec:
    base: AmalgamSpec
    N: int
    spec: AmalgamSpec  # every factor finite
    # factor id -> (base group of the Z factor, B x C_N) for truncated factors
    z_parts: dict = field(default_factory=dict)

    def stage_letter(self, letter: Letter) -> Letter:
        fid, x = letter
        if fid in self.z_parts:
            _, P = self.z_parts[fid]
            return Letter(fid, P.pair(x[0], x[1] % self.N))
        return Letter(fid, x)

    def stage_word(self, word: Sequence[Letter]) -> list[Letter]:
        return [self.stage_letter(self.base.coerce_letter(x)) for x in word]

    def map_form(self, nf: NormalForm) -> NormalForm:
        h = 0
        rev: list[Letter] = []
        for letter in reversed(nf.letters):
            h = am._push_left(self.spec, h, rev, self.stage_letter(letter))
        return NormalForm(self.spec.common.mul(nf.head, h), tuple(reversed(rev)))


def truncate_Z(spec: AmalgamSpec, R: int, N: int | None = None, check: bool = True) -> TruncatedSpec:
    """Replace each ``B x Z`` factor by ``B x Z/N`` (default ``N = 2R+1``).

    With ``check`` the stage map is compared on the radius-``R`` ball and a
    collision raises :class:`TruncationCollision`.
    """
    if R < 0:
        raise ValueError("radius must be non-negative")
    N = 2 * R + 1 if N is None else N
    factors = {}
    z_parts = {}
    for fid, fac in spec.factors.items():
        if isinstance(fac, ZFactor):
            P = direct_product(fac.base, cyclic_group(N))
            emb = tuple(P.pair(b, 0) for b in fac.h_embedding)
            factors[fid] = FiniteFactor(P.group, emb)
            z_parts[fid] = (fac.base, P)
        else:
            factors[fid] = fac
    if not z_parts:
        t = TruncatedSpec(spec, N, spec, {})
    else:
        t = TruncatedSpec(spec, N, AmalgamSpec(spec.common, factors, spec.provenance, spec.ambient), z_parts)
    if check and z_parts:
        seen: dict[NormalForm, NormalForm] = {}
        for w in am.ball(spec, R=R):
            img = t.map_form(w)
            if img in seen and seen[img] != w:
                raise TruncationCollision(f"truncation collision: {seen[img]} and {w} both map to {img}")
            seen[img] = w
    return t


# ---------------------------------------------------------------------------
# Permutation quotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Component:
    """Homomorphism of a finite amalgam into ``Sym(degree)``, factor by factor.

    ``images[fid][x]`` is the image of factor element ``x`` as a tuple of point
    images; ``h_images[h]`` the common image of ``h`` in ``H``.
    """

    degree: int
    images: dict
    h_images: tuple

    def word_image(self, word: Sequence[Letter]) -> tuple[int, ...]:
        pts = list(range(self.degree))
        for fid, x in reversed(word):
            act = self.images[fid][x]
            pts = [act[p] for p in pts]
        return tuple(pts)

    def form_image(self, nf: NormalForm) -> tuple[int, ...]:
        pts = list(range(self.degree))
        for fid, x in reversed(nf.letters):
            act = self.images[fid][x]
            pts = [act[p] for p in pts]
        act = self.h_images[nf.head]
        return tuple(act[p] for p in pts)

    def separates(self, nf: NormalForm) -> bool:
        img = self.form_image(nf)
        return any(img[p] != p for p in range(self.degree))

    def check(self, spec: AmalgamSpec) -> None:
        """Multiplicativity on every factor and agreement on the common subgroup."""
        H = spec.common
        for fid, fac in spec.factors.items():
            imgs = self.images[fid]
            for a in fac.elements():
                for b in fac.elements():
                    ab = imgs[fac.mul(a, b)]
                    ia, ib = imgs[a], imgs[b]
                    if any(ab[p] != ia[ib[p]] for p in range(self.degree)):
                        raise ValueError(f"component not multiplicative on factor {fid!r} at ({a}, {b})")
            for h in H.elements():
                if imgs[fac.embed(h)] != self.h_images[h]:
                    raise ValueError(f"factor {fid!r} disagrees on H at {h}")


@dataclass(frozen=True, eq=False)
class QuotientBundle:
    components: tuple[Component, ...]
    separated: frozenset
    unseparated: tuple = ()
    stats: dict = field(default_factory=dict)

    @property
    def combined_degree(self) -> int:
        return sum(c.degree for c in self.components)

    def form_image(self, nf: NormalForm) -> tuple:
        return tuple(c.form_image(nf) for c in self.components)

    def separates(self, nf: NormalForm) -> bool:
        return any(c.separates(nf) for c in self.components)


def seed_quotient(t: TruncatedSpec, cap_degree: int = DEFAULT_DEGREE_CAP) -> QuotientBundle:
    """Every factor acting on ``G x Z/N`` by left translation (and shift, for ``Z`` factors)."""
    if t.spec.ambient is None:
        raise ValueError("seed quotient needs a spec built from a vertex group (decompose_graph)")
    G, H = t.spec.ambient
    n_z = t.N if t.z_parts else 1
    degree = G.order * n_z
    if degree > cap_degree:
        raise GroupTooLarge(f"seed degree {degree} exceeds cap {cap_degree}")
    h_to_g = H.elements

    def action(g: int, shift: int) -> tuple[int, ...]:
        row = G.table[g]
        return tuple(row[y] * n_z + (k + shift) % n_z for y in range(G.order) for k in range(n_z))

    images = {}
    for fid, fac in t.spec.factors.items():
        if fid in t.z_parts:
            B, P = t.z_parts[fid]
            to_g = (lambda b: b) if B == G else (lambda b: h_to_g[b])
            images[fid] = tuple(action(to_g(P.proj1(x)), P.proj2(x)) for x in fac.elements())
        else:
            if fac.group != G or fac.h_embedding != tuple(h_to_g):
                raise ValueError(f"factor {fid!r} is not the vertex group with its standard H")
            images[fid] = tuple(action(g, 0) for g in fac.elements())
    h_images = tuple(action(h_to_g[h], 0) for h in t.spec.common.elements())
    return QuotientBundle((Component(degree, images, h_images),), frozenset())


def free_h_action(H: FiniteGroup, orbits: int) -> tuple[tuple[int, ...], ...]:
    """``H`` acting freely on ``orbits`` copies of itself; point ``(i, h)`` is ``i*|H| + h``."""
    m = H.order
    return tuple(tuple(i * m + H.mul(h, x) for i in range(orbits) for x in range(m)) for h in range(m))


class _Counter:
    def __init__(self, budget: int):
        self.budget = budget
        self.nodes = 0

    def tick(self) -> bool:
        self.nodes += 1
        return self.nodes <= self.budget


def all_subgroups(K: FiniteGroup) -> list[Subgroup]:
    """Every subgroup of ``K``, by closing cyclic subgroups under joins."""
    cyclic = {Subgroup.generated(K, [g])._set for g in K.elements()}
    subs = set(cyclic)
    frontier = set(cyclic)
    while frontier:
        new = set()
        for A in frontier:
            for C in cyclic:
                if not C <= A:
                    J = Subgroup.generated(K, sorted(A | C))._set
                    if J not in subs:
                        new.add(J)
        subs |= new
        frontier = new
    return [Subgroup(K, tuple(sorted(s))) for s in sorted(subs, key=lambda s: (len(s), sorted(s)))]


class _OrbitTypes:
    """Transitive pieces ``K/L`` on which the common subgroup acts freely, one ``L`` per conjugacy class."""

    def __init__(self, fac: FiniteFactor, m: int):
        K = fac.group
        self.K = K
        self.m = m
        h_conj = {K.conj(g, h) for g in K.elements() for h in fac.h_embedding}
        reps, seen = [], set()
        for L in all_subgroups(K):
            if L._set & h_conj != {0} or L._set in seen:
                continue
            seen.update(L.conjugate(g) for g in K.elements())
            reps.append(L)
        # large orbits first: the regular piece comes before its quotients
        self.stabilisers = sorted(reps, key=lambda L: (L.order, L.elements))
        self.actions = [self._coset_action(L) for L in self.stabilisers]

    def _coset_action(self, L: Subgroup) -> list[list[int]]:
        K = self.K
        cosets, index = [], {}
        for g in K.elements():
            if g in index:
                continue
            c = sorted(K.mul(g, x) for x in L.elements)
            for x in c:
                index[x] = len(cosets)
            cosets.append(c[0])
        return [[index[K.mul(k, c)] for c in cosets] for k in K.elements()]

    def types(self, degree: int) -> list[tuple[int, ...]]:
        """Multisets of stabiliser indices (non-decreasing) whose orbit sizes sum to ``degree``."""
        sizes = [len(a[0]) for a in self.actions]
        out = []

        def rec(start: int, left: int, acc: list[int]):
            if left == 0:
                out.append(tuple(acc))
                return
            for i in range(start, len(sizes)):
                if sizes[i] <= left:
                    acc.append(i)
                    rec(i, left - sizes[i], acc)
                    acc.pop()

        rec(0, degree, [])
        return out

    def action(self, fac: FiniteFactor, kinds: Sequence[int], order: Sequence[int] | None = None,
               bases: Sequence[int] | None = None) -> tuple[tuple[int, ...], ...]:
        """The action of type ``kinds`` relabelled so that ``H`` acts as in :func:`free_h_action`.

        H-orbit ``j`` (in discovery order) becomes orbit ``order[j]`` with base
        point its ``bases[j]``-th element; ``None`` means the canonical choice.
        """
        K, m = self.K, self.m
        rows_parts, offset = [], 0
        for i in kinds:
            a = self.actions[i]
            rows_parts.append((a, offset))
            offset += len(a[0])
        d = offset
        act = [[0] * d for _ in K.elements()]
        for a, off in rows_parts:
            for k in K.elements():
                row = a[k]
                dst = act[k]
                for p, q in enumerate(row):
                    dst[off + p] = off + q
        emb = fac.h_embedding
        label = [-1] * d
        j = 0
        for p in range(d):
            if label[p] >= 0:
                continue
            orbit = [act[emb[h]][p] for h in range(m)]
            b = orbit[bases[j] % m] if bases is not None else p
            i = order[j] if order is not None else j
            for h in range(m):
                label[act[emb[h]][b]] = i * m + h
            j += 1
        out = [[0] * d for _ in K.elements()]
        for k in K.elements():
            row, dst = act[k], out[k]
            for p in range(d):
                dst[label[p]] = label[row[p]]
        return tuple(tuple(r) for r in out)


class _TypeCache:
    def __init__(self, m: int):
        self.m = m
        self._types: dict = {}

    def get(self, fac: FiniteFactor) -> _OrbitTypes:
        key = (fac.group.table, fac.h_embedding)
        got = self._types.get(key)
        if got is None:
            got = self._types[key] = _OrbitTypes(fac, self.m)
        return got


def _relabellings(orbits: int, m: int) -> Iterator[tuple]:
    """Every H-equivariant relabelling (orbit order, base offsets), the canonical one first."""
    for order in itertools.permutations(range(orbits)):
        for bases in itertools.product(range(m), repeat=orbits):
            yield order, bases


def _random_relabelling(orbits: int, m: int, rng: random.Random) -> tuple:
    order = list(range(orbits))
    rng.shuffle(order)
    return tuple(order), tuple(rng.randrange(m) for _ in range(orbits))


def _search_component(spec: AmalgamSpec, target: NormalForm, orbits: int, cache: _TypeCache,
                      counter: _Counter, rng: random.Random, relabel_limit: int = 5000) -> Component | None:
    """A degree ``orbits*|H|`` component moving ``target``, or ``None``.

    Factors not occurring in ``target`` get the canonical action of their
    first type.  Among the involved factors the first keeps its canonical
    labelling (relabelling every factor at once only conjugates the
    component); the others run through all relabellings when there are at
    most ``relabel_limit`` joint choices, else through a seeded sample of
    that size.
    """
    H = spec.common
    m = H.order
    d = orbits * m
    sigma = free_h_action(H, orbits)
    involved = list(dict.fromkeys(x.factor for x in target.letters))
    images: dict = {}
    for f in spec.factors:
        if f not in involved:
            ot = cache.get(spec.factors[f])
            kinds = ot.types(d)
            if not kinds:
                return None
            images[f] = ot.action(spec.factors[f], kinds[0])
    per_factor = []
    for f in involved:
        ot = cache.get(spec.factors[f])
        kinds = ot.types(d)
        if not kinds:
            return None
        per_factor.append((f, ot, kinds))
    if not per_factor:
        # a bare head: only the free H-action can see it
        if not counter.tick():
            return None
        comp = Component(d, images, sigma)
        return comp if comp.separates(target) else None
    rest = per_factor[1:]
    joint = (math.factorial(orbits) * m ** orbits) ** len(rest)
    for combo in itertools.product(*(kinds for _, _, kinds in per_factor)):
        f0, ot0, _ = per_factor[0]
        lead = ot0.action(spec.factors[f0], combo[0])
        if joint <= relabel_limit:
            choices = itertools.product(*(_relabellings(orbits, m) for _ in rest))
        else:
            canonical = (tuple(range(orbits)), (0,) * orbits)
            sampled = (tuple(_random_relabelling(orbits, m, rng) for _ in rest) for _ in range(relabel_limit))
            choices = itertools.chain([(canonical,) * len(rest)], sampled)
        for labels in choices:
            if not counter.tick():
                return None
            chosen = {f0: lead}
            for (f, ot, _), kinds, lab in zip(rest, combo[1:], labels):
                chosen[f] = ot.action(spec.factors[f], kinds, *lab)
            comp = Component(d, {**images, **chosen}, sigma)
            if comp.separates(target):
                return comp
    return None


def separate(t: TruncatedSpec, targets: Sequence[NormalForm], bundle: QuotientBundle,
             budget: int = DEFAULT_BUDGET, max_degree: int | None = None, seed: int = 0) -> QuotientBundle:
    """Add permutation quotients until every target has a non-identity image.

    Targets are processed in order; for an unseparated one, degrees
    ``|H|, 2|H|, ...`` up to ``max_degree`` are tried and the first component
    that moves the target is kept.  Running out of budget is not an error: the
    returned bundle lists what is still unseparated.
    """
    spec = t.spec
    H = spec.common
    if max_degree is None:
        max_degree = 2 * max(f.group.order for f in spec.factors.values())
    counter = _Counter(budget)
    cache = _TypeCache(H.order)
    rng = random.Random(seed)
    components = list(bundle.components)
    pending = [w for w in dict.fromkeys(targets) if not w.is_identity()]
    separated = set(bundle.separated)
    unseparated = []
    degrees_tried: set[int] = set()

    def covered(w):
        return any(c.separates(w) for c in components)

    for w in pending:
        if w in separated or covered(w):
            separated.add(w)
            continue
        found = None
        orbits = 1
        while found is None and orbits * H.order <= max_degree and counter.nodes < budget:
            degrees_tried.add(orbits * H.order)
            found = _search_component(spec, w, orbits, cache, counter, rng)
            orbits += 1
        if found is None:
            unseparated.append(w)
        else:
            components.append(found)
            separated.add(w)
    stats = dict(bundle.stats)
    stats["nodes_expanded"] = stats.get("nodes_expanded", 0) + counter.nodes
    stats["degrees_tried"] = sorted(set(stats.get("degrees_tried", [])) | degrees_tried)
    stats["components_added"] = stats.get("components_added", 0) + len(components) - len(bundle.components)
    return QuotientBundle(tuple(components), frozenset(separated), tuple(unseparated), stats)


# ---------------------------------------------------------------------------
# Image group and its regular representation
# ---------------------------------------------------------------------------


class ImageGroup:
    """Finite image of a truncated amalgam under all components acting side by side.

    Elements are numbered in breadth-first order from the identity; element
    rows are permutations of the disjoint union of component point sets.
    """

    def __init__(self, t: TruncatedSpec, bundle: QuotientBundle, cap: int = DEFAULT_IMAGE_CAP):
        self.t = t
        self.bundle = bundle
        offsets = np.cumsum([0] + [c.degree for c in bundle.components])
        self.degree = int(offsets[-1])
        self._offsets = offsets
        self.letter_rows: dict[tuple, np.ndarray] = {}
        for fid, fac in t.spec.factors.items():
            for x in fac.elements():
                self.letter_rows[(fid, x)] = self._combine([c.images[fid][x] for c in bundle.components])
        self.h_rows = [self._combine([c.h_images[h] for c in bundle.components])
                       for h in t.spec.common.elements()]
        dtype = np.uint8 if self.degree <= 256 else np.uint32
        self._dtype = dtype
        gens = []
        seen_g = set()
        for row in self.letter_rows.values():
            k = row.astype(dtype).tobytes()
            if k not in seen_g and not (row == np.arange(self.degree)).all():
                seen_g.add(k)
                gens.append(row)
        ident = np.arange(self.degree, dtype=np.int64)
        rows = [ident]
        self.index = {ident.astype(dtype).tobytes(): 0}
        frontier = np.array([ident])
        while len(frontier):
            new = []
            for g in gens:
                comp = g[frontier]  # g o x for each x in frontier
                for r in comp:
                    k = r.astype(dtype).tobytes()
                    if k not in self.index:
                        if len(rows) >= cap:
                            raise GroupTooLarge(f"image group exceeds cap {cap}")
                        self.index[k] = len(rows)
                        rows.append(r)
                        new.append(r)
            frontier = np.array(new) if new else np.empty((0, self.degree), dtype=np.int64)
        self.rows = np.array(rows)
        self.order = len(rows)
        self._lambda: dict[bytes, np.ndarray] = {}

    def _combine(self, parts) -> np.ndarray:
        return np.concatenate([np.asarray(p, dtype=np.int64) + off for p, off in zip(parts, self._offsets)])

    def lookup(self, row: np.ndarray) -> int:
        return self.index[row.astype(self._dtype).tobytes()]

    def element_of(self, nf: NormalForm) -> int:
        """Index of the image of a truncated-spec normal form."""
        return self.lookup(self.row_of(nf))

    def row_of(self, nf: NormalForm) -> np.ndarray:
        row = np.arange(self.degree)
        for letter in reversed(nf.letters):
            row = self.letter_rows[tuple(letter)][row]
        return self.h_rows[nf.head][row]

    def mul(self, a: int, b: int) -> int:
        return self.lookup(self.rows[a][self.rows[b]])

    def regular_row(self, row: np.ndarray) -> np.ndarray:
        """Left translation by the element with the given row, as an array on element indices."""
        key = row.astype(self._dtype).tobytes()
        cached = self._lambda.get(key)
        if cached is None:
            comp = row[self.rows]
            cached = np.fromiter((self.index[r.astype(self._dtype).tobytes()] for r in comp),
                                 dtype=np.int64, count=self.order)
            self._lambda[key] = cached
        return cached

    def regular(self, nf: NormalForm) -> Permutation:
        perm = np.arange(self.order)
        for letter in reversed(nf.letters):
            perm = self.regular_row(self.letter_rows[tuple(letter)])[perm]
        perm = self.regular_row(self.h_rows[nf.head])[perm]
        return Permutation(perm, check=False)


# ---------------------------------------------------------------------------
# End-to-end
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Certificate:
    input_digest: str
    radius: int
    epsilon: Fraction
    truncation_N: int
    components: tuple[Component, ...]
    combined_degree: int
    image_order: int
    approx: ApproxMap | None
    F: tuple
    report: DefectReport | None
    stats: dict
    spec: AmalgamSpec | None = None
    meta: dict = field(default_factory=dict)


def instance_digest(G: FiniteGroup, H: Subgroup, graph: am.GraphSpec, R: int, epsilon) -> str:
    doc = {
        "table": [list(r) for r in G.table],
        "subgroup": list(H.elements),
        "vertices": list(graph.vertices),
        "edges": [list(e) for e in graph.edges],
        "tree": list(graph.tree),
        "radius": R,
        "epsilon": str(Fraction(epsilon)),
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"), default=str)
    return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


def build_approximation(graph: am.GraphSpec, G: FiniteGroup, H: Subgroup, R: int, epsilon,
                        budget: int = DEFAULT_BUDGET, cap_degree: int = DEFAULT_DEGREE_CAP,
                        cap_image: int = DEFAULT_IMAGE_CAP, max_component_degree: int | None = None,
                        seed: int = 0) -> Certificate:
    """Explicit ``(F, epsilon)``-approximation for the radius-``R`` ball of ``D_graph(G, H)``.

    Raises :class:`IncompleteSeparation` (carrying the partial certificate) if
    the quotient search leaves a ball element unseparated.  ``seed`` only
    matters when the separation search has to sample relabellings.
    """
    if R < 1:
        raise ValueError("radius must be at least 1")
    eps = Fraction(epsilon)
    started = time.perf_counter()
    spec = am.decompose_graph(graph, G, H)
    t = truncate_Z(spec, R)
    F = am.ball(spec, R=R)
    targets = [t.map_form(w) for w in F if not w.is_identity()]
    bundle = seed_quotient(t, cap_degree=cap_degree)
    bundle = separate(t, targets, bundle, budget=budget, max_degree=max_component_degree, seed=seed)
    digest = instance_digest(G, H, graph, R, eps)
    stats = {
        "ball_size": len(F),
        "components": len(bundle.components),
        "seed": seed,
        **bundle.stats,
    }
    if bundle.unseparated:
        cert = Certificate(digest, R, eps, t.N, bundle.components, bundle.combined_degree, 0, None,
                           tuple(F), None, stats, spec,
                           {"wall_clock_seconds": round(time.perf_counter() - started, 3)})
        raise IncompleteSeparation(cert, list(bundle.unseparated))
    if bundle.combined_degree > cap_degree:
        raise GroupTooLarge(f"combined degree {bundle.combined_degree} exceeds cap {cap_degree}")

    Q = ImageGroup(t, bundle, cap=cap_image)
    products = {}
    support = list(F)
    for g in F:
        for h in F:
            gh = am.multiply(g, h, spec)
            products[(g, h)] = gh
            support.append(gh)
    support = list(dict.fromkeys(support))
    truncated = {w: t.map_form(w) for w in support}
    assignment = {w: Q.element_of(truncated[w]) for w in support}

    stage_table = {}
    for w in support:
        q = assignment[w]
        if q not in stage_table:
            stage_table[q] = Q.regular(truncated[w])
    stage_table.setdefault(0, Permutation.identity(Q.order))
    stage_F = list(dict.fromkeys(assignment[g] for g in F))
    stage_products = {(a, b): Q.mul(a, b) for a in stage_F for b in stage_F}
    for v in stage_products.values():
        if v not in stage_table:
            stage_table[v] = Permutation(Q.regular_row(Q.rows[v]), check=False)
    phi0 = ApproxMap(tuple(stage_table), Q.order, stage_table, stage_products, 0)
    phi = pullback(phi0, F, assignment, mul=lambda g, h: products[(g, h)], identity=spec.identity())
    report = verify(phi, F, eps)
    stats.update({"image_order": Q.order, "support_size": len(phi.support)})
    return Certificate(digest, R, eps, t.N, bundle.components, bundle.combined_degree, Q.order, phi,
                       tuple(F), report, stats, spec,
                       {"wall_clock_seconds": round(time.perf_counter() - started, 3)})


# ---------------------------------------------------------------------------
# Separating homomorphisms for the equality oracle
# ---------------------------------------------------------------------------


class SeparatingHomomorphism:
    """Truncation followed by a permutation component, evaluated on raw words."""

    def __init__(self, t: TruncatedSpec, component: Component):
        self.t = t
        self.component = component

    def __call__(self, word: Sequence) -> tuple[int, ...]:
        return self.component.word_image(self.t.stage_word(word))

    def __repr__(self) -> str:
        return f"SeparatingHomomorphism(degree={self.component.degree}, N={self.t.N})"


def find_separator(spec: AmalgamSpec, word: Sequence, budget: int = 200_000) -> SeparatingHomomorphism | None:
    """A finite permutation quotient in which ``word`` is non-trivial, or ``None``."""
    nf = am.normalize(word, spec)
    if nf.is_identity():
        return None
    reach = sum(abs(x.value[1]) for x in nf.letters if isinstance(x.value, tuple))
    t = truncate_Z(spec, max(1, reach), check=False)
    target = t.map_form(nf)
    if spec.ambient is not None:
        seed = seed_quotient(t)
        if seed.components[0].separates(target):
            return SeparatingHomomorphism(t, seed.components[0])
        bundle = seed
    else:
        bundle = QuotientBundle((), frozenset())
    bundle = separate(t, [target], bundle, budget=budget)
    for c in bundle.components:
        if c.separates(target):
            return SeparatingHomomorphism(t, c)
    return None
