"""Word-level embeddings between amalgams, plus the stage maps coming from co-sofic chains.

Each embedding object exposes its ``domain`` spec, maps domain normal forms
with ``__call__``, and multiplies in its codomain with ``codomain_mul``, so
that :func:`embedding_report` can check multiplicativity and injectivity on a
ball exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable, Mapping, Sequence

from . import amalgam as am
from .amalgam import AmalgamSpec, FiniteFactor, Letter, NormalForm, ZFactor
from .groups import (CoSoficChain, FiniteGroup, Subgroup, direct_product, product_subgroup,
                     quotient)


class ImproperSequence(ValueError):
    pass


class UnassignedFactor(KeyError):
    pass


def _intersection(A: Subgroup, B: Subgroup) -> Subgroup:
    return Subgroup(A.parent, tuple(set(A.elements) & set(B.elements)))


class SubAmalgamEmbedding:
    """``*_{H∩K} H -> *_K G`` for subgroups ``H, K`` of ``G``; letters go over unchanged."""

    def __init__(self, G: FiniteGroup, H: Subgroup, K: Subgroup, factor_ids: Sequence[Hashable] = (0, 1)):
        self.G, self.H, self.K = G, H, K
        HK = _intersection(H, K)
        Hgrp, self._h_to_g = H.as_group()
        HKgrp, self._hk_to_g = HK.as_group()
        pos_in_h = {x: i for i, x in enumerate(H.elements)}
        self.domain = AmalgamSpec(HKgrp, {f: FiniteFactor(Hgrp, tuple(pos_in_h[x] for x in HK.elements))
                                          for f in factor_ids})
        self.codomain = am.double_spec(G, K, factor_ids)
        self._g_to_k = {x: i for i, x in enumerate(K.elements)}

    def raw_image(self, w: NormalForm) -> tuple[int, tuple[Letter, ...]]:
        head = self._g_to_k[self._hk_to_g[w.head]]
        return head, tuple(Letter(f, self._h_to_g[x]) for f, x in w.letters)

    def __call__(self, w: NormalForm) -> NormalForm:
        head, letters = self.raw_image(w)
        nf = am.normalize(letters, self.codomain)
        return NormalForm(self.codomain.common.mul(head, nf.head), nf.letters)

    def image_is_standard(self, w: NormalForm) -> bool:
        return am.is_standard_form(self.raw_image(w)[1], self.codomain)

    def codomain_mul(self, a: NormalForm, b: NormalForm) -> NormalForm:
        return am.multiply(a, b, self.codomain)


def embed_sub_amalgam(w: NormalForm, data: SubAmalgamEmbedding) -> NormalForm:
    return data(w)


class ProductEmbedding:
    """``*_{H x K} (G x K) -> (*_H G) x K``: first coordinates form a word, second ones multiply."""

    def __init__(self, G: FiniteGroup, H: Subgroup, K: FiniteGroup, factor_ids: Sequence[Hashable] = (0, 1)):
        self.G, self.H, self.K = G, H, K
        self.P = direct_product(G, K)
        Hgrp, h_to_g = H.as_group()
        self.HK = direct_product(Hgrp, K)
        self._h_to_g = h_to_g
        emb = tuple(self.P.pair(h_to_g[h], k) for h in range(Hgrp.order) for k in range(K.order))
        self.domain = AmalgamSpec(self.HK.group, {f: FiniteFactor(self.P.group, emb) for f in factor_ids})
        self.codomain = am.double_spec(G, H, factor_ids)

    def raw_image(self, w: NormalForm) -> tuple[int, tuple[Letter, ...], int]:
        h, k = self.HK.split(w.head)
        letters = []
        for f, x in w.letters:
            g, kx = self.P.split(x)
            letters.append(Letter(f, g))
            k = self.K.mul(k, kx)
        return h, tuple(letters), k

    def __call__(self, w: NormalForm) -> tuple[NormalForm, int]:
        h, letters, k = self.raw_image(w)
        nf = am.normalize(letters, self.codomain)
        return NormalForm(self.codomain.common.mul(h, nf.head), nf.letters), k

    def image_is_standard(self, w: NormalForm) -> bool:
        return am.is_standard_form(self.raw_image(w)[1], self.codomain)

    def codomain_mul(self, a: tuple[NormalForm, int], b: tuple[NormalForm, int]) -> tuple[NormalForm, int]:
        return am.multiply(a[0], b[0], self.codomain), self.K.mul(a[1], b[1])


def embed_product(w: NormalForm, data: ProductEmbedding) -> tuple[NormalForm, int]:
    return data(w)


class LineEmbedding:
    """``D_graph(G, H) -> *_H (G x Z)``.

    Vertex ``v`` goes to line copy ``position(v)``; the ``j``-th non-tree edge
    (in edge order) to copy ``|V| + j``.
    """

    def __init__(self, spec: AmalgamSpec):
        if spec.provenance is None or spec.ambient is None:
            raise ValueError("spec does not come from decompose_graph")
        graph = spec.provenance
        G, H = spec.ambient
        self.domain = spec
        self.assignment: dict[Hashable, int] = {v: i for i, v in enumerate(graph.vertices)}
        for j, k in enumerate(graph.non_tree_edges()):
            self.assignment[am.edge_factor_id(k)] = len(graph.vertices) + j
        self._h_to_g = H.elements
        emb = tuple(H.elements)
        self.codomain = AmalgamSpec(spec.common, {i: ZFactor(G, emb) for i in sorted(self.assignment.values())},
                                    ambient=(G, H))

    def _letter(self, letter: Letter) -> Letter:
        idx = self.assignment.get(letter.factor)
        if idx is None:
            raise UnassignedFactor(f"unassigned factor id {letter.factor!r}")
        fac = self.domain.factors[letter.factor]
        if isinstance(fac, ZFactor):
            b, m = letter.value
            return Letter(idx, (self._h_to_g[b], m))
        return Letter(idx, (letter.value, 0))

    def raw_image(self, w: NormalForm) -> tuple[int, tuple[Letter, ...]]:
        return w.head, tuple(self._letter(x) for x in w.letters)

    def __call__(self, w: NormalForm) -> NormalForm:
        head, letters = self.raw_image(w)
        nf = am.normalize(letters, self.codomain)
        return NormalForm(self.codomain.common.mul(head, nf.head), nf.letters)

    def image_is_standard(self, w: NormalForm) -> bool:
        return am.is_standard_form(self.raw_image(w)[1], self.codomain)

    def codomain_mul(self, a: NormalForm, b: NormalForm) -> NormalForm:
        return am.multiply(a, b, self.codomain)


def embed_double_into_line(w: NormalForm, data: LineEmbedding) -> NormalForm:
    return data(w)


# ---------------------------------------------------------------------------
# Stagewise maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class StageData:
    """Finite stages ``H_i <= L_i`` and a representing sequence for each tracked element.

    ``head_maps[i][h]`` is the stage-``i`` image of ``h`` in the common
    subgroup; ``sequences[g][i]`` the stage-``i`` entry of ``g``.
    """

    stages: tuple[tuple[FiniteGroup, Subgroup], ...]
    head_maps: tuple[tuple[int, ...], ...]
    sequences: Mapping[int, tuple[int, ...]]
    specs: tuple[AmalgamSpec, ...] = field(default=())

    def __post_init__(self):
        n = len(self.stages)
        if len(self.head_maps) != n:
            raise ValueError("one head map per stage required")
        for g, seq in self.sequences.items():
            if len(seq) != n:
                raise ValueError(f"sequence for {g} has length {len(seq)}, expected {n}")


@dataclass(frozen=True)
class StageWord:
    head: int
    letters: tuple[Letter, ...]


def cosofic_stage_data(chain: CoSoficChain, H: Subgroup, factor_ids: Sequence[Hashable] = (0, 1)) -> StageData:
    """Stage ``k`` is ``(G/H_k) x G`` over ``(G_k/H_k) x G``; ``g`` is represented by ``(gH_k, g)``."""
    G = chain.parent
    stages, head_maps, specs = [], [], []
    seqs: dict[int, list[int]] = {g: [] for g in G.elements()}
    for Gk, Hk in chain.stages:
        q = quotient(G, Hk)
        P = direct_product(q.target, G)
        image_gk = Subgroup(q.target, tuple({q(x) for x in Gk.elements}))
        Mk = product_subgroup(P, image_gk, Subgroup.whole(G))
        stages.append((P.group, Mk))
        head_maps.append(tuple(P.pair(q(h), h) for h in H.elements))
        for g in G.elements():
            seqs[g].append(P.pair(q(g), g))
        specs.append(am.double_spec(P.group, Mk, factor_ids))
    return StageData(tuple(stages), tuple(head_maps), {g: tuple(s) for g, s in seqs.items()}, tuple(specs))


def stagewise_embed(w: NormalForm, spec: AmalgamSpec, data: StageData) -> list[StageWord]:
    """Per-stage words ``h_i g_{1,i} ... g_{n,i}`` for ``w`` over ``*_H G``.

    Letters are read through their representing sequences; a stage entry that
    falls into ``H_i`` raises :class:`ImproperSequence`.
    """
    G, H = spec.ambient
    out = []
    for i, (L, Hi) in enumerate(data.stages):
        letters = []
        for f, g in w.letters:
            seq = data.sequences.get(g)
            if seq is None:
                raise ImproperSequence(f"no representing sequence for element {g}")
            if seq[i] in Hi:
                raise ImproperSequence(f"improper sequence: stage {i} entry of {g} lies in H_{i}")
            letters.append(Letter(f, seq[i]))
        out.append(StageWord(data.head_maps[i][w.head], tuple(letters)))
    return out


def stage_word_is_standard(word: StageWord, Hi: Subgroup) -> bool:
    if word.head not in Hi:
        return False
    prev = object()
    for f, x in word.letters:
        if x in Hi or f == prev:
            return False
        prev = f
    return True


def stage_normal_form(word: StageWord, stage_spec: AmalgamSpec) -> NormalForm:
    Mgrp_elems = stage_spec.ambient[1].elements
    head = Mgrp_elems.index(word.head)
    nf = am.normalize(word.letters, stage_spec)
    return NormalForm(stage_spec.common.mul(head, nf.head), nf.letters)


class StagewiseEmbedding:
    """All stages at once, as a map into the product of the stage amalgams."""

    def __init__(self, spec: AmalgamSpec, data: StageData):
        if not data.specs:
            raise ValueError("stage data without stage amalgam specs")
        self.domain = spec
        self.data = data

    def __call__(self, w: NormalForm) -> tuple[NormalForm, ...]:
        words = stagewise_embed(w, self.domain, self.data)
        return tuple(stage_normal_form(sw, s) for sw, s in zip(words, self.data.specs))

    def image_is_standard(self, w: NormalForm) -> bool:
        words = stagewise_embed(w, self.domain, self.data)
        return all(stage_word_is_standard(sw, Hi) for sw, (_, Hi) in zip(words, self.data.stages))

    def codomain_mul(self, a, b):
        return tuple(am.multiply(x, y, s) for x, y, s in zip(a, b, self.data.specs))


# ---------------------------------------------------------------------------
# Co-sofic stage map
# ---------------------------------------------------------------------------


def cosofic_stage_map(g: int, chain: CoSoficChain, k: int) -> tuple[int, int]:
    """``(gH_k, g)``, with the coset given as an element of ``G/H_k``."""
    if not 0 <= k < len(chain):
        raise IndexError(f"invalid stage index {k}")
    return chain.quotient_at(k)(g), g


def in_stage(g: int, chain: CoSoficChain, k: int) -> bool:
    """Whether the coset ``gH_k`` lies in ``G_k/H_k``."""
    q = chain.quotient_at(k)
    coset, _ = cosofic_stage_map(g, chain, k)
    return coset in {q(x) for x in chain.stages[k][0].elements}


def cosofic_member(g: int, chain: CoSoficChain) -> bool:
    return all(in_stage(g, chain, k) for k in range(len(chain)))


def escape_stage(g: int, chain: CoSoficChain) -> int | None:
    """First stage where ``gH_k`` leaves ``G_k/H_k``; ``None`` if it never does."""
    for k in range(len(chain)):
        if not in_stage(g, chain, k):
            return k
    return None


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class EmbeddingReport:
    name: str
    domain_ball: list
    images: list
    multiplicative: bool
    injective: bool
    standard_form: bool
    failures: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.multiplicative and self.injective and self.standard_form


def embedding_report(name: str, emb, R: int = 2, ball: Sequence[NormalForm] | None = None) -> EmbeddingReport:
    """Exhaustive pair check of multiplicativity plus injectivity on a ball of the domain."""
    if ball is None:
        ball = am.ball(emb.domain, R=R)
    images = [emb(x) for x in ball]
    img_of = dict(zip(ball, images))
    failures: dict[str, list] = {"mult": [], "collisions": [], "standard": []}
    for x in ball:
        for y in ball:
            xy = am.multiply(x, y, emb.domain)
            if emb(xy) != emb.codomain_mul(img_of[x], img_of[y]):
                failures["mult"].append((x, y))
    seen: dict = {}
    for x, ix in zip(ball, images):
        if ix in seen:
            failures["collisions"].append((seen[ix], x))
        else:
            seen[ix] = x
    for x in ball:
        if x.letters and not emb.image_is_standard(x):
            failures["standard"].append(x)
    return EmbeddingReport(name, list(ball), images, not failures["mult"], not failures["collisions"],
                           not failures["standard"], {k: v for k, v in failures.items() if v})
