"""Amalgamated free products of finite groups and ``H x Z`` factors over a common ``H``.

Elements are kept in a canonical left-head form ``h s_1 ... s_n``: ``h`` lies in
the common subgroup, each ``s_i`` is a non-identity right-coset representative
of ``H`` in its factor, and consecutive letters come from different factors.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, NamedTuple, Sequence

from .groups import FiniteGroup, Subgroup, right_coset_transversal

DEFAULT_BALL_CAP = 200_000


class MalformedLetter(ValueError):
    pass


class BallTooLarge(ValueError):
    pass


class DisconnectedGraph(ValueError):
    pass


# ---------------------------------------------------------------------------
# Factors
# ---------------------------------------------------------------------------


class _CosetSplitter:
    """Decomposes elements of a finite group as ``emb(h) * s`` with ``s`` a fixed right-coset rep."""

    def __init__(self, group: FiniteGroup, h_embedding: Sequence[int]):
        self.group = group
        self.h_embedding = tuple(h_embedding)
        if len(set(self.h_embedding)) != len(self.h_embedding):
            raise ValueError("H-embedding is not injective")
        if not self.h_embedding or self.h_embedding[0] != 0:
            raise ValueError("H-embedding must send the identity to the identity")
        self.h_of = {x: i for i, x in enumerate(self.h_embedding)}
        image = Subgroup(group, self.h_embedding)
        self.transversal = tuple(right_coset_transversal(group, image))
        rep_of = {}
        for s in self.transversal:
            for h in self.h_embedding:
                rep_of[group.mul(h, s)] = s
        self.split_table = tuple(
            (self.h_of[group.mul(g, group.inv(rep_of[g]))], rep_of[g]) for g in group.elements()
        )

    def check_homomorphism(self, H: FiniteGroup) -> None:
        e = self.h_embedding
        for a in H.elements():
            for b in H.elements():
                if e[H.mul(a, b)] != self.group.mul(e[a], e[b]):
                    raise ValueError(f"H-embedding is not multiplicative at ({a}, {b})")


class FiniteFactor:
    kind = "finite"

    def __init__(self, group: FiniteGroup, h_embedding: Sequence[int]):
        self.group = group
        self._split = _CosetSplitter(group, h_embedding)
        self.h_embedding = self._split.h_embedding
        self.transversal = self._split.transversal

    identity = 0

    def mul(self, a: int, b: int) -> int:
        return self.group.mul(a, b)

    def inv(self, a: int) -> int:
        return self.group.inv(a)

    def embed(self, h: int) -> int:
        return self.h_embedding[h]

    def split(self, x: int) -> tuple[int, int]:
        return self._split.split_table[x]

    def in_h(self, x: int) -> int | None:
        return self._split.h_of.get(x)

    def is_identity(self, x: int) -> bool:
        return x == 0

    def contains(self, x: Any) -> bool:
        return isinstance(x, int) and not isinstance(x, bool) and 0 <= x < self.group.order

    def coerce(self, x: Any) -> int:
        return x

    def alphabet(self) -> list[int]:
        return list(range(1, self.group.order))

    def elements(self) -> Iterable[int]:
        return self.group.elements()


class ZFactor:
    """``B x Z`` with ``H`` embedded as ``(emb(h), 0)``; elements are pairs ``(b, m)``.

    With ``B = H`` this is the ``H x Z`` factor of a non-tree edge.
    """

    kind = "z"

    def __init__(self, base: FiniteGroup, h_embedding: Sequence[int]):
        self.base = base
        self._split = _CosetSplitter(base, h_embedding)
        self.h_embedding = self._split.h_embedding

    identity = (0, 0)

    @property
    def is_hxz(self) -> bool:
        return len(self.h_embedding) == self.base.order

    def mul(self, a: tuple[int, int], b: tuple[int, int]) -> tuple[int, int]:
        return (self.base.mul(a[0], b[0]), a[1] + b[1])

    def inv(self, a: tuple[int, int]) -> tuple[int, int]:
        return (self.base.inv(a[0]), -a[1])

    def embed(self, h: int) -> tuple[int, int]:
        return (self.h_embedding[h], 0)

    def split(self, x: tuple[int, int]) -> tuple[int, tuple[int, int]]:
        h, s = self._split.split_table[x[0]]
        return h, (s, x[1])

    def in_h(self, x: tuple[int, int]) -> int | None:
        if x[1] != 0:
            return None
        return self._split.h_of.get(x[0])

    def is_identity(self, x: tuple[int, int]) -> bool:
        return x[0] == 0 and x[1] == 0

    def contains(self, x: Any) -> bool:
        return (isinstance(x, tuple) and len(x) == 2 and all(isinstance(v, int) for v in x)
                and 0 <= x[0] < self.base.order)

    def coerce(self, x: Any) -> Any:
        return tuple(x) if isinstance(x, list) else x

    def alphabet(self) -> list[tuple[int, int]]:
        letters = [(b, 0) for b in range(1, self.base.order) if b not in self._split.h_of]
        return letters + [(0, 1), (0, -1)]


Factor = FiniteFactor | ZFactor


# ---------------------------------------------------------------------------
# Specs, letters, normal forms
# ---------------------------------------------------------------------------


class Letter(NamedTuple):
    factor: Hashable
    value: Any


@dataclass(frozen=True)
class NormalForm:
    head: int
    letters: tuple[Letter, ...] = ()

    def __len__(self) -> int:
        return len(self.letters)

    def is_identity(self) -> bool:
        return self.head == 0 and not self.letters


@dataclass(frozen=True)
class GraphSpec:
    vertices: tuple
    edges: tuple[tuple, ...]
    tree: tuple[bool, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValueError("duplicate vertex ids")
        vs = set(self.vertices)
        for e in self.edges:
            if len(e) != 2 or e[0] not in vs or e[1] not in vs:
                raise ValueError(f"edge {e!r} does not join two known vertices")
        if self.tree is None:
            object.__setattr__(self, "tree", self._bfs_tree())
        else:
            object.__setattr__(self, "tree", tuple(bool(t) for t in self.tree))
            self._check_tree()

    def _bfs_tree(self) -> tuple[bool, ...]:
        marks = [False] * len(self.edges)
        if not self.vertices:
            return tuple(marks)
        incident: dict[Any, list[int]] = {v: [] for v in self.vertices}
        for k, (u, v) in enumerate(self.edges):
            incident[u].append(k)
            if v != u:
                incident[v].append(k)
        seen = set()
        for root in sorted(self.vertices, key=_sort_key):
            if root in seen:
                continue
            seen.add(root)
            queue = deque([root])
            while queue:
                u = queue.popleft()
                for k in incident[u]:
                    a, b = self.edges[k]
                    w = b if a == u else a
                    if w not in seen:
                        seen.add(w)
                        marks[k] = True
                        queue.append(w)
        return tuple(marks)

    def _check_tree(self) -> None:
        if len(self.tree) != len(self.edges):
            raise ValueError("tree marking length differs from edge count")
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (u, v), t in zip(self.edges, self.tree):
            if not t:
                continue
            ru, rv = find(u), find(v)
            if ru == rv:
                raise ValueError("marked spanning forest contains a cycle")
            parent[ru] = rv
        for u, v in self.edges:
            if find(u) != find(v):
                raise ValueError("marked forest does not span a connected component")

    def is_connected(self) -> bool:
        return len(self.vertices) > 0 and sum(self.tree) == len(self.vertices) - 1

    def non_tree_edges(self) -> list[int]:
        return [k for k, t in enumerate(self.tree) if not t]


def _sort_key(v):
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


def edge_factor_id(k: int) -> str:
    return f"e{k}"


@dataclass(frozen=True, eq=False)
class AmalgamSpec:
    common: FiniteGroup
    factors: Mapping[Hashable, Factor]
    provenance: GraphSpec | None = None
    # (G, H) when the spec came from decompose_graph
    ambient: tuple[FiniteGroup, Subgroup] | None = None
    _pos: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        for i, (fid, fac) in enumerate(self.factors.items()):
            if len(fac.h_embedding) != self.common.order:
                raise ValueError(f"factor {fid!r} embeds a group of the wrong order")
            fac._split.check_homomorphism(self.common)
            self._pos[fid] = i

    def factor_position(self, fid) -> int:
        return self._pos[fid]

    def identity(self) -> NormalForm:
        return NormalForm(0)

    def default_alphabet(self) -> list[Letter]:
        return [Letter(fid, x) for fid, fac in self.factors.items() for x in fac.alphabet()]

    def coerce_letter(self, letter) -> Letter:
        fid, value = letter
        fac = self.factors.get(fid)
        if fac is None:
            raise MalformedLetter(f"unknown factor {fid!r}")
        value = fac.coerce(value)
        if not fac.contains(value):
            raise MalformedLetter(f"value {value!r} is not an element of factor {fid!r}")
        return Letter(fid, value)

    def letter_inverse(self, letter: Letter) -> Letter:
        return Letter(letter.factor, self.factors[letter.factor].inv(letter.value))

    def head_letter(self, h: int) -> Letter:
        fid = next(iter(self.factors))
        return Letter(fid, self.factors[fid].embed(h))

    def word_of(self, nf: NormalForm) -> list[Letter]:
        """A raw word representing ``nf`` (head folded in as a letter when nonzero)."""
        if not self.factors:
            raise ValueError("spec without factors has no letters")
        word = list(nf.letters)
        if nf.head != 0:
            if word:
                f = word[0].factor
                fac = self.factors[f]
                word[0] = Letter(f, fac.mul(fac.embed(nf.head), word[0].value))
            else:
                word = [self.head_letter(nf.head)]
        return word

    def inverse_word(self, word: Sequence[Letter]) -> list[Letter]:
        return [self.letter_inverse(x) for x in reversed(word)]


def double_spec(G: FiniteGroup, K: Subgroup, factor_ids: Iterable[Hashable]) -> AmalgamSpec:
    """``*_K G``: copies of ``G`` indexed by ``factor_ids`` amalgamated over ``K``."""
    Kgrp, emb = K.as_group()
    return AmalgamSpec(Kgrp, {fid: FiniteFactor(G, emb) for fid in factor_ids}, ambient=(G, K))


# ---------------------------------------------------------------------------
# Normalization and the group law
# ---------------------------------------------------------------------------


def _push_left(spec: AmalgamSpec, h: int, rev: list[Letter], letter: Letter) -> int:
    """Left-multiply the form ``h * rev[::-1]`` by ``letter``; mutates ``rev``, returns the new head."""
    fid, x = letter
    fac = spec.factors[fid]
    y = fac.mul(x, fac.embed(h))
    if rev and rev[-1].factor == fid:
        y = fac.mul(y, rev.pop().value)
    hh, s = fac.split(y)
    if not fac.is_identity(s):
        rev.append(Letter(fid, s))
    return hh


def normalize(word: Iterable, spec: AmalgamSpec) -> NormalForm:
    """Canonical form of a raw word; letters are ``(factor id, element)`` pairs."""
    letters = [spec.coerce_letter(x) for x in word]
    h = 0
    rev: list[Letter] = []
    for letter in reversed(letters):
        h = _push_left(spec, h, rev, letter)
    return NormalForm(h, tuple(reversed(rev)))


def multiply(a: NormalForm, b: NormalForm, spec: AmalgamSpec) -> NormalForm:
    h = b.head
    rev = list(reversed(b.letters))
    for letter in reversed(a.letters):
        h = _push_left(spec, h, rev, letter)
    return NormalForm(spec.common.mul(a.head, h), tuple(reversed(rev)))


def invert(a: NormalForm, spec: AmalgamSpec) -> NormalForm:
    h = spec.common.inv(a.head)
    rev: list[Letter] = []
    for letter in a.letters:
        h = _push_left(spec, h, rev, spec.letter_inverse(letter))
    return NormalForm(h, tuple(reversed(rev)))


def letter_form(letter, spec: AmalgamSpec) -> NormalForm:
    return normalize([letter], spec)


def check_normal_form(nf: NormalForm, spec: AmalgamSpec) -> None:
    """Structural invariants of a canonical form; raises ValueError."""
    if not 0 <= nf.head < spec.common.order:
        raise ValueError("head outside the common subgroup")
    prev = None
    for letter in nf.letters:
        fac = spec.factors[letter.factor]
        if fac.is_identity(letter.value):
            raise ValueError("identity letter in normal form")
        h, s = fac.split(letter.value)
        if h != 0 or s != letter.value:
            raise ValueError(f"letter {letter!r} is not a transversal representative")
        if letter.factor == prev:
            raise ValueError("adjacent letters share a factor")
        prev = letter.factor


def is_standard_form(word: Sequence[Letter], spec: AmalgamSpec) -> bool:
    """Every letter outside ``H`` and consecutive letters in different factors."""
    prev = object()
    for fid, x in word:
        if spec.factors[fid].in_h(x) is not None:
            return False
        if fid == prev:
            return False
        prev = fid
    return True


def ball(spec: AmalgamSpec, generating_letters: Sequence | None = None, R: int = 1,
         cap: int = DEFAULT_BALL_CAP) -> list[NormalForm]:
    """All distinct elements of word length ``<= R``, in breadth-first discovery order."""
    if R < 0:
        raise ValueError("radius must be non-negative")
    if generating_letters is None:
        gens = spec.default_alphabet()
    else:
        gens = [spec.coerce_letter(x) for x in generating_letters]
    closed = list(dict.fromkeys(gens + [spec.letter_inverse(x) for x in gens]))
    forms = [letter_form(x, spec) for x in closed]
    ident = spec.identity()
    seen = {ident}
    out = [ident]
    frontier = [ident]
    for _ in range(R):
        nxt = []
        for x in frontier:
            for g in forms:
                y = multiply(x, g, spec)
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    nxt.append(y)
                    if len(out) > cap:
                        raise BallTooLarge(f"ball exceeds cap {cap}")
        frontier = nxt
    return out


# ---------------------------------------------------------------------------
# Graph-of-groups doubles
# ---------------------------------------------------------------------------


def decompose_graph(graph: GraphSpec, G: FiniteGroup, H: Subgroup) -> AmalgamSpec:
    """One copy of ``G`` per vertex, one ``H x Z`` per non-tree edge, all over ``H``."""
    if H.parent != G:
        raise ValueError("H is not a subgroup of G")
    if not graph.is_connected():
        raise DisconnectedGraph("graph is not connected")
    Hgrp, emb = H.as_group()
    factors: dict[Hashable, Factor] = {v: FiniteFactor(G, emb) for v in graph.vertices}
    hxz_emb = tuple(range(Hgrp.order))
    for k in graph.non_tree_edges():
        fid = edge_factor_id(k)
        if fid in factors:
            raise ValueError(f"vertex id {fid!r} collides with an edge factor id")
        factors[fid] = ZFactor(Hgrp, hxz_emb)
    return AmalgamSpec(Hgrp, factors, provenance=graph, ambient=(G, H))


# ---------------------------------------------------------------------------
# Rewrite oracle
# ---------------------------------------------------------------------------


class Verdict(enum.Enum):
    EQUAL = "Equal"
    UNEQUAL = "Unequal"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class OracleResult:
    verdict: Verdict
    states: int
    # rewrite path length for Equal; separating quotient description for Unequal
    certificate: Any = None


def _letter_key(spec: AmalgamSpec, letter: Letter) -> tuple:
    v = letter.value
    return (spec.factor_position(letter.factor),) + (v if isinstance(v, tuple) else (v,))


def word_key(spec: AmalgamSpec, word: Sequence[Letter]) -> tuple:
    return tuple(_letter_key(spec, x) for x in word)


def rewrites(spec: AmalgamSpec, word: tuple[Letter, ...]) -> Iterable[tuple[Letter, ...]]:
    """Elementary amalgam moves that never lengthen the word.

    Deleting identity letters, merging adjacent same-factor letters, moving an
    ``H``-valued letter into a neighbour's factor, and sliding a common-subgroup
    element across a factor boundary.
    """
    n = len(word)
    H = spec.common
    for i, (fid, x) in enumerate(word):
        fac = spec.factors[fid]
        if fac.is_identity(x):
            yield word[:i] + word[i + 1:]
            continue
        h = fac.in_h(x)
        if h is not None:
            targets = set()
            if i > 0:
                targets.add(word[i - 1].factor)
            if i + 1 < n:
                targets.add(word[i + 1].factor)
            if n == 1:
                targets.update(spec.factors)
            for g in targets:
                if g != fid:
                    yield word[:i] + (Letter(g, spec.factors[g].embed(h)),) + word[i + 1:]
        if i + 1 < n:
            gid, y = word[i + 1]
            if gid == fid:
                yield word[:i] + (Letter(fid, fac.mul(x, y)),) + word[i + 2:]
            else:
                gfac = spec.factors[gid]
                for h2 in range(1, H.order):
                    a = fac.mul(x, fac.embed(h2))
                    b = gfac.mul(gfac.embed(H.inv(h2)), y)
                    yield word[:i] + (Letter(fid, a), Letter(gid, b)) + word[i + 2:]


def _is_reduced(spec: AmalgamSpec, word: tuple[Letter, ...]) -> bool:
    if len(word) == 1:
        return not spec.factors[word[0].factor].is_identity(word[0].value)
    return is_standard_form(word, spec)


def rewrite_class(word: Sequence, spec: AmalgamSpec, budget: int = 1_000_000) -> tuple | None:
    """Least reduced word reachable from ``word`` by rewrites (as a sortable key).

    Two words get the same class exactly when a rewrite path joins each of them
    to a common reduced word.  ``None`` when the search exceeds ``budget``.
    """
    start = tuple(spec.coerce_letter(x) for x in word)
    seen = {start}
    queue = deque([start])
    best = None
    while queue:
        w = queue.popleft()
        if _is_reduced(spec, w) or not w:
            k = word_key(spec, w)
            if best is None or k < best:
                best = k
        for v in rewrites(spec, w):
            if v not in seen:
                if len(seen) >= budget:
                    return None
                seen.add(v)
                queue.append(v)
    return best


def oracle_equal(w1: Sequence, w2: Sequence, spec: AmalgamSpec, budget: int = 1_000_000,
                 separators: Sequence[Callable[[Sequence[Letter]], Hashable]] | None = None,
                 search_budget: int = 200_000) -> OracleResult:
    """Decide ``w1 == w2`` without using the normal form.

    Equal: breadth-first rewriting of ``w1 * w2^-1`` reaches the empty word.
    Unequal: some homomorphism to a finite permutation group gives the two
    words different images.  ``separators`` are such homomorphisms evaluated on
    raw words; when absent, one is searched for in the builder's quotient
    machinery.
    """
    a = [spec.coerce_letter(x) for x in w1]
    b = [spec.coerce_letter(x) for x in w2]
    start = tuple(a + spec.inverse_word(b))
    seen = {start: 0}
    queue = deque([start])
    exhausted = True
    while queue:
        w = queue.popleft()
        if not w:
            return OracleResult(Verdict.EQUAL, len(seen), seen[w])
        for v in rewrites(spec, w):
            if v not in seen:
                if len(seen) >= budget:
                    exhausted = False
                    queue.clear()
                    break
                seen[v] = seen[w] + 1
                queue.append(v)
    if separators is None and exhausted:
        from .builder import find_separator

        hom = find_separator(spec, start, budget=search_budget)
        separators = [hom] if hom is not None else []
    for k, sep in enumerate(separators or ()):
        if sep(a) != sep(b):
            return OracleResult(Verdict.UNEQUAL, len(seen), sep)
    return OracleResult(Verdict.UNKNOWN, len(seen))
