"""Exact finite groups on indices ``0..n-1``.

Element ``0`` is always the identity.  Groups are stored as full
multiplication tables, so everything here is meant for desk-scale orders
(a few thousand at most); the order cap is a guard, not a promise.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Sequence

import numpy as np

DEFAULT_ORDER_CAP = 20_000
DEFAULT_DEGREE_CAP = 100_000


class GroupTooLarge(ValueError):
    pass


class NotNormal(ValueError):
    pass


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


class Permutation:
    """Bijection of ``range(degree)``.

    ``p * q`` is composition ``p o q`` (apply ``q`` first), so that a left
    action ``g -> rho(g)`` is a homomorphism when ``rho(g) * rho(h) ==
    rho(g*h)``.
    """

    __slots__ = ("images", "_key")

    def __init__(self, images: Iterable[int], check: bool = True):
        arr = np.array(images, dtype=np.int64).reshape(-1)
        if check:
            n = arr.shape[0]
            if n == 0:
                raise ValueError("permutation degree must be positive")
            seen = np.zeros(n, dtype=bool)
            if arr.min() < 0 or arr.max() >= n:
                raise ValueError("image out of range")
            seen[arr] = True
            if not seen.all():
                raise ValueError("images are not a bijection")
        arr.flags.writeable = False
        self.images = arr
        self._key = None

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(np.arange(degree), check=False)

    @classmethod
    def from_cycles(cls, degree: int, cycles: Iterable[Sequence[int]]) -> "Permutation":
        img = list(range(degree))
        for cyc in cycles:
            for a, b in zip(cyc, list(cyc[1:]) + [cyc[0]]):
                img[a] = b
        return cls(img)

    @property
    def degree(self) -> int:
        return int(self.images.shape[0])

    def __call__(self, x: int) -> int:
        return int(self.images[x])

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.degree != other.degree:
            raise ValueError("degree mismatch")
        return Permutation(self.images[other.images], check=False)

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(self.degree)
        return Permutation(inv, check=False)

    def is_identity(self) -> bool:
        return bool((self.images == np.arange(self.degree)).all())

    def fixed_points(self) -> int:
        return int(np.count_nonzero(self.images == np.arange(self.degree)))

    def cycle_type(self) -> list[int]:
        seen = [False] * self.degree
        lengths = []
        for start in range(self.degree):
            if seen[start]:
                continue
            n = 0
            x = start
            while not seen[x]:
                seen[x] = True
                x = int(self.images[x])
                n += 1
            lengths.append(n)
        return sorted(lengths, reverse=True)

    def tolist(self) -> list[int]:
        return self.images.tolist()

    def key(self) -> bytes:
        if self._key is None:
            self._key = self.images.tobytes()
        return self._key

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.degree == other.degree and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"Permutation({self.tolist()})"


def hamming(p: Permutation, q: Permutation) -> Fraction:
    """Normalized Hamming distance: fraction of points where ``p`` and ``q`` differ."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} != {q.degree}")
    return Fraction(int(np.count_nonzero(p.images != q.images)), p.degree)


# ---------------------------------------------------------------------------
# Groups
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    table: tuple[tuple[int, ...], ...]
    inverses: tuple[int, ...]
    labels: tuple[str, ...] | None = None
    # faithful permutation image of each element, when built from generators
    perms: tuple[Permutation, ...] | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def elements(self) -> range:
        return range(self.order)

    def label(self, a: int) -> str:
        return self.labels[a] if self.labels else str(a)

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != 0:
            x = self.table[x][a]
            n += 1
        return n

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverses[a], -k
        x = 0
        for _ in range(k):
            x = self.table[x][a]
        return x

    def conj(self, g: int, x: int) -> int:
        """``g x g^-1``."""
        return self.table[self.table[g][x]][self.inverses[g]]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FiniteGroup):
            return NotImplemented
        return self is other or self.table == other.table

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"

    def check_axioms(self) -> None:
        """Exhaustive identity / inverse / associativity check; raises ValueError."""
        n = self.order
        t = self.table
        for row in t:
            if len(row) != n or any(not 0 <= x < n for x in row):
                raise ValueError("table is not a total operation on 0..n-1")
        for g in range(n):
            if t[0][g] != g or t[g][0] != g:
                raise ValueError(f"index 0 is not a two-sided identity (fails at {g})")
            gi = self.inverses[g]
            if t[g][gi] != 0 or t[gi][g] != 0:
                raise ValueError(f"inverse table wrong at {g}")
        for a in range(n):
            ta = t[a]
            for b in range(n):
                ab = ta[b]
                tab = t[ab]
                tb = t[b]
                for c in range(n):
                    if tab[c] != ta[tb[c]]:
                        raise ValueError(f"not associative at ({a}, {b}, {c})")

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                   check: bool = True, cap: int = DEFAULT_ORDER_CAP) -> "FiniteGroup":
        n = len(table)
        if n == 0:
            raise ValueError("empty table")
        if n > cap:
            raise GroupTooLarge(f"group too large: order {n} > cap {cap}")
        t = tuple(tuple(int(x) for x in row) for row in table)
        invs = []
        for g in range(n):
            try:
                invs.append(t[g].index(0))
            except ValueError:
                raise ValueError(f"element {g} has no right inverse") from None
        grp = cls(t, tuple(invs), tuple(labels) if labels else None)
        if check:
            grp.check_axioms()
        return grp


def from_permutation_generators(gens: Sequence[Permutation], degree: int,
                                cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    """Closure of ``gens`` under composition; element ``i`` acts as ``group.perms[i]``.

    Elements are numbered in breadth-first order over the generators, so the
    numbering is deterministic.
    """
    for g in gens:
        if g.degree != degree:
            raise ValueError(f"generator of degree {g.degree}, expected {degree}")
    ident = Permutation.identity(degree)
    elems = [ident]
    index = {ident.key(): 0}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = g * x
            k = y.key()
            if k not in index:
                if len(elems) >= cap:
                    raise GroupTooLarge(f"group too large: closure exceeds cap {cap}")
                index[k] = len(elems)
                elems.append(y)
                queue.append(y)
    n = len(elems)
    stack = np.stack([p.images for p in elems])
    table = []
    for p in elems:
        comp = p.images[stack]  # row j = p o elems[j]
        table.append(tuple(index[r.tobytes()] for r in comp))
    invs = tuple(index[p.inverse().key()] for p in elems)
    return FiniteGroup(tuple(table), invs, None, tuple(elems))


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)),
                       tuple((-a) % n for a in range(n)),
                       tuple(str(a) for a in range(n)))


def symmetric_group(n: int) -> FiniteGroup:
    if n == 1:
        return from_permutation_generators([], 1)
    gens = [Permutation.from_cycles(n, [(0, 1)])]
    if n > 2:
        gens.append(Permutation.from_cycles(n, [tuple(range(n))]))
    return from_permutation_generators(gens, n)


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),), (0,), ("e",))


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the regular ``n``-gon (order ``2n``)."""
    rot = Permutation([(i + 1) % n for i in range(n)])
    ref = Permutation([(-i) % n for i in range(n)])
    return from_permutation_generators([rot, ref], n)


# ---------------------------------------------------------------------------
# Subgroups, cosets, cores, quotients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Subgroup:
    parent: FiniteGroup
    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(sorted(set(self.elements)))
        object.__setattr__(self, "elements", els)
        object.__setattr__(self, "_set", frozenset(els))
        if not els or els[0] != 0:
            raise ValueError("subgroup must contain the identity")
        g = self.parent
        for a in els:
            if g.inv(a) not in self._set:
                raise ValueError(f"not closed under inverse at {a}")
            for b in els:
                if g.mul(a, b) not in self._set:
                    raise ValueError(f"not closed under multiplication at ({a}, {b})")

    @classmethod
    def generated(cls, parent: FiniteGroup, gens: Iterable[int]) -> "Subgroup":
        gens = list(gens)
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = parent.mul(x, g)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return cls(parent, tuple(seen))

    @classmethod
    def whole(cls, parent: FiniteGroup) -> "Subgroup":
        return cls(parent, tuple(parent.elements()))

    @classmethod
    def trivial(cls, parent: FiniteGroup) -> "Subgroup":
        return cls(parent, (0,))

    def __contains__(self, x: int) -> bool:
        return x in self._set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def index(self) -> int:
        return self.parent.order // self.order

    def issubset(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def conjugate(self, g: int) -> frozenset[int]:
        return frozenset(self.parent.conj(g, h) for h in self.elements)

    def is_normal(self) -> bool:
        return all(self.conjugate(g) == self._set for g in self.parent.elements())

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """The subgroup as a standalone group; element ``i`` is parent element ``elements[i]``."""
        pos = {x: i for i, x in enumerate(self.elements)}
        g = self.parent
        table = tuple(tuple(pos[g.mul(a, b)] for b in self.elements) for a in self.elements)
        invs = tuple(pos[g.inv(a)] for a in self.elements)
        labels = tuple(g.label(a) for a in self.elements) if g.labels else None
        return FiniteGroup(table, invs, labels), self.elements


def normal_core(G: FiniteGroup, H: Subgroup) -> Subgroup:
    """Intersection of all conjugates ``gHg^-1``: the largest subgroup of ``H`` normal in ``G``."""
    core = set(H.elements)
    for g in G.elements():
        core &= H.conjugate(g)
    return Subgroup(G, tuple(core))


def right_cosets(G: FiniteGroup, H: Subgroup) -> list[tuple[int, ...]]:
    """Right cosets ``Hg`` ordered by their minimal element."""
    seen: set[int] = set()
    cosets = []
    for g in G.elements():
        if g in seen:
            continue
        coset = tuple(sorted(G.mul(h, g) for h in H.elements))
        seen.update(coset)
        cosets.append(coset)
    return cosets


def right_coset_transversal(G: FiniteGroup, H: Subgroup) -> list[int]:
    """Minimal element index of every right coset ``Hg``; ``H`` itself is represented by 0."""
    return [c[0] for c in right_cosets(G, H)]


@dataclass(frozen=True, eq=False)
class QuotientMap:
    source: FiniteGroup
    kernel: Subgroup
    target: FiniteGroup
    table: tuple[int, ...]
    section: tuple[int, ...]  # coset representative of each target element

    def __call__(self, g: int) -> int:
        return self.table[g]


def quotient(G: FiniteGroup, N: Subgroup) -> QuotientMap:
    if not N.is_normal():
        bad = next(g for g in G.elements() if N.conjugate(g) != N._set)
        raise NotNormal(f"not normal: conjugation by {bad} moves the subgroup")
    cosets = right_cosets(G, N)
    which = {}
    for i, c in enumerate(cosets):
        for x in c:
            which[x] = i
    reps = tuple(c[0] for c in cosets)
    table = tuple(tuple(which[G.mul(a, b)] for b in reps) for a in reps)
    invs = tuple(which[G.inv(a)] for a in reps)
    target = FiniteGroup(table, invs)
    return QuotientMap(G, N, target, tuple(which[g] for g in G.elements()), reps)


def left_regular_rep(G: FiniteGroup) -> list[Permutation]:
    """``g -> (x -> g*x)`` as permutations of degree ``|G|``."""
    return [Permutation(G.table[g], check=False) for g in G.elements()]


@dataclass(frozen=True, eq=False)
class DirectProduct:
    group: FiniteGroup
    left: FiniteGroup
    right: FiniteGroup

    def pair(self, a: int, b: int) -> int:
        return a * self.right.order + b

    def split(self, x: int) -> tuple[int, int]:
        return divmod(x, self.right.order)

    def proj1(self, x: int) -> int:
        return x // self.right.order

    def proj2(self, x: int) -> int:
        return x % self.right.order


def direct_product(G1: FiniteGroup, G2: FiniteGroup, cap: int = DEFAULT_ORDER_CAP) -> DirectProduct:
    """``G1 x G2`` with element ``(a, b)`` at index ``a*|G2| + b`` (so the identity stays 0)."""
    n1, n2 = G1.order, G2.order
    if n1 * n2 > cap:
        raise GroupTooLarge(f"group too large: {n1}*{n2} > cap {cap}")
    table = tuple(
        tuple(G1.mul(a1, b1) * n2 + G2.mul(a2, b2) for b1, b2 in iproduct(range(n1), range(n2)))
        for a1, a2 in iproduct(range(n1), range(n2))
    )
    invs = tuple(G1.inv(a1) * n2 + G2.inv(a2) for a1, a2 in iproduct(range(n1), range(n2)))
    labels = None
    if G1.labels or G2.labels:
        labels = tuple(f"({G1.label(a)},{G2.label(b)})" for a, b in iproduct(range(n1), range(n2)))
    return DirectProduct(FiniteGroup(table, invs, labels), G1, G2)


def product_subgroup(P: DirectProduct, A: Subgroup, B: Subgroup) -> Subgroup:
    return Subgroup(P.group, tuple(P.pair(a, b) for a in A.elements for b in B.elements))


# ---------------------------------------------------------------------------
# Co-sofic chains
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoSoficChain:
    """Finite stages ``(G_i, H_i)`` witnessing that ``target`` is co-sofic in ``parent``.

    Every quotient here is finite, so the amenability requirement on
    ``G_i / H_i`` holds automatically.
    """

    parent: FiniteGroup
    stages: tuple[tuple[Subgroup, Subgroup], ...]
    target: Subgroup

    def __post_init__(self):
        self.validate()

    def __len__(self) -> int:
        return len(self.stages)

    def validate(self) -> None:
        if not self.stages:
            raise ValueError("chain needs at least one stage")
        inter = set(self.parent.elements())
        prev = None
        for i, (Gi, Hi) in enumerate(self.stages):
            if Gi.parent != self.parent or Hi.parent != self.parent:
                raise ValueError(f"stage {i}: subgroups of a different group")
            if not Hi.issubset(Gi):
                raise ValueError(f"stage {i}: H_i is not contained in G_i")
            if not Hi.is_normal():
                raise ValueError(f"stage {i}: H_i is not normal in the parent")
            if prev is not None:
                if not Gi.issubset(prev[0]) or not Hi.issubset(prev[1]):
                    raise ValueError(f"stage {i}: chains are not decreasing")
            prev = (Gi, Hi)
            inter &= Gi._set
        if inter != self.target._set:
            raise ValueError("intersection of the G_i differs from the target subgroup")

    def padded(self, length: int) -> tuple[tuple[Subgroup, Subgroup], ...]:
        return self.stages + (self.stages[-1],) * (length - len(self.stages))

    def quotient_at(self, k: int) -> QuotientMap:
        return quotient(self.parent, self.stages[k][1])


def core_chain(G: FiniteGroup, H: Subgroup) -> CoSoficChain:
    """One-stage chain ``G_0 = H``, ``H_0 = core(H)`` (finite-index case)."""
    return CoSoficChain(G, ((H, normal_core(G, H)),), H)


def separable_chain(G: FiniteGroup, subgroups: Sequence[Subgroup]) -> CoSoficChain:
    """Chain from a decreasing sequence of subgroups, with ``H_i`` the normal core of ``G_i``."""
    subgroups = list(subgroups)
    stages = tuple((S, normal_core(G, S)) for S in subgroups)
    return CoSoficChain(G, stages, subgroups[-1])


def chain_product(c1: CoSoficChain, c2: CoSoficChain) -> tuple[DirectProduct, CoSoficChain]:
    n = max(len(c1), len(c2))
    P = direct_product(c1.parent, c2.parent)
    stages = tuple(
        (product_subgroup(P, G1, G2), product_subgroup(P, H1, H2))
        for (G1, H1), (G2, H2) in zip(c1.padded(n), c2.padded(n))
    )
    return P, CoSoficChain(P.group, stages, product_subgroup(P, c1.target, c2.target))
