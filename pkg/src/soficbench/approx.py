"""Finite-support maps into symmetric groups and their approximation defects.

The verifier never multiplies group elements itself: an :class:`ApproxMap`
carries the resolved products ``g*h`` for the pairs it will be checked on.
All defects are exact fractions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Mapping, Sequence

import numpy as np

from .groups import Permutation, hamming


class UnresolvedProduct(KeyError):
    pass


class StageConditionError(ValueError):
    def __init__(self, condition: int, witness, message: str):
        super().__init__(f"stage conditions violated: condition ({condition}) {message}; witness {witness!r}")
        self.condition = condition
        self.witness = witness


@dataclass(frozen=True, eq=False)
class ApproxMap:
    support: tuple
    degree: int
    table: Mapping[Hashable, Permutation]
    products: Mapping[tuple, Hashable]
    identity: Hashable

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(self.support))
        if self.identity not in self.table:
            raise ValueError("support must contain the identity")
        for g in self.support:
            p = self.table.get(g)
            if p is None:
                raise ValueError(f"no permutation for support element {g!r}")
            if p.degree != self.degree:
                raise ValueError(f"permutation for {g!r} has degree {p.degree}, expected {self.degree}")

    def __call__(self, g) -> Permutation:
        return self.table[g]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ApproxMap):
            return NotImplemented
        return (self.support == other.support and self.degree == other.degree
                and self.identity == other.identity and dict(self.products) == dict(other.products)
                and all(self.table[g] == other.table[g] for g in self.support))

    def restrict(self, keys) -> "ApproxMap":
        keys = list(dict.fromkeys(keys))
        ks = set(keys)
        prods = {k: v for k, v in self.products.items() if k[0] in ks and k[1] in ks and v in ks}
        return ApproxMap(tuple(keys), self.degree, {g: self.table[g] for g in keys}, prods, self.identity)


@dataclass(frozen=True)
class DefectReport:
    unital: bool
    mult_defect: Fraction
    free_defect: Fraction
    epsilon: Fraction
    witnesses: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.unital and self.mult_defect < self.epsilon and self.free_defect < self.epsilon


def _mismatches(a: np.ndarray, b: np.ndarray) -> int:
    return int(np.count_nonzero(a != b))


def verify(a: ApproxMap, F: Sequence, epsilon) -> DefectReport:
    """Unitality, worst multiplicative defect and worst fixed-point fraction over ``F``.

    Passes iff unital and both defects are strictly below ``epsilon``.  A
    fixed-point fraction exactly ``epsilon`` counts as failure.
    """
    eps = Fraction(epsilon)
    F = list(dict.fromkeys(F))
    for g in F:
        if g not in a.table:
            raise UnresolvedProduct(f"{g!r} is not in the support")
    n = a.degree
    ident = np.arange(n)
    unital = bool((a.table[a.identity].images == ident).all())

    worst_mult, mult_pair = 0, None
    imgs = {g: a.table[g].images for g in F}
    for g in F:
        pg = imgs[g]
        for h in F:
            gh = a.products.get((g, h))
            if gh is None or gh not in a.table:
                raise UnresolvedProduct(f"unresolved product for pair ({g!r}, {h!r})")
            bad = _mismatches(a.table[gh].images, pg[imgs[h]])
            if bad > worst_mult:
                worst_mult, mult_pair = bad, (g, h)

    worst_fix, fix_elem = 0, None
    for g in F:
        if g == a.identity:
            continue
        fix = int(np.count_nonzero(imgs[g] == ident))
        if fix > worst_fix:
            worst_fix, fix_elem = fix, g

    witnesses = {}
    if not unital:
        witnesses["unital"] = a.identity
    if mult_pair is not None:
        witnesses["mult"] = mult_pair
    if worst_fix > 0:
        witnesses["free"] = fix_elem
    return DefectReport(unital, Fraction(worst_mult, n), Fraction(worst_fix, n), eps, witnesses)


def product(a1: ApproxMap, a2: ApproxMap) -> ApproxMap:
    """Tensor action on pairs: ``g`` acts by ``a1(g)`` on the first coordinate and ``a2(g)`` on the second."""
    if a1.support != a2.support or a1.identity != a2.identity:
        raise ValueError("support mismatch")
    if dict(a1.products) != dict(a2.products):
        raise ValueError("support mismatch: resolved products differ")
    n2 = a2.degree
    table = {}
    for g in a1.support:
        p, q = a1.table[g].images, a2.table[g].images
        table[g] = Permutation((p[:, None] * n2 + q[None, :]).reshape(-1), check=False)
    return ApproxMap(a1.support, a1.degree * n2, table, dict(a1.products), a1.identity)


def pullback(phi0: ApproxMap, F: Sequence, assignment: Mapping, mul: Callable,
             identity: Hashable, stage_mul: Callable | None = None) -> ApproxMap:
    """Pull a stage approximation back along an element-wise stage assignment.

    ``assignment`` sends every ``g*h`` (``g, h`` in ``F``) into the stage group,
    ``mul`` is the domain group law and ``stage_mul`` the stage one (defaults
    to the products resolved in ``phi0``).  The three conditions that make the
    pullback an approximation are checked on ``F`` before building anything.
    """
    F = list(dict.fromkeys(F))
    if stage_mul is None:
        def stage_mul(x, y):
            try:
                return phi0.products[(x, y)]
            except KeyError:
                raise UnresolvedProduct(f"stage product ({x!r}, {y!r}) not resolved") from None

    support = list(F)
    products = {}
    for g in F:
        for h in F:
            gh = mul(g, h)
            products[(g, h)] = gh
            support.append(gh)
    support = list(dict.fromkeys(support))
    for x in support:
        if x not in assignment:
            raise StageConditionError(1, x, "element of F*F has no stage assignment")

    if identity in assignment and assignment[identity] != phi0.identity:
        raise StageConditionError(3, identity, "identity not sent to the stage identity")
    for g in F:
        if g != identity and assignment[g] == phi0.identity:
            raise StageConditionError(2, g, "non-identity element sent to the stage identity")
    for g in F:
        for h in F:
            if stage_mul(assignment[g], assignment[h]) != assignment[products[(g, h)]]:
                raise StageConditionError(1, (g, h), "stage image of a product is not the product of images")

    table = {}
    for x in support:
        try:
            table[x] = phi0.table[assignment[x]]
        except KeyError:
            raise StageConditionError(1, x, "stage image outside the support of the stage map") from None
    if identity not in table:
        table[identity] = Permutation.identity(phi0.degree)
        support.append(identity)
    return ApproxMap(tuple(support), phi0.degree, table, products, identity)


def corrupt(a: ApproxMap, delta, seed: int) -> ApproxMap:
    """Compose every non-identity image with a random cycle moving exactly ``ceil(delta*n)`` points.

    A single point cannot be displaced by a permutation, so a count of 1 is
    raised to 2 (when the degree allows).
    """
    delta = Fraction(delta)
    if not 0 <= delta <= 1:
        raise ValueError("delta must lie in [0, 1]")
    n = a.degree
    k = math.ceil(delta * n)
    if k == 1:
        k = 2 if n >= 2 else 0
    rng = np.random.default_rng(seed)
    table = dict(a.table)
    for g in a.support:
        if g == a.identity or k == 0:
            continue
        pts = rng.choice(n, size=k, replace=False)
        cyc = np.arange(n)
        cyc[pts] = np.roll(pts, -1)
        table[g] = a.table[g] * Permutation(cyc, check=False)
    return ApproxMap(a.support, n, table, dict(a.products), a.identity)


def displaced_points(p: Permutation, q: Permutation) -> int:
    return int(hamming(p, q) * p.degree)
