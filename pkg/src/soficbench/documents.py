"""JSON documents: instance files in, normal forms / reports / certificates out.

Rationals are always written as ``"p/q"`` strings and nothing is written as a
float.  Parse problems raise :class:`InstanceError` with a JSON path.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Sequence

from . import amalgam as am
from .amalgam import Letter, NormalForm
from .approx import ApproxMap, DefectReport
from .builder import Certificate, Component
from .groups import (FiniteGroup, Permutation, Subgroup, cyclic_group, dihedral_group,
                     from_permutation_generators, symmetric_group, DEFAULT_ORDER_CAP)

SCHEMA = "soficbench/1"


class InstanceError(ValueError):
    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def frac_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(s, path: str = "$") -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise InstanceError("expected a rational string 'p/q' or an integer", path)
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise InstanceError(f"bad rational {s!r}", path) from None


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1)


def loads(text: str, source: str = "<input>"):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"invalid JSON: {exc.msg}", f"{source}:{exc.lineno}:{exc.colno}") from None


# ---------------------------------------------------------------------------
# Groups and subgroups
# ---------------------------------------------------------------------------


def parse_group(doc, path: str = "$.group", cap: int = DEFAULT_ORDER_CAP) -> FiniteGroup:
    if not isinstance(doc, dict):
        raise InstanceError("expected an object", path)
    try:
        if "table" in doc:
            return FiniteGroup.from_table(doc["table"], doc.get("labels"), cap=cap)
        if "perm_gens" in doc:
            degree = doc.get("degree")
            if not isinstance(degree, int) or degree < 1:
                raise InstanceError("'degree' must be a positive integer", path + ".degree")
            gens = []
            for i, g in enumerate(doc["perm_gens"]):
                try:
                    gens.append(Permutation(g))
                except (ValueError, TypeError) as exc:
                    raise InstanceError(str(exc), f"{path}.perm_gens[{i}]") from None
            return from_permutation_generators(gens, degree, cap=cap)
        if "named" in doc:
            name = str(doc["named"])
            makers = {"S": symmetric_group, "C": cyclic_group, "D": dihedral_group}
            kind, n = name[:1].upper(), name[1:]
            if kind not in makers or not n.isdigit():
                raise InstanceError(f"unknown group name {name!r}; expected S<n>, C<n> or D<n>", path + ".named")
            return makers[kind](int(n))
    except InstanceError:
        raise
    except (KeyError, TypeError) as exc:
        raise InstanceError(f"malformed group: {exc}", path) from None
    except ValueError as exc:
        raise InstanceError(str(exc), path) from None
    raise InstanceError("group needs 'table', 'perm_gens' or 'named'", path)


def group_doc(G: FiniteGroup) -> dict:
    if G.perms is not None:
        return {"perm_gens": [p.tolist() for p in G.perms], "degree": G.perms[0].degree}
    return {"table": [list(r) for r in G.table]}


def parse_subgroup(doc, G: FiniteGroup, path: str = "$.subgroup") -> Subgroup:
    try:
        if isinstance(doc, list):
            return Subgroup(G, tuple(_ints(doc, path)))
        if isinstance(doc, dict) and "elements" in doc:
            return Subgroup(G, tuple(_ints(doc["elements"], path + ".elements")))
        if isinstance(doc, dict) and "generators" in doc:
            return Subgroup.generated(G, _ints(doc["generators"], path + ".generators"))
    except InstanceError:
        raise
    except (ValueError, IndexError, TypeError) as exc:
        raise InstanceError(str(exc), path) from None
    raise InstanceError("subgroup needs an element list, 'elements' or 'generators'", path)


def _ints(xs, path) -> list[int]:
    if not isinstance(xs, list):
        raise InstanceError("expected a list of integers", path)
    for i, x in enumerate(xs):
        if not isinstance(x, int) or isinstance(x, bool):
            raise InstanceError("expected an integer", f"{path}[{i}]")
    return xs


def parse_graph(doc, path: str = "$.graph") -> am.GraphSpec:
    if not isinstance(doc, dict) or "vertices" not in doc:
        raise InstanceError("graph needs 'vertices' and 'edges'", path)
    try:
        return am.GraphSpec(tuple(doc["vertices"]), tuple(tuple(e) for e in doc.get("edges", [])),
                            tuple(doc["tree"]) if "tree" in doc else None)
    except (ValueError, TypeError) as exc:
        raise InstanceError(str(exc), path) from None


def graph_doc(g: am.GraphSpec) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges], "tree": list(g.tree)}


# ---------------------------------------------------------------------------
# Words and elements
# ---------------------------------------------------------------------------


def _value_doc(v):
    return list(v) if isinstance(v, tuple) else v


def _value_parse(v):
    return tuple(v) if isinstance(v, list) else v


def word_doc(word: Sequence[Letter]) -> list:
    return [[f, _value_doc(x)] for f, x in word]


def parse_word(doc, spec: am.AmalgamSpec, path: str) -> list[Letter]:
    if not isinstance(doc, list):
        raise InstanceError("a word is a list of [factor, element] pairs", path)
    out = []
    for i, item in enumerate(doc):
        if not isinstance(item, list) or len(item) != 2:
            raise InstanceError("letter must be [factor, element]", f"{path}[{i}]")
        try:
            out.append(spec.coerce_letter((item[0], _value_parse(item[1]))))
        except (am.MalformedLetter, TypeError) as exc:
            raise InstanceError(str(exc), f"{path}[{i}]") from None
    return out


def form_doc(nf: NormalForm) -> dict:
    return {"head": nf.head, "letters": word_doc(nf.letters)}


def parse_form(doc) -> NormalForm:
    return NormalForm(doc["head"], tuple(Letter(f, _value_parse(x)) for f, x in doc["letters"]))


def element_doc(x):
    if isinstance(x, NormalForm):
        return form_doc(x)
    if isinstance(x, tuple):
        return [element_doc(v) for v in x]
    return x


def parse_element(doc):
    if isinstance(doc, dict):
        return parse_form(doc)
    if isinstance(doc, list):
        return tuple(parse_element(v) for v in doc)
    return doc


# ---------------------------------------------------------------------------
# Approximation maps, reports, certificates
# ---------------------------------------------------------------------------


def approx_doc(a: ApproxMap, F: Sequence) -> dict:
    pos = {g: i for i, g in enumerate(a.support)}
    return {
        "support": [element_doc(g) for g in a.support],
        "identity": pos[a.identity],
        "degree": a.degree,
        "F": [pos[g] for g in F],
        "table": [a.table[g].tolist() for g in a.support],
        "products": sorted([pos[g], pos[h], pos[gh]] for (g, h), gh in a.products.items()),
    }


def parse_approx(doc, path: str = "$.approx") -> tuple[ApproxMap, list]:
    try:
        support = [parse_element(x) for x in doc["support"]]
        degree = int(doc["degree"])
        table = {}
        for i, (g, img) in enumerate(zip(support, doc["table"])):
            try:
                table[g] = Permutation(img)
            except ValueError as exc:
                raise InstanceError(str(exc), f"{path}.table[{i}]") from None
        products = {(support[i], support[j]): support[k] for i, j, k in doc["products"]}
        F = [support[i] for i in doc["F"]]
        a = ApproxMap(tuple(support), degree, table, products, support[doc["identity"]])
    except InstanceError:
        raise
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed approximation map: {exc}", path) from None
    return a, F


def report_doc(r: DefectReport) -> dict:
    w = {}
    for k, v in r.witnesses.items():
        w[k] = element_doc(v)
    return {
        "unital": r.unital,
        "mult_defect": frac_str(r.mult_defect),
        "free_defect": frac_str(r.free_defect),
        "epsilon": frac_str(r.epsilon),
        "passed": r.passed,
        "witnesses": w,
    }


def parse_report(doc) -> DefectReport:
    w = {k: parse_element(v) for k, v in doc.get("witnesses", {}).items()}
    return DefectReport(bool(doc["unital"]), Fraction(doc["mult_defect"]), Fraction(doc["free_defect"]),
                        Fraction(doc["epsilon"]), w)


def component_doc(c: Component) -> dict:
    return {
        "degree": c.degree,
        "generator_images": [[fid, [list(p) for p in imgs]] for fid, imgs in c.images.items()],
        "h_images": [list(p) for p in c.h_images],
    }


def parse_component(doc) -> Component:
    images = {fid: tuple(tuple(p) for p in imgs) for fid, imgs in doc["generator_images"]}
    return Component(int(doc["degree"]), images, tuple(tuple(p) for p in doc["h_images"]))


def certificate_doc(cert: Certificate, unseparated: Sequence[NormalForm] = ()) -> dict:
    doc = {
        "schema": SCHEMA,
        "meta": dict(cert.meta),
        "input_digest": cert.input_digest,
        "radius": cert.radius,
        "epsilon": frac_str(cert.epsilon),
        "truncation_N": cert.truncation_N,
        "quotient": {
            "components": [component_doc(c) for c in cert.components],
            "combined_degree": cert.combined_degree,
            "image_order": cert.image_order,
        },
        "approx": approx_doc(cert.approx, cert.F) if cert.approx is not None else None,
        "report": report_doc(cert.report) if cert.report is not None else None,
        "stats": dict(cert.stats),
    }
    if unseparated:
        doc["unseparated"] = [form_doc(w) for w in unseparated]
    return doc


def parse_certificate(doc) -> Certificate:
    if not isinstance(doc, dict) or "approx" not in doc:
        raise InstanceError("not a certificate document", "$")
    try:
        approx, F = parse_approx(doc["approx"]) if doc["approx"] is not None else (None, [])
        q = doc["quotient"]
        return Certificate(
            doc["input_digest"], int(doc["radius"]), Fraction(doc["epsilon"]), int(doc["truncation_N"]),
            tuple(parse_component(c) for c in q["components"]), int(q["combined_degree"]),
            int(q["image_order"]), approx, tuple(F),
            parse_report(doc["report"]) if doc.get("report") else None,
            dict(doc.get("stats", {})), None, dict(doc.get("meta", {})),
        )
    except InstanceError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise InstanceError(f"malformed certificate: {exc}", "$") from None


def strip_meta(doc: dict) -> dict:
    return {k: v for k, v in doc.items() if k != "meta"}
