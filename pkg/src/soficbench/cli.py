"""Command-line driver: one JSON instance file in, one JSON document out.

Exit status: 0 success / verified pass, 2 verified failure (defects not below
epsilon, failed embedding checks, incomplete separation), 1 usage or parse error.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from . import amalgam as am
from . import documents as docs
from . import embeddings as emb
from .approx import verify
from .builder import (DEFAULT_BUDGET, DEFAULT_DEGREE_CAP, DEFAULT_IMAGE_CAP, IncompleteSeparation,
                      build_approximation)
from .documents import InstanceError
from .groups import GroupTooLarge, NotNormal, core_chain, normal_core, separable_chain

COMMANDS = ("normalize", "ball", "embed", "build", "verify", "core")
EMBEDDINGS = ("lemma23", "lemma24", "double-to-line", "stagewise")
EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2

DEFAULT_GRAPH = {"vertices": [0, 1], "edges": [[0, 1]]}


class _Params:
    def __init__(self, inst: dict, args: argparse.Namespace):
        self.inst = inst
        self.radius = args.radius if args.radius is not None else inst.get("radius", 2)
        if not isinstance(self.radius, int) or self.radius < 0:
            raise InstanceError("radius must be a non-negative integer", "$.radius")
        eps = args.epsilon if args.epsilon is not None else inst.get("epsilon", "1/10")
        self.epsilon = docs.parse_frac(eps, "$.epsilon")
        if self.epsilon <= 0:
            raise InstanceError("epsilon must be positive", "$.epsilon")
        caps = inst.get("caps", {})
        self.budget = args.budget if args.budget is not None else inst.get("budget", DEFAULT_BUDGET)
        self.seed = args.seed if args.seed is not None else inst.get("seed", 0)
        self.cap_degree = args.cap_degree if args.cap_degree is not None else caps.get("degree", DEFAULT_DEGREE_CAP)
        self.cap_image = caps.get("image", DEFAULT_IMAGE_CAP)
        self.cap_order = caps.get("order", 20_000)

    def group(self):
        if "group" not in self.inst:
            raise InstanceError("missing 'group'", "$")
        return docs.parse_group(self.inst["group"], cap=self.cap_order)

    def subgroup(self, G, key="subgroup"):
        if key not in self.inst:
            raise InstanceError(f"missing '{key}'", "$")
        return docs.parse_subgroup(self.inst[key], G, f"$.{key}")

    def graph(self):
        return docs.parse_graph(self.inst.get("graph", DEFAULT_GRAPH))

    def spec(self):
        G = self.group()
        H = self.subgroup(G)
        try:
            return am.decompose_graph(self.graph(), G, H)
        except am.DisconnectedGraph as exc:
            raise InstanceError(str(exc), "$.graph") from None


def _cmd_normalize(p: _Params):
    spec = p.spec()
    words = p.inst.get("words", [[]])
    forms = [am.normalize(docs.parse_word(w, spec, f"$.words[{i}]"), spec) for i, w in enumerate(words)]
    return {"command": "normalize", "forms": [docs.form_doc(f) for f in forms]}, EXIT_OK


def _cmd_ball(p: _Params):
    spec = p.spec()
    letters = None
    if "letters" in p.inst:
        letters = docs.parse_word(p.inst["letters"], spec, "$.letters")
    B = am.ball(spec, letters, p.radius)
    return {"command": "ball", "radius": p.radius, "size": len(B),
            "elements": [docs.form_doc(x) for x in B]}, EXIT_OK


def _embedding(p: _Params, name: str):
    G = p.group()
    H = p.subgroup(G)
    if name == "lemma23":
        return emb.SubAmalgamEmbedding(G, H, p.subgroup(G, "K"))
    if name == "lemma24":
        if "K" not in p.inst:
            raise InstanceError("missing 'K' (a group)", "$")
        return emb.ProductEmbedding(G, H, docs.parse_group(p.inst["K"], "$.K"))
    if name == "double-to-line":
        return emb.LineEmbedding(am.decompose_graph(p.graph(), G, H))
    if name == "stagewise":
        if "chain" in p.inst:
            subs = [docs.parse_subgroup(s, G, f"$.chain[{i}]") for i, s in enumerate(p.inst["chain"])]
            chain = separable_chain(G, subs)
        else:
            chain = core_chain(G, H)
        return emb.StagewiseEmbedding(am.double_spec(G, H, (0, 1)), emb.cosofic_stage_data(chain, H))
    raise InstanceError(f"unknown embedding {name!r}; expected one of {', '.join(EMBEDDINGS)}", "$.embedding")


def _cmd_embed(p: _Params):
    name = p.inst.get("embedding")
    if name is None:
        raise InstanceError("missing 'embedding'", "$")
    e = _embedding(p, name)
    rep = emb.embedding_report(name, e, R=p.radius)
    doc = {
        "command": "embed",
        "embedding": name,
        "radius": p.radius,
        "domain_ball": [docs.form_doc(x) for x in rep.domain_ball],
        "images": [docs.element_doc(x) for x in rep.images],
        "multiplicative": rep.multiplicative,
        "injective": rep.injective,
        "standard_form": rep.standard_form,
        "failures": {k: docs.element_doc(tuple(v)) for k, v in rep.failures.items()},
    }
    return doc, EXIT_OK if rep.passed else EXIT_FAIL


def _stamp(doc: dict) -> dict:
    doc.setdefault("meta", {})
    doc["meta"]["tool"] = f"soficbench {__version__}"
    doc["meta"]["created"] = datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    return doc


def _cmd_build(p: _Params):
    G = p.group()
    H = p.subgroup(G)
    graph = p.graph()
    if p.radius < 1:
        raise InstanceError("build needs radius >= 1", "$.radius")
    try:
        cert = build_approximation(graph, G, H, p.radius, p.epsilon, budget=p.budget,
                                   cap_degree=p.cap_degree, cap_image=p.cap_image, seed=p.seed)
    except am.DisconnectedGraph as exc:
        raise InstanceError(str(exc), "$.graph") from None
    except IncompleteSeparation as exc:
        doc = docs.certificate_doc(exc.certificate, exc.unseparated)
        return _stamp(doc), EXIT_FAIL
    doc = docs.certificate_doc(cert)
    return _stamp(doc), EXIT_OK if cert.report.passed else EXIT_FAIL


def _cmd_verify(p: _Params, args):
    inst = p.inst
    if "support" in inst:
        # a bare approximation map rather than a certificate
        a, F = docs.parse_approx(inst, "$")
    elif inst.get("approx") is not None:
        a, F = docs.parse_approx(inst["approx"])
    else:
        raise InstanceError("nothing to verify: no 'approx' block", "$.approx")
    eps = p.epsilon
    if args.epsilon is None and "epsilon" in inst:
        eps = docs.parse_frac(inst["epsilon"], "$.epsilon")
    report = verify(a, F, eps)
    out = {"command": "verify", "epsilon": docs.frac_str(eps), "report": docs.report_doc(report)}
    ok = report.passed
    if inst.get("report"):
        matches = docs.report_doc(report) == inst["report"]
        out["matches_embedded"] = matches
        ok = ok and matches
    return out, EXIT_OK if ok else EXIT_FAIL


def _cmd_core(p: _Params):
    G = p.group()
    H = p.subgroup(G)
    core = normal_core(G, H)
    if "chain" in p.inst:
        subs = [docs.parse_subgroup(s, G, f"$.chain[{i}]") for i, s in enumerate(p.inst["chain"])]
        try:
            chain = separable_chain(G, subs)
        except ValueError as exc:
            raise InstanceError(str(exc), "$.chain") from None
    else:
        chain = core_chain(G, H)
    return {
        "command": "core",
        "subgroup": list(H.elements),
        "core": list(core.elements),
        "chain": {
            "stages": [{"G": list(Gi.elements), "H": list(Hi.elements)} for Gi, Hi in chain.stages],
            "target": list(chain.target.elements),
        },
    }, EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="soficbench", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("instance", help="JSON instance file (a certificate or approximation map for 'verify'); '-' for stdin")
    ap.add_argument("--radius", type=int)
    ap.add_argument("--epsilon", help="rational 'p/q'")
    ap.add_argument("--budget", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--cap-degree", type=int)
    ap.add_argument("--out", help="write the output document here instead of stdout")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return ap


def _emit(doc: dict, out: str | None) -> None:
    text = docs.dumps(doc) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        if args.instance == "-":
            text, source = sys.stdin.read(), "<stdin>"
        else:
            try:
                text, source = Path(args.instance).read_text(), args.instance
            except OSError as exc:
                raise InstanceError(f"cannot read instance: {exc.strerror}", args.instance) from None
        inst = docs.loads(text, source)
        if not isinstance(inst, dict):
            raise InstanceError("instance must be a JSON object", "$")
        p = _Params(inst, args)
        cmd = args.command
        if cmd == "verify":
            doc, code = _cmd_verify(p, args)
        else:
            doc, code = globals()[f"_cmd_{cmd}"](p)
    except InstanceError as exc:
        _emit({"error": {"kind": "parse", "path": exc.path, "message": exc.message}}, args.out)
        return EXIT_ERROR
    except (GroupTooLarge, NotNormal, am.BallTooLarge, am.MalformedLetter, emb.ImproperSequence) as exc:
        _emit({"error": {"kind": type(exc).__name__, "message": str(exc)}}, args.out)
        return EXIT_ERROR
    _emit(doc, args.out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
