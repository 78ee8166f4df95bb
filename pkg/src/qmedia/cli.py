"""Command-line front end.

Exit codes: 0 success or a positive verdict, 1 a negative verdict (the report
carries witnesses), 2 unreadable or invalid input."""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import action as A
from . import embed as E
from . import io
from . import qmgraph as Q
from . import ragg as R
from . import words as W
from .groups import NotAGroup, make_group


class InputError(Exception):
    pass


def _budget() -> int:
    raw = os.environ.get("QMEDIA_BUDGET")
    if raw is None:
        return Q.DEFAULT_BALL_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"QMEDIA_BUDGET must be an integer, got {raw!r}")
    if value <= 0:
        raise InputError("QMEDIA_BUDGET must be positive")
    return value


def _load(path: str) -> dict:
    try:
        return io.load_input(path)
    except FileNotFoundError as exc:
        raise InputError(str(exc))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})")


def _presentation(data: dict) -> W.GPPresentation:
    try:
        return W.presentation_from_json(data)
    except W.PresentationError as exc:
        raise InputError(str(exc))


def _ragg(data: dict) -> R.RAGGSpec:
    try:
        return R.ragg_from_json(data)
    except R.RAGGError as exc:
        raise InputError(str(exc))


def _ragg_valid(data: dict) -> R.RAGGSpec:
    spec = _ragg(data)
    rep = R.validate_ragg(spec)
    if not rep.valid:
        raise InputError(f"invalid RAGG input: {rep.problems[0]}")
    return spec


def _graph_or_ball(path: str, radius: int) -> Q.QMGraph:
    data = _load(path)
    if "n" in data:
        try:
            return Q.graph_from_json(data)
        except Q.GraphError as exc:
            raise InputError(str(exc))
    if "graph" in data and "vertex_products" in data:
        spec = _ragg_valid(data)
        return R.frak_x_ball(spec, spec.vertices[0], radius, _budget())
    return Q.cayley_ball(_presentation(data), radius, _budget())


def _words(p: W.GPPresentation, text: str) -> List[W.GPWord]:
    try:
        return [W.parse_word(p, part) for part in text.split(",")]
    except W.PresentationError as exc:
        raise InputError(str(exc))


def _emit(obj, out) -> None:
    out.write(io.dumps(obj) + "\n")


# subcommands

def cmd_group_check(args, out) -> int:
    data = _load(args.table)
    table = data["table"] if isinstance(data, dict) else data
    try:
        G = make_group(table, data.get("identity") if isinstance(data, dict) else None)
    except NotAGroup as exc:
        _emit({"group": False, "reason": str(exc)}, out)
        return 1
    _emit({"group": True, "order": G.order, "abelian": G.is_abelian(),
           "associativity": "sampled" if G.sampled_assoc else "exhaustive",
           "element_orders": [G.element_order(x) for x in G.elements()]}, out)
    return 0


def cmd_word_reduce(args, out) -> int:
    p = _presentation(_load(args.presentation))
    try:
        w = W.parse_word(p, args.word)
    except W.PresentationError as exc:
        raise InputError(str(exc))
    red = W.reduce(p, w)
    ok, moves = W.is_graphically_reduced(p, w)
    _emit({"input": W.format_word(w), "reduced": W.format_word(red), "length": len(red),
           "input_graphically_reduced": ok, "moves": [list(m) for m in moves or []]}, out)
    return 0


def cmd_qm(args, out) -> int:
    g = _graph_or_ball(args.input, args.radius)
    if args.action == "ball":
        _emit(g.to_json(), out)
        return 0
    if args.action == "dot":
        out.write(g.to_dot())
        return 0
    if args.action == "check":
        rep = Q.check_quasi_median(g)
        _emit(rep.to_json(), out)
        return 0 if rep.ok else 1
    if args.action == "hyperplanes":
        _emit(g.to_json(hyperplanes_too=True)["hyperplanes"], out)
        return 0
    if args.action == "gated":
        if not args.set:
            raise InputError("qm gated needs --set with comma separated vertex labels or indices")
        Y = []
        for tok in args.set.split(","):
            tok = tok.strip()
            if tok.isdigit() and g.presentation is None:
                Y.append(int(tok))
                continue
            if g.presentation is None:
                raise InputError(f"vertex {tok!r} must be an index")
            lab = W.parse_word(g.presentation, tok)
            if W.reduce(g.presentation, lab) not in g.index:
                raise InputError(f"vertex {tok!r} is outside the ball")
            Y.append(g.index[W.reduce(g.presentation, lab)])
        ok, wit = Q.is_gated(g, Y)
        _emit({"gated": ok, "witness": list(wit) if wit else None}, out)
        return 0 if ok else 1
    raise InputError(f"unknown qm action {args.action}")


def cmd_act(args, out) -> int:
    p = _presentation(_load(args.presentation))
    g = Q.cayley_ball(p, args.radius, _budget())
    gens = _words(p, args.gens) if args.gens else [(s,) for s in p.generators()]
    act = A.action_from_subgroup(p, gens, g)
    verdict = A.check_special(act)
    stab = A.vertex_stabilisers_trivial(act, 4)
    report = verdict.to_json()
    report["vertex_stabilisers_trivial"] = stab.ok
    report["hyperplane_orbits"] = len(act.transport().representatives())
    _emit(report, out)
    return 0 if verdict.ok else 1


def _action_from_spec(data: dict, radius: Optional[int]) -> A.GroupAction:
    r = radius if radius is not None else int(data.get("radius", 3))
    if "ragg" in data:
        src = data["ragg"]
        spec = _ragg_valid(_load(src) if isinstance(src, str) else src)
        omega = data.get("omega", spec.vertices[0])
        ball = R.frak_x_ball(spec, omega, r, _budget())
        return R.ragg_action(spec, omega, ball)
    if "presentation" in data:
        src = data["presentation"]
        p = _presentation(_load(src) if isinstance(src, str) else src)
        ball = Q.cayley_ball(p, r, _budget())
        gens = data.get("generators")
        gen_words = [(s,) for s in p.generators()] if gens is None else \
            [W.parse_word(p, w) for w in gens]
        return A.action_from_subgroup(p, gen_words, ball)
    if "graph" in data:
        g = Q.graph_from_json(data["graph"])
        return A.action_from_permutations(g, data.get("permutations", []))
    raise InputError("action spec needs one of: presentation, ragg, graph")


def cmd_embed(args, out) -> int:
    data = _load(args.spec)
    act = _action_from_spec(data, args.radius)
    special = A.check_special(act)
    if not special.ok:
        _emit({"error": "action is not special in the window", "special": special.to_json()}, out)
        return 1
    try:
        emb = E.build_embedding(act, extra_k=args.bigger_k)
    except (A.PreconditionFailed, E.AmbiguousLabel) as exc:
        _emit({"error": str(exc)}, out)
        return 1
    if args.target_out:
        Path(args.target_out).write_text(io.dumps(emb.target.to_json()) + "\n")
    if args.action == "build":
        _emit(emb.to_json(), out)
        return 0
    rep = E.verify_embedding(emb, seed=args.seed)
    body = rep.to_json()
    body["target"] = emb.target.to_json()
    _emit(body, out)
    return 0 if rep.ok else 1


def cmd_ragg(args, out) -> int:
    data = _load(args.spec)
    if args.action == "validate":
        rep = R.validate_ragg(_ragg(data))
        _emit(rep.to_json(), out)
        return 0 if rep.valid else 1
    spec = _ragg_valid(data)
    if args.action == "check":
        rep = R.check_conditions(spec)
        _emit(rep.to_json(), out)
        return 0 if rep.ok else 1
    if args.action == "psi":
        try:
            psi = R.build_psi(spec, literal=args.literal, arrow_order=args.arrow_order)
        except R.ConditionsFailed as exc:
            _emit({"error": str(exc), "conditions": exc.report.to_json()}, out)
            return 1
        _emit(psi.to_json(), out)
        return 0
    if args.action == "cover":
        if not args.cover:
            raise InputError("ragg cover needs --cover <cover.json>")
        try:
            new = R.pullback_cover(spec, _load(args.cover))
        except R.NotACovering as exc:
            _emit({"error": str(exc), "witness": exc.witness}, out)
            return 1
        body = new.to_json()
        body["sheets"] = new.sheets
        _emit(body, out)
        return 0
    if args.action == "ball":
        omega = args.omega or spec.vertices[0]
        if omega not in spec.vertices:
            raise InputError(f"unknown vertex {omega}")
        g = R.frak_x_ball(spec, omega, args.radius, _budget())
        _emit(g.to_json(), out)
        return 0
    raise InputError(f"unknown ragg action {args.action}")


def _corpus_entry(path: Path, radius: int) -> dict:
    try:
        data = io.load_json(path)
    except (OSError, json.JSONDecodeError) as exc:
        return {"file": path.name, "kind": "error", "error": str(exc)}
    try:
        if isinstance(data, dict) and "graph" in data and "vertex_products" in data:
            spec = R.ragg_from_json(data)
            val = R.validate_ragg(spec)
            if not val.valid:
                return {"file": path.name, "kind": "ragg", "verdict": "invalid", "problems": val.problems}
            cond = R.check_conditions(spec)
            entry = {"file": path.name, "kind": "ragg", "verdict": "pass" if cond.ok else "fail",
                     "conditions": {k: v["pass"] for k, v in cond.results.items()}}
            if cond.ok:
                entry["psi_vertices"] = list(R.build_psi(spec).presentation.vertices)
                omega = spec.vertices[0]
                ball = R.frak_x_ball(spec, omega, min(radius, 3), _budget())
                emb = E.build_embedding(R.ragg_action(spec, omega, ball))
                entry["embedding"] = E.verify_embedding(emb).ok
                if not entry["embedding"]:
                    entry["verdict"] = "fail"
            return entry
        if isinstance(data, dict) and "maps_to" in json.dumps(data):
            return {"file": path.name, "kind": "cover", "verdict": "skipped"}
        if isinstance(data, dict) and ("ragg" in data or "presentation" in data):
            act = _action_from_spec(data, None)
            special = A.check_special(act)
            if not special.ok:
                return {"file": path.name, "kind": "action", "verdict": "fail", "special": False}
            rep = E.verify_embedding(E.build_embedding(act))
            return {"file": path.name, "kind": "action", "verdict": "pass" if rep.ok else "fail",
                    "special": True, "failed_claims": sorted(k for k, c in rep.claims.items() if not c.passed)}
        if isinstance(data, dict) and "groups" in data and "vertices" in data:
            p = W.presentation_from_json(data)
            g = Q.cayley_ball(p, radius, _budget())
            qm = Q.check_quasi_median(g)
            emb = E.build_embedding(A.full_action(p, g))
            rep = E.verify_embedding(emb)
            ok = qm.ok and rep.ok
            return {"file": path.name, "kind": "presentation", "verdict": "pass" if ok else "fail",
                    "ball_vertices": g.n, "quasi_median": qm.ok, "embedding": rep.ok}
        return {"file": path.name, "kind": "unknown", "verdict": "skipped"}
    except Exception as exc:  # one broken file must not stop the run
        return {"file": path.name, "kind": "error", "error": f"{type(exc).__name__}: {exc}"}


def cmd_corpus(args, out) -> int:
    root = Path(args.directory)
    if not root.is_dir():
        raise InputError(f"not a directory: {root}")
    entries = [_corpus_entry(p, args.radius) for p in sorted(root.glob("*.json"))]
    _emit({"entries": entries, "count": len(entries)}, out)
    return 2 if any(e["kind"] == "error" for e in entries) else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qmedia", description="Quasi-median graphs, graph products "
                                 "and right-angled graphs of groups.")
    sub = ap.add_subparsers(dest="command", required=True)

    grp = sub.add_parser("group").add_subparsers(dest="action", required=True)
    gc = grp.add_parser("check", help="validate a multiplication table")
    gc.add_argument("table")
    gc.set_defaults(func=cmd_group_check)

    wrd = sub.add_parser("word").add_subparsers(dest="action", required=True)
    wr = wrd.add_parser("reduce", help="graphically reduce a word")
    wr.add_argument("presentation")
    wr.add_argument("word")
    wr.set_defaults(func=cmd_word_reduce)

    qm = sub.add_parser("qm", help="balls, axioms, hyperplanes, gatedness")
    qm.add_argument("action", choices=["ball", "check", "hyperplanes", "gated", "dot"])
    qm.add_argument("input", help="presentation, RAGG spec or graph JSON")
    qm.add_argument("-r", "--radius", type=int, default=3)
    qm.add_argument("--set", help="comma separated vertices for 'gated'")
    qm.set_defaults(func=cmd_qm)

    act = sub.add_parser("act").add_subparsers(dest="action", required=True)
    sc = act.add_parser("special-check", help="window specialness verdict")
    sc.add_argument("presentation")
    sc.add_argument("--gens", help="comma separated generator words, default all syllables")
    sc.add_argument("-r", "--radius", type=int, default=3)
    sc.set_defaults(func=cmd_act)

    emb = sub.add_parser("embed", help="embedding into a graph product")
    emb.add_argument("action", choices=["build", "verify"])
    emb.add_argument("spec", help="action spec JSON")
    emb.add_argument("-r", "--radius", type=int)
    emb.add_argument("--bigger-k", type=int, default=0,
                     help="extra elements for K at orbits with a non-transitive sector action")
    emb.add_argument("--seed", type=int, default=0)
    emb.add_argument("--target-out", help="also write the target presentation JSON to this path")
    emb.set_defaults(func=cmd_embed)

    rg = sub.add_parser("ragg", help="right-angled graphs of groups")
    rg.add_argument("action", choices=["validate", "check", "psi", "cover", "ball"])
    rg.add_argument("spec")
    rg.add_argument("--cover")
    rg.add_argument("--omega")
    rg.add_argument("-r", "--radius", type=int, default=2)
    rg.add_argument("--literal", action="store_true", help="one Psi vertex per arrow instead of per pair")
    rg.add_argument("--arrow-order", type=int, default=2)
    rg.set_defaults(func=cmd_ragg)

    cp = sub.add_parser("corpus", help="run every JSON fixture in a directory")
    cp.add_argument("directory")
    cp.add_argument("-r", "--radius", type=int, default=3)
    cp.set_defaults(func=cmd_corpus)
    return ap


def run(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    if getattr(args, "radius", None) is not None and args.radius < 0:
        sys.stderr.write("qmedia: radius must be non-negative\n")
        return 2
    try:
        return args.func(args, out)
    except (InputError, W.PresentationError, R.RAGGError, R.NotComposable, Q.GraphError) as exc:
        sys.stderr.write(f"qmedia: {exc}\n")
        return 2
    except Q.BudgetExceeded as exc:
        sys.stderr.write(f"qmedia: {exc} (raise QMEDIA_BUDGET to allow more)\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
