"""Command-line front end.

Exit codes: 0 success/pass, 1 verification failure, 2 usage or config
error, 3 solver failure.  Every JSON artifact carries a ``meta`` block with
the command, the resolved configuration, the seed and the package version.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from ._common import LLLKitError, SolverFailure
from .graphs import ColoredGraph, Graph
from .groups import Configuration, ball, family_from_spec, regular_action, schreier_graph
from .lll import ConstraintSystem, LLLCertificate, check_certificate, resample_solve
from .schreier import (
    ColoredSchreierPoint,
    automorphism_from_normalizer,
    repetitive_witness,
    stabilizer_on_patch,
)
from .subgroups import (
    FiniteGroup,
    FiniteGSystem,
    check_proposition_stability,
    conjugation_orbits,
    enumerate_subgroups,
    named_group,
    stabilizer_map,
    stability_system,
)
from .subshift import (
    BlockFamily,
    build_constraints,
    host_blocks,
    min_block_constant,
    pestov_set,
    solve_patch,
    verify_free_patch,
    verify_pestov,
)
from .thue import ThueInstance, min_alphabet_bound, nonrepetitive_color, verify_nonrepetitive

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SOLVER = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(args, payload: dict, text: str | None = None):
    payload = dict(payload)
    payload["meta"] = {
        "command": args.command_name,
        "resolved_config": args.resolved,
        "seed": getattr(args, "seed", None),
        "version": __version__,
    }
    fmt = getattr(args, "format", "json")
    out = text if fmt == "dot" and text is not None else _dump(payload)
    if getattr(args, "out", None):
        Path(args.out).write_text(out)
    else:
        sys.stdout.write(out)


def _load(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _family(text: str):
    text = text.strip()
    if text.startswith("{"):
        return family_from_spec(json.loads(text))
    return family_from_spec(text)


def _group(text: str) -> FiniteGroup:
    p = Path(text)
    if p.suffix == ".json" and p.exists():
        return FiniteGroup.from_dict(json.loads(p.read_text()))
    return named_group(text)


# ---------------------------------------------------------------------------
# lll


def cmd_lll_check(args) -> int:
    cert = LLLCertificate.from_dict(_load(args.file))
    args.resolved = {"file": args.file, "r": cert.r}
    rep = check_certificate(cert)
    _emit(args, {"ok": rep.ok, "slack": list(rep.slack), "marginal": list(rep.marginal)})
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_lll_solve(args) -> int:
    system = ConstraintSystem.from_dict(_load(args.file))
    args.resolved = {"file": args.file, "max_rounds": args.max_rounds}
    res = resample_solve(system, args.seed, args.max_rounds)
    _emit(args, {"ok": res.ok, "rounds": res.rounds, "violated": res.violated,
                 "assignment": [int(v) for v in res.assignment] if res.ok else None})
    return EXIT_OK if res.ok else EXIT_SOLVER


# ---------------------------------------------------------------------------
# thue


def cmd_thue_bound(args) -> int:
    terms = float("inf") if args.terms is None else args.terms
    args.resolved = {"d": args.d, "terms": "inf" if args.terms is None else args.terms}
    _emit(args, {"d": args.d, "bound": min_alphabet_bound(args.d, terms)})
    return EXIT_OK


def _resolve_alphabet(C: str, d: int) -> int:
    if C == "auto":
        return min_alphabet_bound(max(d, 1))
    try:
        return int(C)
    except ValueError as exc:
        raise UsageError(f"--C must be 'auto' or an integer, got {C!r}") from exc


def cmd_thue_color(args) -> int:
    if args.graph:
        try:
            graph = Graph.from_edgelist(Path(args.graph).read_text())
        except OSError as exc:
            raise UsageError(str(exc)) from exc
        source = {"graph": args.graph}
    elif args.family:
        patch = ball(_family(args.family), args.radius)
        graph = Graph.from_patch(patch)
        source = {"family": patch.family.spec(), "radius": args.radius}
    else:
        raise UsageError("need --graph or --family")
    C = _resolve_alphabet(args.C, graph.max_degree)
    inst = ThueInstance(graph, C, args.L)
    args.resolved = {**source, "C": C, "L": inst.L, "d": inst.d, "threads": args.threads}
    try:
        colored = nonrepetitive_color(inst, args.seed, args.max_rounds)
    except SolverFailure as exc:
        _emit(args, {"ok": False, "violated": exc.report.violated, "rounds": exc.report.rounds})
        return EXIT_SOLVER
    payload = {"ok": True, "L": inst.L, **colored.to_dict()}
    _emit(args, payload, colored.to_dot())
    return EXIT_OK


def cmd_thue_verify(args) -> int:
    d = _load(args.file)
    colored = ColoredGraph.from_dict(d)
    L = args.L if args.L is not None else d.get("L")
    args.resolved = {"file": args.file, "L": L}
    verdict = verify_nonrepetitive(colored, L)
    _emit(args, {"ok": verdict.ok, "witness": list(verdict.witness) if verdict.witness else None})
    return EXIT_OK if verdict.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# subshift


def _load_patch(path: str):
    d = _load(path)
    fam = family_from_spec(d["family"])
    patch = ball(fam, int(d["radius"]))
    blocks = BlockFamily.from_dict(fam, d)
    if len(d["values"]) != len(patch):
        raise UsageError("values do not match the patch size")
    omega = Configuration.from_array(patch, d["values"], 2)
    return d, fam, patch, blocks, omega


def cmd_subshift_build(args) -> int:
    fam = _family(args.family)
    C = min_block_constant() if args.C == "auto" else int(args.C)
    blocks, block_radius = host_blocks(fam, C, args.N)
    patch = ball(fam, args.radius)
    args.resolved = {"family": fam.spec(), "radius": args.radius, "C": C, "N": args.N,
                     "block_radius": block_radius, "threads": args.threads}
    try:
        omega = solve_patch(patch, blocks, args.seed, args.max_rounds)
    except SolverFailure as exc:
        _emit(args, {"ok": False, "violated": exc.report.violated, "rounds": exc.report.rounds})
        return EXIT_SOLVER
    payload = {"family": fam.spec(), "radius": args.radius, "block_radius": block_radius,
               **blocks.to_dict(), "N": blocks.N, "constraints": len(build_constraints(blocks, patch)),
               "values": [int(v) for v in omega.to_array(patch)]}
    _emit(args, payload)
    return EXIT_OK


def cmd_subshift_verify(args) -> int:
    _, fam, patch, blocks, omega = _load_patch(args.file)
    args.resolved = {"file": args.file}
    verdict = verify_free_patch(omega, blocks)
    witness = None
    if not verdict.ok:
        k, g = verdict.witness
        witness = {"k": k, "g": fam.to_json(g)}
    _emit(args, {"ok": verdict.ok, "witness": witness})
    return EXIT_OK if verdict.ok else EXIT_FAIL


def cmd_subshift_pestov(args) -> int:
    _, fam, patch, blocks, omega = _load_patch(args.file)
    g = fam.parse(args.g)
    if args.A == "auto":
        if g not in blocks.separators:
            raise UsageError("--A auto needs g to be one of the separators s_k")
        k = blocks.separators.index(g) + 1
        A = pestov_set(blocks, k)
    else:
        A = [fam.from_json(x) for x in json.loads(args.A)]
    args.resolved = {"file": args.file, "g": fam.to_json(g), "A": [fam.to_json(a) for a in A]}
    rep = verify_pestov(omega, g, A, patch)
    _emit(args, {"ok": rep.ok, "reason": rep.reason,
                 "failing_h": None if rep.failing is None else fam.to_json(rep.failing),
                 "tested": len(rep.tested), "untested": len(rep.untested),
                 "untested_h": [fam.to_json(h) for h in rep.untested]})
    return EXIT_OK if rep.ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# schreier


def _load_point(path: str) -> ColoredSchreierPoint:
    return ColoredSchreierPoint.from_dict(_load(path))


def cmd_schreier_color(args) -> int:
    fam = _family(args.family)
    if args.regular:
        action, _ = regular_action(fam)
    elif args.action:
        action = json.loads(args.action)
    else:
        raise UsageError("need --action or --regular")
    graph = schreier_graph(fam, action, args.basepoint)
    simple = Graph(graph.n, graph.undirected_edges())
    C = _resolve_alphabet(args.C, simple.max_degree)
    inst = ThueInstance(simple, C, args.L)
    args.resolved = {"family": fam.spec(), "action": action, "basepoint": args.basepoint, "C": C, "L": inst.L}
    try:
        colored = nonrepetitive_color(inst, args.seed, args.max_rounds)
    except SolverFailure as exc:
        _emit(args, {"ok": False, "violated": exc.report.violated, "rounds": exc.report.rounds})
        return EXIT_SOLVER
    point = ColoredSchreierPoint(graph, colored.colors, C)
    _emit(args, {"ok": True, "certified": colored.certified, **point.to_dict()}, graph.to_dot(colored.colors))
    return EXIT_OK


def cmd_schreier_witness(args) -> int:
    point = _load_point(args.file)
    fam = point.graph.family
    g = fam.parse(args.g)
    args.resolved = {"file": args.file, "g": args.g}
    theta = automorphism_from_normalizer(point, g)
    if point.graph.contains(g):
        raise UsageError("g lies in the root stabilizer; theta is the identity")
    if not theta.preserves(point.colors):
        raise UsageError("theta_g does not preserve the coloring, so it forces no repetitive path")
    w = repetitive_witness(point, theta)
    _emit(args, {"ok": True, "theta": list(theta.perm), "path": list(w.path), "word": "".join(w.word)})
    return EXIT_OK


def cmd_schreier_stab(args) -> int:
    point = _load_point(args.file)
    fam = point.graph.family
    patch = ball(fam, args.radius)
    args.resolved = {"file": args.file, "radius": args.radius}
    stab = stabilizer_on_patch(point, patch)
    in_H = [g for g in patch.elements if point.graph.contains(g)]
    _emit(args, {"stabilizer": [fam.to_json(g) for g in stab], "H_on_patch": [fam.to_json(g) for g in in_H],
                 "equals_H": stab == in_H})
    return EXIT_OK


# ---------------------------------------------------------------------------
# urs


def _sub_json(G, H):
    return [G.labels[i] if not isinstance(G.labels[i], tuple) else list(G.labels[i]) for i in H.elements]


def cmd_urs_enumerate(args) -> int:
    G = _group(args.group)
    subs = enumerate_subgroups(G)
    orbits = conjugation_orbits(subs, G)
    args.resolved = {"group": args.group, "order": G.order}
    _emit(args, {"order": G.order, "subgroups": len(subs),
                 "orbits": [[_sub_json(G, H) for H in orb] for orb in orbits]})
    return EXIT_OK


def _system(G, action: str) -> FiniteGSystem:
    if action == "natural":
        return FiniteGSystem.natural(G)
    if action == "regular":
        return FiniteGSystem.regular(G)
    if action == "trivial":
        return FiniteGSystem.trivial(G)
    raise UsageError(f"unknown action {action!r}")


def cmd_urs_stab(args) -> int:
    G = _group(args.group)
    X = _system(G, args.action)
    args.resolved = {"group": args.group, "action": args.action}
    stabs = stabilizer_map(X, G)
    Z = stability_system(X, G)
    payload = {"stabilizers": [_sub_json(G, H) for H in stabs], "stability_system": [_sub_json(G, H) for H in Z],
               "essentially_free": len(Z) == 1 and Z[0].order == 1}
    if X.is_minimal:
        payload["proposition_ok"] = check_proposition_stability(X, G).ok
    _emit(args, payload)
    return EXIT_OK


def cmd_urs_realize(args) -> int:
    from .schreier import finite_index_realization

    G = _group(args.group)
    subs = enumerate_subgroups(G)
    orbits = conjugation_orbits(subs, G)
    picks = range(len(subs)) if args.subgroup is None else [args.subgroup]
    args.resolved = {"group": args.group, "subgroup": args.subgroup}
    rows = []
    for i in picks:
        if not 0 <= i < len(subs):
            raise UsageError(f"subgroup index {i} out of range 0..{len(subs) - 1}")
        H = subs[i]
        Z = next(orb for orb in orbits if H in orb)
        X = finite_index_realization(Z, H, G)
        rows.append({"index": i, "H": _sub_json(G, H), "points": len(X),
                     "stabilizer_of_base_is_H": stabilizer_map(X, G)[0] == H,
                     "stability_system_is_Z": set(stability_system(X, G)) == set(Z)})
    ok = all(r["stabilizer_of_base_is_H"] and r["stability_system_is_Z"] for r in rows)
    _emit(args, {"ok": ok, "realizations": rows})
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lllkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="area", required=True)

    def leaf(sub, name, func, seeded=False, out=True):
        p = sub.add_parser(name)
        p.set_defaults(func=func)
        p.add_argument("--threads", type=int, default=1, help="accepted; runs are deterministic for any value")
        if seeded:
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--max-rounds", type=int, default=10**6)
        if out:
            p.add_argument("--out")
        return p

    lll = top.add_parser("lll").add_subparsers(dest="action", required=True)
    leaf(lll, "check", cmd_lll_check).add_argument("file")
    leaf(lll, "solve", cmd_lll_solve, seeded=True).add_argument("file")

    thue = top.add_parser("thue").add_subparsers(dest="action", required=True)
    p = leaf(thue, "bound", cmd_thue_bound)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--terms", type=int)
    p = leaf(thue, "color", cmd_thue_color, seeded=True)
    p.add_argument("--graph")
    p.add_argument("--family")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--C", default="auto")
    p.add_argument("--L", type=int)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p = leaf(thue, "verify", cmd_thue_verify)
    p.add_argument("file")
    p.add_argument("--L", type=int)

    sub = top.add_parser("subshift").add_subparsers(dest="action", required=True)
    p = leaf(sub, "build", cmd_subshift_build, seeded=True)
    p.add_argument("--family", default="free:2")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--C", default="auto")
    p.add_argument("--N", type=int, default=1)
    leaf(sub, "verify", cmd_subshift_verify).add_argument("file")
    p = leaf(sub, "pestov", cmd_subshift_pestov)
    p.add_argument("file")
    p.add_argument("--g", required=True)
    p.add_argument("--A", default="auto")

    sch = top.add_parser("schreier").add_subparsers(dest="action", required=True)
    p = leaf(sch, "color", cmd_schreier_color, seeded=True)
    p.add_argument("--family", required=True)
    p.add_argument("--action", dest="action_perms")
    p.add_argument("--regular", action="store_true")
    p.add_argument("--basepoint", type=int, default=0)
    p.add_argument("--C", default="auto")
    p.add_argument("--L", type=int)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p = leaf(sch, "witness", cmd_schreier_witness)
    p.add_argument("file")
    p.add_argument("--g", required=True)
    p = leaf(sch, "stab", cmd_schreier_stab)
    p.add_argument("file")
    p.add_argument("--radius", type=int, default=2)

    urs = top.add_parser("urs").add_subparsers(dest="action", required=True)
    leaf(urs, "enumerate", cmd_urs_enumerate).add_argument("--group", required=True)
    p = leaf(urs, "stab", cmd_urs_stab)
    p.add_argument("--group", required=True)
    p.add_argument("--action", dest="group_action", default="natural")
    p = leaf(urs, "realize", cmd_urs_realize)
    p.add_argument("--group", required=True)
    p.add_argument("--subgroup", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    args.command_name = f"{args.area} {args.action}"
    if hasattr(args, "action_perms"):
        args.action = args.action_perms
    if hasattr(args, "group_action"):
        args.action = args.group_action
    args.resolved = {}
    try:
        return args.func(args)
    except (UsageError, LLLKitError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
