"""Command-line front end.

Exit codes: 0 ok, 1 verification failure, 2 usage/parameter error, 3 I/O or
format error, 4 resource budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from . import corpus
from .formulas import (DimacsError, Graph, ParameterError, VarSpace, format_dimacs, generate_family,
                       parse_dimacs)
from .interpolation import (GameContext, InterpolationError, build_protocol, check_clause_invariant,
                            check_monotone, comm_cost, extract_circuit, format_circuit, run_protocol,
                            separation_report)
from .random_resolution import (DistributionError, check_samples, delta_of, load_distribution,
                                save_distribution, size_metrics)
from .rectangles import (SCHEMA_VERSION, Universe, best_sample, bound_report, clause_rectangle, prune,
                         restricted_kw_check)
from .resolution import (ProofParseError, ResolutionProof, ResourceLimitExceeded, check_refutation,
                         format_proof, num_clauses, parse_proof, saturation_refute)

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_IO, EXIT_BUDGET = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _write(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror}", EXIT_IO) from None


def _varspace(args) -> VarSpace:
    try:
        return VarSpace(args.n, args.omega, args.xi, checked=not args.unchecked)
    except ParameterError as e:
        raise CliError(str(e), EXIT_USAGE) from None


def _load_cnf(path: str):
    try:
        f = parse_dimacs(_read(path))
    except DimacsError as e:
        raise CliError(f"{path}: {e}", EXIT_IO) from None
    return f


def _load_proof(path: str) -> ResolutionProof:
    try:
        return parse_proof(_read(path))
    except ProofParseError as e:
        raise CliError(f"{path}: parse error: {e}", EXIT_IO) from None


def _load_rrd(path: str):
    try:
        return load_distribution(path)
    except OSError as e:
        raise CliError(f"cannot read distribution: {e}", EXIT_IO) from None
    except (DistributionError, DimacsError, ProofParseError, json.JSONDecodeError) as e:
        raise CliError(f"{path}: {e}", EXIT_IO) from None


def _require_vs(f, path) -> VarSpace:
    if f.vs is None:
        raise CliError(f"{path} has no 'c params' line", EXIT_USAGE)
    return f.vs


# -- commands -------------------------------------------------------------------

def cmd_gen_formula(args) -> int:
    vs = _varspace(args)
    _write(args.out, format_dimacs(generate_family(vs), vs))
    return EXIT_OK


def cmd_refute(args) -> int:
    f = _load_cnf(args.cnf)
    res = saturation_refute(f.clauses, f.vs, max_clauses=args.budget)
    if isinstance(res, ResolutionProof):
        _write(args.out, format_proof(res))
        print(f"refuted: {num_clauses(res)} steps", file=sys.stderr)
        return EXIT_OK
    model = [v if res.model.value(v) else -v for v in range(1, f.num_vars + 1)]
    print("satisfiable: " + " ".join(map(str, model)), file=sys.stderr)
    return EXIT_VERIFY


def cmd_check(args) -> int:
    f = _load_cnf(args.cnf)
    proof = _load_proof(args.proof)
    rep = check_refutation(proof, f.clauses)
    for e in rep.errors:
        print(e)
    if rep.ok:
        print(f"ok: {num_clauses(proof)} steps")
    return EXIT_OK if rep.ok else EXIT_VERIFY


def cmd_audit_rrd(args) -> int:
    d = _load_rrd(args.rrd)
    rep = check_samples(d)
    k, dmax = size_metrics(d)
    out = {"schema_version": SCHEMA_VERSION, "k": k, "d": dmax,
           "errors": [{"sample": i, "message": m} for i, m in rep.errors]}
    out["per_sample"] = [{"sample": i, "weight": str(s.weight), "delta_size": len(s.delta),
                          "steps": num_clauses(s.proof), "ok": r.ok}
                         for i, (s, r) in enumerate(zip(d.samples, rep.per_sample))]
    if d.samples:
        mode = "sample" if args.sample else "exact"
        res = delta_of(d, mode=mode, threshold=args.threshold, num_samples=args.samples, seed=args.seed)
        val = res.value
        out["delta_star"] = f"{val.numerator}/{val.denominator}"
        out["delta"] = res.to_dict()
    _write(args.out, _dump(out))
    return EXIT_OK if rep.ok else EXIT_VERIFY


def _family_proof(args):
    f = _load_cnf(args.cnf)
    vs = _require_vs(f, args.cnf)
    proof = _load_proof(args.proof)
    rep = check_refutation(proof, f.clauses)
    if not rep.ok:
        raise CliError("; ".join(map(str, rep.errors)), EXIT_VERIFY)
    return f, vs, proof


def cmd_interpolate(args) -> int:
    if args.rrd:
        d = _load_rrd(args.rrd)
        if any(s.delta for s in d.samples):
            raise CliError("circuit extraction needs Delta = {}; use 'prune' for random refutations",
                           EXIT_USAGE)
    f, vs, proof = _family_proof(args)
    try:
        circuit = extract_circuit(proof, vs)
    except InterpolationError as e:
        raise CliError(f"{e}; use 'prune' for refutations with extra clauses", EXIT_USAGE) from None
    _write(args.out, format_circuit(circuit))
    sep = separation_report(circuit, vs)
    inv = check_clause_invariant(proof, vs, circuit)
    summary = {"schema_version": SCHEMA_VERSION, "gates": len(circuit), "steps": num_clauses(proof),
               "monotone": check_monotone(circuit), "separation": sep.summary(),
               "separation_errors": sep.errors,
               "invariant_violations": len(inv.violations), "invariant_checks": inv.checked}
    text = _dump(summary)
    if args.summary:
        _write(args.summary, text)
    else:
        sys.stderr.write(text)
    ok = summary["monotone"] and sep.ok and inv.ok
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_game(args) -> int:
    f, vs, proof = _family_proof(args)
    family = set(generate_family(vs))
    delta = [c for c in f.clauses if c not in family]
    protocol = build_protocol(proof, vs, delta)
    if args.u or args.v:
        if not (args.u and args.v):
            raise CliError("--u and --v go together", EXIT_USAGE)
        try:
            pairs = [(Graph.parse(args.u), Graph.parse(args.v))]
        except ValueError as e:
            raise CliError(str(e), EXIT_USAGE) from None
    else:
        uni = Universe(vs)
        pairs = [(u, v) for u in uni.U for v in uni.V]
    lines = []
    failures = 0
    for u, v in pairs:
        try:
            ctx = GameContext.make(u, v, vs)
        except ValueError as e:
            raise CliError(str(e), EXIT_USAGE) from None
        res = run_protocol(protocol, ctx)
        valid = res.edge is not None and u.has_edge(*res.edge) and not v.has_edge(*res.edge)
        failures += res.edge is not None and not valid
        lines.append(json.dumps({"u": str(u), "v": str(v), "trace": list(res.trace),
                                 "result": "bottom" if res.edge is None else list(res.edge)}))
    cost = comm_cost(protocol)
    lines.append(json.dumps({"nodes": protocol.size, "steps": protocol.k, "cost": cost.to_dict()}, sort_keys=True))
    _write(args.out, "\n".join(lines) + "\n")
    return EXIT_OK if not failures and cost.within_bounds else EXIT_VERIFY


def prune_pipeline(d, threshold: int = 24, mode: str = "exact", seed: int = 0) -> dict:
    rep = check_samples(d)
    if not rep.ok:
        return {"schema_version": SCHEMA_VERSION,
                "errors": [{"sample": i, "message": m} for i, m in rep.errors]}
    uni = Universe(d.vs)
    delta_star = delta_of(d, mode=mode, threshold=threshold, seed=seed).value
    best = best_sample(d, uni)
    s = d.samples[best.index]
    rects = [clause_rectangle(D, uni) for D in s.delta]
    result = prune(rects, uni.U, uni.V)
    protocol = build_protocol(s.proof, d.vs, s.delta)
    ce = restricted_kw_check(protocol, result.u_prime, result.v_prime, uni)
    restricted = "ok" if ce is None else f"counterexample u={ce[0]} v={ce[1]} result={ce[2].edge}"
    report = bound_report(d, uni, best, rects, result, delta_star, restricted)
    errors = [] if report.ok and ce is None else [{"sample": best.index, "message": "bound checks failed"}]
    return {"schema_version": SCHEMA_VERSION, "errors": errors, "bad_fractions": [str(x) for x in best.fractions],
            "prune": result.to_dict(), "report": report.to_dict()}


def cmd_prune(args) -> int:
    d = _load_rrd(args.rrd)
    out = prune_pipeline(d, args.threshold, "sample" if args.sample else "exact", args.seed)
    _write(args.out, _dump(out))
    return EXIT_VERIFY if out["errors"] else EXIT_OK


def cmd_gen_rrd(args) -> int:
    vs = _varspace(args)
    if not args.out or args.out == "-":
        raise CliError("gen-rrd needs --out FILE.json", EXIT_USAGE)
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    d = corpus.random_distribution(vs, rng, max_samples=args.max_samples, max_clauses=args.max_clauses)
    save_distribution(d, args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    """Full pipeline for one parameter set: formula, refutation, interpolant,
    protocol, a seeded random distribution and its pruning report."""
    vs = _varspace(args)
    out_dir = args.out
    if not out_dir or out_dir == "-":
        raise CliError("report needs --out DIR", EXIT_USAGE)
    os.makedirs(out_dir, exist_ok=True)
    f = generate_family(vs)
    _write(os.path.join(out_dir, "formula.cnf"), format_dimacs(f, vs))
    proof = saturation_refute(f, vs, max_clauses=args.budget)
    _write(os.path.join(out_dir, "refutation.proof"), format_proof(proof))
    check = check_refutation(proof, f)
    circuit = extract_circuit(proof, vs)
    _write(os.path.join(out_dir, "interpolant.circuit"), format_circuit(circuit))
    sep = separation_report(circuit, vs)
    protocol = build_protocol(proof, vs)
    uni = Universe(vs)
    game_failures = 0
    for u in uni.U:
        for v in uni.V:
            edge = run_protocol(protocol, uni.context(u, v)).edge
            game_failures += edge is None or not (u.has_edge(*edge) and not v.has_edge(*edge))
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    d = corpus.random_distribution(vs, rng, max_samples=args.max_samples, max_clauses=args.max_clauses)
    save_distribution(d, os.path.join(out_dir, "rrd.json"))
    pr = prune_pipeline(d, args.threshold, "sample" if args.sample else "exact", args.seed)
    summary = {
        "schema_version": SCHEMA_VERSION,
        "params": {"n": vs.n, "omega": vs.omega, "xi": vs.xi, "seed": args.seed},
        "refutation": {"steps": num_clauses(proof), "ok": check.ok},
        "interpolant": {"gates": len(circuit), "monotone": check_monotone(circuit), "separation": sep.summary(),
                        "ok": sep.ok},
        "protocol": {"nodes": protocol.size, "pairs": len(uni.U) * len(uni.V), "failures": game_failures,
                     "cost": comm_cost(protocol).to_dict()},
        "random_resolution": pr,
    }
    _write(os.path.join(out_dir, "report.json"), _dump(summary))
    ok = check.ok and sep.ok and not game_failures and not pr["errors"]
    return EXIT_OK if ok else EXIT_VERIFY


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--budget", type=int, default=200_000, help="clause budget for refutation search")
    common.add_argument("--threshold", type=int, default=24, help="max support variables for exact delta")
    common.add_argument("--samples", type=int, default=4096, help="assignments drawn in sampling mode")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exact delta computation (default)")
    mode.add_argument("--sample", action="store_true", help="sampling-mode delta estimate")
    common.add_argument("--out", default=None, help="output file (or directory for 'report')")

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--n", type=int, required=True)
    params.add_argument("--omega", type=int, required=True)
    params.add_argument("--xi", type=int, required=True)
    params.add_argument("--unchecked", action="store_true", help="allow parameters violating n >= omega > xi >= 1")

    rrd_gen = argparse.ArgumentParser(add_help=False)
    rrd_gen.add_argument("--max-samples", type=int, default=3)
    rrd_gen.add_argument("--max-clauses", type=int, default=2)

    p = argparse.ArgumentParser(prog="rrinterp", description="Feasible interpolation toolkit for random resolution.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("gen-formula", parents=[common, params], help="write Clique ∪ Color as extended DIMACS")
    s.set_defaults(func=cmd_gen_formula)

    s = sub.add_parser("refute", parents=[common], help="Davis-Putnam refutation of a CNF file")
    s.add_argument("--cnf", required=True)
    s.set_defaults(func=cmd_refute)

    s = sub.add_parser("check", parents=[common], help="check a proof file against a CNF file")
    s.add_argument("--cnf", required=True)
    s.add_argument("--proof", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("audit-rrd", parents=[common], help="audit a random refutation distribution")
    s.add_argument("--rrd", required=True)
    s.set_defaults(func=cmd_audit_rrd)

    s = sub.add_parser("interpolate", parents=[common], help="extract and verify a monotone interpolant")
    s.add_argument("--cnf", required=True)
    s.add_argument("--proof", required=True)
    s.add_argument("--rrd", help="refused when any sample has a nonempty Delta")
    s.add_argument("--summary", help="write the verification summary here instead of stderr")
    s.set_defaults(func=cmd_interpolate)

    s = sub.add_parser("game", parents=[common], help="replay the KW protocol of a refutation")
    s.add_argument("--cnf", required=True, help="family plus any extra (Delta) clauses")
    s.add_argument("--proof", required=True)
    s.add_argument("--u", help="clique-side graph as n:bits")
    s.add_argument("--v", help="coloring-side graph as n:bits")
    s.set_defaults(func=cmd_game)

    s = sub.add_parser("prune", parents=[common], help="rectangle pruning and bound report")
    s.add_argument("--rrd", required=True)
    s.set_defaults(func=cmd_prune)

    s = sub.add_parser("gen-rrd", parents=[common, params, rrd_gen], help="seeded random refutation distribution")
    s.set_defaults(func=cmd_gen_rrd)

    s = sub.add_parser("report", parents=[common, params, rrd_gen], help="run the whole pipeline")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except ResourceLimitExceeded as e:
        print(f"error: resource budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
