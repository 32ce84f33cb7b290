"""Batch command-line front end.

Output is deterministic for fixed inputs and budgets: JSON payloads are
sorted-key single objects, text payloads are the formula grammar.  Exit
codes: 0 success, 2 usage, 3 parse error, 4 precondition violation,
5 budget exhausted where a decision was required.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import coding, proofs
from .constructions import (
    axioms_star_formula, craig_transform, eval_oracle, fixed_point,
    godel_sentence, lindenbaum_complete, n_consistency_audit,
    omega_con_q_formula, rosser_sentence, search_oracle, sent_list_formula,
)
from .hierarchy import classify, is_delta, nnf
from .semantics import Budget, Evaluator, Verdict
from .syntax import SyntaxError_, format_formula, free_vars, parse
from .theories import (
    PreconditionError, TheoryDescriptor, con_sentence, parse_theory,
    prov_formula, q_theory,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_PRECONDITION = 4
EXIT_UNDECIDED = 5


def _budget(args) -> Budget:
    wb = args.witness_bound
    if wb is None:
        wb = int(os.environ.get("ARITH_WITNESS_BOUND", Budget().witness_bound))
    return Budget(witness_bound=wb, depth_bound=args.depth_bound)


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _load_theory(spec: str) -> TheoryDescriptor:
    if spec == "Q":
        return q_theory()
    with open(spec, "r", encoding="utf-8") as fh:
        return parse_theory(fh.read())


def _formula_record(f, registry, extra: Optional[dict] = None) -> dict:
    lvl = classify(f, registry)
    rec = {
        "schema_version": SCHEMA_VERSION,
        "formula": format_formula(f),
        "level_kind": lvl.kind,
        "level_index": lvl.index,
        "is_delta": is_delta(f, registry),
    }
    if extra:
        rec.update(extra)
    return rec


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="arithmos",
                                     description="workbench for arithmetic self-reference")
    parser.add_argument("--format", choices=["json", "text"], default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="hierarchy level of a formula")
    p.add_argument("formula")

    p = sub.add_parser("eval", help="budgeted truth value of a sentence")
    p.add_argument("formula")
    p.add_argument("--witness-bound", type=int, default=None)
    p.add_argument("--depth-bound", type=int, default=64)

    p = sub.add_parser("encode", help="code of a formula")
    p.add_argument("formula")

    p = sub.add_parser("decode", help="formula of a code")
    p.add_argument("code")

    p = sub.add_parser("diagonalize", help="fixed point of a one-variable formula")
    p.add_argument("formula")

    for name in ("goedel", "rosser", "craig", "complete", "audit"):
        p = sub.add_parser(name)
        p.add_argument("--theory", required=True)
        if name in ("rosser", "audit"):
            p.add_argument("--n", type=int, required=True)
        if name == "complete":
            p.add_argument("--steps", type=int, default=50)
            p.add_argument("--oracle", choices=["eval", "search"], default="eval")
        if name == "audit":
            p.add_argument("--witness-bound", type=int, default=None)
            p.add_argument("--depth-bound", type=int, default=24)

    p = sub.add_parser("emit", help="emit a named construction")
    p.add_argument("what", choices=["sent-list", "axioms-star", "omega-con-q"])
    p.add_argument("--theory", default="Q")
    p.add_argument("--n", type=int, default=1)

    p = sub.add_parser("prove", help="bounded proof search")
    p.add_argument("goal")
    p.add_argument("--theory", default=None)
    p.add_argument("--depth", type=int, default=12)

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0

    try:
        return _dispatch(args)
    except SyntaxError_ as e:
        print(json.dumps({"error": "parse", "message": str(e)}), file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as e:
        print(json.dumps({"error": "precondition", "message": str(e)}), file=sys.stderr)
        return EXIT_PRECONDITION
    except (ValueError, KeyError) as e:
        print(json.dumps({"error": "invalid", "message": str(e)}), file=sys.stderr)
        return EXIT_PRECONDITION


def _dispatch(args) -> int:
    from .semantics import standard_registry
    registry = standard_registry()

    if args.command == "classify":
        f = parse(args.formula, registry)
        lvl = classify(f, registry)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "level_kind": lvl.kind,
            "level_index": lvl.index,
            "is_delta": is_delta(f, registry),
            "nnf": format_formula(nnf(f)),
        }
        _emit(args, payload, f"{lvl} delta={payload['is_delta']}")
        return EXIT_OK

    if args.command == "eval":
        f = parse(args.formula, registry)
        if free_vars(f):
            raise PreconditionError("evaluation requires a sentence")
        budget = _budget(args)
        ev = Evaluator(budget, registry)
        verdict = ev.eval(f)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "verdict": verdict.value,
            "budget": {"witness_bound": budget.witness_bound,
                       "depth_bound": budget.depth_bound},
        }
        if ev.witness is not None:
            payload["witness"] = ev.witness
        _emit(args, payload, verdict.value)
        return EXIT_OK if verdict is not Verdict.UNKNOWN else EXIT_UNDECIDED

    if args.command == "encode":
        f = parse(args.formula, registry)
        code = coding.encode_formula(f)
        _emit(args, {"schema_version": SCHEMA_VERSION, "code": str(code)}, str(code))
        return EXIT_OK

    if args.command == "decode":
        f = coding.decode_formula(int(args.code), registry)
        if f is None:
            raise PreconditionError(f"{args.code} does not code a formula")
        _emit(args, _formula_record(f, registry), format_formula(f))
        return EXIT_OK

    if args.command == "diagonalize":
        f = parse(args.formula, registry)
        res = fixed_point(f)
        payload = _formula_record(res.gamma, registry, {
            "construction": "fixed-point",
            "codes": {"theta": str(res.theta_code), "gamma": str(res.gamma_code)},
        })
        _emit(args, payload, format_formula(res.gamma))
        return EXIT_OK

    if args.command == "goedel":
        T = _load_theory(args.theory)
        res = godel_sentence(T)
        payload = _formula_record(res.gamma, T.registry, {
            "construction": "goedel",
            "codes": {"theta": str(res.theta_code), "gamma": str(res.gamma_code)},
        })
        _emit(args, payload, format_formula(res.gamma))
        return EXIT_OK

    if args.command == "rosser":
        T = _load_theory(args.theory)
        res, psi, psi_hat = rosser_sentence(T, args.n)
        payload = _formula_record(res.gamma, T.registry, {
            "construction": "rosser",
            "codes": {"theta": str(res.theta_code), "gamma": str(res.gamma_code)},
            "psi": format_formula(psi),
            "psi_hat": format_formula(psi_hat),
        })
        _emit(args, payload, format_formula(res.gamma))
        return EXIT_OK

    if args.command == "craig":
        T = _load_theory(args.theory)
        res = craig_transform(T)
        payload = _formula_record(res.theory.axioms_formula, res.theory.registry, {
            "construction": "craig",
            "mapping": [{"axiom": format_formula(a), "witness": k,
                         "padded": format_formula(p)} for a, k, p in res.mapping],
        })
        _emit(args, payload, format_formula(res.theory.axioms_formula))
        return EXIT_OK

    if args.command == "complete":
        T = _load_theory(args.theory)
        oracle = eval_oracle() if args.oracle == "eval" else search_oracle()
        trace = lindenbaum_complete(T, oracle, steps=args.steps)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "steps": [{"index": s.index, "sentence": format_formula(s.sentence),
                       "decision": s.decision} for s in trace.steps],
            "aborted_at": trace.aborted_at,
        }
        text = "\n".join(f"{s.index}: {s.decision} {format_formula(s.sentence)}"
                         for s in trace.steps)
        _emit(args, payload, text)
        return EXIT_OK if trace.aborted_at is None else EXIT_PRECONDITION

    if args.command == "audit":
        T = _load_theory(args.theory)
        budget = _budget(args)
        report = n_consistency_audit(T, args.n, budget)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "status": report.status,
            "budget": {"witness_bound": budget.witness_bound,
                       "depth_bound": budget.depth_bound},
        }
        if report.violation is not None:
            payload["sentence"] = format_formula(report.violation.sentence)
            payload["instances"] = sorted(report.violation.instance_proofs)
        _emit(args, payload, report.status)
        return EXIT_OK

    if args.command == "emit":
        if args.what == "sent-list":
            f = sent_list_formula()
            extra = {"construction": "sent-list"}
        elif args.what == "omega-con-q":
            f = omega_con_q_formula()
            extra = {"construction": "omega-con-q"}
        else:
            T = _load_theory(args.theory)
            f, con_prime = axioms_star_formula(T, args.n)
            lvl = classify(con_prime, T.registry)
            extra = {"construction": "axioms-star",
                     "con_prime": format_formula(con_prime),
                     "con_prime_level": {"kind": lvl.kind, "index": lvl.index}}
            _emit(args, _formula_record(f, T.registry, extra), format_formula(f))
            return EXIT_OK
        _emit(args, _formula_record(f, registry, extra), format_formula(f))
        return EXIT_OK

    if args.command == "prove":
        goal = parse(args.goal, registry)
        premises = []
        if args.theory:
            T = _load_theory(args.theory)
            premises = list(T.axiom_list or ())
            goal = parse(args.goal, T.registry)
        proof = proofs.search_bounded(premises, goal, args.depth)
        if proof is None:
            print(json.dumps({"schema_version": SCHEMA_VERSION, "found": False}))
            return EXIT_UNDECIDED
        payload = {"schema_version": SCHEMA_VERSION, "found": True,
                   "steps": len(proof.steps)}
        _emit(args, payload, proofs.proof_to_text(proof))
        return EXIT_OK

    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
