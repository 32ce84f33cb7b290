"""Self-referential sentence constructions and definable-theory transforms.

Everything here emits finite syntax whose shape and hierarchy level can be
checked mechanically: diagonal fixed points, the unprovability sentence, the
"every proof of me has a smaller counter-proof" sentence with its proof
obligations, the witness-padding transform that trades an existential axiom
prefix for a universal presentation, the sentence-enumeration and completion
machinery, and the omega-consistency formula.  Independence of the emitted
sentences is out of scope; the artifact checks syntactic templates, levels,
and budgeted semantic laws only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import coding, proofs
from .hierarchy import Level, Pi, Sigma, classify
from .proofs import Builder, ProofObject, check, embed, search_bounded
from .semantics import (
    Budget, DEFAULT_BUDGET, Evaluator, Verdict, eval_term, standard_registry,
)
from .syntax import (
    Add, And, BExists, BForall, Eq, Exists, Forall, Formula, Implies,
    InterpFun, InterpPred, Le, Mul, Not, Num, Or, Registry, Term, Var,
    free_vars, fresh_var, lt, substitute,
)
from .theories import (
    AXIOM_VAR, PreconditionError, TheoryDescriptor, con_sentence,
    conjax_formula, extend_with_pi_truth, prov_formula, q_theory,
    with_extra_axioms,
)


# ---------------------------------------------------------------------------
# Diagonal fixed points

@dataclass(frozen=True)
class FixedPointResult:
    theta: Formula
    theta_code: int
    gamma: Formula
    gamma_code: int


def fixed_point(phi: Formula) -> FixedPointResult:
    """Diagonalize a one-free-variable formula through the self-substitution
    function: theta(x) = phi(SSub(x, x)) and gamma = theta(code-of-theta),
    so the self-substitution term inside gamma evaluates to gamma's code."""
    fv = sorted(free_vars(phi))
    if len(fv) != 1:
        raise PreconditionError(f"diagonalization needs exactly one free variable, got {fv}")
    v = fv[0]
    theta = substitute(phi, v, InterpFun("SSub", (Var(v), Var(v))))
    theta_code = coding.encode_formula(theta)
    gamma = substitute(theta, v, Num(theta_code))
    gamma_code = coding.encode_formula(gamma)
    return FixedPointResult(theta, theta_code, gamma, gamma_code)


def godel_sentence(T: TheoryDescriptor) -> FixedPointResult:
    """The fixed point of unprovability in T."""
    return fixed_point(Not(prov_formula(T)))


# ---------------------------------------------------------------------------
# The Rosser-style sentence

def _pair_term(a: Term, b: Term) -> Term:
    # The quadratic pairing written out in the arithmetic signature.
    return Add(Mul(Add(a, b), Add(a, b)), a)


def _rosser_psi(T: TheoryDescriptor, n: int, uvar: str, zvar: str,
                target: Term) -> Formula:
    """One disjunct-free search formula: below u sits a pair of a true
    universal-level sentence and an axiom conjunction whose conjunction
    carries a proof (coded z) of the target."""
    x, y = Var("x"), Var("y")
    body = And(
        And(
            And(
                Eq(_pair_term(x, y), Var(uvar)),
                InterpPred(f"TruePi[{n}]", (x,)),
            ),
            T.conjax_atom(y),
        ),
        InterpPred("ProofChk", (Var(zvar), InterpFun("ImpC", (InterpFun("AndC", (x, y)), target)))),
    )
    return BExists("x", Var(uvar), BExists("y", Var(uvar), body))


def rosser_sentence(T: TheoryDescriptor, n: int) -> tuple[FixedPointResult, Formula, Formula]:
    """The sentence saying every proof of it (relative to true universal
    sentences plus axioms) is preceded by a smaller proof of its negation.

    Returns the fixed point together with the two instantiated search
    formulas (for the sentence and for its negation), each with free
    variables u and z.
    """
    if not T.declared_level <= Pi(n):
        raise PreconditionError(
            f"axioms level {T.declared_level} exceeds Pi({n})")
    g = "g"
    psi = _rosser_psi(T, n, "u", "z", Var(g))
    psi_hat = _rosser_psi(T, n, "u", "z", InterpFun("NegC", (Var(g),)))
    inner = substitute(substitute(psi_hat, "u", Var("u1")), "z", Var("z1"))
    phi = Forall("u", Forall("z", Implies(
        psi,
        BExists("u1", Var("u"), BExists("z1", Var("z"), inner)),
    )))
    result = fixed_point(phi)
    diag = InterpFun("SSub", (Num(result.theta_code), Num(result.theta_code)))
    psi_final = _rosser_psi(T, n, "u", "z", diag)
    psi_hat_final = _rosser_psi(T, n, "u", "z", InterpFun("NegC", (diag,)))
    return result, psi_final, psi_hat_final


def rosser_obligations(T: TheoryDescriptor, n: int,
                       rosser: tuple[FixedPointResult, Formula, Formula]
                       ) -> list[tuple[Formula, str]]:
    """The three schematic obligations of the independence argument, with the
    cutoff parameters left as the free variables k and m (and i for the
    per-index schema)."""
    _, psi, psi_hat = rosser
    k, m = Var("k"), Var("m")
    inner = substitute(substitute(psi_hat, "u", Var("u1")), "z", Var("z1"))
    tail = Forall("u", Forall("z", Implies(
        And(Le(k, Var("u")), Le(m, Var("z"))),
        BExists("u1", Var("u"), BExists("z1", Var("z"), inner)),
    )))
    per_index = Forall("z", Not(substitute(psi, "u", Var("i"))))
    x, y, v, w = Var("x"), Var("y"), Var("v"), Var("w")
    dominance = Forall("x", Forall("y", Forall("v", Forall("w", Implies(
        InterpPred("ProofChk", (w, InterpFun("ImpC", (InterpFun("AndC", (x, y)), v)))),
        lt(_pair_term(x, y), w),
    )))))
    return [
        (tail, "tail-witness-cover"),
        (per_index, "per-index-refutation-schema"),
        (dominance, "proof-codes-dominate-pairs"),
    ]


# ---------------------------------------------------------------------------
# Witness-padding transform (existential prefix -> universal presentation)

@dataclass(frozen=True)
class CraigResult:
    theory: TheoryDescriptor
    witness_core: Formula  # theta'(y, z): free vars are the code and the cap
    mapping: tuple[tuple[Formula, int, Formula], ...]  # (axiom, witness, padded axiom)


def craig_transform(T: TheoryDescriptor, budget: Budget = DEFAULT_BUDGET) -> CraigResult:
    """Rewrite an existentially prefixed axiom predicate into a bounded one
    by capping the witness block and padding each axiom with a size-marking
    tautology; the new presentation sits one universal level below."""
    F = T.axioms_formula
    lvl = classify(F, T.registry)
    if lvl.kind != "Sigma" or lvl.index < 1 or not isinstance(F, Exists):
        raise PreconditionError(f"axioms formula must be an existentially prefixed "
                                f"Sigma(n+1) formula, got {lvl}")
    n = lvl.index - 1
    ws: list[str] = []
    core = F
    while isinstance(core, Exists):
        ws.append(core.var)
        core = core.body

    taken = free_vars(core) | set(ws) | {AXIOM_VAR}
    yn = fresh_var("y", taken)
    zn = fresh_var("z", taken | {yn})

    # theta'(code, cap): the witness block bounded by the cap variable.
    shifted = substitute(core, AXIOM_VAR, Var(yn))
    for w in reversed(ws):
        shifted = BExists(w, Var(zn), shifted)
    witness_core = shifted

    padded = Eq(Var(AXIOM_VAR),
                InterpFun("AndC", (Var(yn), InterpFun("ReflC", (Var(zn),)))))
    new_formula = BExists(yn, Var(AXIOM_VAR),
                          BExists(zn, Var(AXIOM_VAR), And(witness_core, padded)))

    out = TheoryDescriptor(
        name=f"{T.name}'",
        axioms_formula=new_formula,
        declared_level=classify(new_formula, T.registry),
        registry=T.registry.copy(),
    )

    mapping: list[tuple[Formula, int, Formula]] = []
    if T.axiom_list is not None:
        ev = Evaluator(budget, T.registry)
        for ax in T.axiom_list:
            code = coding.encode_formula(ax)
            for k in range(min(budget.witness_bound, 64) + 1):
                inst = substitute(substitute(witness_core, yn, Num(code)), zn, Num(k))
                if ev.eval_nested(inst) is Verdict.TRUE:
                    mapping.append((ax, k, And(ax, Eq(Num(k), Num(k)))))
                    break
    return CraigResult(out, witness_core, tuple(mapping))


# ---------------------------------------------------------------------------
# Sentence enumeration and completion

def sent_list_formula() -> Formula:
    """x is the u-th enumerated sentence: u itself when u codes a sentence,
    the provable unit otherwise."""
    x, u = Var("x"), Var("u")
    return Or(
        And(InterpPred("Sent", (u,)), Eq(x, u)),
        And(Not(InterpPred("Sent", (u,))), Eq(x, Num(coding.code_zero_eq_zero()))),
    )


def nth_sentence(u: int, registry: Optional[Registry] = None) -> Formula:
    f = coding.decode_formula(u, registry)
    if f is not None and not free_vars(f):
        return f
    return Eq(Num(0), Num(0))


@dataclass(frozen=True)
class TraceStep:
    index: int
    sentence: Formula
    decision: str  # "added" | "negated"
    oracle_ok: bool


@dataclass
class CompletionTrace:
    steps: list[TraceStep]
    final_theory: Optional[TheoryDescriptor]
    aborted_at: Optional[int] = None

    def decided(self) -> list[Formula]:
        return [s.sentence if s.decision == "added" else Not(s.sentence)
                for s in self.steps]


def eval_oracle(budget: Budget = DEFAULT_BUDGET) -> Callable:
    """Consistency stand-in via truth: accept unless the sentence evaluates
    false at the budget; the resulting trace follows a fragment of the true
    theory of the naturals."""
    def oracle(sentence: Formula, current: list[Formula], T: TheoryDescriptor) -> bool:
        return Evaluator(budget, T.registry).eval(sentence) is not Verdict.FALSE
    return oracle


def search_oracle(depth: int = 8) -> Callable:
    """Bounded-refutation hook: accept unless adding the sentence lets the
    bounded searcher derive the false equation."""
    absurd = Not(Eq(Num(0), Num(0)))

    def oracle(sentence: Formula, current: list[Formula], T: TheoryDescriptor) -> bool:
        premises = list(T.axiom_list or ()) + current + [sentence]
        return search_bounded(premises, absurd, depth) is None
    return oracle


def lindenbaum_complete(S: TheoryDescriptor, oracle: Optional[Callable] = None,
                        steps: int = 50) -> CompletionTrace:
    """Run the completion rule for ``steps`` enumeration indices: at index u
    take the u-th enumerated sentence and add it if the oracle reports the
    extension consistent, else add its negation."""
    oracle = oracle or eval_oracle()
    trace: list[TraceStep] = []
    current: list[Formula] = []
    for u in range(steps):
        sentence = nth_sentence(u, S.registry)
        try:
            ok = bool(oracle(sentence, current, S))
        except Exception:
            return CompletionTrace(trace, None, aborted_at=u)
        decision = "added" if ok else "negated"
        current.append(sentence if ok else Not(sentence))
        trace.append(TraceStep(u, sentence, decision, ok))
    final = with_extra_axioms(S, current, f"{S.name}*")
    return CompletionTrace(trace, final)


def axioms_star_formula(S: TheoryDescriptor, n: int) -> tuple[Formula, Formula]:
    """The axiom predicate of the completed theory, as one existential over a
    decision-sequence code, together with the step-consistency formula it
    quantifies over (free variables y, u, z)."""
    qbar = Num(proofs.q_conj_code())
    bot = Num(coding.code_zero_neq_zero())
    y, u, z = Var("y"), Var("u"), Var("z")
    prefix = InterpFun("SeqPref", (y, u))

    def proof_target(*parts: Term) -> Term:
        acc = parts[0]
        for p in parts[1:]:
            acc = InterpFun("AndC", (acc, p))
        return InterpFun("ImpC", (acc, bot))

    if n == 0:
        con_prime = Forall("v", Forall("w", Implies(
            InterpPred("ConjSeq", (Var("v"), prefix)),
            Not(InterpPred("ProofChk", (Var("w"), proof_target(qbar, Var("v"), z)))),
        )))
    else:
        con_prime = Forall("t", Forall("v", Forall("w", Implies(
            And(InterpPred(f"TruePi[{n}]", (Var("t"),)),
                InterpPred("ConjSeq", (Var("v"), prefix))),
            Not(InterpPred("ProofChk", (Var("w"), proof_target(qbar, Var("t"), Var("v"), z)))),
        ))))

    length = InterpFun("SeqLen", (y,))
    last = InterpFun("SeqAt", (y, InterpFun("Pred", (length,))))
    sent_list = InterpPred("SentList", (z, u))
    decisions = BForall("u", length, Implies(lt(u, length), BForall("z", y, And(
        Implies(And(sent_list, con_prime), Eq(InterpFun("SeqAt", (y, u)), z)),
        Implies(And(sent_list, Not(con_prime)),
                Eq(InterpFun("SeqAt", (y, u)), InterpFun("NegC", (z,)))),
    ))))
    all_sentences = BForall("u", length, Implies(
        lt(u, length), InterpPred("Sent", (InterpFun("SeqAt", (y, u)),))))
    ax_star = Exists("y", And(
        And(And(InterpPred("Seq", (y,)), Eq(last, Var(AXIOM_VAR))), all_sentences),
        decisions,
    ))
    return ax_star, con_prime


def omega_con_q_formula() -> Formula:
    """Omega-consistency of the finite base theory together with the sentence
    coded by the free variable x, quantifying over formula codes."""
    qbar = Num(proofs.q_conj_code())
    x, c, z, v = Var(AXIOM_VAR), Var("c"), Var("z"), Var("v")

    def target(code_term: Term) -> Term:
        return InterpFun("ImpC", (InterpFun("AndC", (qbar, x)), code_term))

    provable_existential = Exists("z", InterpPred(
        "ProofChk", (z, target(InterpFun("ExC", (c,))))))
    some_instance_unrefuted = Exists("v", Forall("z", Not(InterpPred(
        "ProofChk", (z, target(InterpFun("NegC", (InterpFun("SSub", (c, v)),))))))))
    return Forall("c", Implies(provable_existential, some_instance_unrefuted))


# ---------------------------------------------------------------------------
# Consistency-shape audits

@dataclass(frozen=True)
class Violation:
    sentence: Formula
    existential_proof: ProofObject
    instance_proofs: dict[int, ProofObject]


@dataclass(frozen=True)
class AuditReport:
    status: str  # "violation" | "no-violation-found"
    budget: Budget
    violation: Optional[Violation] = None


def n_consistency_audit(T: TheoryDescriptor, n: int,
                        budget: Budget = DEFAULT_BUDGET) -> AuditReport:
    """Search for a finitely witnessed failure: an existential axiom at the
    n-th existential level whose every numeral instance up to the witness
    bound is refutable from T.  Reports a replayable violation or exhaustion;
    it never certifies consistency."""
    if n < 1:
        raise PreconditionError("the audit is defined for n >= 1")
    premises = list(T.axiom_list or ())
    depth = budget.depth_bound
    for axiom in premises:
        if not isinstance(axiom, Exists):
            continue
        body = axiom.body
        try:
            if not classify(body, T.registry) <= Pi(n - 1):
                continue
        except KeyError:
            continue
        if not classify(axiom, T.registry) <= Sigma(n):
            continue
        ex_proof = search_bounded(premises, axiom, depth)
        if ex_proof is None:
            continue
        instances: dict[int, ProofObject] = {}
        refuted_all = True
        for k in range(budget.witness_bound + 1):
            goal = Not(substitute(body, axiom.var, Num(k)))
            pr = search_bounded(premises, goal, depth)
            if pr is None:
                refuted_all = False
                break
            instances[k] = pr
        if refuted_all:
            return AuditReport("violation", budget,
                               Violation(axiom, ex_proof, instances))
    return AuditReport("no-violation-found", budget)


# ---------------------------------------------------------------------------
# Completeness lifting

def sigma_lift_witness(T: TheoryDescriptor, sigma: Formula, witnesses: list[int],
                       budget: Budget = DEFAULT_BUDGET) -> Optional[ProofObject]:
    """Assemble a checked proof of an existential sentence from a bounded
    proof of one numeral instance, by existential introduction per witness."""
    vars_: list[str] = []
    body = sigma
    for _ in witnesses:
        if not isinstance(body, Exists):
            raise PreconditionError("witness count exceeds the existential prefix")
        vars_.append(body.var)
        body = body.body
    instance = body
    for v, w in zip(vars_, witnesses):
        instance = substitute(instance, v, Num(w))
    base = search_bounded(list(T.axiom_list or ()), instance, budget)
    if base is None:
        return None
    if not witnesses:
        return base
    bld = Builder()
    idx = embed(bld, base)
    for j in range(len(witnesses), 0, -1):
        stripped = _strip_exists(sigma, j)  # free in vars_[0..j-1]
        h = _subst_many(stripped, vars_[: j - 1], witnesses[: j - 1])
        target = Exists(vars_[j - 1], h)
        ax = bld.axiom("EI", Implies(bld.formula(idx), target))
        idx = bld.mp(idx, ax)
    proof = bld.build()
    return proof if check(proof, sigma) else None


def _strip_exists(sigma: Formula, j: int) -> Formula:
    out = sigma
    for _ in range(j):
        out = out.body
    return out


def _subst_many(f: Formula, vs: list[str], ws: list[int]) -> Formula:
    for v, w in zip(vs, ws):
        f = substitute(f, v, Num(w))
    return f
