"""Definable-theory descriptors and the predicate builders over them.

A theory is either a finite list of axiom sentences or a one-free-variable
formula over codes.  Finite lists synthesize a bounded-level disjunction of
numeral equalities.  Each descriptor owns a registry (a copy of the standard
one) carrying two per-theory interpreted predicates: ``Ax[name]`` for axiom
membership and ``ConjAx[name]`` for "codes a conjunction of axioms", the
latter with a witness suggester over small axiom conjunctions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import coding, proofs
from .hierarchy import Level, Pi, Sigma, classify, dual, join
from .semantics import Budget, DEFAULT_BUDGET, Evaluator, Verdict, standard_registry
from .syntax import (
    And, BExists, BForall, Eq, Exists, Forall, Formula, Implies, InterpFun,
    InterpPred, Not, Num, Or, Registry, SymbolInfo, Var, free_vars, lt,
    parse, substitute,
)


class PreconditionError(ValueError):
    pass


AXIOM_VAR = "x"


def _finite_axioms_formula(codes: list[int]) -> Formula:
    """Disjunction of numeral equalities x = code_i; bounded level."""
    x = Var(AXIOM_VAR)
    if not codes:
        return Not(Eq(Num(0), Num(0)))  # empty theory: nothing is an axiom
    out: Formula = Eq(x, Num(codes[0]))
    for c in codes[1:]:
        out = Or(out, Eq(x, Num(c)))
    return out


@dataclass
class TheoryDescriptor:
    """A definable theory: an axiom predicate, its declared level, and hooks."""

    name: str
    axiom_list: Optional[tuple[Formula, ...]] = None
    axioms_formula: Optional[Formula] = None
    declared_level: Level = field(default_factory=lambda: Sigma(0))
    registry: Registry = field(default_factory=standard_registry)
    base: Optional["TheoryDescriptor"] = None  # for extensions

    def __post_init__(self):
        if self.axiom_list is None and self.axioms_formula is None:
            raise ValueError("a theory needs an axiom list or an axioms formula")
        if self.axiom_list is not None and self.axioms_formula is None:
            codes = [coding.encode_formula(a) for a in self.axiom_list]
            self.axioms_formula = _finite_axioms_formula(codes)
        fv = free_vars(self.axioms_formula)
        if len(fv) > 1:
            raise ValueError("axioms formula must have at most one free variable")
        if fv and fv != {AXIOM_VAR}:
            only = fv.pop()
            self.axioms_formula = substitute(self.axioms_formula, only, Var(AXIOM_VAR))
        self._register()

    # -- registry wiring -----------------------------------------------------

    def _register(self):
        reg = self.registry
        ax_name = f"Ax[{self.name}]"
        conj_name = f"ConjAx[{self.name}]"
        if reg.lookup(ax_name) is not None:
            return

        def ax_hook(args, ev, self=self):
            return self.membership(args[0], ev)

        def ax_suggest(pos, known, ev, self=self):
            return self.axiom_codes() if pos == 0 else []

        def conj_hook(args, ev, self=self):
            return self.conj_membership(args[0], ev)

        def conj_suggest(pos, known, ev, self=self):
            return self.conj_candidates() if pos == 0 else []

        reg.register(SymbolInfo(ax_name, "predicate", 1, level=self.declared_level,
                                pred=ax_hook, suggest=ax_suggest))
        reg.register(SymbolInfo(conj_name, "predicate", 1, level=self.conjax_level(),
                                pred=conj_hook, suggest=conj_suggest))

    def axioms_atom(self, t) -> Formula:
        return InterpPred(f"Ax[{self.name}]", (t,))

    def conjax_atom(self, t) -> Formula:
        return InterpPred(f"ConjAx[{self.name}]", (t,))

    def conjax_level(self) -> Level:
        """Level bookkeeping for the conjunction-of-axioms predicate: the
        axioms level itself (bounded stays bounded, the sequence witness is
        bounded by the conjunction code)."""
        return self.declared_level

    # -- semantics -----------------------------------------------------------

    def axiom_codes(self) -> list[int]:
        if self.axiom_list is None:
            return []
        return [coding.encode_formula(a) for a in self.axiom_list]

    def membership(self, code: int, ev: Optional[Evaluator] = None) -> Verdict:
        if self.axiom_list is not None and self.base is None:
            return Verdict.TRUE if code in self.axiom_codes() else Verdict.FALSE
        ev = ev or Evaluator(registry=self.registry)
        return ev.eval_nested(substitute(self.axioms_formula, AXIOM_VAR, Num(code)))

    def conj_membership(self, code: int, ev: Optional[Evaluator] = None) -> Verdict:
        """Does ``code`` fold from a sequence of sentences that are all axioms?"""
        best = Verdict.FALSE
        for members in coding.conj_member_lists(code):
            verdicts = [self.membership(c, ev) for c in members]
            if all(v is Verdict.TRUE for v in verdicts):
                return Verdict.TRUE
            if any(v is Verdict.UNKNOWN for v in verdicts) and not any(
                    v is Verdict.FALSE for v in verdicts):
                best = Verdict.UNKNOWN
        return best

    def conj_candidates(self) -> list[int]:
        """Codes of small axiom conjunctions, for witness suggestion."""
        codes = self.axiom_codes()
        if not codes:
            return []
        out = list(codes)
        acc = codes[0]
        for c in codes[1:]:
            acc = coding.bin_code("and", acc, c)
            out.append(acc)
        if len(codes) >= 2:
            for i in range(len(codes)):
                for j in range(len(codes)):
                    if i != j:
                        out.append(coding.bin_code("and", codes[i], codes[j]))
        return sorted(set(out))

    def evaluator(self, budget: Budget = DEFAULT_BUDGET) -> Evaluator:
        return Evaluator(budget, self.registry)


# ---------------------------------------------------------------------------
# Builders

def q_theory(registry: Optional[Registry] = None) -> TheoryDescriptor:
    return TheoryDescriptor(
        name="Q",
        axiom_list=tuple(proofs.q_axioms()),
        declared_level=Sigma(0),
        registry=registry if registry is not None else standard_registry(),
    )


def conjax_formula(T: TheoryDescriptor) -> Formula:
    """The expanded one-free-variable formula: x codes a conjunction whose
    conjuncts each satisfy the axioms predicate.  The sequence witness is
    bounded by a code-level cap, so the level of the axioms formula is
    preserved."""
    x, m, i = Var("x"), Var("m"), Var("i")
    length = InterpFun("SeqLen", (m,))
    member = InterpFun("SeqAt", (m, i))
    per_item = Implies(lt(i, length), substitute(T.axioms_formula, AXIOM_VAR, member))
    body = And(And(InterpPred("Seq", (m,)), InterpPred("ConjSeq", (x, m))),
               BForall("i", length, per_item))
    return BExists("m", InterpFun("SeqCap", (x,)), body)


def prov_formula(T: TheoryDescriptor) -> Formula:
    """Provability predicate: some conjunction of axioms implies x."""
    x, y, z = Var("x"), Var("y"), Var("z")
    return Exists("y", Exists("z", And(
        T.conjax_atom(z),
        InterpPred("ProofChk", (y, InterpFun("ImpC", (z, x)))),
    )))


def prov_level(T: TheoryDescriptor) -> Level:
    return classify(prov_formula(T), T.registry)


def con_sentence(T: TheoryDescriptor) -> Formula:
    """Consistency sentence: the negation of provability of 0 != 0."""
    bad = coding.code_zero_neq_zero()
    return Not(substitute(prov_formula(T), "x", Num(bad)))


def extend_with_pi_truth(T: TheoryDescriptor, n: int) -> TheoryDescriptor:
    """The theory plus all true sentences at universal level n; at n = 0 the
    base theory absorbs the bounded truths and T is returned unchanged."""
    if n == 0:
        return T
    formula = Or(T.axioms_formula, InterpPred(f"TruePi[{n}]", (Var(AXIOM_VAR),)))
    return TheoryDescriptor(
        name=f"{T.name}+PiTrue{n}",
        axioms_formula=formula,
        declared_level=join(T.declared_level, Pi(n)),
        registry=T.registry.copy(),
        base=T,
    )


def with_extra_axioms(T: TheoryDescriptor, extra: list[Formula], name: str) -> TheoryDescriptor:
    """Finite extension used by completion traces."""
    if T.axiom_list is not None and T.base is None:
        return TheoryDescriptor(
            name=name,
            axiom_list=tuple(T.axiom_list) + tuple(extra),
            declared_level=T.declared_level,
            registry=T.registry.copy(),
        )
    codes = [coding.encode_formula(f) for f in extra]
    formula = T.axioms_formula
    for c in codes:
        formula = Or(formula, Eq(Var(AXIOM_VAR), Num(c)))
    desc = TheoryDescriptor(
        name=name,
        axioms_formula=formula,
        declared_level=join(T.declared_level, Sigma(0)),
        registry=T.registry.copy(),
        base=T,
    )
    return desc


# ---------------------------------------------------------------------------
# Theory definition files

def parse_theory(text: str, registry: Optional[Registry] = None) -> TheoryDescriptor:
    """Parse the line-oriented theory format::

        theory NAME
        level Sigma 1          # optional; validated against the formula
        axiom FORMULA          # repeatable, or:
        axioms-formula FORMULA
    """
    reg = registry if registry is not None else standard_registry()
    name = None
    level: Optional[Level] = None
    axioms: list[Formula] = []
    formula: Optional[Formula] = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "theory":
            name = rest
        elif key == "level":
            kind, idx = rest.split()
            level = Level(kind, int(idx))
        elif key == "axiom":
            axioms.append(parse(rest, reg))
        elif key == "axioms-formula":
            formula = parse(rest, reg)
        else:
            raise ValueError(f"unknown directive {key!r}")
    if name is None:
        raise ValueError("theory file must name the theory")
    if formula is not None and axioms:
        raise ValueError("give either axiom lines or an axioms-formula, not both")
    if formula is not None:
        computed = classify(formula, reg)
        if level is not None and level != computed:
            raise ValueError(f"declared level {level} but the formula classifies {computed}")
        return TheoryDescriptor(name=name, axioms_formula=formula,
                                declared_level=computed, registry=reg)
    for a in axioms:
        if free_vars(a):
            raise ValueError(f"axiom is not a sentence: {a}")
    return TheoryDescriptor(name=name, axiom_list=tuple(axioms),
                            declared_level=level or Sigma(0), registry=reg)
