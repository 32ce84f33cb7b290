"""Hilbert-style proof objects, the proof checker, and bounded proof search.

A proof is a list of steps: logical axiom scheme instances, premises, modus
ponens, and generalization.  ``check`` is a total validator and the only
arbiter of proofhood; everything the searcher or the tactics emit has to pass
it.  ``search_bounded`` is deliberately incomplete: a missing result means
"not found within budget", never unprovability.

The scheme table is a standard classical Hilbert system (K, S, contraposition)
extended with derivable convenience schemes for the connectives, equality and
congruence schemes for the arithmetic signature, quantifier instantiation and
distribution, and introduction/elimination forms for the bounded quantifiers.
A richer primitive basis keeps desk-scale proofs short without changing the
set of derivable sentences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from . import coding
from .syntax import (
    Add, And, BExists, BForall, Eq, Exists, Forall, Formula, Iff, Implies,
    InterpFun, InterpPred, Le, Mul, Not, Num, Or, Registry, Succ, Term, Var,
    free_vars, parse, substitute, succ,
)


# ---------------------------------------------------------------------------
# Steps and proof objects

@dataclass(frozen=True)
class LogicalAxiom:
    scheme: str
    formula: Formula


@dataclass(frozen=True)
class Premise:
    formula: Formula


@dataclass(frozen=True)
class ModusPonens:
    antecedent: int  # step index proving A
    implication: int  # step index proving A -> B
    formula: Formula  # B


@dataclass(frozen=True)
class Generalization:
    source: int
    var: str
    formula: Formula


Step = Union[LogicalAxiom, Premise, ModusPonens, Generalization]


@dataclass(frozen=True)
class ProofObject:
    steps: tuple[Step, ...]

    @property
    def conclusion(self) -> Optional[Formula]:
        return self.steps[-1].formula if self.steps else None

    def premises(self) -> list[Formula]:
        return [s.formula for s in self.steps if isinstance(s, Premise)]


# ---------------------------------------------------------------------------
# Pattern matching for axiom schemes

@dataclass(frozen=True)
class MetaF:
    name: str


@dataclass(frozen=True)
class MetaT:
    name: str


@dataclass(frozen=True)
class MetaV:
    name: str


def _match_term(pat, t: Term, b: dict) -> bool:
    if isinstance(pat, MetaT):
        if pat.name in b:
            return b[pat.name] == t
        b[pat.name] = t
        return True
    if isinstance(pat, Succ):
        # A numeral with a positive value is a successor application.
        if isinstance(t, Num) and t.value >= 1:
            return _match_term(pat.arg, Num(t.value - 1), b)
        if isinstance(t, Succ):
            return _match_term(pat.arg, t.arg, b)
        return False
    if isinstance(pat, Num):
        return isinstance(t, Num) and pat.value == t.value
    if isinstance(pat, Var):
        return isinstance(t, Var) and pat.name == t.name
    if isinstance(pat, (Add, Mul)):
        return (type(pat) is type(t)
                and _match_term(pat.left, t.left, b)
                and _match_term(pat.right, t.right, b))
    if isinstance(pat, InterpFun):
        return (isinstance(t, InterpFun) and pat.symbol == t.symbol
                and len(pat.args) == len(t.args)
                and all(_match_term(p, a, b) for p, a in zip(pat.args, t.args)))
    return False


def _match(pat, f: Formula, b: dict) -> bool:
    if isinstance(pat, MetaF):
        if pat.name in b:
            return b[pat.name] == f
        b[pat.name] = f
        return True
    if isinstance(pat, (Eq, Le)):
        return (type(pat) is type(f)
                and _match_term(pat.left, f.left, b)
                and _match_term(pat.right, f.right, b))
    if isinstance(pat, Not):
        return isinstance(f, Not) and _match(pat.body, f.body, b)
    if isinstance(pat, (And, Or, Implies, Iff)):
        return (type(pat) is type(f)
                and _match(pat.left, f.left, b)
                and _match(pat.right, f.right, b))
    if isinstance(pat, (Exists, Forall)):
        if type(pat) is not type(f):
            return False
        v = pat.var
        if isinstance(v, MetaV):
            if v.name in b:
                if b[v.name] != f.var:
                    return False
            else:
                b[v.name] = f.var
            return _match(pat.body, f.body, b)
        return v == f.var and _match(pat.body, f.body, b)
    return False


def _mkq(cls, v, body):
    # Pattern-level quantifier with a metavariable binder; bypasses the
    # dataclass constructor so the binder slot can hold a MetaV.
    obj = object.__new__(cls)
    object.__setattr__(obj, "var", v)
    object.__setattr__(obj, "body", body)
    return obj


A, B, C = MetaF("A"), MetaF("B"), MetaF("C")
s_, t_, u_ = MetaT("s"), MetaT("t"), MetaT("u")

SCHEMES: dict[str, Formula] = {
    "K": Implies(A, Implies(B, A)),
    "S": Implies(Implies(A, Implies(B, C)),
                 Implies(Implies(A, B), Implies(A, C))),
    "CP": Implies(Implies(Not(A), Not(B)), Implies(B, A)),
    "CP2": Implies(Implies(A, B), Implies(Not(B), Not(A))),
    "DNE": Implies(Not(Not(A)), A),
    "DNI": Implies(A, Not(Not(A))),
    "EFQ": Implies(Not(A), Implies(A, B)),
    "HS": Implies(Implies(A, B), Implies(Implies(B, C), Implies(A, C))),
    "NI": Implies(Implies(A, B), Implies(Implies(A, Not(B)), Not(A))),
    "ANDI": Implies(A, Implies(B, And(A, B))),
    "ANDE1": Implies(And(A, B), A),
    "ANDE2": Implies(And(A, B), B),
    "ORI1": Implies(A, Or(A, B)),
    "ORI2": Implies(B, Or(A, B)),
    "ORE": Implies(Implies(A, C), Implies(Implies(B, C), Implies(Or(A, B), C))),
    "IFFI": Implies(Implies(A, B), Implies(Implies(B, A), Iff(A, B))),
    "IFFE1": Implies(Iff(A, B), Implies(A, B)),
    "IFFE2": Implies(Iff(A, B), Implies(B, A)),
    "REFL": Eq(s_, s_),
    "SYM": Implies(Eq(s_, t_), Eq(t_, s_)),
    "TRANS": Implies(Eq(s_, t_), Implies(Eq(t_, u_), Eq(s_, u_))),
    "CONGS": Implies(Eq(s_, t_), Eq(Succ(s_), Succ(t_))),
    "CONGAL": Implies(Eq(s_, t_), Eq(Add(s_, u_), Add(t_, u_))),
    "CONGAR": Implies(Eq(s_, t_), Eq(Add(u_, s_), Add(u_, t_))),
    "CONGML": Implies(Eq(s_, t_), Eq(Mul(s_, u_), Mul(t_, u_))),
    "CONGMR": Implies(Eq(s_, t_), Eq(Mul(u_, s_), Mul(u_, t_))),
    "CONGLE1": Implies(Eq(s_, t_), Implies(Le(s_, u_), Le(t_, u_))),
    "CONGLE2": Implies(Eq(s_, t_), Implies(Le(u_, s_), Le(u_, t_))),
    "UD": Implies(_mkq(Forall, MetaV("x"), Implies(A, B)),
                  Implies(_mkq(Forall, MetaV("x"), A), _mkq(Forall, MetaV("x"), B))),
}


def _find_subst(body: Formula, var: str, instance: Formula) -> Optional[Term]:
    """A term t with substitute(body, var, t) == instance, if one exists."""
    candidates: list[Term] = []

    def walk_t(p: Term, q: Term) -> bool:
        if isinstance(p, Var) and p.name == var:
            candidates.append(q)
            return True
        if isinstance(p, Num):
            return p == q
        if isinstance(p, Succ):
            if isinstance(q, Num) and q.value >= 1:
                return walk_t(p.arg, Num(q.value - 1))
            return isinstance(q, Succ) and walk_t(p.arg, q.arg)
        if isinstance(p, Var):
            return p == q
        if isinstance(p, (Add, Mul)):
            return type(p) is type(q) and walk_t(p.left, q.left) and walk_t(p.right, q.right)
        if isinstance(p, InterpFun):
            return (isinstance(q, InterpFun) and p.symbol == q.symbol
                    and len(p.args) == len(q.args)
                    and all(walk_t(a, c) for a, c in zip(p.args, q.args)))
        return False

    def walk(p: Formula, q: Formula) -> bool:
        if isinstance(p, (Eq, Le)):
            return type(p) is type(q) and walk_t(p.left, q.left) and walk_t(p.right, q.right)
        if isinstance(p, InterpPred):
            return (isinstance(q, InterpPred) and p.symbol == q.symbol
                    and len(p.args) == len(q.args)
                    and all(walk_t(a, c) for a, c in zip(p.args, q.args)))
        if isinstance(p, Not):
            return isinstance(q, Not) and walk(p.body, q.body)
        if isinstance(p, (And, Or, Implies, Iff)):
            return type(p) is type(q) and walk(p.left, q.left) and walk(p.right, q.right)
        if isinstance(p, (Exists, Forall)):
            if type(p) is not type(q) or p.var != q.var:
                return False
            if p.var == var:
                return p.body == q.body
            return walk(p.body, q.body)
        if isinstance(p, (BExists, BForall)):
            if type(p) is not type(q) or p.var != q.var:
                return False
            if not walk_t(p.bound, q.bound):
                return False
            if p.var == var:
                return p.body == q.body
            return walk(p.body, q.body)
        return False

    if not walk(body, instance):
        return None
    terms = candidates or [Num(0)]
    t0 = terms[0]
    if any(t != t0 for t in terms[1:]):
        return None
    if substitute(body, var, t0) != instance:
        return None
    return t0


def _check_ui(f: Formula) -> bool:
    return (isinstance(f, Implies) and isinstance(f.left, Forall)
            and _find_subst(f.left.body, f.left.var, f.right) is not None)


def _check_ei(f: Formula) -> bool:
    return (isinstance(f, Implies) and isinstance(f.right, Exists)
            and _find_subst(f.right.body, f.right.var, f.left) is not None)


def _check_vac(f: Formula) -> bool:
    return (isinstance(f, Implies) and isinstance(f.right, Forall)
            and f.right.body == f.left and f.right.var not in free_vars(f.left))


def _check_ee(f: Formula) -> bool:
    # (A x. (P -> Q)) -> ((E x. P) -> Q), x not free in Q
    if not (isinstance(f, Implies) and isinstance(f.left, Forall)
            and isinstance(f.left.body, Implies) and isinstance(f.right, Implies)
            and isinstance(f.right.left, Exists)):
        return False
    x = f.left.var
    p, q = f.left.body.left, f.left.body.right
    return (f.right.left.var == x and f.right.left.body == p
            and f.right.right == q and x not in free_vars(q))


def _check_bexi(f: Formula) -> bool:
    # P[x:=s] -> (s <= b -> E x <= b. P)
    if not (isinstance(f, Implies) and isinstance(f.right, Implies)
            and isinstance(f.right.left, Le) and isinstance(f.right.right, BExists)):
        return False
    be = f.right.right
    s = f.right.left.left
    if f.right.left.right != be.bound:
        return False
    t = _find_subst(be.body, be.var, f.left)
    return t is not None and t == s


def _check_bexi_top(f: Formula) -> bool:
    # P[x:=b] -> E x <= b. P  (the witness is the bound itself)
    if not (isinstance(f, Implies) and isinstance(f.right, BExists)):
        return False
    be = f.right
    t = _find_subst(be.body, be.var, f.left)
    return t is not None and t == be.bound


def _check_balle(f: Formula) -> bool:
    # (A x <= b. P) -> (s <= b -> P[x:=s])
    if not (isinstance(f, Implies) and isinstance(f.left, BForall)
            and isinstance(f.right, Implies) and isinstance(f.right.left, Le)):
        return False
    bf = f.left
    s = f.right.left.left
    if f.right.left.right != bf.bound:
        return False
    t = _find_subst(bf.body, bf.var, f.right.right)
    return t is not None and t == s


_CHECKED_SCHEMES: dict[str, Callable[[Formula], bool]] = {
    "UI": _check_ui,
    "EI": _check_ei,
    "VAC": _check_vac,
    "EE": _check_ee,
    "BEXI": _check_bexi,
    "BEXITOP": _check_bexi_top,
    "BALLE": _check_balle,
}

SCHEME_NAMES = sorted(SCHEMES) + sorted(_CHECKED_SCHEMES)


def is_scheme_instance(scheme: str, f: Formula) -> bool:
    if scheme in SCHEMES:
        return _match(SCHEMES[scheme], f, {})
    checker = _CHECKED_SCHEMES.get(scheme)
    return checker is not None and checker(f)


# ---------------------------------------------------------------------------
# The checker

def check(proof: ProofObject, conclusion: Formula) -> bool:
    """True iff every step is locally valid and the last step is the
    conclusion.  Total: malformed input yields False, never an exception."""
    try:
        steps = proof.steps
        if not steps:
            return False
        deps: list[set[int]] = []
        for idx, st in enumerate(steps):
            if isinstance(st, LogicalAxiom):
                if not is_scheme_instance(st.scheme, st.formula):
                    return False
                deps.append(set())
            elif isinstance(st, Premise):
                deps.append({idx})
            elif isinstance(st, ModusPonens):
                i, j = st.antecedent, st.implication
                if not (0 <= i < idx and 0 <= j < idx):
                    return False
                imp = steps[j].formula
                if not isinstance(imp, Implies):
                    return False
                if imp.left != steps[i].formula or imp.right != st.formula:
                    return False
                deps.append(deps[i] | deps[j])
            elif isinstance(st, Generalization):
                i = st.source
                if not 0 <= i < idx:
                    return False
                if st.formula != Forall(st.var, steps[i].formula):
                    return False
                for d in deps[i]:
                    if st.var in free_vars(steps[d].formula):
                        return False
                deps.append(set(deps[i]))
            else:
                return False
        return steps[-1].formula == conclusion
    except Exception:
        return False


# ---------------------------------------------------------------------------
# Builder

class Builder:
    def __init__(self):
        self.steps: list[Step] = []
        self._axiom_cache: dict[tuple[str, Formula], int] = {}
        self._premise_cache: dict[Formula, int] = {}

    def add(self, step: Step) -> int:
        self.steps.append(step)
        return len(self.steps) - 1

    def axiom(self, scheme: str, f: Formula) -> int:
        key = (scheme, f)
        if key not in self._axiom_cache:
            self._axiom_cache[key] = self.add(LogicalAxiom(scheme, f))
        return self._axiom_cache[key]

    def premise(self, f: Formula) -> int:
        if f not in self._premise_cache:
            self._premise_cache[f] = self.add(Premise(f))
        return self._premise_cache[f]

    def mp(self, antecedent: int, implication: int) -> int:
        imp = self.steps[implication].formula
        assert isinstance(imp, Implies) and imp.left == self.steps[antecedent].formula
        return self.add(ModusPonens(antecedent, implication, imp.right))

    def gen(self, source: int, var: str) -> int:
        return self.add(Generalization(source, var, Forall(var, self.steps[source].formula)))

    def formula(self, idx: int) -> Formula:
        return self.steps[idx].formula

    def imp_mp(self, nested: int, fact: int) -> int:
        """From X -> (Y -> Z) and Y, derive X -> Z."""
        outer = self.steps[nested].formula
        x, rest = outer.left, outer.right
        y, z = rest.left, rest.right
        s = self.axiom("S", Implies(outer, Implies(Implies(x, y), Implies(x, z))))
        step1 = self.mp(nested, s)
        k = self.axiom("K", Implies(y, Implies(x, y)))
        xy = self.mp(fact, k)
        return self.mp(xy, step1)

    def hs(self, ab: int, bc: int) -> int:
        """From A -> B and B -> C, derive A -> C."""
        fab = self.steps[ab].formula
        fbc = self.steps[bc].formula
        ax = self.axiom("HS", Implies(fab, Implies(fbc, Implies(fab.left, fbc.right))))
        return self.mp(bc, self.mp(ab, ax))

    def identity(self, f: Formula) -> int:
        """The five-step derivation of f -> f."""
        ff = Implies(f, f)
        fff = Implies(f, ff)
        s = self.axiom("S", Implies(Implies(f, Implies(ff, f)),
                                    Implies(fff, ff)))
        k1 = self.axiom("K", Implies(f, Implies(ff, f)))
        step = self.mp(k1, s)
        k2 = self.axiom("K", fff)
        return self.mp(k2, step)

    def build(self) -> ProofObject:
        return ProofObject(tuple(self.steps))


# ---------------------------------------------------------------------------
# Robinson arithmetic

def q_axioms() -> list[Formula]:
    """The fixed eight-axiom presentation of the induction-free base theory.

    The predecessor axiom and the order-defining axiom use bounded witnesses,
    which keeps every axiom at the universal first level.
    """
    x, y, z = Var("x"), Var("y"), Var("z")
    return [
        Forall("x", Forall("y", Implies(Eq(Succ(x), Succ(y)), Eq(x, y)))),
        Forall("x", Not(Eq(Succ(x), Num(0)))),
        Forall("x", Or(Eq(x, Num(0)), BExists("y", x, Eq(x, Succ(y))))),
        Forall("x", Eq(Add(x, Num(0)), x)),
        Forall("x", Forall("y", Eq(Add(x, Succ(y)), Succ(Add(x, y))))),
        Forall("x", Eq(Mul(x, Num(0)), Num(0))),
        Forall("x", Forall("y", Eq(Mul(x, Succ(y)), Add(Mul(x, y), x)))),
        Forall("x", Forall("y", Iff(Le(x, y), BExists("z", y, Eq(Add(z, x), y))))),
    ]


def q_conj_code() -> coding.Code:
    return coding.conjseq(coding.seq_encode([coding.encode_formula(a) for a in q_axioms()]))


def pa_induction_instance(phi: Formula, v: str) -> Formula:
    """[phi(0) and A v.(phi(v) -> phi(S v))] -> A v. phi(v)."""
    if v not in free_vars(phi):
        raise ValueError(f"{v!r} is not free in the formula")
    base = substitute(phi, v, Num(0))
    step = Forall(v, Implies(phi, substitute(phi, v, succ(Var(v)))))
    return Implies(And(base, step), Forall(v, phi))


# ---------------------------------------------------------------------------
# Closed-term arithmetic tactics

def _term_value(t: Term) -> Optional[int]:
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Succ):
        v = _term_value(t.arg)
        return None if v is None else v + 1
    if isinstance(t, Add):
        l, r = _term_value(t.left), _term_value(t.right)
        return None if l is None or r is None else l + r
    if isinstance(t, Mul):
        l, r = _term_value(t.left), _term_value(t.right)
        return None if l is None or r is None else l * r
    return None


_TACTIC_VALUE_CAP = 10_000


class _QFacts:
    """Indices of the Q axioms among the available premises, if present."""

    def __init__(self, bld: Builder, premises: list[Formula]):
        axioms = q_axioms()
        self.bld = bld
        self.have = {}
        for n, ax in enumerate(axioms, start=1):
            self.have[n] = ax if ax in premises else None

    def axiom_step(self, n: int) -> int:
        ax = self.have[n]
        assert ax is not None
        return self.bld.premise(ax)

    def has(self, *ns: int) -> bool:
        return all(self.have[n] is not None for n in ns)


def _ui(bld: Builder, forall_idx: int, t: Term) -> int:
    """Instantiate a proven universal at term t."""
    f = bld.formula(forall_idx)
    assert isinstance(f, Forall)
    inst = substitute(f.body, f.var, t)
    ax = bld.axiom("UI", Implies(f, inst))
    return bld.mp(forall_idx, ax)


def _add_lemma(bld: Builder, q: _QFacts, m: int, k: int) -> int:
    """Derive m + k = (m+k) on numerals from the recursion axioms."""
    if k == 0:
        a4 = q.axiom_step(4)
        return _ui(bld, a4, Num(m))
    rec = _add_lemma(bld, q, m, k - 1)
    a5 = q.axiom_step(5)
    inner = _ui(bld, a5, Num(m))
    unfold = _ui(bld, inner, Num(k - 1))  # m + k = S(m + (k-1))
    lhs_inner = Add(Num(m), Num(k - 1))
    congs = bld.axiom("CONGS", Implies(bld.formula(rec),
                                       Eq(Succ(lhs_inner), Num(m + k))))
    step = bld.mp(rec, congs)  # S(m + (k-1)) = (m+k)
    trans = bld.axiom("TRANS", Implies(bld.formula(unfold),
                                       Implies(bld.formula(step),
                                               Eq(Add(Num(m), Num(k)), Num(m + k)))))
    return bld.mp(step, bld.mp(unfold, trans))


def _mul_lemma(bld: Builder, q: _QFacts, m: int, k: int) -> int:
    if k == 0:
        a6 = q.axiom_step(6)
        return _ui(bld, a6, Num(m))
    rec = _mul_lemma(bld, q, m, k - 1)  # m * (k-1) = m(k-1)
    a7 = q.axiom_step(7)
    unfold = _ui(bld, _ui(bld, a7, Num(m)), Num(k - 1))  # m*k = m*(k-1) + m
    prod = Mul(Num(m), Num(k - 1))
    congal = bld.axiom("CONGAL", Implies(bld.formula(rec),
                                         Eq(Add(prod, Num(m)), Add(Num(m * (k - 1)), Num(m)))))
    shifted = bld.mp(rec, congal)
    addl = _add_lemma(bld, q, m * (k - 1), m)
    trans1 = bld.axiom("TRANS", Implies(bld.formula(shifted),
                                        Implies(bld.formula(addl),
                                                Eq(Add(prod, Num(m)), Num(m * k)))))
    joined = bld.mp(addl, bld.mp(shifted, trans1))
    trans2 = bld.axiom("TRANS", Implies(bld.formula(unfold),
                                        Implies(bld.formula(joined),
                                                Eq(Mul(Num(m), Num(k)), Num(m * k)))))
    return bld.mp(joined, bld.mp(unfold, trans2))


def _term_to_numeral(bld: Builder, q: _QFacts, t: Term) -> Optional[int]:
    """Derive t = numeral(value(t)) for a closed arithmetic term."""
    val = _term_value(t)
    if val is None or val > _TACTIC_VALUE_CAP:
        return None
    if isinstance(t, Num):
        return bld.axiom("REFL", Eq(t, t))
    if isinstance(t, Succ):
        sub = _term_to_numeral(bld, q, t.arg)
        if sub is None:
            return None
        arg_val = _term_value(t.arg)
        congs = bld.axiom("CONGS", Implies(bld.formula(sub), Eq(succ(t.arg), Num(arg_val + 1))))
        return bld.mp(sub, congs)
    if isinstance(t, (Add, Mul)):
        lv, rv = _term_value(t.left), _term_value(t.right)
        ls = _term_to_numeral(bld, q, t.left)
        rs = _term_to_numeral(bld, q, t.right)
        if ls is None or rs is None:
            return None
        op = Add if isinstance(t, Add) else Mul
        cong_l = bld.axiom("CONGAL" if op is Add else "CONGML",
                           Implies(bld.formula(ls), Eq(op(t.left, t.right), op(Num(lv), t.right))))
        step1 = bld.mp(ls, cong_l)
        cong_r = bld.axiom("CONGAR" if op is Add else "CONGMR",
                           Implies(bld.formula(rs), Eq(op(Num(lv), t.right), op(Num(lv), Num(rv)))))
        step2 = bld.mp(rs, cong_r)
        lemma = (_add_lemma if op is Add else _mul_lemma)(bld, q, lv, rv)
        trans1 = bld.axiom("TRANS", Implies(bld.formula(step1),
                                            Implies(bld.formula(step2),
                                                    Eq(op(t.left, t.right), op(Num(lv), Num(rv))))))
        joined = bld.mp(step2, bld.mp(step1, trans1))
        trans2 = bld.axiom("TRANS", Implies(bld.formula(joined),
                                            Implies(bld.formula(lemma), Eq(op(t.left, t.right), Num(val)))))
        return bld.mp(lemma, bld.mp(joined, trans2))
    return None


def _prove_closed_eq(bld: Builder, q: _QFacts, lhs: Term, rhs: Term) -> Optional[int]:
    lv, rv = _term_value(lhs), _term_value(rhs)
    if lv is None or rv is None or lv != rv:
        return None
    if not q.has(4, 5) and not (isinstance(lhs, Num) and isinstance(rhs, Num)):
        return None
    a = _term_to_numeral(bld, q, lhs)
    b = _term_to_numeral(bld, q, rhs)
    if a is None or b is None:
        return None
    sym = bld.axiom("SYM", Implies(bld.formula(b), Eq(Num(rv), rhs)))
    back = bld.mp(b, sym)
    trans = bld.axiom("TRANS", Implies(bld.formula(a),
                                       Implies(bld.formula(back), Eq(lhs, rhs))))
    return bld.mp(back, bld.mp(a, trans))


def _neq_numerals(bld: Builder, q: _QFacts, a: int, b: int) -> Optional[int]:
    """Derive ~(a = b) on distinct numerals via successor injectivity."""
    if a == b or not q.has(1, 2):
        return None
    peel = min(a, b)
    chain: Optional[int] = None  # proof of (a = b) -> (a-peel = b-peel)
    ca, cb = a, b
    a1 = q.axiom_step(1) if peel else None
    for _ in range(peel):
        inst = _ui(bld, _ui(bld, a1, Num(ca - 1)), Num(cb - 1))
        chain = inst if chain is None else bld.hs(chain, inst)
        ca, cb = ca - 1, cb - 1
    # Now one of ca, cb is 0 and the other is d >= 1.
    a2 = q.axiom_step(2)
    if ca == 0:
        d = cb
        neg_d0 = _ui(bld, a2, Num(d - 1))  # ~(d = 0)
        sym = bld.axiom("SYM", Implies(Eq(Num(0), Num(d)), Eq(Num(d), Num(0))))
        cp = bld.axiom("CP2", Implies(bld.formula(sym),
                                      Implies(bld.formula(neg_d0), Not(Eq(Num(0), Num(d))))))
        core = bld.mp(neg_d0, bld.mp(sym, cp))  # ~(0 = d)
    else:
        d = ca
        core = _ui(bld, a2, Num(d - 1))  # ~(d = 0)
    if chain is None:
        return core
    cp = bld.axiom("CP2", Implies(bld.formula(chain),
                                  Implies(bld.formula(core), Not(Eq(Num(a), Num(b))))))
    return bld.mp(core, bld.mp(chain, cp))


def _prove_closed_neq(bld: Builder, q: _QFacts, lhs: Term, rhs: Term) -> Optional[int]:
    lv, rv = _term_value(lhs), _term_value(rhs)
    if lv is None or rv is None or lv == rv:
        return None
    if not q.has(1, 2):
        return None
    if not (isinstance(lhs, Num) and isinstance(rhs, Num)) and not q.has(4, 5):
        return None
    a = _term_to_numeral(bld, q, lhs)
    b = _term_to_numeral(bld, q, rhs)
    if a is None or b is None:
        return None
    core = _neq_numerals(bld, q, lv, rv)
    if core is None:
        return None
    # (lhs = rhs) -> (lv = rv), then contrapose.
    sym_a = bld.mp(a, bld.axiom("SYM", Implies(bld.formula(a), Eq(Num(lv), lhs))))
    trans1 = bld.axiom("TRANS", Implies(bld.formula(sym_a),
                                        Implies(Eq(lhs, rhs), Eq(Num(lv), rhs))))
    imp1 = bld.mp(sym_a, trans1)  # (lhs = rhs) -> (lv = rhs)
    trans2 = bld.axiom("TRANS", Implies(Eq(Num(lv), rhs),
                                        Implies(bld.formula(b), Eq(Num(lv), Num(rv)))))
    imp2 = bld.imp_mp(trans2, b)  # (lv = rhs) -> (lv = rv)
    full = bld.hs(imp1, imp2)
    cp = bld.axiom("CP2", Implies(bld.formula(full),
                                  Implies(bld.formula(core), Not(Eq(lhs, rhs)))))
    return bld.mp(core, bld.mp(full, cp))


# ---------------------------------------------------------------------------
# Bounded backward search

_MAX_EXPANSIONS = 50_000


class _Search:
    def __init__(self, premises: list[Formula], depth: int):
        self.premises = list(premises)
        self.depth = depth
        self.bld = Builder()
        self.q = _QFacts(self.bld, self.premises)
        self.failed: set[tuple[Formula, int]] = set()
        self.proven: dict[Formula, int] = {}
        self.expansions = 0
        self.facts: dict[Formula, Callable[[], int]] = {}
        for p in self.premises:
            self._add_fact_tree(p, lambda f=p: self.bld.premise(f))

    def _add_fact_tree(self, f: Formula, recipe: Callable[[], int]) -> None:
        if f in self.facts:
            return
        self.facts[f] = recipe
        if isinstance(f, And):
            def left(f=f, recipe=recipe):
                src = recipe()
                ax = self.bld.axiom("ANDE1", Implies(f, f.left))
                return self.bld.mp(src, ax)

            def right(f=f, recipe=recipe):
                src = recipe()
                ax = self.bld.axiom("ANDE2", Implies(f, f.right))
                return self.bld.mp(src, ax)

            self._add_fact_tree(f.left, left)
            self._add_fact_tree(f.right, right)

    def prove(self, goal: Formula, depth: int) -> Optional[int]:
        if goal in self.proven:
            return self.proven[goal]
        if depth <= 0 or (goal, depth) in self.failed:
            return None
        self.expansions += 1
        if self.expansions > _MAX_EXPANSIONS:
            return None
        idx = self._attempt(goal, depth)
        if idx is None:
            self.failed.add((goal, depth))
        else:
            self.proven[goal] = idx
        return idx

    def _attempt(self, goal: Formula, depth: int) -> Optional[int]:
        if goal in self.facts:
            return self.facts[goal]()
        for scheme in SCHEMES:
            if _match(SCHEMES[scheme], goal, {}):
                return self.bld.axiom(scheme, goal)
        for scheme, checker in _CHECKED_SCHEMES.items():
            if checker(goal):
                return self.bld.axiom(scheme, goal)
        if isinstance(goal, Eq):
            got = _prove_closed_eq(self.bld, self.q, goal.left, goal.right)
            if got is not None:
                return got
        if isinstance(goal, Not) and isinstance(goal.body, Eq):
            got = _prove_closed_neq(self.bld, self.q, goal.body.left, goal.body.right)
            if got is not None:
                return got
        if isinstance(goal, And):
            a = self.prove(goal.left, depth - 1)
            b = self.prove(goal.right, depth - 1) if a is not None else None
            if b is not None:
                ax = self.bld.axiom("ANDI", Implies(goal.left, Implies(goal.right, goal)))
                return self.bld.mp(b, self.bld.mp(a, ax))
        if isinstance(goal, Iff):
            fwd = self.prove(Implies(goal.left, goal.right), depth - 1)
            bwd = self.prove(Implies(goal.right, goal.left), depth - 1) if fwd is not None else None
            if bwd is not None:
                ax = self.bld.axiom("IFFI", Implies(self.bld.formula(fwd),
                                                    Implies(self.bld.formula(bwd), goal)))
                return self.bld.mp(bwd, self.bld.mp(fwd, ax))
        if isinstance(goal, Implies):
            got = self.prove(goal.right, depth - 1)
            if got is not None:
                ax = self.bld.axiom("K", Implies(goal.right, goal))
                return self.bld.mp(got, ax)
            if goal.left == goal.right:
                return self.bld.identity(goal.left)
            if depth >= 2:
                sub = search_bounded(self.premises + [goal.left], goal.right, depth - 1)
                if sub is not None:
                    disch = discharge(sub, goal.left)
                    if disch is not None:
                        return self._embed(disch)
        # Backward chaining over implications already available as facts.
        for fact in list(self.facts):
            if isinstance(fact, Implies) and fact.right == goal:
                got = self.prove(fact.left, depth - 1)
                if got is not None:
                    return self.bld.mp(got, self.facts[fact]())
        if isinstance(goal, Exists):
            for t in self._witnesses(goal):
                inst = substitute(goal.body, goal.var, t)
                got = self.prove(inst, depth - 1)
                if got is not None:
                    ax = self.bld.axiom("EI", Implies(inst, goal))
                    return self.bld.mp(got, ax)
        if isinstance(goal, Forall):
            if all(goal.var not in free_vars(p) for p in self.premises):
                got = self.prove(goal.body, depth - 1)
                if got is not None:
                    return self.bld.gen(got, goal.var)
        return None

    def _witnesses(self, goal: Exists) -> list[Term]:
        out: list[Term] = [Num(0), Num(1), Num(2)]
        seen = {0, 1, 2}

        def scan(t: Term):
            if isinstance(t, Num) and t.value not in seen and t.value <= 64:
                seen.add(t.value)
                out.append(t)
            elif isinstance(t, Succ):
                scan(t.arg)
            elif isinstance(t, (Add, Mul)):
                scan(t.left)
                scan(t.right)

        def scan_f(f: Formula):
            if isinstance(f, (Eq, Le)):
                scan(f.left)
                scan(f.right)
            elif isinstance(f, InterpPred):
                for a in f.args:
                    scan(a)
            elif isinstance(f, Not):
                scan_f(f.body)
            elif isinstance(f, (And, Or, Implies, Iff)):
                scan_f(f.left)
                scan_f(f.right)
            elif isinstance(f, (Exists, Forall)):
                scan_f(f.body)
            elif isinstance(f, (BExists, BForall)):
                scan(f.bound)
                scan_f(f.body)

        scan_f(goal.body)
        return out

    def _embed(self, sub: ProofObject) -> Optional[int]:
        mapping: dict[int, int] = {}
        for i, st in enumerate(sub.steps):
            if isinstance(st, LogicalAxiom):
                mapping[i] = self.bld.axiom(st.scheme, st.formula)
            elif isinstance(st, Premise):
                mapping[i] = self.bld.premise(st.formula)
            elif isinstance(st, ModusPonens):
                mapping[i] = self.bld.mp(mapping[st.antecedent], mapping[st.implication])
            elif isinstance(st, Generalization):
                mapping[i] = self.bld.gen(mapping[st.source], st.var)
        return mapping[len(sub.steps) - 1]


def embed(bld: Builder, proof: ProofObject) -> int:
    """Replay a proof inside an existing builder; returns the final index."""
    mapping: dict[int, int] = {}
    for i, st in enumerate(proof.steps):
        if isinstance(st, LogicalAxiom):
            mapping[i] = bld.axiom(st.scheme, st.formula)
        elif isinstance(st, Premise):
            mapping[i] = bld.premise(st.formula)
        elif isinstance(st, ModusPonens):
            mapping[i] = bld.mp(mapping[st.antecedent], mapping[st.implication])
        elif isinstance(st, Generalization):
            mapping[i] = bld.gen(mapping[st.source], st.var)
    return mapping[len(proof.steps) - 1]


def search_bounded(premises: list[Formula], goal: Formula, budget=12) -> Optional[ProofObject]:
    """Backward-chaining proof search; ``budget`` is a depth or carries a
    ``depth_bound``.  Absence of a result is never a disproof."""
    depth = getattr(budget, "depth_bound", budget)
    if isinstance(depth, int) and depth > 40:
        depth = 40  # backward search beyond this is pointless and slow
    engine = _Search(premises, depth)
    idx = engine.prove(goal, depth)
    if idx is None:
        return None
    proof = _trim(engine.bld.steps, idx)
    return proof if check(proof, goal) else None


def _trim(steps: list[Step], last: int) -> ProofObject:
    """Drop steps not reachable from the final one, reindexing."""
    needed = set()
    stack = [last]
    while stack:
        i = stack.pop()
        if i in needed:
            continue
        needed.add(i)
        st = steps[i]
        if isinstance(st, ModusPonens):
            stack.extend((st.antecedent, st.implication))
        elif isinstance(st, Generalization):
            stack.append(st.source)
    order = sorted(needed)
    remap = {old: new for new, old in enumerate(order)}
    out: list[Step] = []
    for old in order:
        st = steps[old]
        if isinstance(st, ModusPonens):
            st = ModusPonens(remap[st.antecedent], remap[st.implication], st.formula)
        elif isinstance(st, Generalization):
            st = Generalization(remap[st.source], st.var, st.formula)
        out.append(st)
    return ProofObject(tuple(out))


# ---------------------------------------------------------------------------
# The deduction transform

def discharge(proof: ProofObject, assumption: Formula) -> Optional[ProofObject]:
    """Turn a proof using ``assumption`` as a premise into a proof of
    assumption -> conclusion that no longer uses it."""
    bld = Builder()
    mapping: dict[int, int] = {}
    try:
        for i, st in enumerate(proof.steps):
            f = st.formula
            target = Implies(assumption, f)
            if isinstance(st, Premise) and f == assumption:
                mapping[i] = bld.identity(assumption)
                continue
            if isinstance(st, (Premise, LogicalAxiom)):
                base = (bld.premise(f) if isinstance(st, Premise)
                        else bld.axiom(st.scheme, f))
                k = bld.axiom("K", Implies(f, target))
                mapping[i] = bld.mp(base, k)
            elif isinstance(st, ModusPonens):
                # From assumption -> (A -> B) and assumption -> A infer it for B.
                imp_img = mapping[st.implication]
                ant_img = mapping[st.antecedent]
                s = bld.axiom("S", Implies(bld.formula(imp_img),
                                           Implies(bld.formula(ant_img), target)))
                mapping[i] = bld.mp(ant_img, bld.mp(imp_img, s))
            elif isinstance(st, Generalization):
                if st.var in free_vars(assumption):
                    return None
                img = mapping[st.source]
                gen = bld.gen(img, st.var)  # A v. (assumption -> body)
                ud = bld.axiom("UD", Implies(bld.formula(gen),
                                             Implies(Forall(st.var, assumption), f)))
                dist = bld.mp(gen, ud)
                vac = bld.axiom("VAC", Implies(assumption, Forall(st.var, assumption)))
                mapping[i] = bld.hs(vac, dist)
            else:
                return None
        out = _trim(bld.steps, mapping[len(proof.steps) - 1])
        return out
    except Exception:
        return None


def implication_proof(antecedent: Formula, consequent: Formula, budget=12) -> Optional[ProofObject]:
    """A premise-free proof of antecedent -> consequent, if search finds one."""
    base = search_bounded([antecedent], consequent, budget)
    if base is None:
        return None
    out = discharge(base, antecedent)
    if out is None or out.premises():
        return None
    return out if check(out, Implies(antecedent, consequent)) else None


# ---------------------------------------------------------------------------
# Proof codes and the checker hook

_STEP_AXIOM, _STEP_PREMISE, _STEP_MP, _STEP_GEN = range(4)


def encode_proof(p: ProofObject) -> coding.Code:
    items = []
    for st in p.steps:
        if isinstance(st, LogicalAxiom):
            payload = coding.pair(coding.name_code(st.scheme), coding.encode_formula(st.formula))
            items.append(coding.pair(_STEP_AXIOM, payload))
        elif isinstance(st, Premise):
            items.append(coding.pair(_STEP_PREMISE, coding.encode_formula(st.formula)))
        elif isinstance(st, ModusPonens):
            payload = coding.pair(coding.pair(st.antecedent, st.implication),
                                  coding.encode_formula(st.formula))
            items.append(coding.pair(_STEP_MP, payload))
        elif isinstance(st, Generalization):
            payload = coding.pair(coding.pair(st.source, coding.name_code(st.var)),
                                  coding.encode_formula(st.formula))
            items.append(coding.pair(_STEP_GEN, payload))
    return coding.seq_encode(items)


def decode_proof(c: int) -> Optional[ProofObject]:
    items = coding.seq_items(c)
    if not items:
        return None
    steps: list[Step] = []
    for it in items:
        d = coding.unpair(it)
        if d is None:
            return None
        tag, payload = d
        if tag == _STEP_AXIOM:
            dd = coding.unpair(payload)
            if dd is None:
                return None
            name = coding.code_name(dd[0])
            f = coding.decode_formula(dd[1])
            if name is None or name not in set(SCHEME_NAMES) or f is None:
                return None
            steps.append(LogicalAxiom(name, f))
        elif tag == _STEP_PREMISE:
            f = coding.decode_formula(payload)
            if f is None:
                return None
            steps.append(Premise(f))
        elif tag == _STEP_MP:
            dd = coding.unpair(payload)
            refs = coding.unpair(dd[0]) if dd else None
            f = coding.decode_formula(dd[1]) if dd else None
            if refs is None or f is None:
                return None
            steps.append(ModusPonens(refs[0], refs[1], f))
        elif tag == _STEP_GEN:
            dd = coding.unpair(payload)
            refs = coding.unpair(dd[0]) if dd else None
            f = coding.decode_formula(dd[1]) if dd else None
            if refs is None or f is None:
                return None
            var = coding.code_name(refs[1])
            if var is None:
                return None
            steps.append(Generalization(refs[0], var, f))
        else:
            return None
    return ProofObject(tuple(steps))


def proofchk_hook(y: int, x: int) -> bool:
    """The checkable core of the proof relation: y codes a premise-free proof
    of the (implication) sentence coded by x."""
    target = coding.decode_formula(x)
    if target is None:
        return False
    p = decode_proof(y)
    if p is None or p.premises():
        return False
    return check(p, target)


# ---------------------------------------------------------------------------
# Text serialization

def proof_to_text(p: ProofObject) -> str:
    lines = []
    for n, st in enumerate(p.steps, start=1):
        if isinstance(st, LogicalAxiom):
            lines.append(f"{n}: AXIOM {st.scheme} {st.formula}")
        elif isinstance(st, Premise):
            lines.append(f"{n}: PREMISE {st.formula}")
        elif isinstance(st, ModusPonens):
            lines.append(f"{n}: MP {st.antecedent + 1} {st.implication + 1}")
        elif isinstance(st, Generalization):
            lines.append(f"{n}: GEN {st.source + 1} {st.var}")
    return "\n".join(lines)


def proof_from_text(text: str, registry: Optional[Registry] = None) -> ProofObject:
    steps: list[Step] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        head, rest = line.split(":", 1)
        rest = rest.strip()
        kind, _, body = rest.partition(" ")
        if kind == "AXIOM":
            scheme, _, formula = body.partition(" ")
            steps.append(LogicalAxiom(scheme, parse(formula, registry)))
        elif kind == "PREMISE":
            steps.append(Premise(parse(body, registry)))
        elif kind == "MP":
            i, j = body.split()
            prev = steps[int(j) - 1].formula
            if not isinstance(prev, Implies):
                raise ValueError(f"step {j} is not an implication")
            steps.append(ModusPonens(int(i) - 1, int(j) - 1, prev.right))
        elif kind == "GEN":
            i, var = body.split()
            steps.append(Generalization(int(i) - 1, var,
                                        Forall(var, steps[int(i) - 1].formula)))
        else:
            raise ValueError(f"unknown step kind {kind!r}")
    return ProofObject(tuple(steps))


def flatten_conjuncts(f: Formula) -> list[Formula]:
    out: list[Formula] = []
    stack = [f]
    while stack:
        cur = stack.pop()
        if isinstance(cur, And):
            stack.append(cur.right)
            stack.append(cur.left)
        else:
            out.append(cur)
    return out
