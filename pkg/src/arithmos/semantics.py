"""Budgeted three-valued truth over the standard model of the naturals.

Bounded quantifiers are evaluated exactly whenever their bound fits inside the
witness budget; everything else is searched up to the budget and reported
``UNKNOWN`` on exhaustion, never guessed.  ``TRUE`` verdicts are monotone in
the budget: a larger witness bound can only turn ``UNKNOWN`` into a decision.

Interpreted predicates evaluate through registry hooks.  Hooks may register
witness suggesters and function inverses; the quantifier solver consults them
so that structured witnesses (proof codes, sequence codes, formula codes)
are found even though they lie far beyond any feasible enumeration range.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional

from . import coding, hierarchy, proofs
from .hierarchy import Level, Pi, Sigma, classify
from .syntax import (
    Add, And, BExists, BForall, Eq, Exists, Forall, Formula, Iff, Implies,
    InterpFun, InterpPred, Le, Mul, Not, Num, Or, Registry, Succ, SymbolInfo,
    Term, Var, free_vars, is_sentence, substitute,
)


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    UNKNOWN = "unknown"  # budget exhausted before a decision

    def __invert__(self) -> "Verdict":
        if self is Verdict.TRUE:
            return Verdict.FALSE
        if self is Verdict.FALSE:
            return Verdict.TRUE
        return Verdict.UNKNOWN


def v_not(v: Verdict) -> Verdict:
    return ~v


def v_and(a: Verdict, b: Verdict) -> Verdict:
    if Verdict.FALSE in (a, b):
        return Verdict.FALSE
    if Verdict.UNKNOWN in (a, b):
        return Verdict.UNKNOWN
    return Verdict.TRUE


def v_or(a: Verdict, b: Verdict) -> Verdict:
    if Verdict.TRUE in (a, b):
        return Verdict.TRUE
    if Verdict.UNKNOWN in (a, b):
        return Verdict.UNKNOWN
    return Verdict.FALSE


@dataclass(frozen=True)
class Budget:
    witness_bound: int = 10_000
    depth_bound: int = 64

    def __post_init__(self):
        if self.witness_bound < 0 or self.depth_bound < 0:
            raise ValueError("budget components must be non-negative")


DEFAULT_BUDGET = Budget()

# Hard ceiling on quantifier instantiations per evaluation, so nested
# unbounded blocks cannot run for hours.  Chosen large enough that any
# witness reachable at a small budget is also reached at a large one for
# the two-variable blocks the corpus uses.
_MAX_STEPS = 1_000_000


class _Exhausted(Exception):
    pass


def eval_term(t: Term, env: Optional[dict[str, int]] = None,
              registry: Optional[Registry] = None) -> int:
    env = env or {}
    if isinstance(t, Num):
        return t.value
    if isinstance(t, Var):
        if t.name not in env:
            raise KeyError(f"unbound variable {t.name!r}")
        return env[t.name]
    if isinstance(t, Succ):
        return eval_term(t.arg, env, registry) + 1
    if isinstance(t, Add):
        return eval_term(t.left, env, registry) + eval_term(t.right, env, registry)
    if isinstance(t, Mul):
        return eval_term(t.left, env, registry) * eval_term(t.right, env, registry)
    if isinstance(t, InterpFun):
        if registry is None:
            raise KeyError(f"no registry for interpreted function {t.symbol!r}")
        info = registry.require(t.symbol)
        if info.fn is None:
            raise KeyError(f"symbol {t.symbol!r} has no function hook")
        return info.fn(tuple(eval_term(a, env, registry) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


class Evaluator:
    def __init__(self, budget: Budget = DEFAULT_BUDGET,
                 registry: Optional[Registry] = None):
        self.budget = budget
        self.registry = registry if registry is not None else standard_registry()
        self.witness: Optional[int] = None
        self._depth = 0
        self._steps = 0

    # -- public surface ----------------------------------------------------

    def eval(self, sentence: Formula) -> Verdict:
        if free_vars(sentence):
            raise ValueError("evaluation requires a sentence (no free variables)")
        self.witness = None
        self._steps = 0
        try:
            return self._eval(sentence, {}, top=True)
        except _Exhausted:
            return Verdict.UNKNOWN

    def eval_nested(self, sentence: Formula) -> Verdict:
        """Re-entrant evaluation used by registry hooks; shares the depth
        budget so self-referential truth queries bottom out at UNKNOWN."""
        if self._depth >= self.budget.depth_bound:
            return Verdict.UNKNOWN
        self._depth += 1
        try:
            return self._eval(sentence, {})
        except _Exhausted:
            return Verdict.UNKNOWN
        finally:
            self._depth -= 1

    # -- core recursion -----------------------------------------------------

    def _tick(self):
        self._steps += 1
        if self._steps > _MAX_STEPS:
            raise _Exhausted()

    def _eval(self, f: Formula, env: dict[str, int], top: bool = False) -> Verdict:
        if isinstance(f, Eq):
            l = eval_term(f.left, env, self.registry)
            r = eval_term(f.right, env, self.registry)
            return Verdict.TRUE if l == r else Verdict.FALSE
        if isinstance(f, Le):
            l = eval_term(f.left, env, self.registry)
            r = eval_term(f.right, env, self.registry)
            return Verdict.TRUE if l <= r else Verdict.FALSE
        if isinstance(f, InterpPred):
            info = self.registry.require(f.symbol)
            if info.pred is None:
                raise KeyError(f"symbol {f.symbol!r} has no predicate hook")
            args = tuple(eval_term(a, env, self.registry) for a in f.args)
            return info.pred(args, self)
        if isinstance(f, Not):
            return ~self._eval(f.body, env)
        if isinstance(f, And):
            left = self._eval(f.left, env)
            if left is Verdict.FALSE:
                return Verdict.FALSE
            return v_and(left, self._eval(f.right, env))
        if isinstance(f, Or):
            left = self._eval(f.left, env)
            if left is Verdict.TRUE:
                return Verdict.TRUE
            return v_or(left, self._eval(f.right, env))
        if isinstance(f, Implies):
            left = self._eval(f.left, env)
            if left is Verdict.FALSE:
                return Verdict.TRUE
            return v_or(~left, self._eval(f.right, env))
        if isinstance(f, Iff):
            a = self._eval(f.left, env)
            b = self._eval(f.right, env)
            if Verdict.UNKNOWN in (a, b):
                return Verdict.UNKNOWN
            return Verdict.TRUE if a is b else Verdict.FALSE
        if isinstance(f, (Exists, BExists)):
            return self._block(f, env, existential=True, top=top)
        if isinstance(f, (Forall, BForall)):
            return self._block(f, env, existential=False, top=top)
        raise TypeError(f"not a formula: {f!r}")

    # -- quantifier blocks ---------------------------------------------------

    def _block(self, f: Formula, env: dict[str, int], existential: bool,
               top: bool = False) -> Verdict:
        """Solve a maximal block of same-polarity quantifiers together, so
        witness suggestions for inner variables become available once outer
        ones are fixed."""
        quants: list[tuple[str, Optional[Term]]] = []
        body = f
        kinds = (Exists, BExists) if existential else (Forall, BForall)
        while isinstance(body, kinds):
            if isinstance(body, (Exists, Forall)):
                quants.append((body.var, None))
            else:
                quants.append((body.var, body.bound))
            body = body.body

        result = self._solve(quants, body, dict(env), existential, top)
        return result

    def _solve(self, quants: list[tuple[str, Optional[Term]]], body: Formula,
               env: dict[str, int], existential: bool, top: bool) -> Verdict:
        if not quants:
            return self._eval(body, env)

        # Prefer a variable whose candidates can be suggested from what is
        # already bound; otherwise keep source order.
        pick = 0
        for idx, (var, bound) in enumerate(quants):
            if self._has_ready_hint(var, {v for v, _ in quants if v != var}, body, env):
                pick = idx
                break
        var, bound = quants[pick]
        rest = quants[:pick] + quants[pick + 1:]

        wb = self.budget.witness_bound
        exhaustive = False
        limit = wb
        bound_val: Optional[int] = None
        if bound is not None:
            bound_val = eval_term(bound, env, self.registry)
            limit = min(bound_val, wb)
            exhaustive = bound_val <= wb

        # Suggested witnesses go first: they are cheap to verify and the only
        # way to reach structured values far beyond the enumeration range.
        hints = sorted({h for h in self._hints(var, body, env)
                        if h >= 0 and (bound_val is None or h <= bound_val)})
        seen_unknown = False

        def attempt(cand: int) -> Optional[Verdict]:
            nonlocal seen_unknown
            self._tick()
            env[var] = cand
            sub = self._solve(rest, body, env, existential, False)
            del env[var]
            if existential and sub is Verdict.TRUE:
                if top:
                    self.witness = cand
                return Verdict.TRUE
            if not existential and sub is Verdict.FALSE:
                if top:
                    self.witness = cand
                return Verdict.FALSE
            if sub is Verdict.UNKNOWN:
                seen_unknown = True
            return None

        hint_set = set(hints)
        for cand in hints:
            decided = attempt(cand)
            if decided is not None:
                return decided
        for cand in range(limit + 1):
            if cand in hint_set:
                continue
            decided = attempt(cand)
            if decided is not None:
                return decided
        if exhaustive and not seen_unknown:
            # The whole finite range was decided.
            return Verdict.FALSE if existential else Verdict.TRUE
        return Verdict.UNKNOWN

    def _has_ready_hint(self, var: str, other_unbound: set[str], body: Formula,
                        env: dict[str, int]) -> bool:
        for atom in _atoms(body):
            if isinstance(atom, InterpPred):
                info = self.registry.lookup(atom.symbol)
                if info is None or info.suggest is None:
                    continue
                positions = [i for i, a in enumerate(atom.args) if a == Var(var)]
                if not positions:
                    continue
                others_closed = all(
                    not (_term_free(a) - set(env) - {var})
                    for i, a in enumerate(atom.args) if i not in positions
                )
                if others_closed:
                    return True
            elif isinstance(atom, Eq):
                for side, other in ((atom.left, atom.right), (atom.right, atom.left)):
                    if var in _term_free(side) and not (_term_free(other) - set(env)):
                        if _invertible(side, self.registry):
                            return True
        return False

    def _hints(self, var: str, body: Formula, env: dict[str, int]) -> list[int]:
        out: list[int] = []
        for atom in _atoms(body):
            if isinstance(atom, InterpPred):
                info = self.registry.lookup(atom.symbol)
                if info is None or info.suggest is None:
                    continue
                for pos, arg in enumerate(atom.args):
                    if arg != Var(var):
                        continue
                    known = {}
                    ok = True
                    for i, other in enumerate(atom.args):
                        if i == pos:
                            continue
                        if _term_free(other) - set(env):
                            ok = False
                            break
                        known[i] = eval_term(other, env, self.registry)
                    if ok:
                        out.extend(info.suggest(pos, known, self))
            elif isinstance(atom, Eq):
                # Inversion descends only into positions mentioning the
                # variable, so other still-unbound variables are fine: the
                # produced value is a suggestion, verified by evaluation.
                for side, other in ((atom.left, atom.right), (atom.right, atom.left)):
                    if (var in _term_free(side)
                            and not (_term_free(other) - set(env))):
                        target = eval_term(other, env, self.registry)
                        for binding in _invert_term(side, target, env, self.registry, var):
                            out.append(binding)
        return out


def _atoms(f: Formula) -> Iterable[Formula]:
    stack = [f]
    while stack:
        cur = stack.pop()
        if isinstance(cur, (Eq, Le, InterpPred)):
            yield cur
        elif isinstance(cur, Not):
            stack.append(cur.body)
        elif isinstance(cur, (And, Or, Implies, Iff)):
            stack.append(cur.left)
            stack.append(cur.right)
        elif isinstance(cur, (Exists, Forall)):
            stack.append(cur.body)
        elif isinstance(cur, (BExists, BForall)):
            stack.append(cur.body)


def _term_free(t: Term) -> set[str]:
    from .syntax import term_vars
    return term_vars(t)


def _invertible(t: Term, registry: Registry) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, Succ):
        return _invertible(t.arg, registry)
    if isinstance(t, InterpFun):
        info = registry.lookup(t.symbol)
        return info is not None and info.invert is not None
    return False


def _invert_term(t: Term, target: int, env: dict[str, int],
                 registry: Registry, var: str) -> list[int]:
    """Values for ``var`` that could make term ``t`` evaluate to ``target``."""
    if isinstance(t, Var):
        return [target] if t.name == var else []
    if isinstance(t, Num):
        return []
    if isinstance(t, Succ):
        return _invert_term(t.arg, target - 1, env, registry, var) if target >= 1 else []
    if isinstance(t, InterpFun):
        info = registry.lookup(t.symbol)
        if info is None or info.invert is None:
            return []
        out: list[int] = []
        for preimage in info.invert(target):
            for pos, arg in enumerate(t.args):
                free = _term_free(arg)
                if var in free:
                    out.extend(_invert_term(arg, preimage[pos], env, registry, var))
        return out
    return []


def evaluate(sentence: Formula, budget: Budget = DEFAULT_BUDGET,
             registry: Optional[Registry] = None) -> Verdict:
    """Evaluate a sentence over the naturals at the given budget."""
    return Evaluator(budget, registry).eval(sentence)


def true_level(c: int, lvl: Level, budget: Budget = DEFAULT_BUDGET,
               registry: Optional[Registry] = None,
               _ev: Optional[Evaluator] = None) -> Verdict:
    """Membership of code ``c`` in the true sentences at level ``lvl``:
    FALSE on decode failure, on an open formula, or on a level overflow;
    otherwise the budgeted truth verdict."""
    reg = registry if registry is not None else (_ev.registry if _ev else standard_registry())
    f = coding.decode_formula(c, reg)
    if f is None or free_vars(f):
        return Verdict.FALSE
    try:
        actual = classify(f, reg)
    except KeyError:
        return Verdict.FALSE
    if not actual <= lvl:
        return Verdict.FALSE
    if _ev is not None:
        return _ev.eval_nested(f)
    return Evaluator(budget, reg).eval(f)


# ---------------------------------------------------------------------------
# The standard registry

def _total(fn):
    def wrapped(args):
        try:
            return int(fn(*args))
        except Exception:
            return 0
    return wrapped


def _ssub(a: int, b: int) -> int:
    f = coding.decode_formula(a)
    if f is None:
        return 0
    fv = sorted(free_vars(f))
    if len(fv) != 1:
        return 0
    return coding.encode_formula(substitute(f, fv[0], Num(b)))


def _exc(a: int) -> int:
    f = coding.decode_formula(a)
    if f is None:
        return 0
    fv = sorted(free_vars(f))
    if len(fv) != 1:
        return 0
    return coding.encode_formula(Exists(fv[0], f))


def _reflc(n: int) -> int:
    return coding.encode_formula(Eq(Num(n), Num(n)))


def _invert_reflc(value: int) -> list[tuple[int, ...]]:
    f = coding.decode_formula(value)
    if (isinstance(f, Eq) and isinstance(f.left, Num)
            and f.left == f.right):
        return [(f.left.value,)]
    return []


def _invert_andc(value: int) -> list[tuple[int, ...]]:
    f = coding.decode_formula(value)
    if isinstance(f, And):
        return [(coding.encode_formula(f.left), coding.encode_formula(f.right))]
    return []


def _proofchk_suggest(pos: int, known: dict[int, int], ev: Evaluator) -> list[int]:
    if pos != 0 or 1 not in known:
        return []
    target = coding.decode_formula(known[1], ev.registry)
    if not isinstance(target, Implies):
        return []
    proof = proofs.implication_proof(target.left, target.right,
                                     min(ev.budget.depth_bound, 14))
    return [proofs.encode_proof(proof)] if proof is not None else []


def _conjseq_suggest(pos: int, known: dict[int, int], ev: Evaluator) -> list[int]:
    if pos == 1 and 0 in known:
        return coding.conjseq_candidates(known[0])
    if pos == 0 and 1 in known:
        try:
            return [coding.conjseq(known[1])]
        except ValueError:
            return []
    return []


def _sentlist_hook(args, ev) -> Verdict:
    x, u = args
    if coding.is_sent_code(u, ev.registry):
        return Verdict.TRUE if x == u else Verdict.FALSE
    return Verdict.TRUE if x == coding.code_zero_eq_zero() else Verdict.FALSE


def _sentlist_suggest(pos: int, known: dict[int, int], ev: Evaluator) -> list[int]:
    if pos == 0 and 1 in known:
        u = known[1]
        return [u if coding.is_sent_code(u, ev.registry) else coding.code_zero_eq_zero()]
    return []


def _parametric(name: str) -> Optional[SymbolInfo]:
    import re
    m = re.match(r"^(TruePi|TrueSigma)\[(\d+)\]$", name)
    if m is None:
        return None
    n = int(m.group(2))
    lvl = Pi(n) if m.group(1) == "TruePi" else Sigma(n)

    def hook(args, ev, lvl=lvl):
        return true_level(args[0], lvl, _ev=ev)

    return SymbolInfo(name, "predicate", 1, level=lvl, pred=hook)


def standard_registry() -> Registry:
    """A fresh registry with the built-in interpreted symbols."""
    reg = Registry(parametric=_parametric)
    s0 = Sigma(0)
    fns = [
        SymbolInfo("SSub", "function", 2, fn=_total(_ssub)),
        SymbolInfo("NegC", "function", 1, fn=_total(coding.neg_code)),
        SymbolInfo("ImpC", "function", 2, fn=_total(coding.imp_code)),
        SymbolInfo("AndC", "function", 2, fn=_total(coding.and_code),
                   invert=_invert_andc),
        SymbolInfo("ExC", "function", 1, fn=_total(_exc)),
        SymbolInfo("ReflC", "function", 1, fn=_total(_reflc), invert=_invert_reflc),
        SymbolInfo("SeqCap", "function", 1, fn=_total(coding.seq_cap)),
        SymbolInfo("SeqLen", "function", 1, fn=_total(coding.seq_len)),
        SymbolInfo("SeqAt", "function", 2, fn=_total(coding.seq_at)),
        SymbolInfo("SeqPref", "function", 2, fn=_total(coding.seq_prefix)),
        SymbolInfo("Pred", "function", 1, fn=_total(lambda n: n - 1 if n >= 1 else 0)),
    ]
    preds = [
        SymbolInfo("Seq", "predicate", 1, level=s0,
                   pred=lambda args, ev: Verdict.TRUE if coding.is_seq(args[0]) else Verdict.FALSE),
        SymbolInfo("Sent", "predicate", 1, level=s0,
                   pred=lambda args, ev: Verdict.TRUE if coding.is_sent_code(args[0], ev.registry) else Verdict.FALSE),
        SymbolInfo("SentList", "predicate", 2, level=s0,
                   pred=_sentlist_hook, suggest=_sentlist_suggest),
        SymbolInfo("ConjSeq", "predicate", 2, level=s0,
                   pred=lambda args, ev: _conjseq_hook(args), suggest=_conjseq_suggest),
        SymbolInfo("ProofChk", "predicate", 2, level=s0,
                   pred=lambda args, ev: Verdict.TRUE if proofs.proofchk_hook(args[0], args[1]) else Verdict.FALSE,
                   suggest=_proofchk_suggest),
    ]
    for info in fns + preds:
        reg.register(info)
    return reg


def _conjseq_hook(args) -> Verdict:
    v, m = args
    try:
        return Verdict.TRUE if coding.conjseq(m) == v else Verdict.FALSE
    except ValueError:
        return Verdict.FALSE
