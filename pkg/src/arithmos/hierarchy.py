"""Syntactic placement of formulas in the quantifier-alternation hierarchy.

``classify`` computes the minimal level derivable by the inductive closure
rules: bounded-only formulas sit at the base; an existential level is closed
under conjunction, disjunction, existential and bounded quantifiers of both
kinds; a universal level dually; and each level embeds into both kinds one
index up.  Implication and equivalence are desugared and the formula is taken
to negation normal form first, so negation lands only on atoms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import syntax as sx
from .syntax import (
    And, BExists, BForall, Eq, Exists, Forall, Formula, Iff, Implies,
    InterpPred, Le, Not, Or, Registry,
)


@dataclass(frozen=True)
class Level:
    """A point in the hierarchy lattice: Sigma(n) or Pi(n).

    Index 0 is self-dual, so Pi(0) normalizes to Sigma(0) and the two compare
    equal.  Cross-kind order holds only with a strictly smaller index.
    """

    kind: str  # "Sigma" | "Pi"
    index: int

    def __post_init__(self):
        if self.kind not in ("Sigma", "Pi"):
            raise ValueError(f"bad level kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("level index must be non-negative")
        if self.index == 0 and self.kind != "Sigma":
            object.__setattr__(self, "kind", "Sigma")

    def __le__(self, other: "Level") -> bool:
        if self.index < other.index:
            return True
        return self.index == other.index and self.kind == other.kind

    def __lt__(self, other: "Level") -> bool:
        return self <= other and self != other

    def __str__(self) -> str:
        return f"{self.kind}({self.index})"


def Sigma(n: int) -> Level:
    return Level("Sigma", n)


def Pi(n: int) -> Level:
    return Level("Pi", n)


def dual(l: Level) -> Level:
    """Swap Sigma and Pi, preserving the index; an involution."""
    if l.index == 0:
        return l
    return Level("Pi" if l.kind == "Sigma" else "Sigma", l.index)


def join(a: Level, b: Level) -> Level:
    """Least upper bound where one exists; same-index mixed kinds have two
    minimal upper bounds and resolve to the existential one by convention."""
    if a <= b:
        return b
    if b <= a:
        return a
    return Level("Sigma", a.index + 1)


# ---------------------------------------------------------------------------
# Desugaring and negation normal form

def desugar(f: Formula) -> Formula:
    """Rewrite implication and equivalence into and/or/not."""
    if isinstance(f, (Eq, Le, InterpPred)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.body))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Or(desugar(f.left), desugar(f.right))
    if isinstance(f, Implies):
        return Or(Not(desugar(f.left)), desugar(f.right))
    if isinstance(f, Iff):
        a, b = desugar(f.left), desugar(f.right)
        return And(Or(Not(a), b), Or(Not(b), a))
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, desugar(f.body))
    if isinstance(f, (BExists, BForall)):
        return type(f)(f.var, f.bound, desugar(f.body))
    raise TypeError(f"not a formula: {f!r}")


def nnf(f: Formula) -> Formula:
    """Negation normal form of the desugared formula."""
    return _nnf(desugar(f), False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, (Eq, Le, InterpPred)):
        return Not(f) if neg else f
    if isinstance(f, Not):
        return _nnf(f.body, not neg)
    if isinstance(f, And):
        op = Or if neg else And
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        op = And if neg else Or
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Exists):
        op = Forall if neg else Exists
        return op(f.var, _nnf(f.body, neg))
    if isinstance(f, Forall):
        op = Exists if neg else Forall
        return op(f.var, _nnf(f.body, neg))
    if isinstance(f, BExists):
        op = BForall if neg else BExists
        return op(f.var, f.bound, _nnf(f.body, neg))
    if isinstance(f, BForall):
        op = BExists if neg else BForall
        return op(f.var, f.bound, _nnf(f.body, neg))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Level computation

def _atom_profile(level: Level) -> tuple[int, int]:
    # (s, p): least indices such that the formula sits in Sigma(s) and Pi(p).
    n = level.index
    if n == 0:
        return (0, 0)
    if level.kind == "Sigma":
        return (n, n + 1)
    return (n + 1, n)


def _profile(f: Formula, registry: Optional[Registry]) -> tuple[int, int]:
    """Minimal (Sigma, Pi) indices for an NNF formula."""
    if isinstance(f, (Eq, Le)):
        return (0, 0)
    if isinstance(f, InterpPred):
        return _atom_profile(_declared(f, registry))
    if isinstance(f, Not):
        body = f.body
        if isinstance(body, (Eq, Le)):
            return (0, 0)
        if isinstance(body, InterpPred):
            s, p = _atom_profile(_declared(body, registry))
            return (p, s)
        raise ValueError("negation below NNF should wrap an atom")
    if isinstance(f, (And, Or)):
        sl, pl = _profile(f.left, registry)
        sr, pr = _profile(f.right, registry)
        return (max(sl, sr), max(pl, pr))
    if isinstance(f, Exists):
        sb, pb = _profile(f.body, registry)
        s = min(max(sb, 1), pb + 1)
        return (s, s + 1)
    if isinstance(f, Forall):
        sb, pb = _profile(f.body, registry)
        p = min(max(pb, 1), sb + 1)
        return (p + 1, p)
    if isinstance(f, (BExists, BForall)):
        return _profile(f.body, registry)
    raise TypeError(f"not a formula: {f!r}")


def _declared(atom: InterpPred, registry: Optional[Registry]) -> Level:
    if registry is None:
        raise KeyError(f"no registry supplied for interpreted symbol {atom.symbol!r}")
    info = registry.require(atom.symbol)
    if info.level is None:
        raise KeyError(f"symbol {atom.symbol!r} has no declared level")
    return info.level


def _tie_kind(f: Formula, registry: Optional[Registry]) -> Optional[str]:
    """Kind of the first level-committing node in preorder: an unbounded
    quantifier, or an interpreted atom with index >= 1."""
    stack = [(f, False)]
    while stack:
        cur, neg = stack.pop()
        if isinstance(cur, Exists):
            return "Pi" if neg else "Sigma"
        if isinstance(cur, Forall):
            return "Sigma" if neg else "Pi"
        if isinstance(cur, InterpPred):
            lvl = _declared(cur, registry)
            if lvl.index >= 1:
                return dual(lvl).kind if neg else lvl.kind
            continue
        if isinstance(cur, Not):
            stack.append((cur.body, not neg))
        elif isinstance(cur, (And, Or)):
            stack.append((cur.right, neg))
            stack.append((cur.left, neg))
        elif isinstance(cur, (BExists, BForall)):
            stack.append((cur.body, neg))
    return None


def profile(f: Formula, registry: Optional[Registry] = None) -> tuple[int, int]:
    """Least (s, p) with f in Sigma(s) and in Pi(p); |s - p| <= 1 always."""
    return _profile(nnf(f), registry)


def classify(f: Formula, registry: Optional[Registry] = None) -> Level:
    """Minimal hierarchy level of ``f`` under the inductive closure rules.

    When the least existential and universal indices coincide above the base,
    the reported kind follows the outermost level-committing node of the NNF.
    """
    form = nnf(f)
    s, p = _profile(form, registry)
    if s < p:
        return Level("Sigma", s)
    if p < s:
        return Level("Pi", p)
    if s == 0:
        return Level("Sigma", 0)
    kind = _tie_kind(form, registry) or "Sigma"
    return Level(kind, s)


def is_delta(f: Formula, registry: Optional[Registry] = None) -> bool:
    """True when both classifications hold at the reported index."""
    s, p = profile(f, registry)
    return s == p
