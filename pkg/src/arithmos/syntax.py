"""Abstract syntax, parsing, and printing for first-order arithmetic.

The signature is {0, S, +, *, <=} plus a registry of interpreted extension
symbols (functions and predicates) that carry a declared hierarchy level and
evaluation hooks.  Bounded quantifiers are first-class nodes, not encodings.

Successor chains over zero are kept run-length encoded: the canonical numeral
node ``Num(n)`` stands for n applications of S to 0, and the ``succ``
constructor normalizes ``S(Num(k))`` to ``Num(k+1)``.  This keeps numerals
with astronomically many successors (as produced by diagonalization)
representable while every term built through the constructors stays in
canonical form.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional, TYPE_CHECKING

if TYPE_CHECKING:
    from .hierarchy import Level


class SyntaxError_(ValueError):
    """Parse failure, with a character position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True)
class Term:
    def __str__(self) -> str:
        return format_term(self)


@dataclass(frozen=True)
class Num(Term):
    """Canonical numeral: ``value`` nested successors around zero."""

    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are non-negative")


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Succ(Term):
    """Successor of a non-numeral term; use ``succ`` to stay canonical."""

    arg: Term


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class InterpFun(Term):
    """Application of a registered interpreted function symbol."""

    symbol: str
    args: tuple[Term, ...]


Zero = Num(0)


def succ(t: Term) -> Term:
    """Successor constructor; folds successors of numerals into ``Num``."""
    if isinstance(t, Num):
        return Num(t.value + 1)
    return Succ(t)


def numeral(n: int) -> Term:
    """The term with exactly n successor applications around zero."""
    return Num(n)


def succ_count(t: Term) -> int:
    """Number of successor applications along the spine of ``t``."""
    k = 0
    while isinstance(t, Succ):
        k += 1
        t = t.arg
    if isinstance(t, Num):
        k += t.value
    return k


# ---------------------------------------------------------------------------
# Formulas

@dataclass(frozen=True)
class Formula:
    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Le(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class InterpPred(Formula):
    """Atom built from a registered interpreted predicate symbol."""

    symbol: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class BExists(Formula):
    """Bounded existential: E var <= bound. body"""

    var: str
    bound: Term
    body: Formula

    def __post_init__(self):
        if self.var in term_vars(self.bound):
            raise ValueError(f"bound term of bounded quantifier mentions {self.var!r}")


@dataclass(frozen=True)
class BForall(Formula):
    """Bounded universal: A var <= bound. body"""

    var: str
    bound: Term
    body: Formula

    def __post_init__(self):
        if self.var in term_vars(self.bound):
            raise ValueError(f"bound term of bounded quantifier mentions {self.var!r}")


def lt(a: Term, b: Term) -> Formula:
    """Strict order as sugar: a < b means a <= b and not a = b."""
    return And(Le(a, b), Not(Eq(a, b)))


ATOMS = (Eq, Le, InterpPred)
QUANTIFIERS = (Exists, Forall, BExists, BForall)
BINARY = (And, Or, Implies, Iff)


# ---------------------------------------------------------------------------
# Free variables and substitution

def term_vars(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            out.add(cur.name)
        elif isinstance(cur, Succ):
            stack.append(cur.arg)
        elif isinstance(cur, (Add, Mul)):
            stack.append(cur.left)
            stack.append(cur.right)
        elif isinstance(cur, InterpFun):
            stack.extend(cur.args)
    return out


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, (Eq, Le)):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, InterpPred):
        out: set[str] = set()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, BINARY):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, (BExists, BForall)):
        return (free_vars(f.body) - {f.var}) | term_vars(f.bound)
    raise TypeError(f"not a formula: {f!r}")


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def fresh_var(base: str, taken: set[str]) -> str:
    """Deterministic fresh name: append the least positive numeric suffix."""
    i = 1
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def substitute_term(t: Term, v: str, repl: Term) -> Term:
    if isinstance(t, Var):
        return repl if t.name == v else t
    if isinstance(t, Num):
        return t
    if isinstance(t, Succ):
        return succ(substitute_term(t.arg, v, repl))
    if isinstance(t, Add):
        return Add(substitute_term(t.left, v, repl), substitute_term(t.right, v, repl))
    if isinstance(t, Mul):
        return Mul(substitute_term(t.left, v, repl), substitute_term(t.right, v, repl))
    if isinstance(t, InterpFun):
        return InterpFun(t.symbol, tuple(substitute_term(a, v, repl) for a in t.args))
    raise TypeError(f"not a term: {t!r}")


def substitute(f: Formula, v: str, repl: Term) -> Formula:
    """Capture-avoiding substitution of ``repl`` for free occurrences of ``v``."""
    if isinstance(f, (Eq, Le)):
        return type(f)(substitute_term(f.left, v, repl), substitute_term(f.right, v, repl))
    if isinstance(f, InterpPred):
        return InterpPred(f.symbol, tuple(substitute_term(a, v, repl) for a in f.args))
    if isinstance(f, Not):
        return Not(substitute(f.body, v, repl))
    if isinstance(f, BINARY):
        return type(f)(substitute(f.left, v, repl), substitute(f.right, v, repl))
    if isinstance(f, (Exists, Forall)):
        if f.var == v:
            return f
        if f.var in term_vars(repl) and v in free_vars(f.body):
            new = fresh_var(f.var, free_vars(f.body) | term_vars(repl) | {v})
            body = substitute(f.body, f.var, Var(new))
            return type(f)(new, substitute(body, v, repl))
        return type(f)(f.var, substitute(f.body, v, repl))
    if isinstance(f, (BExists, BForall)):
        bound = substitute_term(f.bound, v, repl) if f.var != v else f.bound
        if f.var == v:
            return type(f)(f.var, bound, f.body)
        if f.var in term_vars(repl) and v in free_vars(f.body):
            new = fresh_var(f.var, free_vars(f.body) | term_vars(repl) | {v})
            body = substitute(f.body, f.var, Var(new))
            return type(f)(new, bound, substitute(body, v, repl))
        return type(f)(f.var, bound, substitute(f.body, v, repl))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Symbol registry

@dataclass(frozen=True)
class SymbolInfo:
    """Registry entry for one interpreted symbol.

    ``level`` is the declared hierarchy level of a predicate symbol (functions
    contribute bounded-formula context and carry ``None``).  ``fn`` maps
    argument values to a value, totally; ``pred`` maps argument values to a
    Verdict and may consult the running evaluator.  ``suggest`` optionally
    proposes witness values for one unknown argument position, and ``invert``
    optionally lists preimage tuples of a function value; both exist so the
    budgeted evaluator can find structured witnesses (proof codes, sequence
    codes) that blind enumeration would never reach.
    """

    name: str
    kind: str  # "function" | "predicate"
    arity: int
    level: Optional["Level"] = None
    fn: Optional[Callable] = None
    pred: Optional[Callable] = None
    suggest: Optional[Callable] = None
    invert: Optional[Callable] = None


_PARAM_SYMBOL = re.compile(r"^(TruePi|TrueSigma)\[(\d+)\]$")


class Registry:
    """Mutable table of interpreted symbols; copies are cheap."""

    def __init__(self, entries: Optional[dict[str, SymbolInfo]] = None,
                 parametric: Optional[Callable[[str], Optional[SymbolInfo]]] = None):
        self._entries: dict[str, SymbolInfo] = dict(entries or {})
        self._parametric = parametric

    def register(self, info: SymbolInfo) -> None:
        if info.name in self._entries:
            raise ValueError(f"symbol already registered: {info.name}")
        self._entries[info.name] = info

    def lookup(self, name: str) -> Optional[SymbolInfo]:
        hit = self._entries.get(name)
        if hit is not None:
            return hit
        if self._parametric is not None:
            made = self._parametric(name)
            if made is not None:
                self._entries[name] = made
            return made
        return None

    def require(self, name: str) -> SymbolInfo:
        info = self.lookup(name)
        if info is None:
            raise KeyError(f"unknown interpreted symbol: {name}")
        return info

    def copy(self) -> "Registry":
        return Registry(self._entries, self._parametric)

    def names(self) -> list[str]:
        return sorted(self._entries)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow2><->)|(?P<arrow>->)|(?P<le><=)|(?P<lt><)"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9_']*(?:\[\d+\])?)"
    r"|(?P<int>\d+)"
    r"|(?P<punct>[().,=~&|+*]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise SyntaxError_(f"unexpected character {rest[0]!r}", pos)
        pos = m.end()
        for kind in ("arrow2", "arrow", "le", "lt", "ident", "int", "punct"):
            val = m.group(kind)
            if val is not None:
                tokens.append((kind, val, m.start()))
                break
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, registry: Optional[Registry]):
        self.tokens = _tokenize(text)
        self.i = 0
        self.registry = registry

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.next()
        if val != value:
            raise SyntaxError_(f"expected {value!r}, found {val!r}", pos)

    def fail(self, msg: str):
        raise SyntaxError_(msg, self.peek()[2])

    # formula := iff
    def formula(self) -> Formula:
        return self.iff()

    def iff(self) -> Formula:
        f = self.imp()
        while self.peek()[1] == "<->":
            self.next()
            f = Iff(f, self.imp())
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.peek()[1] == "->":
            self.next()
            return Implies(f, self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek()[1] == "|":
            self.next()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek()[1] == "&":
            self.next()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "~":
            self.next()
            return Not(self.unary())
        if val in ("A", "E"):
            return self.quantified()
        return self.atom()

    def quantified(self) -> Formula:
        _, q, pos = self.next()
        kind, name, vpos = self.next()
        if kind != "ident" or not name[0].islower():
            raise SyntaxError_("expected a variable after quantifier", vpos)
        bound = None
        if self.peek()[1] == "<=":
            self.next()
            bound = self.term()
        self.expect(".")
        body = self.formula()
        if q == "A":
            return BForall(name, bound, body) if bound is not None else Forall(name, body)
        return BExists(name, bound, body) if bound is not None else Exists(name, body)

    def atom(self) -> Formula:
        kind, val, pos = self.peek()
        if val == "(":
            # Could be a parenthesized formula or a parenthesized term in a
            # relation; resolve by attempting the formula first.
            save = self.i
            try:
                self.next()
                f = self.formula()
                self.expect(")")
                if self.peek()[1] in ("=", "<=", "<"):
                    raise SyntaxError_("relation after formula", pos)
                return f
            except SyntaxError_:
                self.i = save
        if kind == "ident" and val[0].isupper() and val != "S":
            info = self.registry.lookup(val) if self.registry else None
            if info is None:
                raise SyntaxError_(f"unknown symbol {val!r}", pos)
            if info.kind == "predicate":
                self.next()
                args = self.call_args(val, info.arity, pos)
                return InterpPred(val, args)
        left = self.term()
        kind, val, pos = self.next()
        if val == "=":
            return Eq(left, self.term())
        if val == "<=":
            return Le(left, self.term())
        if val == "<":
            return lt(left, self.term())
        raise SyntaxError_(f"expected a relation, found {val!r}", pos)

    def call_args(self, name: str, arity: int, pos: int) -> tuple[Term, ...]:
        self.expect("(")
        args = [self.term()]
        while self.peek()[1] == ",":
            self.next()
            args.append(self.term())
        self.expect(")")
        if len(args) != arity:
            raise SyntaxError_(f"{name} expects {arity} arguments, got {len(args)}", pos)
        return tuple(args)

    # term := factor ('+' factor)*
    def term(self) -> Term:
        t = self.factor()
        while self.peek()[1] == "+":
            self.next()
            t = Add(t, self.factor())
        return t

    def factor(self) -> Term:
        t = self.prim()
        while self.peek()[1] == "*":
            self.next()
            t = Mul(t, self.prim())
        return t

    def prim(self) -> Term:
        kind, val, pos = self.next()
        if kind == "int":
            return Num(int(val))
        if val == "(":
            t = self.term()
            self.expect(")")
            return t
        if val == "S":
            # Successor chains are parsed iteratively so deep numerals do
            # not overflow the recursion limit.
            depth = 1
            self.expect("(")
            while self.peek()[1] == "S":
                self.next()
                self.expect("(")
                depth += 1
            inner = self.term()
            for _ in range(depth):
                self.expect(")")
                inner = succ(inner)
            return inner
        if kind == "ident":
            if val[0].islower():
                if val in ("A", "E"):
                    raise SyntaxError_("quantifier in term position", pos)
                return Var(sys.intern(val))
            info = self.registry.lookup(val) if self.registry else None
            if info is None:
                raise SyntaxError_(f"unknown symbol {val!r}", pos)
            if info.kind != "function":
                raise SyntaxError_(f"{val} is not a function symbol", pos)
            args = self.call_args(val, info.arity, pos)
            return InterpFun(val, args)
        raise SyntaxError_(f"expected a term, found {val!r}", pos)


def parse(text: str, registry: Optional[Registry] = None) -> Formula:
    """Parse a formula; interpreted symbols are resolved via ``registry``."""
    p = _Parser(text, registry)
    f = p.formula()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise SyntaxError_(f"trailing input {val!r}", pos)
    return f


def parse_term(text: str, registry: Optional[Registry] = None) -> Term:
    p = _Parser(text, registry)
    t = p.term()
    kind, val, pos = p.peek()
    if kind != "eof":
        raise SyntaxError_(f"trailing input {val!r}", pos)
    return t


# ---------------------------------------------------------------------------
# Printer

NUMERAL_PRINT_MAX = 500

_TERM_ATOM, _TERM_MUL, _TERM_ADD = 3, 2, 1


def _fmt_term(t: Term, ctx: int) -> str:
    if isinstance(t, Num):
        if t.value <= NUMERAL_PRINT_MAX:
            return "S(" * t.value + "0" + ")" * t.value
        return str(t.value)
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Succ):
        return f"S({_fmt_term(t.arg, _TERM_ADD)})"
    if isinstance(t, InterpFun):
        return f"{t.symbol}({', '.join(_fmt_term(a, _TERM_ADD) for a in t.args)})"
    if isinstance(t, Add):
        s = f"{_fmt_term(t.left, _TERM_ADD)} + {_fmt_term(t.right, _TERM_MUL)}"
        return f"({s})" if ctx > _TERM_ADD else s
    if isinstance(t, Mul):
        s = f"{_fmt_term(t.left, _TERM_MUL)} * {_fmt_term(t.right, _TERM_ATOM)}"
        return f"({s})" if ctx > _TERM_MUL else s
    raise TypeError(f"not a term: {t!r}")


def format_term(t: Term) -> str:
    return _fmt_term(t, _TERM_ADD)


_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5}
_ATOM_PREC = 6
_QUANT_PREC = 0


def _fmt(f: Formula, ctx: int) -> str:
    if isinstance(f, Eq):
        s = f"{format_term(f.left)} = {format_term(f.right)}"
        return s
    if isinstance(f, Le):
        return f"{format_term(f.left)} <= {format_term(f.right)}"
    if isinstance(f, InterpPred):
        return f"{f.symbol}({', '.join(format_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return f"~{_fmt(f.body, _PREC[Not])}"
    if isinstance(f, And):
        s = f"{_fmt(f.left, 4)} & {_fmt(f.right, 5)}"
        return f"({s})" if ctx > 4 else s
    if isinstance(f, Or):
        s = f"{_fmt(f.left, 3)} | {_fmt(f.right, 4)}"
        return f"({s})" if ctx > 3 else s
    if isinstance(f, Implies):
        s = f"{_fmt(f.left, 3)} -> {_fmt(f.right, 2)}"
        return f"({s})" if ctx > 2 else s
    if isinstance(f, Iff):
        s = f"{_fmt(f.left, 1)} <-> {_fmt(f.right, 2)}"
        return f"({s})" if ctx > 1 else s
    if isinstance(f, (Exists, Forall)):
        q = "E" if isinstance(f, Exists) else "A"
        s = f"{q} {f.var}. {_fmt(f.body, _QUANT_PREC)}"
        return f"({s})" if ctx > _QUANT_PREC else s
    if isinstance(f, (BExists, BForall)):
        q = "E" if isinstance(f, BExists) else "A"
        s = f"{q} {f.var} <= {format_term(f.bound)}. {_fmt(f.body, _QUANT_PREC)}"
        return f"({s})" if ctx > _QUANT_PREC else s
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f: Formula) -> str:
    return _fmt(f, _QUANT_PREC)
