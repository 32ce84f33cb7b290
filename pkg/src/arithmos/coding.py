"""Numbering of terms, formulas, sequences, and code-level connectives.

The pairing function is the quadratic injection (u+v)^2 + u; it wraps every
sequence code as pair(length, payload).  The payload is a little-endian base-5
digit stream: each item contributes its base-4 digits (least significant
first, canonical) followed by a separator digit 4.  Growth is therefore
additive in the items' bit lengths, which keeps codes of diagonalized
sentences and multi-step proofs at desk scale.

Terms and formulas are coded as one flat sequence of preorder tokens; node
tags are small constants and leaf payloads (numeral values, variable and
symbol names in bijective numeration) ride along as items.  Decoding is a
total function returning ``None`` on anything malformed.
"""

from __future__ import annotations

import re
from typing import Optional, Sequence

from gmpy2 import isqrt, mpz

from . import syntax as sx
from .syntax import (
    Add, And, BExists, BForall, Eq, Exists, Forall, Formula, Iff, Implies,
    InterpFun, InterpPred, Le, Mul, Not, Num, Or, Registry, Succ, Term, Var,
    free_vars, succ,
)

Code = int


# ---------------------------------------------------------------------------
# Pairing

def pair(u: int, v: int) -> Code:
    """The quadratic pairing (u+v)^2 + u; injective on pairs of naturals."""
    if u < 0 or v < 0:
        raise ValueError("pairing is defined on naturals")
    s = mpz(u) + v
    return int(s * s + u)


def unpair(c: int) -> Optional[tuple[int, int]]:
    """Inverse of ``pair`` where one exists, found by integer square root."""
    if c < 0:
        return None
    s = isqrt(c)
    u = c - s * s
    if u > s:
        return None
    return (int(u), int(s - u))


# ---------------------------------------------------------------------------
# Sequences

_B5 = "01234"


def _base4_lsb(x: int) -> list[int]:
    if x == 0:
        return [0]
    return [int(ch) for ch in reversed(mpz(x).digits(4))]


def _lsb_base4_value(run: Sequence[int]) -> int:
    if len(run) == 1:
        return run[0]
    return int(mpz("".join(_B5[d] for d in reversed(run)), 4))


def _stream_to_payload(stream: Sequence[int]) -> int:
    if not stream:
        return 0
    return int(mpz("".join(_B5[d] for d in reversed(stream)), 5))


def _payload_to_stream(payload: int) -> list[int]:
    if payload == 0:
        return []
    return [int(ch) for ch in reversed(mpz(payload).digits(5))]


def seq_encode(items: Sequence[int]) -> Code:
    """Code of the finite sequence of naturals ``items``."""
    stream: list[int] = []
    for x in items:
        x = int(x)
        if x < 0:
            raise ValueError("sequence items must be naturals")
        stream.extend(_base4_lsb(x))
        stream.append(4)
    return pair(len(items), _stream_to_payload(stream))


def seq_items(c: int) -> Optional[list[int]]:
    """All members of the sequence coded by ``c``, or None if not a sequence."""
    d = unpair(c)
    if d is None:
        return None
    length, payload = d
    stream = _payload_to_stream(payload)
    if length == 0:
        return [] if payload == 0 else None
    if not stream or stream[-1] != 4:
        return None
    runs: list[list[int]] = []
    cur: list[int] = []
    for digit in stream:
        if digit == 4:
            runs.append(cur)
            cur = []
        else:
            cur.append(digit)
    if cur or len(runs) != length:
        return None
    values = []
    for run in runs:
        if not run or (len(run) > 1 and run[-1] == 0):
            return None  # non-canonical digit string
        values.append(_lsb_base4_value(run))
    return values


def is_seq(c: int) -> bool:
    return seq_items(c) is not None


def seq_len(c: int) -> int:
    items = seq_items(c)
    if items is None:
        raise ValueError(f"{c} is not a sequence code")
    return len(items)


def seq_at(c: int, l: int) -> Code:
    items = seq_items(c)
    if items is None:
        raise ValueError(f"{c} is not a sequence code")
    if not 0 <= l < len(items):
        raise IndexError(f"sequence index {l} out of range for length {len(items)}")
    return items[l]


def seq_prefix(c: int, k: int) -> Code:
    items = seq_items(c)
    if items is None:
        raise ValueError(f"{c} is not a sequence code")
    if not 0 <= k <= len(items):
        raise IndexError(f"prefix length {k} out of range for length {len(items)}")
    return seq_encode(items[:k])


EMPTY_SEQ = 0  # pair(0, 0)


# ---------------------------------------------------------------------------
# Names in bijective numeration

_NAME_CHARS = (
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ"
    "0123456789_'[]"
)
_NAME_INDEX = {ch: i for i, ch in enumerate(_NAME_CHARS)}
_NAME_BASE = len(_NAME_CHARS)

_VAR_RE = re.compile(r"^[a-z][A-Za-z0-9_']*$")
_SYM_RE = re.compile(r"^[A-Z][A-Za-z0-9_']*(\[\d+\])?$")


def name_code(name: str) -> int:
    n = 0
    for ch in name:
        idx = _NAME_INDEX.get(ch)
        if idx is None:
            raise ValueError(f"character {ch!r} not codeable")
        n = n * _NAME_BASE + idx + 1
    return n


def code_name(n: int) -> Optional[str]:
    if n <= 0:
        return None
    chars = []
    while n > 0:
        d = (n - 1) % _NAME_BASE
        chars.append(_NAME_CHARS[d])
        n = (n - 1 - d) // _NAME_BASE
    return "".join(reversed(chars))


# ---------------------------------------------------------------------------
# Term and formula tokens

TAG_NUM, TAG_VAR, TAG_SUCC, TAG_ADD, TAG_MUL, TAG_IFUN = range(6)
(TAG_EQ, TAG_LE, TAG_IPRED, TAG_NOT, TAG_AND, TAG_OR, TAG_IMPLIES,
 TAG_IFF, TAG_EXISTS, TAG_FORALL, TAG_BEXISTS, TAG_BFORALL) = range(6, 18)

_BIN_TAGS = {And: TAG_AND, Or: TAG_OR, Implies: TAG_IMPLIES, Iff: TAG_IFF}
_TAG_BINS = {v: k for k, v in _BIN_TAGS.items()}
_QUANT_TAGS = {Exists: TAG_EXISTS, Forall: TAG_FORALL}
_BQUANT_TAGS = {BExists: TAG_BEXISTS, BForall: TAG_BFORALL}


def _term_tokens(t: Term, out: list[int]) -> None:
    if isinstance(t, Num):
        out.append(TAG_NUM)
        out.append(t.value)
    elif isinstance(t, Var):
        out.append(TAG_VAR)
        out.append(name_code(t.name))
    elif isinstance(t, Succ):
        out.append(TAG_SUCC)
        _term_tokens(t.arg, out)
    elif isinstance(t, (Add, Mul)):
        out.append(TAG_ADD if isinstance(t, Add) else TAG_MUL)
        _term_tokens(t.left, out)
        _term_tokens(t.right, out)
    elif isinstance(t, InterpFun):
        out.append(TAG_IFUN)
        out.append(name_code(t.symbol))
        out.append(len(t.args))
        for a in t.args:
            _term_tokens(a, out)
    else:
        raise TypeError(f"not a term: {t!r}")


def _formula_tokens(f: Formula, out: list[int]) -> None:
    if isinstance(f, (Eq, Le)):
        out.append(TAG_EQ if isinstance(f, Eq) else TAG_LE)
        _term_tokens(f.left, out)
        _term_tokens(f.right, out)
    elif isinstance(f, InterpPred):
        out.append(TAG_IPRED)
        out.append(name_code(f.symbol))
        out.append(len(f.args))
        for a in f.args:
            _term_tokens(a, out)
    elif isinstance(f, Not):
        out.append(TAG_NOT)
        _formula_tokens(f.body, out)
    elif isinstance(f, (And, Or, Implies, Iff)):
        out.append(_BIN_TAGS[type(f)])
        _formula_tokens(f.left, out)
        _formula_tokens(f.right, out)
    elif isinstance(f, (Exists, Forall)):
        out.append(_QUANT_TAGS[type(f)])
        out.append(name_code(f.var))
        _formula_tokens(f.body, out)
    elif isinstance(f, (BExists, BForall)):
        out.append(_BQUANT_TAGS[type(f)])
        out.append(name_code(f.var))
        _term_tokens(f.bound, out)
        _formula_tokens(f.body, out)
    else:
        raise TypeError(f"not a formula: {f!r}")


def encode_term(t: Term) -> Code:
    out: list[int] = []
    _term_tokens(t, out)
    return seq_encode(out)


def encode_formula(f: Formula) -> Code:
    out: list[int] = []
    _formula_tokens(f, out)
    return seq_encode(out)


class _Reader:
    def __init__(self, items: list[int], registry: Optional[Registry]):
        self.items = items
        self.i = 0
        self.registry = registry

    def take(self) -> Optional[int]:
        if self.i >= len(self.items):
            return None
        v = self.items[self.i]
        self.i += 1
        return v

    def term(self) -> Optional[Term]:
        tag = self.take()
        if tag == TAG_NUM:
            n = self.take()
            return None if n is None else Num(n)
        if tag == TAG_VAR:
            code = self.take()
            name = code_name(code) if code is not None else None
            if name is None or not _VAR_RE.match(name):
                return None
            return Var(name)
        if tag == TAG_SUCC:
            arg = self.term()
            if arg is None or isinstance(arg, Num):
                return None  # successor of a numeral is non-canonical
            return Succ(arg)
        if tag in (TAG_ADD, TAG_MUL):
            left = self.term()
            right = self.term() if left is not None else None
            if right is None:
                return None
            return (Add if tag == TAG_ADD else Mul)(left, right)
        if tag == TAG_IFUN:
            sym, args = self._application("function")
            return None if sym is None else InterpFun(sym, args)
        return None

    def _application(self, kind: str):
        code = self.take()
        arity = self.take()
        name = code_name(code) if code is not None else None
        if name is None or arity is None or not _SYM_RE.match(name) or arity > 16:
            return None, ()
        if self.registry is not None:
            info = self.registry.lookup(name)
            if info is None or info.kind != kind or info.arity != arity:
                return None, ()
        args = []
        for _ in range(arity):
            a = self.term()
            if a is None:
                return None, ()
            args.append(a)
        return name, tuple(args)

    def formula(self) -> Optional[Formula]:
        tag = self.take()
        if tag in (TAG_EQ, TAG_LE):
            left = self.term()
            right = self.term() if left is not None else None
            if right is None:
                return None
            return (Eq if tag == TAG_EQ else Le)(left, right)
        if tag == TAG_IPRED:
            sym, args = self._application("predicate")
            return None if sym is None else InterpPred(sym, args)
        if tag == TAG_NOT:
            body = self.formula()
            return None if body is None else Not(body)
        if tag in _TAG_BINS:
            left = self.formula()
            right = self.formula() if left is not None else None
            if right is None:
                return None
            return _TAG_BINS[tag](left, right)
        if tag in (TAG_EXISTS, TAG_FORALL):
            code = self.take()
            name = code_name(code) if code is not None else None
            if name is None or not _VAR_RE.match(name):
                return None
            body = self.formula()
            if body is None:
                return None
            return (Exists if tag == TAG_EXISTS else Forall)(name, body)
        if tag in (TAG_BEXISTS, TAG_BFORALL):
            code = self.take()
            name = code_name(code) if code is not None else None
            if name is None or not _VAR_RE.match(name):
                return None
            bound = self.term()
            body = self.formula() if bound is not None else None
            if body is None:
                return None
            cls = BExists if tag == TAG_BEXISTS else BForall
            try:
                return cls(name, bound, body)
            except ValueError:
                return None
        return None


def decode_term(c: int, registry: Optional[Registry] = None) -> Optional[Term]:
    items = seq_items(c)
    if not items:
        return None
    r = _Reader(items, registry)
    t = r.term()
    return t if t is not None and r.i == len(items) else None


def decode_formula(c: int, registry: Optional[Registry] = None) -> Optional[Formula]:
    items = seq_items(c)
    if not items:
        return None
    r = _Reader(items, registry)
    f = r.formula()
    return f if f is not None and r.i == len(items) else None


def is_sent_code(c: int, registry: Optional[Registry] = None) -> bool:
    """The Sent predicate: c codes a closed formula."""
    f = decode_formula(c, registry)
    return f is not None and not free_vars(f)


# ---------------------------------------------------------------------------
# Code-level connectives

_CODE_OPS = {"and": TAG_AND, "or": TAG_OR, "implies": TAG_IMPLIES}


def _formula_items(c: int) -> list[int]:
    if decode_formula(c) is None:
        raise ValueError(f"{c} is not a formula code")
    return seq_items(c)  # type: ignore[return-value]


def neg_code(m: int) -> Code:
    """Code of the negation of the formula coded by m; purely syntactic."""
    return seq_encode([TAG_NOT] + _formula_items(m))


def bin_code(op: str, m: int, k: int) -> Code:
    """Code of the binary combination of the formulas coded by m and k."""
    tag = _CODE_OPS.get(op)
    if tag is None:
        raise ValueError(f"op must be one of {sorted(_CODE_OPS)}, got {op!r}")
    return seq_encode([tag] + _formula_items(m) + _formula_items(k))


def imp_code(m: int, k: int) -> Code:
    return bin_code("implies", m, k)


def and_code(m: int, k: int) -> Code:
    return bin_code("and", m, k)


def code_zero_eq_zero() -> Code:
    return encode_formula(Eq(Num(0), Num(0)))


def code_zero_neq_zero() -> Code:
    return encode_formula(Not(Eq(Num(0), Num(0))))


def conjseq(m: int) -> Code:
    """Code of the left-to-right conjunction of the sentences listed in m.

    The empty sequence yields the provable unit 0 = 0.
    """
    items = seq_items(m)
    if items is None:
        raise ValueError(f"{m} is not a sequence code")
    for it in items:
        if not is_sent_code(it):
            raise ValueError(f"sequence member {it} is not a sentence code")
    if not items:
        return code_zero_eq_zero()
    acc = items[0]
    for it in items[1:]:
        acc = bin_code("and", acc, it)
    return acc


def conj_member_lists(c: int) -> list[list[int]]:
    """All sentence lists whose left-fold conjunction has code ``c``."""
    f = decode_formula(c)
    if f is None or free_vars(f):
        return []

    def lists(g: Formula) -> list[list[Formula]]:
        out = [[g]]
        if isinstance(g, And):
            for left in lists(g.left):
                out.append(left + [g.right])
        return out

    return [[encode_formula(x) for x in lst] for lst in lists(f)]


def conjseq_candidates(c: int) -> list[int]:
    """Sequence codes m with conjseq(m) == c, largest last."""
    return sorted(seq_encode(lst) for lst in conj_member_lists(c))


def seq_cap(c: int) -> int:
    """Upper bound on sequence codes whose conjunction folds to ``c``."""
    cands = conjseq_candidates(c)
    return cands[-1] if cands else 0
