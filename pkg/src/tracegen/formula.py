"""Multi-sorted term/formula representation that serializes to SMT-LIB 2.

Sorts: Bool, BitVec 8/16/32/64, String, Array(BitVec 32 -> BitVec 32) and
Array(BitVec 32 -> String). Terms are immutable dataclasses; the builder
functions fold literal operands eagerly (two's-complement at the operand
width), which the unwinder relies on to prune dead branches and stop
recursion inlining early.

Bitvector literals store the unsigned bit pattern; ``to_signed``/``to_pattern``
convert. Folding of signed division/remainder matches SMT-LIB bvsdiv/bvsrem,
which in turn matches Java (truncating, remainder sign follows the dividend,
MIN/-1 wraps); division by a literal zero is never folded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


# ---------------------------------------------------------------------------
# Sorts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sort:
    name: str                       # Bool | BitVec | String | Array
    width: int = 0                  # BitVec only
    key: Optional["Sort"] = None    # Array only
    value: Optional["Sort"] = None  # Array only

    def __str__(self) -> str:
        if self.name == "BitVec":
            return f"(_ BitVec {self.width})"
        if self.name == "Array":
            return f"(Array {self.key} {self.value})"
        return self.name


BOOL = Sort("Bool")
STRING = Sort("String")
BV8 = Sort("BitVec", 8)
BV16 = Sort("BitVec", 16)
BV32 = Sort("BitVec", 32)
BV64 = Sort("BitVec", 64)
INT_HEAP = Sort("Array", key=BV32, value=BV32)
STRING_HEAP = Sort("Array", key=BV32, value=STRING)


def bv(width: int) -> Sort:
    return {8: BV8, 16: BV16, 32: BV32, 64: BV64}[width]


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Const(Term):
    name: str
    sort: Sort


@dataclass(frozen=True)
class BvLit(Term):
    pattern: int    # unsigned bit pattern, 0 <= pattern < 2**width
    width: int

    @property
    def sort(self) -> Sort:
        return bv(self.width)

    @property
    def signed(self) -> int:
        return to_signed(self.pattern, self.width)


@dataclass(frozen=True)
class BoolVal(Term):
    value: bool

    @property
    def sort(self) -> Sort:
        return BOOL


@dataclass(frozen=True)
class StrLit(Term):
    value: str

    @property
    def sort(self) -> Sort:
        return STRING


@dataclass(frozen=True)
class App(Term):
    op: str
    args: tuple[Term, ...]
    sort: Sort
    index: Optional[int] = None   # (_ op index) forms like sign_extend

    def __post_init__(self):
        assert isinstance(self.args, tuple)


TRUE = BoolVal(True)
FALSE = BoolVal(False)


def to_signed(pattern: int, width: int) -> int:
    if pattern >= 1 << (width - 1):
        return pattern - (1 << width)
    return pattern


def to_pattern(value: int, width: int) -> int:
    return value & ((1 << width) - 1)


def bvlit(value: int, width: int) -> BvLit:
    """Literal from a signed (or any) Python int, wrapping at width."""
    return BvLit(to_pattern(value, width), width)


def sort_of(t: Term) -> Sort:
    return t.sort


def is_lit(t: Term) -> bool:
    return isinstance(t, (BvLit, BoolVal, StrLit))


# ---------------------------------------------------------------------------
# Bitvector builders
# ---------------------------------------------------------------------------

def _bv_binop(op: str, a: Term, b: Term) -> Term:
    w = a.sort.width
    assert b.sort.width == w, f"width mismatch in {op}: {a.sort} vs {b.sort}"
    if isinstance(a, BvLit) and isinstance(b, BvLit):
        x, y = a.signed, b.signed
        if op == "bvadd":
            return bvlit(x + y, w)
        if op == "bvsub":
            return bvlit(x - y, w)
        if op == "bvmul":
            return bvlit(x * y, w)
        if op in ("bvsdiv", "bvsrem") and y != 0:
            q = abs(x) // abs(y)
            if (x < 0) != (y < 0):
                q = -q
            if op == "bvsdiv":
                return bvlit(q, w)
            return bvlit(x - q * y, w)
    # cheap identities on one literal side (sound: all terms are pure)
    if op == "bvadd":
        if isinstance(a, BvLit) and a.pattern == 0:
            return b
        if isinstance(b, BvLit) and b.pattern == 0:
            return a
    if op == "bvsub" and isinstance(b, BvLit) and b.pattern == 0:
        return a
    if op == "bvmul":
        if isinstance(a, BvLit) and a.signed == 1:
            return b
        if isinstance(b, BvLit) and b.signed == 1:
            return a
    return App(op, (a, b), bv(w))


def bvadd(a: Term, b: Term) -> Term:
    return _bv_binop("bvadd", a, b)


def bvsub(a: Term, b: Term) -> Term:
    return _bv_binop("bvsub", a, b)


def bvmul(a: Term, b: Term) -> Term:
    return _bv_binop("bvmul", a, b)


def bvsdiv(a: Term, b: Term) -> Term:
    return _bv_binop("bvsdiv", a, b)


def bvsrem(a: Term, b: Term) -> Term:
    return _bv_binop("bvsrem", a, b)


def bvneg(a: Term) -> Term:
    if isinstance(a, BvLit):
        return bvlit(-a.signed, a.width)
    return App("bvneg", (a,), a.sort)


_CMP = {"<": "bvslt", ">": "bvsgt", "<=": "bvsle", ">=": "bvsge"}


def bvcmp(op: str, a: Term, b: Term) -> Term:
    assert a.sort.width == b.sort.width
    if isinstance(a, BvLit) and isinstance(b, BvLit):
        x, y = a.signed, b.signed
        return BoolVal({"<": x < y, ">": x > y, "<=": x <= y, ">=": x >= y}[op])
    return App(_CMP[op], (a, b), BOOL)


def sign_extend(t: Term, extra: int) -> Term:
    if extra == 0:
        return t
    w = t.sort.width
    if isinstance(t, BvLit):
        return bvlit(t.signed, w + extra)
    return App("sign_extend", (t,), bv(w + extra), index=extra)


def zero_extend(t: Term, extra: int) -> Term:
    if extra == 0:
        return t
    w = t.sort.width
    if isinstance(t, BvLit):
        return BvLit(t.pattern, w + extra)
    return App("zero_extend", (t,), bv(w + extra), index=extra)


# ---------------------------------------------------------------------------
# Boolean builders
# ---------------------------------------------------------------------------

def mk_not(a: Term) -> Term:
    if isinstance(a, BoolVal):
        return BoolVal(not a.value)
    if isinstance(a, App) and a.op == "not":
        return a.args[0]
    return App("not", (a,), BOOL)


def mk_and(*args: Term) -> Term:
    flat: list[Term] = []
    for a in args:
        if isinstance(a, BoolVal):
            if not a.value:
                return FALSE
            continue
        if isinstance(a, App) and a.op == "and":
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return App("and", tuple(flat), BOOL)


def mk_or(*args: Term) -> Term:
    flat: list[Term] = []
    for a in args:
        if isinstance(a, BoolVal):
            if a.value:
                return TRUE
            continue
        if isinstance(a, App) and a.op == "or":
            flat.extend(a.args)
        else:
            flat.append(a)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return App("or", tuple(flat), BOOL)


def mk_implies(a: Term, b: Term) -> Term:
    if isinstance(a, BoolVal):
        return b if a.value else TRUE
    if isinstance(b, BoolVal) and b.value:
        return TRUE
    return App("=>", (a, b), BOOL)


def mk_eq(a: Term, b: Term) -> Term:
    assert a.sort == b.sort, f"sort mismatch in =: {a.sort} vs {b.sort}"
    if a == b:
        return TRUE
    if is_lit(a) and is_lit(b):
        if isinstance(a, BvLit):
            return BoolVal(a.pattern == b.pattern)
        return BoolVal(a.value == b.value)
    return App("=", (a, b), BOOL)


def mk_distinct(args: list[Term]) -> Term:
    if len(args) < 2:
        return TRUE
    return App("distinct", tuple(args), BOOL)


def mk_ite(cond: Term, a: Term, b: Term) -> Term:
    assert a.sort == b.sort
    if isinstance(cond, BoolVal):
        return a if cond.value else b
    if a == b:
        return a
    return App("ite", (cond, a, b), a.sort)


# ---------------------------------------------------------------------------
# Arrays and strings
# ---------------------------------------------------------------------------

def select(arr: Term, idx: Term) -> Term:
    return App("select", (arr, idx), arr.sort.value)


def store(arr: Term, idx: Term, val: Term) -> Term:
    assert val.sort == arr.sort.value
    return App("store", (arr, idx, val), arr.sort)


def str_concat(a: Term, b: Term) -> Term:
    if isinstance(a, StrLit) and isinstance(b, StrLit):
        return StrLit(a.value + b.value)
    if isinstance(a, StrLit) and a.value == "":
        return b
    if isinstance(b, StrLit) and b.value == "":
        return a
    return App("str.++", (a, b), STRING)


def const_array(value: Term, sort: Sort) -> Term:
    """(as const <sort>) value — needs the constant-arrays capability."""
    return App("const-array", (value,), sort)


# int -> string conversion chain (needs the numeric-to-string capability)

def bv_to_nat(t: Term) -> Term:
    return App("bv2nat", (t,), Sort("Int"))


def nat_to_str(t: Term) -> Term:
    return App("str.from_int", (t,), STRING)


def code_to_str(t: Term) -> Term:
    return App("str.from_code", (t,), STRING)


def bv_decimal_string(t: Term) -> Term:
    """Decimal rendering of a signed bitvector, Java style.

    bv2nat(bvneg x) is the magnitude even for MIN (2^(w-1)), so the negative
    branch is exact across the full range.
    """
    if isinstance(t, BvLit):
        return StrLit(str(t.signed))
    w = t.sort.width
    neg = App("bvslt", (t, BvLit(0, w)), BOOL)
    mag_neg = nat_to_str(bv_to_nat(bvneg(t)))
    return mk_ite(neg, App("str.++", (StrLit("-"), mag_neg), STRING),
                  nat_to_str(bv_to_nat(t)))


def bool_string(t: Term) -> Term:
    if isinstance(t, BoolVal):
        return StrLit("true" if t.value else "false")
    return mk_ite(t, StrLit("true"), StrLit("false"))


def char_string(t: Term) -> Term:
    if isinstance(t, BvLit):
        return StrLit(chr(t.pattern))
    return code_to_str(bv_to_nat(t))


# ---------------------------------------------------------------------------
# Structural comparison up to constant renaming
# ---------------------------------------------------------------------------

def structurally_equal(a: Term, b: Term, renaming: dict[str, str] | None = None) -> bool:
    """Tree equality where constants match via a consistent bijection."""
    if renaming is None:
        renaming = {}
    reverse = {v: k for k, v in renaming.items()}

    def go(x: Term, y: Term) -> bool:
        if isinstance(x, Const) and isinstance(y, Const):
            if x.sort != y.sort:
                return False
            if x.name in renaming:
                return renaming[x.name] == y.name
            if y.name in reverse:
                return False
            renaming[x.name] = y.name
            reverse[y.name] = x.name
            return True
        if type(x) is not type(y):
            return False
        if isinstance(x, (BvLit, BoolVal, StrLit)):
            return x == y
        assert isinstance(x, App) and isinstance(y, App)
        if x.op != y.op or x.index != y.index or len(x.args) != len(y.args):
            return False
        return all(go(p, q) for p, q in zip(x.args, y.args))

    return go(a, b)


def constants_of(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        x = stack.pop()
        if isinstance(x, Const):
            out.add(x.name)
        elif isinstance(x, App):
            stack.extend(x.args)
    return out
