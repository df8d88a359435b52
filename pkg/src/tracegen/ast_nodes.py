"""AST for the supported Java subset plus generator annotations.

Statements and expressions are plain dataclasses. The type checker fills in
``Expr.jtype`` in place; every node keeps its source location for diagnostics.
Annotation statements (LOOP, INVARIANT, ASSERTBLOCK) are folded into the node
they govern during parsing, so a well-formed tree never contains a dangling
annotation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Optional, Union


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


NOLOC = Loc(0, 0)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------

class JType:
    """One of the supported Java types, interned per kind."""

    KINDS = (
        "boolean", "byte", "short", "int", "long", "char", "String",
        "int[]", "int[][]", "String[]",
    )
    _interned: dict[str, "JType"] = {}

    def __init__(self, kind: str):
        if kind not in self.KINDS:
            raise ValueError(f"not a supported type: {kind}")
        self.kind = kind

    def __new__(cls, kind: str):
        inst = cls._interned.get(kind)
        if inst is None:
            inst = super().__new__(cls)
            cls._interned[kind] = inst
        return inst

    def __repr__(self) -> str:
        return f"JType({self.kind!r})"

    def __str__(self) -> str:
        return self.kind

    @property
    def is_integral(self) -> bool:
        return self.kind in ("byte", "short", "int", "long", "char")

    @property
    def is_array(self) -> bool:
        return self.kind.endswith("[]")

    @property
    def element(self) -> "JType":
        assert self.is_array
        return JType(self.kind[:-2])

    @property
    def width(self) -> int:
        """Bit width of an integral type."""
        return {"byte": 8, "short": 16, "char": 16, "int": 32, "long": 64}[self.kind]

    @property
    def signed(self) -> bool:
        return self.kind != "char"


J_BOOLEAN = JType("boolean")
J_BYTE = JType("byte")
J_SHORT = JType("short")
J_INT = JType("int")
J_LONG = JType("long")
J_CHAR = JType("char")
J_STRING = JType("String")
J_INT_ARRAY = JType("int[]")
J_INT_2D_ARRAY = JType("int[][]")
J_STRING_ARRAY = JType("String[]")


# ---------------------------------------------------------------------------
# Placeholder constraint specs
# ---------------------------------------------------------------------------

@dataclass
class RangeSpec:
    lower: int
    upper: int

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"range lower bound {self.lower} exceeds upper {self.upper}")

    def values(self):
        return range(self.lower, self.upper + 1)


@dataclass
class ListSpec:
    items: list  # ints, bools, chars (as ints), or strings

    def __post_init__(self):
        if not self.items:
            raise ValueError("list constraint must not be empty")

    def values(self):
        return list(self.items)


Spec = Union[RangeSpec, ListSpec]


PLACEHOLDER_TYPES = {
    "INT": J_INT,
    "BOOLEAN": J_BOOLEAN,
    "CHAR": J_CHAR,
    "STRING": J_STRING,
    "INTARRAY": J_INT_ARRAY,
    "INT2DARRAY": J_INT_2D_ARRAY,
    "STRINGARRAY": J_STRING_ARRAY,
}


# ---------------------------------------------------------------------------
# Expressions
# ---------------------------------------------------------------------------

@dataclass
class Expr:
    loc: Loc = field(default=NOLOC, kw_only=True, repr=False, compare=False)
    jtype: Optional[JType] = field(default=None, kw_only=True, repr=False, compare=False)


@dataclass
class IntLit(Expr):
    value: int
    long: bool = False  # had an L suffix


@dataclass
class BoolLit(Expr):
    value: bool


@dataclass
class CharLit(Expr):
    value: int  # code point


@dataclass
class StringLit(Expr):
    value: str


@dataclass
class VarRef(Expr):
    name: str


@dataclass
class OutRef(Expr):
    """The reserved __out pseudo-variable (console contents so far)."""


@dataclass
class Unary(Expr):
    op: str  # '-', '+', '!'
    operand: Expr


@dataclass
class Binary(Expr):
    op: str  # + - * / % < > <= >= == != && ||
    left: Expr
    right: Expr


@dataclass
class Ternary(Expr):
    cond: Expr
    then: Expr
    other: Expr


@dataclass
class IncDec(Expr):
    op: str        # '++' or '--'
    prefix: bool
    target: Expr   # VarRef or ArrayRead


@dataclass
class ArrayRead(Expr):
    array: Expr
    index: Expr


@dataclass
class ArrayLen(Expr):
    array: Expr


@dataclass
class ArrayNew(Expr):
    elem: JType            # element type of the outermost dimension
    sizes: list[Expr]      # one entry per dimension


@dataclass
class ArrayLit(Expr):
    """``new int[] { ... }`` (or a nested row of an int[][] literal)."""
    elem: JType
    elements: list[Expr]


@dataclass
class Call(Expr):
    name: str
    args: list[Expr]


@dataclass
class Builtin(Expr):
    """Helper functions and the few supported library calls.

    name is one of: abs, distinct, impl, str_eq.
    """
    name: str
    args: list[Expr]


@dataclass
class Placeholder(Expr):
    id: int
    ptype: str                           # key of PLACEHOLDER_TYPES
    length_spec: Optional[Spec] = None   # arrays: outer length
    row_spec: Optional[Spec] = None      # 2-D arrays: per-row length
    value_spec: Optional[Spec] = None    # scalar / element constraint
    is_hole: bool = False

    @property
    def value_type(self) -> JType:
        return PLACEHOLDER_TYPES[self.ptype]


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------

@dataclass
class Stmt:
    loc: Loc = field(default=NOLOC, kw_only=True, repr=False, compare=False)


@dataclass
class Empty(Stmt):
    pass


@dataclass
class Block(Stmt):
    stmts: list[Stmt] = field(default_factory=list)


@dataclass
class VarDecl(Stmt):
    jtype: JType
    name: str
    init: Optional[Expr] = None


@dataclass
class Assign(Stmt):
    target: Expr   # VarRef or ArrayRead
    value: Expr


@dataclass
class CompoundAssign(Stmt):
    op: str        # '+', '-', '*', '/', '%'
    target: Expr
    value: Expr


@dataclass
class ExprStmt(Stmt):
    expr: Expr     # IncDec or Call


@dataclass
class If(Stmt):
    cond: Expr
    then: Stmt
    other: Optional[Stmt] = None


@dataclass
class While(Stmt):
    cond: Expr
    body: Stmt
    bound: Optional[Spec] = None          # from a preceding LOOP(...)
    invariant: Optional[Expr] = None      # from a preceding INVARIANT(...)
    derived_bound: Optional[Spec] = field(default=None, compare=False)  # optimizer
    loop_id: int = field(default=-1, compare=False)


@dataclass
class DoWhile(Stmt):
    body: Stmt
    cond: Expr
    bound: Optional[Spec] = None
    loop_id: int = field(default=-1, compare=False)


@dataclass
class For(Stmt):
    init: Optional[Stmt]     # VarDecl or Assign
    cond: Optional[Expr]
    step: Optional[Stmt]     # Assign / CompoundAssign / ExprStmt
    body: Stmt
    bound: Optional[Spec] = None
    loop_id: int = field(default=-1, compare=False)


@dataclass
class Return(Stmt):
    value: Optional[Expr] = None


@dataclass
class Break(Stmt):
    pass


@dataclass
class Continue(Stmt):
    pass


@dataclass
class Print(Stmt):
    arg: Expr


@dataclass
class Assert(Stmt):
    cond: Expr


@dataclass
class AssertBlock(Stmt):
    """Generation-only block of constraints; stripped from instances."""
    body: Block


# ---------------------------------------------------------------------------
# Functions and programs
# ---------------------------------------------------------------------------

@dataclass
class FunctionDecl:
    name: str
    params: list[tuple[str, JType]]
    return_type: Optional[JType]   # None = void
    body: Block
    rec_bound: int = 0
    is_entry: bool = False
    loc: Loc = field(default=NOLOC, repr=False, compare=False)


@dataclass
class SkeletonAst:
    functions: list[FunctionDecl]
    entry: str
    implicit_entry: bool = False   # bare statement-list source, wrapped by the parser

    def function(self, name: str) -> FunctionDecl:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    @property
    def entry_function(self) -> FunctionDecl:
        return self.function(self.entry)


# ---------------------------------------------------------------------------
# Tree utilities
# ---------------------------------------------------------------------------

def children(node):
    """Yield the direct child AST nodes (Expr/Stmt) of a node."""
    for f in fields(node):
        v = getattr(node, f.name)
        if isinstance(v, (Expr, Stmt)):
            yield v
        elif isinstance(v, list):
            for item in v:
                if isinstance(item, (Expr, Stmt)):
                    yield item


def walk(node):
    """Yield node and every descendant, preorder."""
    yield node
    for c in children(node):
        yield from walk(c)


def walk_program(ast: SkeletonAst):
    for f in ast.functions:
        yield from walk(f.body)


def placeholders_of(ast: SkeletonAst) -> list[Placeholder]:
    """All placeholders in the skeleton, in source (id) order."""
    found = [n for n in walk_program(ast) if isinstance(n, Placeholder)]
    found.sort(key=lambda p: p.id)
    return found
