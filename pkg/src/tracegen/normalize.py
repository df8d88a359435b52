"""Canonical-form rewriting ahead of unwinding.

Two passes over a typechecked AST:

``lower_jumps`` removes break/continue and mid-body returns by introducing
boolean guard flags (``__brkN``/``__cntN`` per loop, ``__ret``/``__return``
per function) and wrapping every statement that follows a possible jump in a
conditional. Loop conditions are strengthened with the negated flags, flag
first so a taken jump never re-evaluates the original condition.

``lower_loops`` then rewrites ``for`` and ``do-while`` into plain ``while``
loops. Jumps are lowered first: once they are gone, the classic for-rewrite
(step at the end of the body) is unconditionally correct, whereas doing it
the other way around would make ``continue`` skip the step.

The result satisfies: no for/do-while, no break/continue, returns only as the
last statement of a function body, and every introduced name is a legal Java
identifier so the reference interpreter can execute normalized programs
directly.
"""

from __future__ import annotations

import copy

from .ast_nodes import (
    Assert, AssertBlock, Assign, ArrayLit, ArrayNew, Binary, Block, BoolLit,
    Break, CompoundAssign, Continue, DoWhile, Empty, Expr, ExprStmt, For,
    FunctionDecl, If, IncDec, IntLit, JType, ListSpec, Print, RangeSpec,
    Return, SkeletonAst, Spec, StringLit, Stmt, Unary, VarDecl, VarRef, While,
    walk, J_BOOLEAN, J_INT, J_INT_2D_ARRAY, J_INT_ARRAY, J_LONG, J_STRING,
    J_STRING_ARRAY,
)
from .errors import NormalizeError

NormalizedAst = SkeletonAst


def _bool_lit(v: bool) -> BoolLit:
    e = BoolLit(v)
    e.jtype = J_BOOLEAN
    return e


def _flag_ref(name: str) -> VarRef:
    e = VarRef(name)
    e.jtype = J_BOOLEAN
    return e


def _not(e: Expr) -> Unary:
    n = Unary("!", e)
    n.jtype = J_BOOLEAN
    return n


def _and(a: Expr, b: Expr) -> Binary:
    n = Binary("&&", a, b)
    n.jtype = J_BOOLEAN
    return n


def _conj(exprs: list[Expr]) -> Expr:
    out = exprs[0]
    for e in exprs[1:]:
        out = _and(out, e)
    return out


def _set_flag(name: str) -> Assign:
    return Assign(_flag_ref(name), _bool_lit(True))


def _decl_flag(name: str) -> VarDecl:
    return VarDecl(J_BOOLEAN, name, _bool_lit(False))


def default_value(jtype: JType) -> Expr:
    if jtype is J_BOOLEAN:
        return _bool_lit(False)
    if jtype is J_STRING:
        e = StringLit("")
        e.jtype = J_STRING
        return e
    if jtype is J_INT_ARRAY:
        e = ArrayLit(J_INT, [])
        e.jtype = J_INT_ARRAY
        return e
    if jtype is J_INT_2D_ARRAY:
        e = ArrayLit(J_INT, [])
        e.jtype = J_INT_2D_ARRAY
        return e
    if jtype is J_STRING_ARRAY:
        e = ArrayLit(J_STRING, [])
        e.jtype = J_STRING_ARRAY
        return e
    e = IntLit(0, jtype is J_LONG)
    e.jtype = jtype
    return e


# ---------------------------------------------------------------------------
# Jump lowering
# ---------------------------------------------------------------------------

class _JumpLowerer:
    def __init__(self, fn: FunctionDecl):
        self.fn = fn
        self.ret_flag: str | None = None

    def run(self) -> None:
        stmts = self.fn.body.stmts
        if self._has_mid_return(stmts):
            self.ret_flag = "__ret"
            decls: list[Stmt] = [_decl_flag("__ret")]
            if self.fn.return_type is not None:
                decls.append(VarDecl(self.fn.return_type, "__return",
                                     default_value(self.fn.return_type)))
            body, _ = self._stmts(stmts, brk=None, cnt=None)
            if self.fn.return_type is not None:
                ret = Return(_typed_ref("__return", self.fn.return_type))
                body = body + [ret]
            self.fn.body = Block(decls + body, loc=self.fn.body.loc)
        else:
            body, _ = self._stmts(stmts, brk=None, cnt=None)
            self.fn.body = Block(body, loc=self.fn.body.loc)

    def _has_mid_return(self, stmts: list[Stmt]) -> bool:
        for i, s in enumerate(stmts):
            if isinstance(s, Return):
                if i != len(stmts) - 1:
                    return True
            else:
                if any(isinstance(n, Return) for n in walk(s)):
                    return True
        return False

    # -- statement rewriting -------------------------------------------------

    def _stmts(self, stmts: list[Stmt], brk: str | None, cnt: str | None,
               ) -> tuple[list[Stmt], set[str]]:
        """Rewrite a statement list, guarding suffixes after possible jumps."""
        out: list[Stmt] = []
        total_may: set[str] = set()
        for i, s in enumerate(stmts):
            new, may = self._stmt(s, brk, cnt)
            out.extend(new)
            total_may |= may
            if may and i + 1 < len(stmts):
                rest, rest_may = self._stmts(stmts[i + 1:], brk, cnt)
                total_may |= rest_may
                guard = _conj([_not(_flag_ref(f)) for f in sorted(may)])
                out.append(If(guard, Block(rest)))
                return out, total_may
        return out, total_may

    def _stmt(self, s: Stmt, brk: str | None, cnt: str | None,
              ) -> tuple[list[Stmt], set[str]]:
        if isinstance(s, Break):
            assert brk is not None, "typecheck admits break only inside loops"
            return [_set_flag(brk)], {brk}
        if isinstance(s, Continue):
            assert cnt is not None
            return [_set_flag(cnt)], {cnt}
        if isinstance(s, Return):
            if self.ret_flag is None:
                return [s], set()   # sole trailing return stays
            new: list[Stmt] = []
            if s.value is not None:
                new.append(Assign(_typed_ref("__return", self.fn.return_type), s.value,
                                  loc=s.loc))
            new.append(_set_flag(self.ret_flag))
            return new, {self.ret_flag}
        if isinstance(s, Block):
            inner, may = self._stmts(s.stmts, brk, cnt)
            return [Block(inner, loc=s.loc)], may
        if isinstance(s, If):
            t_new, t_may = self._stmt(s.then, brk, cnt)
            o_may: set[str] = set()
            other = None
            if s.other is not None:
                o_new, o_may = self._stmt(s.other, brk, cnt)
                other = _as_stmt(o_new)
            return [If(s.cond, _as_stmt(t_new), other, loc=s.loc)], t_may | o_may
        if isinstance(s, While):
            return self._loop(s, s.body, is_for=False)
        if isinstance(s, DoWhile):
            return self._loop(s, s.body, is_for=False)
        if isinstance(s, For):
            return self._loop(s, s.body, is_for=True)
        return [s], set()

    def _loop(self, loop: Stmt, body: Stmt, is_for: bool,
              ) -> tuple[list[Stmt], set[str]]:
        lid = loop.loop_id
        has_break = self._contains_jump(body, Break)
        has_cont = self._contains_jump(body, Continue)
        brk = f"__brk{lid}" if has_break else None
        cnt = f"__cnt{lid}" if has_cont else None
        body_new, body_may = self._stmt(body, brk, cnt)
        inner = body_new

        pre: list[Stmt] = []
        guards: list[Expr] = []
        if brk:
            pre.append(_decl_flag(brk))
            guards.append(_not(_flag_ref(brk)))
        if cnt:
            pre.append(_decl_flag(cnt))
            inner = [Assign(_flag_ref(cnt), _bool_lit(False))] + inner
        may_ret = self.ret_flag is not None and self.ret_flag in body_may
        if may_ret:
            guards.append(_not(_flag_ref(self.ret_flag)))

        cond = loop.cond
        if guards:
            cond = _and(_conj(guards), cond)

        if is_for:
            step = loop.step
            if step is not None and (brk or may_ret):
                g = [_not(_flag_ref(f)) for f in filter(None, [brk])]
                if may_ret:
                    g.append(_not(_flag_ref(self.ret_flag)))
                step = If(_conj(g), step)
            new_loop = For(loop.init, cond, step, _as_stmt(inner),
                           bound=loop.bound, loop_id=lid, loc=loop.loc)
        elif isinstance(loop, DoWhile):
            new_loop = DoWhile(_as_stmt(inner), cond, bound=loop.bound,
                               loop_id=lid, loc=loop.loc)
        else:
            new_loop = While(cond, _as_stmt(inner), bound=loop.bound,
                             invariant=loop.invariant, loop_id=lid, loc=loop.loc)
        out_may = {self.ret_flag} if may_ret else set()
        return pre + [new_loop], out_may

    @staticmethod
    def _contains_jump(body: Stmt, kind) -> bool:
        """Does `body` contain a `kind` jump belonging to this loop?"""
        def scan(s: Stmt) -> bool:
            if isinstance(s, kind):
                return True
            if isinstance(s, (While, DoWhile, For)):
                return False  # inner loop owns its jumps
            if isinstance(s, Block):
                return any(scan(x) for x in s.stmts)
            if isinstance(s, If):
                if scan(s.then):
                    return True
                return s.other is not None and scan(s.other)
            return False
        return scan(body)


def _typed_ref(name: str, jtype: JType) -> VarRef:
    e = VarRef(name)
    e.jtype = jtype
    return e


def _as_stmt(stmts: list[Stmt]) -> Stmt:
    if len(stmts) == 1:
        return stmts[0]
    return Block(stmts)


def lower_jumps(ast: SkeletonAst) -> NormalizedAst:
    for f in ast.functions:
        _JumpLowerer(f).run()
    return ast


# ---------------------------------------------------------------------------
# Loop lowering
# ---------------------------------------------------------------------------

def _dec_spec(spec: Spec | None) -> Spec | None:
    """Shift a do-while bound down by one: the first pass is hoisted out."""
    if spec is None:
        return None
    if isinstance(spec, RangeSpec):
        return RangeSpec(max(0, spec.lower - 1), max(0, spec.upper - 1))
    return ListSpec(sorted({max(0, v - 1) for v in spec.items}))


class _LoopLowerer:
    def lower_stmt(self, s: Stmt) -> list[Stmt]:
        if isinstance(s, Block):
            return [Block(self._list(s.stmts), loc=s.loc)]
        if isinstance(s, If):
            then = _as_stmt(self.lower_stmt(s.then))
            other = _as_stmt(self.lower_stmt(s.other)) if s.other is not None else None
            return [If(s.cond, then, other, loc=s.loc)]
        if isinstance(s, AssertBlock):
            return [AssertBlock(Block(self._list(s.body.stmts), loc=s.body.loc), loc=s.loc)]
        if isinstance(s, While):
            body = _as_stmt(self.lower_stmt(s.body))
            return [While(s.cond, body, bound=s.bound, invariant=s.invariant,
                          loop_id=s.loop_id, loc=s.loc)]
        if isinstance(s, For):
            body = self.lower_stmt(s.body)
            if s.step is not None:
                body = body + self.lower_stmt(s.step)
            w = While(s.cond, Block(body), bound=s.bound, loop_id=s.loop_id, loc=s.loc)
            head: list[Stmt] = []
            if s.init is not None:
                head = self.lower_stmt(s.init)
            return [Block(head + [w], loc=s.loc)]
        if isinstance(s, DoWhile):
            body = _as_stmt(self.lower_stmt(s.body))
            first = copy.deepcopy(body)
            w = While(s.cond, body, bound=_dec_spec(s.bound), loop_id=s.loop_id, loc=s.loc)
            return [first, w]
        return [s]

    def _list(self, stmts: list[Stmt]) -> list[Stmt]:
        out: list[Stmt] = []
        for s in stmts:
            out.extend(self.lower_stmt(s))
        return out


def lower_loops(ast: SkeletonAst) -> NormalizedAst:
    low = _LoopLowerer()
    for f in ast.functions:
        f.body = Block(low._list(f.body.stmts), loc=f.body.loc)
    next_id = 0
    for f in ast.functions:
        for n in walk(f.body):
            if isinstance(n, While):
                n.loop_id = next_id
                next_id += 1
    return ast


def normalize(ast: SkeletonAst) -> NormalizedAst:
    """Full normalization of a typechecked skeleton (copies the input)."""
    ast = copy.deepcopy(ast)
    lower_jumps(ast)
    lower_loops(ast)
    return ast
