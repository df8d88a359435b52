"""Static checks: name resolution, types, numeric promotion, definite assignment.

Annotates every expression's ``jtype`` in place and returns the same AST.
Promotion follows Java: byte/short/char widen to int in arithmetic, and if
either operand is long the result is long. Use-before-assignment is rejected
with a conservative definite-assignment analysis (branches intersect, loop
bodies may run zero times).
"""

from __future__ import annotations

from .ast_nodes import (
    Assert, AssertBlock, Assign, ArrayLen, ArrayLit, ArrayNew, ArrayRead,
    Binary, Block, BoolLit, Break, Builtin, Call, CharLit, CompoundAssign,
    Continue, DoWhile, Empty, Expr, ExprStmt, For, FunctionDecl, If, IncDec,
    IntLit, JType, ListSpec, OutRef, Placeholder, Print, RangeSpec, Return,
    SkeletonAst, StringLit, Stmt, Ternary, Unary, VarDecl, VarRef, While,
    J_BOOLEAN, J_BYTE, J_CHAR, J_INT, J_INT_2D_ARRAY, J_INT_ARRAY, J_LONG,
    J_SHORT, J_STRING, J_STRING_ARRAY,
)
from .errors import TypecheckError

_NUMERIC = (J_BYTE, J_SHORT, J_INT, J_LONG, J_CHAR)


def _reserved(name: str) -> bool:
    return name.startswith("__")


def _promote(a: JType, b: JType) -> JType:
    if J_LONG in (a, b):
        return J_LONG
    return J_INT


def _assignable(target: JType, value: JType) -> bool:
    if target == value:
        return True
    # Java widening conversions within the fragment
    order = {J_BYTE: 0, J_SHORT: 1, J_CHAR: 1, J_INT: 2, J_LONG: 3}
    if target in order and value in order:
        if value is J_CHAR and target is J_SHORT:
            return False
        return order[value] <= order[target]
    return False


class _Scope:
    def __init__(self, parent: "_Scope | None" = None):
        self.parent = parent
        self.vars: dict[str, JType] = {}

    def declare(self, name: str, jtype: JType, loc) -> None:
        # like Java, an inner block may not shadow an enclosing local
        if self.lookup(name) is not None:
            raise TypecheckError(f"'{name}' is already declared in an enclosing scope", loc)
        self.vars[name] = jtype

    def lookup(self, name: str) -> JType | None:
        s = self
        while s is not None:
            if name in s.vars:
                return s.vars[name]
            s = s.parent
        return None


class _Checker:
    def __init__(self, ast: SkeletonAst):
        self.ast = ast
        self.fn: FunctionDecl | None = None
        self.loop_depth = 0
        self.in_assert_block = False
        self.assert_block_boundary: _Scope | None = None  # scope surrounding the block

    # -- entry ---------------------------------------------------------------

    def run(self) -> SkeletonAst:
        names = set()
        for f in self.ast.functions:
            if f.name in names:
                raise TypecheckError(f"duplicate function '{f.name}'", f.loc)
            names.add(f.name)
        for f in self.ast.functions:
            self.check_function(f)
        for f in self.ast.functions:
            _DefiniteAssignment(self.ast).check_function(f)
        return self.ast

    def check_function(self, f: FunctionDecl) -> None:
        self.fn = f
        scope = _Scope()
        seen = set()
        for pname, ptype in f.params:
            if pname in seen:
                raise TypecheckError(f"duplicate parameter '{pname}'", f.loc)
            if _reserved(pname):
                raise TypecheckError(f"'{pname}' is a reserved name", f.loc)
            seen.add(pname)
            scope.declare(pname, ptype, f.loc)
        returns = self.check_stmt(f.body, scope)
        if f.return_type is not None and not returns:
            raise TypecheckError(f"function '{f.name}' may complete without returning", f.loc)

    # -- statements ------------------------------------------------------------

    def check_stmt(self, s: Stmt, scope: _Scope) -> bool:
        """Returns True when the statement definitely returns."""
        if isinstance(s, Empty):
            return False
        if isinstance(s, Block):
            inner = _Scope(scope)
            returns = False
            for sub in s.stmts:
                returns = self.check_stmt(sub, inner) or returns
            return returns
        if isinstance(s, VarDecl):
            if _reserved(s.name):
                raise TypecheckError(f"'{s.name}' is a reserved name", s.loc)
            if s.init is not None:
                it = self.check_expr(s.init, scope)
                self._check_assignable(s.jtype, it, s.init, s.loc)
            scope.declare(s.name, s.jtype, s.loc)
            return False
        if isinstance(s, Assign):
            tt = self.check_lvalue(s.target, scope)
            vt = self.check_expr(s.value, scope)
            self._check_assignable(tt, vt, s.value, s.loc)
            self._check_assert_block_write(s.target, scope, s.loc)
            return False
        if isinstance(s, CompoundAssign):
            tt = self.check_lvalue(s.target, scope)
            vt = self.check_expr(s.value, scope)
            if s.op == "+" and tt is J_STRING:
                raise TypecheckError("compound string concatenation is not supported", s.loc)
            if tt not in _NUMERIC or vt not in _NUMERIC:
                raise TypecheckError(f"operator '{s.op}=' needs numeric operands", s.loc)
            self._check_assert_block_write(s.target, scope, s.loc)
            return False
        if isinstance(s, ExprStmt):
            if isinstance(s.expr, IncDec):
                self.check_expr(s.expr, scope)
                self._check_assert_block_write(s.expr.target, scope, s.loc)
                return False
            if isinstance(s.expr, Call):
                self.check_expr(s.expr, scope, allow_void=True)
                return False
            raise TypecheckError("expression is not a statement", s.loc)
        if isinstance(s, If):
            ct = self.check_expr(s.cond, scope)
            if ct is not J_BOOLEAN:
                raise TypecheckError(f"if condition must be boolean, got {ct}", s.cond.loc)
            r1 = self.check_stmt(s.then, _Scope(scope))
            r2 = self.check_stmt(s.other, _Scope(scope)) if s.other is not None else False
            return r1 and r2 and s.other is not None
        if isinstance(s, While):
            if s.invariant is not None:
                it = self.check_expr(s.invariant, scope)
                if it is not J_BOOLEAN:
                    raise TypecheckError("invariant must be boolean", s.invariant.loc)
                self._check_pure_condition(s.invariant)
            ct = self.check_expr(s.cond, scope)
            if ct is not J_BOOLEAN:
                raise TypecheckError(f"loop condition must be boolean, got {ct}", s.cond.loc)
            self._check_pure_condition(s.cond)
            self.loop_depth += 1
            self.check_stmt(s.body, _Scope(scope))
            self.loop_depth -= 1
            return False
        if isinstance(s, DoWhile):
            self.loop_depth += 1
            self.check_stmt(s.body, _Scope(scope))
            self.loop_depth -= 1
            ct = self.check_expr(s.cond, scope)
            if ct is not J_BOOLEAN:
                raise TypecheckError(f"loop condition must be boolean, got {ct}", s.cond.loc)
            self._check_pure_condition(s.cond)
            return False
        if isinstance(s, For):
            inner = _Scope(scope)
            if s.init is not None:
                self.check_stmt(s.init, inner)
            ct = self.check_expr(s.cond, inner)
            if ct is not J_BOOLEAN:
                raise TypecheckError(f"loop condition must be boolean, got {ct}", s.cond.loc)
            self._check_pure_condition(s.cond)
            self.loop_depth += 1
            self.check_stmt(s.body, _Scope(inner))
            if s.step is not None:
                self.check_stmt(s.step, inner)
            self.loop_depth -= 1
            return False
        if isinstance(s, Return):
            if self.in_assert_block:
                raise TypecheckError("return inside ASSERTBLOCK", s.loc)
            want = self.fn.return_type
            if want is None:
                if s.value is not None:
                    raise TypecheckError("void function cannot return a value", s.loc)
                return True
            if s.value is None:
                raise TypecheckError(f"function '{self.fn.name}' must return {want}", s.loc)
            vt = self.check_expr(s.value, scope)
            self._check_assignable(want, vt, s.value, s.loc)
            return True
        if isinstance(s, Break) or isinstance(s, Continue):
            if self.loop_depth == 0:
                kind = "break" if isinstance(s, Break) else "continue"
                raise TypecheckError(f"'{kind}' outside of a loop", s.loc)
            if self.in_assert_block:
                raise TypecheckError("jump inside ASSERTBLOCK", s.loc)
            return False
        if isinstance(s, Print):
            if self.in_assert_block:
                raise TypecheckError("print inside ASSERTBLOCK", s.loc)
            self.check_expr(s.arg, scope)
            return False
        if isinstance(s, Assert):
            ct = self.check_expr(s.cond, scope)
            if ct is not J_BOOLEAN:
                raise TypecheckError("assertion must be boolean", s.cond.loc)
            return False
        if isinstance(s, AssertBlock):
            if self.in_assert_block:
                raise TypecheckError("nested ASSERTBLOCK", s.loc)
            self.in_assert_block = True
            self.assert_block_boundary = scope
            try:
                self.check_stmt(s.body, scope)
            finally:
                self.in_assert_block = False
                self.assert_block_boundary = None
            return False
        raise TypecheckError(f"unhandled statement {type(s).__name__}", s.loc)

    def _check_assert_block_write(self, target: Expr, scope: _Scope, loc) -> None:
        """ASSERTBLOCK bodies are large assertions; they must not leak state."""
        if not self.in_assert_block:
            return
        if isinstance(target, ArrayRead):
            raise TypecheckError("ASSERTBLOCK must not write array elements", loc)
        assert isinstance(target, VarRef)
        s = scope
        while s is not None and s is not self.assert_block_boundary:
            if target.name in s.vars:
                return  # declared inside the block, fine
            s = s.parent
        raise TypecheckError(
            f"ASSERTBLOCK must not assign outer variable '{target.name}'", loc)

    def _check_pure_condition(self, cond: Expr) -> None:
        # loop conditions are re-evaluated once per unrolled iteration and get
        # strengthened with jump flags, both of which assume no side effects
        if _has_side_effects(cond):
            raise TypecheckError("loop conditions must be free of side effects", cond.loc)

    def _check_assignable(self, target: JType, value: JType, expr: Expr, loc) -> None:
        if _assignable(target, value):
            return
        # narrowing of a compile-time int constant literal (Java allows it)
        if target in (J_BYTE, J_SHORT, J_CHAR) and isinstance(expr, (IntLit, CharLit)):
            v = expr.value
            lo, hi = {
                J_BYTE: (-128, 127), J_SHORT: (-32768, 32767), J_CHAR: (0, 65535),
            }[target]
            if lo <= v <= hi:
                return
        raise TypecheckError(f"cannot assign {value} to {target}", loc)

    # -- expressions --------------------------------------------------------

    def check_lvalue(self, e: Expr, scope: _Scope) -> JType:
        if isinstance(e, VarRef):
            return self.check_expr(e, scope)
        if isinstance(e, ArrayRead):
            return self.check_expr(e, scope)
        raise TypecheckError("not an assignable location", e.loc)

    def check_expr(self, e: Expr, scope: _Scope, allow_void: bool = False) -> JType:
        t = self._infer(e, scope, allow_void)
        e.jtype = t
        return t

    def _infer(self, e: Expr, scope: _Scope, allow_void: bool = False) -> JType:
        if isinstance(e, IntLit):
            if e.long:
                if e.value > 2 ** 63:
                    raise TypecheckError("long literal out of range", e.loc)
                return J_LONG
            if e.value > 2 ** 31:
                raise TypecheckError("int literal out of range", e.loc)
            return J_INT
        if isinstance(e, BoolLit):
            return J_BOOLEAN
        if isinstance(e, CharLit):
            return J_CHAR
        if isinstance(e, StringLit):
            return J_STRING
        if isinstance(e, OutRef):
            return J_STRING
        if isinstance(e, VarRef):
            t = scope.lookup(e.name)
            if t is None:
                raise TypecheckError(f"unresolved identifier '{e.name}'", e.loc)
            return t
        if isinstance(e, Placeholder):
            self._check_placeholder(e)
            return e.value_type
        if isinstance(e, Unary):
            ot = self.check_expr(e.operand, scope)
            if e.op == "!":
                if ot is not J_BOOLEAN:
                    raise TypecheckError("'!' needs a boolean operand", e.loc)
                return J_BOOLEAN
            if ot not in _NUMERIC:
                raise TypecheckError(f"'{e.op}' needs a numeric operand", e.loc)
            if isinstance(e.operand, IntLit) and e.op == "-":
                limit = 2 ** 63 if e.operand.long else 2 ** 31
                if e.operand.value > limit:
                    raise TypecheckError("integer literal out of range", e.loc)
            return _promote(ot, ot)
        if isinstance(e, Binary):
            return self._infer_binary(e, scope)
        if isinstance(e, Ternary):
            ct = self.check_expr(e.cond, scope)
            if ct is not J_BOOLEAN:
                raise TypecheckError("ternary condition must be boolean", e.cond.loc)
            at = self.check_expr(e.then, scope)
            bt = self.check_expr(e.other, scope)
            if at in _NUMERIC and bt in _NUMERIC:
                return _promote(at, bt)
            if at == bt:
                return at
            raise TypecheckError(f"ternary branches have incompatible types {at} and {bt}", e.loc)
        if isinstance(e, IncDec):
            tt = self.check_lvalue(e.target, scope)
            if tt not in _NUMERIC:
                raise TypecheckError(f"'{e.op}' needs a numeric target", e.loc)
            return tt
        if isinstance(e, ArrayRead):
            at = self.check_expr(e.array, scope)
            if not at.is_array:
                raise TypecheckError(f"cannot index a {at}", e.loc)
            it = self.check_expr(e.index, scope)
            if it not in (J_BYTE, J_SHORT, J_CHAR, J_INT):
                raise TypecheckError("array index must be an int", e.index.loc)
            return at.element
        if isinstance(e, ArrayLen):
            at = self.check_expr(e.array, scope)
            if not at.is_array:
                raise TypecheckError(f"'{at}' has no .length", e.loc)
            return J_INT
        if isinstance(e, ArrayNew):
            for sz in e.sizes:
                st = self.check_expr(sz, scope)
                if st not in (J_BYTE, J_SHORT, J_CHAR, J_INT):
                    raise TypecheckError("array size must be an int", sz.loc)
            if e.elem is J_STRING:
                return J_STRING_ARRAY
            return J_INT_ARRAY if len(e.sizes) == 1 else J_INT_2D_ARRAY
        if isinstance(e, ArrayLit):
            for el in e.elements:
                et = self.check_expr(el, scope)
                if isinstance(el, ArrayLit):
                    continue
                want = e.elem
                self._check_assignable(want, et, el, el.loc)
            if e.elements and isinstance(e.elements[0], ArrayLit):
                return J_INT_2D_ARRAY
            if e.elem is J_STRING:
                return J_STRING_ARRAY
            return J_INT_ARRAY
        if isinstance(e, Builtin):
            return self._infer_builtin(e, scope)
        if isinstance(e, Call):
            try:
                f = self.ast.function(e.name)
            except KeyError:
                raise TypecheckError(f"unresolved function '{e.name}'", e.loc) from None
            if len(e.args) != len(f.params):
                raise TypecheckError(
                    f"'{e.name}' expects {len(f.params)} arguments, got {len(e.args)}", e.loc)
            for arg, (_, pt) in zip(e.args, f.params):
                at = self.check_expr(arg, scope)
                self._check_assignable(pt, at, arg, arg.loc)
            if f.return_type is None:
                if not allow_void:
                    raise TypecheckError(f"void function '{e.name}' used as a value", e.loc)
                return J_BOOLEAN  # placeholder; never read
            return f.return_type
        raise TypecheckError(f"unhandled expression {type(e).__name__}", e.loc)

    def _infer_binary(self, e: Binary, scope: _Scope) -> JType:
        lt = self.check_expr(e.left, scope)
        rt = self.check_expr(e.right, scope)
        op = e.op
        if op == "+" and (lt is J_STRING or rt is J_STRING):
            for side, t in ((e.left, lt), (e.right, rt)):
                if t.is_array:
                    raise TypecheckError("cannot concatenate an array to a String", side.loc)
            return J_STRING
        if op in ("+", "-", "*", "/", "%"):
            if lt not in _NUMERIC or rt not in _NUMERIC:
                raise TypecheckError(f"operator '{op}' needs numeric operands", e.loc)
            return _promote(lt, rt)
        if op in ("<", ">", "<=", ">="):
            if lt not in _NUMERIC or rt not in _NUMERIC:
                raise TypecheckError(f"operator '{op}' needs numeric operands", e.loc)
            return J_BOOLEAN
        if op in ("==", "!="):
            if lt in _NUMERIC and rt in _NUMERIC:
                return J_BOOLEAN
            if lt is J_BOOLEAN and rt is J_BOOLEAN:
                return J_BOOLEAN
            if lt is J_STRING or rt is J_STRING:
                raise TypecheckError(
                    "'==' compares String references; use .equals(...)", e.loc)
            if lt.is_array and lt == rt:
                return J_BOOLEAN  # reference equality
            raise TypecheckError(f"cannot compare {lt} with {rt}", e.loc)
        if op in ("&&", "||"):
            if lt is not J_BOOLEAN or rt is not J_BOOLEAN:
                raise TypecheckError(f"operator '{op}' needs boolean operands", e.loc)
            if _has_side_effects(e.left) or _has_side_effects(e.right):
                raise TypecheckError(
                    f"side effects inside '{op}' operands are not supported", e.loc)
            return J_BOOLEAN
        raise TypecheckError(f"unknown operator '{op}'", e.loc)

    def _infer_builtin(self, e: Builtin, scope: _Scope) -> JType:
        if e.name == "abs":
            if len(e.args) != 1:
                raise TypecheckError("Math.abs expects one argument", e.loc)
            t = self.check_expr(e.args[0], scope)
            if t not in _NUMERIC:
                raise TypecheckError("Math.abs needs a numeric argument", e.loc)
            return _promote(t, t)
        if e.name == "distinct":
            if len(e.args) != 2:
                raise TypecheckError("__distinct expects (array, count)", e.loc)
            at = self.check_expr(e.args[0], scope)
            if at is not J_INT_ARRAY:
                raise TypecheckError("__distinct works on int[]", e.loc)
            nt = self.check_expr(e.args[1], scope)
            if nt not in (J_BYTE, J_SHORT, J_CHAR, J_INT):
                raise TypecheckError("__distinct count must be an int", e.loc)
            return J_BOOLEAN
        if e.name == "impl":
            if len(e.args) != 2:
                raise TypecheckError("__impl expects two boolean arguments", e.loc)
            for a in e.args:
                if self.check_expr(a, scope) is not J_BOOLEAN:
                    raise TypecheckError("__impl arguments must be boolean", a.loc)
            return J_BOOLEAN
        if e.name == "str_eq":
            at = self.check_expr(e.args[0], scope)
            bt = self.check_expr(e.args[1], scope)
            if at is not J_STRING or bt is not J_STRING:
                raise TypecheckError(".equals is supported on Strings only", e.loc)
            return J_BOOLEAN
        raise TypecheckError(f"unknown helper '{e.name}'", e.loc)

    def _check_placeholder(self, p: Placeholder) -> None:
        def spec_values(spec):
            return spec.values() if isinstance(spec, ListSpec) else [spec.lower, spec.upper]

        if p.ptype in ("INT", "CHAR"):
            for v in spec_values(p.value_spec):
                if not isinstance(v, int) or isinstance(v, bool):
                    raise TypecheckError(f"{p.ptype} constraint needs integer values", p.loc)
                if p.ptype == "CHAR" and not 0 <= v <= 0xFFFF:
                    raise TypecheckError("CHAR constraint out of range", p.loc)
        elif p.ptype == "BOOLEAN":
            if not isinstance(p.value_spec, ListSpec):
                raise TypecheckError("BOOLEAN constraint must be a list", p.loc)
            for v in p.value_spec.items:
                if not isinstance(v, bool):
                    raise TypecheckError("BOOLEAN constraint needs true/false", p.loc)
        elif p.ptype == "STRING":
            if not isinstance(p.value_spec, ListSpec):
                raise TypecheckError("STRING constraint must be a list", p.loc)
            for v in p.value_spec.items:
                if not isinstance(v, str):
                    raise TypecheckError("STRING constraint needs string literals", p.loc)
        else:
            for spec in filter(None, (p.length_spec, p.row_spec)):
                for v in spec_values(spec):
                    if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                        raise TypecheckError("array length constraint needs naturals", p.loc)
            elem = p.value_spec
            if p.ptype == "STRINGARRAY":
                if not isinstance(elem, ListSpec) or not all(isinstance(v, str) for v in elem.items):
                    raise TypecheckError("STRINGARRAY elements need string literals", p.loc)
            else:
                for v in spec_values(elem):
                    if not isinstance(v, int) or isinstance(v, bool):
                        raise TypecheckError("array element constraint needs integers", p.loc)


def _has_side_effects(e: Expr) -> bool:
    from .ast_nodes import walk
    return any(isinstance(n, (IncDec, Call)) for n in walk(e))


# ---------------------------------------------------------------------------
# Definite assignment
# ---------------------------------------------------------------------------

class _DefiniteAssignment:
    """Rejects use before assignment, mirroring Java's rules conservatively."""

    def __init__(self, ast: SkeletonAst):
        self.ast = ast

    def check_function(self, f: FunctionDecl) -> None:
        assigned = {name for name, _ in f.params}
        self.visit(f.body, assigned)

    def visit(self, s: Stmt, assigned: set[str]) -> None:
        if isinstance(s, Block):
            declared = []
            for sub in s.stmts:
                self.visit(sub, assigned)
                if isinstance(sub, VarDecl):
                    declared.append(sub.name)
            for name in declared:
                assigned.discard(name)
        elif isinstance(s, VarDecl):
            if s.init is not None:
                self.uses(s.init, assigned)
                assigned.add(s.name)
            else:
                assigned.discard(s.name)
        elif isinstance(s, Assign):
            self.uses(s.value, assigned)
            if isinstance(s.target, VarRef):
                assigned.add(s.target.name)
            else:
                self.uses(s.target, assigned)
        elif isinstance(s, CompoundAssign):
            self.uses(s.value, assigned)
            self.uses(s.target, assigned)
        elif isinstance(s, ExprStmt):
            self.uses(s.expr, assigned)
        elif isinstance(s, If):
            self.uses(s.cond, assigned)
            a1 = set(assigned)
            self.visit(s.then, a1)
            a2 = set(assigned)
            if s.other is not None:
                self.visit(s.other, a2)
            assigned |= (a1 & a2)
        elif isinstance(s, While):
            if s.invariant is not None:
                self.uses(s.invariant, assigned)
            self.uses(s.cond, assigned)
            self.visit(s.body, set(assigned))
        elif isinstance(s, DoWhile):
            body_assigned = set(assigned)
            self.visit(s.body, body_assigned)
            self.uses(s.cond, body_assigned)
            assigned |= body_assigned
        elif isinstance(s, For):
            inner = set(assigned)
            if s.init is not None:
                self.visit(s.init, inner)
            self.uses(s.cond, inner)
            body = set(inner)
            self.visit(s.body, body)
            if s.step is not None:
                self.visit(s.step, body)
        elif isinstance(s, Return):
            if s.value is not None:
                self.uses(s.value, assigned)
        elif isinstance(s, Print):
            self.uses(s.arg, assigned)
        elif isinstance(s, Assert):
            self.uses(s.cond, assigned)
        elif isinstance(s, AssertBlock):
            self.visit(s.body, set(assigned))
        # Empty, Break, Continue: nothing to do

    def uses(self, e: Expr, assigned: set[str]) -> None:
        if isinstance(e, VarRef):
            if e.name not in assigned:
                raise TypecheckError(f"'{e.name}' may be used before assignment", e.loc)
            return
        if isinstance(e, IncDec):
            self.uses(e.target, assigned)
            if isinstance(e.target, VarRef):
                assigned.add(e.target.name)
            return
        from .ast_nodes import children
        for c in children(e):
            if isinstance(c, Expr):
                self.uses(c, assigned)


def typecheck(ast: SkeletonAst) -> SkeletonAst:
    return _Checker(ast).run()
