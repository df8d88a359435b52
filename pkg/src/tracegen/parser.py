"""Recursive descent parser for annotated skeletons.

Accepts either a list of function declarations (one carrying @MAIN) or a bare
statement list, which is wrapped into an implicit no-arg void entry function.
Annotations are folded into the governed node: LOOP/INVARIANT onto the
following loop, ASSERTBLOCK onto the following block, @MAIN/@REC onto the
following function.
"""

from __future__ import annotations

from .ast_nodes import (
    Assert, AssertBlock, Assign, ArrayLen, ArrayLit, ArrayNew, ArrayRead,
    Binary, Block, BoolLit, Break, Builtin, Call, CharLit, CompoundAssign,
    Continue, DoWhile, Empty, Expr, ExprStmt, For, FunctionDecl, If, IncDec,
    IntLit, JType, ListSpec, Loc, OutRef, Placeholder, Print, RangeSpec,
    Return, SkeletonAst, Spec, StringLit, Stmt, Ternary, Unary, VarDecl,
    VarRef, While, J_BOOLEAN, J_CHAR, J_INT, J_STRING, PLACEHOLDER_TYPES,
)
from .errors import (
    MisplacedAnnotationError, ParseError, UnsupportedConstructError,
)
from .lexer import Token, tokenize

_PRIMITIVE_TYPES = {"boolean", "byte", "short", "int", "long", "char", "String"}
_UNSUPPORTED_TYPES = {"float", "double"}
_ANNOTATION_CALLS = {"ASSERT", "ASSERTBLOCK", "LOOP", "INVARIANT"}
_HELPERS = {"__distinct": "distinct", "__impl": "impl"}

MAX_INT = 2 ** 31 - 1
MAX_LONG = 2 ** 63 - 1


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.next_placeholder_id = 0
        self.next_loop_id = 0

    # -- token plumbing ----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def at(self, text: str, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t.text == text and t.kind in ("op", "keyword")

    def at_ident(self, text: str, ahead: int = 0) -> bool:
        t = self.peek(ahead)
        return t.kind == "ident" and t.text == text

    def expect(self, text: str) -> Token:
        t = self.peek()
        if not self.at(text):
            raise ParseError(f"expected '{text}', found '{t.text or 'end of input'}'", t.loc)
        return self.advance()

    def expect_ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident":
            raise ParseError(f"expected identifier, found '{t.text or 'end of input'}'", t.loc)
        return self.advance()

    # -- entry point -------------------------------------------------------

    def parse_skeleton(self) -> SkeletonAst:
        if self._looks_like_function():
            functions = []
            while self.peek().kind != "eof":
                functions.append(self.parse_function())
            entries = [f for f in functions if f.is_entry]
            if len(entries) != 1:
                loc = functions[0].loc if functions else Loc(1, 1)
                raise ParseError(
                    f"skeleton must have exactly one @MAIN function, found {len(entries)}", loc)
            return SkeletonAst(functions, entries[0].name)

        stmts = []
        while self.peek().kind != "eof":
            stmts.append(self.parse_stmt())
        body = Block(stmts, loc=Loc(1, 1))
        main = FunctionDecl("main", [], None, body, is_entry=True, loc=Loc(1, 1))
        return SkeletonAst([main], "main", implicit_entry=True)

    def _looks_like_function(self) -> bool:
        i = 0
        if self.peek(i).text == "@":
            return True
        while self.peek(i).text in ("static", "final"):
            i += 1
        t = self.peek(i)
        if not (t.text in _PRIMITIVE_TYPES or t.text == "void"):
            return False
        i += 1
        while self.peek(i).text == "[":
            if self.peek(i + 1).text != "]":
                return False
            i += 2
        if self.peek(i).kind != "ident":
            return False
        return self.peek(i + 1).text == "("

    # -- functions ----------------------------------------------------------

    def parse_function(self) -> FunctionDecl:
        loc = self.peek().loc
        is_entry = False
        rec_bound = 0
        while self.at("@"):
            self.advance()
            name = self.expect_ident().text
            if name == "MAIN":
                is_entry = True
            elif name == "REC":
                self.expect("(")
                t = self.peek()
                if t.kind != "number":
                    raise ParseError("@REC expects a number", t.loc)
                self.advance()
                rec_bound = int(t.text)
                self.expect(")")
            else:
                raise ParseError(f"unknown annotation @{name}", loc)
        while self.at("static") or self.at("final"):
            self.advance()
        if self.at("void"):
            self.advance()
            rtype = None
        else:
            rtype = self.parse_type()
        fname = self.expect_ident().text
        self.expect("(")
        params: list[tuple[str, JType]] = []
        if not self.at(")"):
            while True:
                ptype = self.parse_type()
                pname = self.expect_ident().text
                ptype = self._postfix_array_suffix(ptype)
                params.append((pname, ptype))
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect(")")
        body = self.parse_block()
        if is_entry and params:
            raise UnsupportedConstructError("the entry function must not take parameters", loc)
        return FunctionDecl(fname, params, rtype, body, rec_bound, is_entry, loc=loc)

    def parse_type(self) -> JType:
        t = self.peek()
        if t.text in _UNSUPPORTED_TYPES:
            raise UnsupportedConstructError(f"type '{t.text}' is not supported", t.loc)
        if t.text not in _PRIMITIVE_TYPES:
            raise ParseError(f"expected a type, found '{t.text}'", t.loc)
        self.advance()
        kind = t.text
        while self.at("["):
            if not self.at("]", 1):
                break
            self.advance()
            self.advance()
            kind += "[]"
        try:
            return JType(kind)
        except ValueError:
            raise UnsupportedConstructError(f"type '{kind}' is not supported", t.loc) from None

    def _postfix_array_suffix(self, base: JType) -> JType:
        # C-style declarator: `int r[]`
        kind = base.kind
        while self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            kind += "[]"
        if kind == base.kind:
            return base
        try:
            return JType(kind)
        except ValueError:
            raise UnsupportedConstructError(f"type '{kind}' is not supported", self.peek().loc) from None

    # -- statements ----------------------------------------------------------

    def parse_block(self) -> Block:
        loc = self.expect("{").loc
        stmts = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                raise ParseError("unterminated block", loc)
            stmts.append(self.parse_stmt())
        self.expect("}")
        return Block(stmts, loc=loc)

    def parse_stmt(self) -> Stmt:
        t = self.peek()
        if t.kind == "keyword":
            if t.text in ("class", "switch", "try", "import", "package", "enum",
                          "interface", "assert", "throw", "synchronized"):
                raise UnsupportedConstructError(f"'{t.text}' is not supported", t.loc)
            if t.text == ";":
                pass
        if self.at(";"):
            return Empty(loc=self.advance().loc)
        if self.at("{"):
            return self.parse_block()
        if self.at("if"):
            return self.parse_if()
        if self.at("while"):
            return self.parse_while()
        if self.at("do"):
            return self.parse_do_while()
        if self.at("for"):
            return self.parse_for()
        if self.at("return"):
            loc = self.advance().loc
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return Return(value, loc=loc)
        if self.at("break"):
            loc = self.advance().loc
            self.expect(";")
            return Break(loc=loc)
        if self.at("continue"):
            loc = self.advance().loc
            self.expect(";")
            return Continue(loc=loc)
        if t.kind == "ident" and t.text in _ANNOTATION_CALLS:
            return self.parse_annotation()
        if t.kind == "ident" and t.text == "System":
            return self.parse_print()
        if t.text in _UNSUPPORTED_TYPES:
            raise UnsupportedConstructError(f"type '{t.text}' is not supported", t.loc)
        if t.text in _PRIMITIVE_TYPES:
            return self.parse_var_decl()
        return self.parse_expr_stmt()

    def parse_var_decl(self) -> Stmt:
        loc = self.peek().loc
        jtype = self.parse_type()
        name = self.expect_ident().text
        jtype = self._postfix_array_suffix(jtype)
        init = None
        if self.at("="):
            self.advance()
            init = self.parse_expr()
        if self.at(","):
            raise UnsupportedConstructError(
                "multiple declarators in one statement are not supported", self.peek().loc)
        self.expect(";")
        return VarDecl(jtype, name, init, loc=loc)

    def parse_if(self) -> Stmt:
        loc = self.expect("if").loc
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_stmt()
        other = None
        if self.at("else"):
            self.advance()
            other = self.parse_stmt()
        return If(cond, then, other, loc=loc)

    def _fresh_loop_id(self) -> int:
        i = self.next_loop_id
        self.next_loop_id += 1
        return i

    def parse_while(self) -> While:
        loc = self.expect("while").loc
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        body = self.parse_stmt()
        return While(cond, body, loop_id=self._fresh_loop_id(), loc=loc)

    def parse_do_while(self) -> DoWhile:
        loc = self.expect("do").loc
        body = self.parse_stmt()
        self.expect("while")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.expect(";")
        return DoWhile(body, cond, loop_id=self._fresh_loop_id(), loc=loc)

    def parse_for(self) -> For:
        loc = self.expect("for").loc
        self.expect("(")
        if self.at(";"):
            raise UnsupportedConstructError("for loop without an init clause", self.peek().loc)
        if self.peek().text in _PRIMITIVE_TYPES:
            init_loc = self.peek().loc
            jtype = self.parse_type()
            name = self.expect_ident().text
            self.expect("=")
            init = VarDecl(jtype, name, self.parse_expr(), loc=init_loc)
        else:
            init = self._parse_simple_stmt()
        self.expect(";")
        if self.at(";"):
            raise UnsupportedConstructError("for loop without a condition", self.peek().loc)
        cond = self.parse_expr()
        self.expect(";")
        if self.at(")"):
            raise UnsupportedConstructError("for loop without a step clause", self.peek().loc)
        step = self._parse_simple_stmt()
        self.expect(")")
        body = self.parse_stmt()
        return For(init, cond, step, body, loop_id=self._fresh_loop_id(), loc=loc)

    def _parse_simple_stmt(self) -> Stmt:
        """Assignment / compound assignment / inc-dec without the trailing ';'."""
        loc = self.peek().loc
        target = self.parse_unary()
        if self.at("="):
            self.advance()
            return Assign(target, self.parse_expr(), loc=loc)
        for op in ("+=", "-=", "*=", "/=", "%="):
            if self.at(op):
                self.advance()
                return CompoundAssign(op[0], target, self.parse_expr(), loc=loc)
        if isinstance(target, IncDec):
            return ExprStmt(target, loc=loc)
        if isinstance(target, Call):
            return ExprStmt(target, loc=loc)
        raise ParseError("expected an assignment, increment, or call", loc)

    def parse_expr_stmt(self) -> Stmt:
        s = self._parse_simple_stmt()
        self.expect(";")
        return s

    def parse_print(self) -> Stmt:
        loc = self.peek().loc
        self.advance()                      # System
        self.expect(".")
        t = self.expect_ident()
        if t.text != "out":
            raise ParseError("expected 'System.out.print'", t.loc)
        self.expect(".")
        t = self.expect_ident()
        if t.text != "print":
            raise UnsupportedConstructError(f"'System.out.{t.text}' is not supported", t.loc)
        self.expect("(")
        arg = self.parse_expr()
        self.expect(")")
        self.expect(";")
        return Print(arg, loc=loc)

    # -- annotations ----------------------------------------------------------

    def parse_annotation(self) -> Stmt:
        t = self.advance()
        name = t.text
        if name == "ASSERT":
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            self.expect(";")
            return Assert(cond, loc=t.loc)
        if name == "ASSERTBLOCK":
            self.expect("(")
            self.expect(")")
            self.expect(";")
            if not self.at("{"):
                raise MisplacedAnnotationError(
                    "ASSERTBLOCK must be followed by a block", self.peek().loc)
            return AssertBlock(self.parse_block(), loc=t.loc)
        if name == "LOOP":
            self.expect("(")
            spec = self.parse_spec()
            self.expect(")")
            self.expect(";")
            stmt = self.parse_stmt()
            loop = stmt
            if isinstance(loop, (While, DoWhile, For)):
                if loop.bound is not None:
                    raise MisplacedAnnotationError("loop already carries a LOOP bound", t.loc)
                loop.bound = spec
                return loop
            raise MisplacedAnnotationError("LOOP must immediately precede a loop", t.loc)
        if name == "INVARIANT":
            self.expect("(")
            inv = self.parse_expr()
            self.expect(")")
            self.expect(";")
            stmt = self.parse_stmt()
            if isinstance(stmt, While):
                if stmt.invariant is not None:
                    raise MisplacedAnnotationError("loop already carries an INVARIANT", t.loc)
                stmt.invariant = inv
                return stmt
            raise MisplacedAnnotationError(
                "INVARIANT must immediately precede a while loop", t.loc)
        raise ParseError(f"unknown annotation {name}", t.loc)

    def parse_spec(self) -> Spec:
        t = self.peek()
        if self.at_ident("range"):
            self.advance()
            self.expect("(")
            lo = self.parse_spec_scalar()
            self.expect(",")
            hi = self.parse_spec_scalar()
            self.expect(")")
            if not isinstance(lo, int) or not isinstance(hi, int) or isinstance(lo, bool):
                raise ParseError("range bounds must be integers", t.loc)
            if lo > hi:
                raise ParseError(f"range lower bound {lo} exceeds upper {hi}", t.loc)
            return RangeSpec(lo, hi)
        if self.at_ident("list"):
            self.advance()
            self.expect("(")
            items = [self.parse_spec_scalar()]
            while self.at(","):
                self.advance()
                items.append(self.parse_spec_scalar())
            self.expect(")")
            return ListSpec(items)
        raise ParseError("expected range(...) or list(...)", t.loc)

    def parse_spec_scalar(self):
        t = self.peek()
        if t.kind == "number":
            self.advance()
            return int(t.text.rstrip("lL"))
        if self.at("-") and self.peek(1).kind == "number":
            self.advance()
            n = self.advance()
            return -int(n.text.rstrip("lL"))
        if self.at("true"):
            self.advance()
            return True
        if self.at("false"):
            self.advance()
            return False
        if t.kind == "char":
            self.advance()
            return ord(t.text)
        if t.kind == "string":
            self.advance()
            return t.text
        raise ParseError("expected a literal inside a constraint", t.loc)

    # -- expressions ----------------------------------------------------------

    def parse_expr(self) -> Expr:
        return self.parse_ternary()

    def parse_ternary(self) -> Expr:
        cond = self.parse_or()
        if self.at("?"):
            loc = self.advance().loc
            then = self.parse_expr()
            self.expect(":")
            other = self.parse_ternary()
            return Ternary(cond, then, other, loc=loc)
        return cond

    def _binary_level(self, ops: tuple[str, ...], next_level) -> Expr:
        left = next_level()
        while any(self.at(op) for op in ops):
            op = self.advance()
            right = next_level()
            left = Binary(op.text, left, right, loc=op.loc)
        return left

    def parse_or(self) -> Expr:
        return self._binary_level(("||",), self.parse_and)

    def parse_and(self) -> Expr:
        return self._binary_level(("&&",), self.parse_equality)

    def parse_equality(self) -> Expr:
        return self._binary_level(("==", "!="), self.parse_relational)

    def parse_relational(self) -> Expr:
        return self._binary_level(("<", ">", "<=", ">="), self.parse_additive)

    def parse_additive(self) -> Expr:
        return self._binary_level(("+", "-"), self.parse_multiplicative)

    def parse_multiplicative(self) -> Expr:
        return self._binary_level(("*", "/", "%"), self.parse_unary)

    def parse_unary(self) -> Expr:
        t = self.peek()
        if self.at("-") or self.at("+") or self.at("!"):
            self.advance()
            operand = self.parse_unary()
            if t.text == "-" and isinstance(operand, IntLit):
                # fold so that -2147483648 is one literal, like javac treats it
                return IntLit(-operand.value, operand.long, loc=t.loc)
            return Unary(t.text, operand, loc=t.loc)
        if self.at("++") or self.at("--"):
            self.advance()
            target = self.parse_unary()
            if not isinstance(target, (VarRef, ArrayRead)):
                raise ParseError(f"cannot apply {t.text} here", t.loc)
            return IncDec(t.text, True, target, loc=t.loc)
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        e = self.parse_primary()
        while True:
            if self.at("["):
                loc = self.advance().loc
                idx = self.parse_expr()
                self.expect("]")
                e = ArrayRead(e, idx, loc=loc)
            elif self.at("."):
                loc = self.advance().loc
                member = self.expect_ident().text
                if member == "length":
                    if self.at("("):
                        raise UnsupportedConstructError(
                            "String.length() is not supported", loc)
                    e = ArrayLen(e, loc=loc)
                elif member == "equals":
                    self.expect("(")
                    arg = self.parse_expr()
                    self.expect(")")
                    e = Builtin("str_eq", [e, arg], loc=loc)
                else:
                    raise UnsupportedConstructError(f"method '{member}' is not supported", loc)
            elif self.at("++") or self.at("--"):
                t = self.advance()
                if not isinstance(e, (VarRef, ArrayRead)):
                    raise ParseError(f"cannot apply {t.text} here", t.loc)
                e = IncDec(t.text, False, e, loc=t.loc)
            else:
                return e

    def parse_primary(self) -> Expr:
        t = self.peek()
        if t.kind == "number":
            self.advance()
            is_long = t.text[-1] in "lL"
            value = int(t.text.rstrip("lL"))
            # the magnitude of MIN is legal only because the parser folds a
            # leading minus into the literal; typecheck re-validates the range
            limit = MAX_LONG + 1 if is_long else MAX_INT + 1
            if value > limit:
                raise ParseError(f"integer literal {t.text} is out of range", t.loc)
            return IntLit(value, is_long, loc=t.loc)
        if t.kind == "string":
            self.advance()
            return StringLit(t.text, loc=t.loc)
        if t.kind == "char":
            self.advance()
            return CharLit(ord(t.text), loc=t.loc)
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(t.text == "true", loc=t.loc)
        if self.at("null"):
            raise UnsupportedConstructError("'null' is not supported", t.loc)
        if self.at("("):
            self.advance()
            e = self.parse_expr()
            self.expect(")")
            return e
        if self.at("new"):
            return self.parse_new()
        if t.kind == "ident":
            return self.parse_ident_expr()
        raise ParseError(f"unexpected token '{t.text or 'end of input'}'", t.loc)

    def parse_new(self) -> Expr:
        loc = self.expect("new").loc
        base = self.peek()
        if base.text not in ("int", "String"):
            raise UnsupportedConstructError(
                f"'new {base.text}[...]' is not supported", base.loc)
        self.advance()
        elem = JType(base.text)
        # new int[] {...} / new int[][] {...} / new int[n] / new int[n][m]
        sizes: list[Expr] = []
        dims = 0
        while self.at("["):
            self.advance()
            if self.at("]"):
                self.advance()
                dims += 1
                continue
            sizes.append(self.parse_expr())
            self.expect("]")
            dims += 1
        if dims == 0:
            raise ParseError("expected '[' after array element type", loc)
        if base.text == "String" and dims > 1:
            raise UnsupportedConstructError("String[][] is not supported", loc)
        if base.text == "int" and dims > 2:
            raise UnsupportedConstructError("arrays of dimension > 2 are not supported", loc)
        if self.at("{"):
            if sizes:
                raise ParseError("array literal cannot also have explicit sizes", loc)
            return self.parse_array_literal(elem, dims, loc)
        if len(sizes) != dims:
            raise UnsupportedConstructError(
                "partially sized arrays like 'new int[n][]' are not supported", loc)
        return ArrayNew(elem, sizes, loc=loc)

    def parse_array_literal(self, elem: JType, dims: int, loc: Loc) -> ArrayLit:
        self.expect("{")
        elements: list[Expr] = []
        if not self.at("}"):
            while True:
                if dims == 2:
                    row_loc = self.peek().loc
                    self.expect("{")
                    row: list[Expr] = []
                    if not self.at("}"):
                        while True:
                            row.append(self.parse_expr())
                            if self.at(","):
                                self.advance()
                                continue
                            break
                    self.expect("}")
                    elements.append(ArrayLit(elem, row, loc=row_loc))
                else:
                    elements.append(self.parse_expr())
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect("}")
        return ArrayLit(elem, elements, loc=loc)

    def parse_ident_expr(self) -> Expr:
        t = self.advance()
        name = t.text
        if name == "__out":
            return OutRef(loc=t.loc)
        if name == "HOLE":
            self.expect("(")
            inner = self.parse_expr()
            self.expect(")")
            if not isinstance(inner, Placeholder):
                raise ParseError("HOLE(...) must wrap a placeholder", t.loc)
            inner.is_hole = True
            return inner
        if name in PLACEHOLDER_TYPES:
            return self.parse_placeholder(name, t.loc)
        if name in _HELPERS:
            self.expect("(")
            args = [self.parse_expr()]
            while self.at(","):
                self.advance()
                args.append(self.parse_expr())
            self.expect(")")
            return Builtin(_HELPERS[name], args, loc=t.loc)
        if name == "Math":
            self.expect(".")
            member = self.expect_ident()
            if member.text != "abs":
                raise UnsupportedConstructError(
                    f"'Math.{member.text}' is not supported", member.loc)
            self.expect("(")
            arg = self.parse_expr()
            self.expect(")")
            return Builtin("abs", [arg], loc=t.loc)
        if name in _ANNOTATION_CALLS:
            raise MisplacedAnnotationError(f"{name} cannot appear inside an expression", t.loc)
        if self.at("("):
            self.advance()
            args = []
            if not self.at(")"):
                while True:
                    args.append(self.parse_expr())
                    if self.at(","):
                        self.advance()
                        continue
                    break
            self.expect(")")
            return Call(name, args, loc=t.loc)
        return VarRef(name, loc=t.loc)

    def parse_placeholder(self, ptype: str, loc: Loc) -> Placeholder:
        self.expect("(")
        specs: list[Spec] = []
        if not self.at(")"):
            while True:
                specs.append(self.parse_spec())
                if self.at(","):
                    self.advance()
                    continue
                break
        self.expect(")")
        pid = self.next_placeholder_id
        self.next_placeholder_id += 1
        scalar = ptype in ("INT", "BOOLEAN", "CHAR", "STRING")
        if scalar:
            if len(specs) != 1:
                raise ParseError(f"{ptype} expects exactly one constraint", loc)
            return Placeholder(pid, ptype, value_spec=specs[0], loc=loc)
        if ptype == "INT2DARRAY":
            if len(specs) != 3:
                raise ParseError(
                    "INT2DARRAY expects (row-count, row-length, element) constraints", loc)
            return Placeholder(pid, ptype, length_spec=specs[0], row_spec=specs[1],
                               value_spec=specs[2], loc=loc)
        if len(specs) != 2:
            raise ParseError(f"{ptype} expects (length, element) constraints", loc)
        return Placeholder(pid, ptype, length_spec=specs[0], value_spec=specs[1], loc=loc)


def parse_skeleton(source: str) -> SkeletonAst:
    return Parser(source).parse_skeleton()
