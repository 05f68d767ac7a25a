"""Concrete syntax: lexer, parser and printer for ``.dtt`` files.

Grammar (ASCII, unicode alternatives in brackets)::

    file      ::= decl*
    decl      ::= 'calculus' ('stlc' | 'fuzz')
                | 'literals' type
                | 'rules' IDENT (',' IDENT)*
                | 'type' IDENT [':=' type]
                | 'const' IDENT ':' type
                | 'dconst' IDENT ':' pred
                | 'def' IDENT [':' (pred | type)] ':=' expr
                | 'pred' IDENT '(' IDENT+ ':' type ')' ':=' pred
    type      ::= tprod [('->' [→] | '-o' [⊸]) type]
    tprod     ::= tprefix [('*' [×] | '**' [⊗]) tprod]
    tprefix   ::= '!' scale tprefix | IDENT | '(' type ')'
    scale     ::= NUM ['/' NUM]
    pred      ::= 'Pi' IDENT+ ':' type '.' pred
                | 'Pi' IDENT IDENT ':' type '.' 'D' '[' type ']' '(' IDENT ',' IDENT ')' '->' pred
                | patom ['*' pred]
    patom     ::= 'D' '[' type ']' '(' expr ',' expr ')' | IDENT '(' expr,+ ')' | '(' pred ')'
    expr      ::= 'fun' binder+ '=>' expr              [λ]
                | 'let' '!' IDENT '=' expr 'in' expr
                | 'let' '(' IDENT ',' IDENT ')' '=' expr 'in' expr
                | prefix+
    binder    ::= IDENT | '(' IDENT+ ':' type ')' | '(' IDENT IDENT [':' type] '|' IDENT ')'
    prefix    ::= ('fst' | 'snd' | 'refl' [∂] | '!') atom | 'Der' ['[' type ',' type ']'] atom | atom
    atom      ::= IDENT | NUM | '(' expr ')' | '(' expr ',' expr ')' | '<' expr ',' expr '>'
                | 'J' '[' IDENT IDENT [':' type] '.' pred ']' '(' expr ',' expr ',' expr ',' '[' IDENT ']' expr ')'

``<a, b>`` is the cartesian pair, ``(a, b)`` the tensor pair of the
sub-exponential fragment.  ``fun (x y : A | e) => a`` is the difference
abstraction over two points and a difference.  Program and difference terms
share the expression grammar; the sort of each node is resolved from the
sorts of the names it mentions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import Diagnostic, DiagnosticError
from .syntax import (
    App, Arrow, Bang, BangIntro, BaseType, Const, DAppDiff, DAppPoint, DConst, DerivSugar, Diff,
    DLamDiff, DLamPoint, DPair, DProj, DVar, J, Lam, LetBang, LetTensor, Lolli, Motive, Pair,
    PiDiff, PiPoint, PProduct, Product, Proj, Refl, Tensor, TensorPair, TypeMeta, Var,
    der_expansion, is_difference, is_predicate, is_program, is_type, match_der, shift_p, subst_p,
)

KEYWORDS = {
    "fun", "let", "in", "J", "refl", "Der", "D", "Pi", "fst", "snd",
    "def", "const", "dconst", "type", "pred", "calculus", "literals", "rules", "case",
}
DECL_KEYWORDS = {"def", "const", "dconst", "type", "pred", "calculus", "literals", "rules", "case"}

_UNICODE = {"λ": "fun", "∂": "refl", "→": "->", "⊸": "-o", "⊗": "**", "×": "*", "Π": "Pi"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<num>\d+(?:\.\d+)?)
  | (?P<sym>=>|->|-o(?![\w'])|:=|\*\*|[()\[\]<>,.:|!/*=λ∂→⊸⊗×Π])
  | (?P<ident>[^\W\d][\w']*)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list:
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DiagnosticError([Diagnostic("error", line, col, f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        s = m.group()
        if kind == "sym" and s in _UNICODE:
            s = _UNICODE[s]
            kind = "ident" if s in KEYWORDS else "sym"
        if kind == "ident" and s in _UNICODE:
            s = _UNICODE[s]
        if kind in ("sym", "num", "ident"):
            if kind == "ident" and s in KEYWORDS:
                kind = "kw"
            toks.append(Token(kind, s, line, col))
        nl = s.count("\n") if kind in ("ws", "comment") else 0
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(m.group())
        pos = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


# ------------------------------------------------------------ declarations


@dataclass(frozen=True)
class Directive:
    kind: str
    value: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class TypeDecl:
    name: str
    definition: Optional[object]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class ConstDecl:
    name: str
    type: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DConstDecl:
    name: str
    predicate: object
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Definition:
    name: str
    classifier: Optional[object]
    term: object
    sort: str
    line: int = field(default=0, compare=False)
    column: int = field(default=0, compare=False)


@dataclass(frozen=True)
class PredDef:
    name: str
    params: tuple
    body: object
    line: int = field(default=0, compare=False)


@dataclass
class SourceFile:
    declarations: list = field(default_factory=list)

    def definitions(self) -> dict:
        return {d.name: d for d in self.declarations if isinstance(d, Definition)}


# -------------------------------------------------------------- raw trees
# Expressions are first parsed into tuples and then resolved into kernel
# syntax once the sorts of all names are known.


class _Globals:
    def __init__(self, allow_free: bool = True):
        self.sorts: dict = {}
        self.type_abbrevs: dict = {}
        self.pred_abbrevs: dict = {}
        self.allow_free = allow_free


class Parser:
    def __init__(self, text: str, globals_: Optional[_Globals] = None):
        self.toks = tokenize(text)
        self.i = 0
        self.g = globals_ or _Globals()

    # -- token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, k: int = 0) -> bool:
        t = self.peek(k)
        return t.kind in ("sym", "kw") and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        found = tok.text or "end of input"
        raise DiagnosticError([Diagnostic("error", tok.line, tok.col, f"{msg} (found {found!r})")])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        tok = self.peek()
        self.i += 1
        return tok

    def ident(self) -> str:
        t = self.peek()
        if t.kind != "ident":
            self.error("expected identifier")
        self.i += 1
        return t.text

    # -- types
    def type_(self):
        left = self.tprod()
        if self.accept("->"):
            return Arrow(left, self.type_())
        if self.accept("-o"):
            return Lolli(left, self.type_())
        return left

    def tprod(self):
        left = self.tprefix()
        if self.accept("*"):
            return Product(left, self.tprod())
        if self.accept("**"):
            return Tensor(left, self.tprod())
        return left

    def scale(self) -> Fraction:
        t = self.peek()
        if t.kind != "num":
            self.error("expected scale after '!'")
        self.i += 1
        value = Fraction(t.text)
        if self.accept("/"):
            d = self.peek()
            if d.kind != "num":
                self.error("expected denominator")
            self.i += 1
            value = value / Fraction(d.text)
        return value

    def tprefix(self):
        if self.accept("!"):
            s = self.scale()
            return Bang(s, self.tprefix())
        if self.accept("("):
            ty = self.type_()
            self.expect(")")
            return ty
        name = self.ident()
        return self.g.type_abbrevs.get(name, BaseType(name))

    # -- predicates (raw)
    def pred(self):
        if self.at("Pi"):
            self.i += 1
            names = [self.ident()]
            while self.peek().kind == "ident":
                names.append(self.ident())
            self.expect(":")
            dom = self.type_()
            self.expect(".")
            if len(names) == 2 and self._diff_premise_ahead(names, dom):
                body = self.pred()
                return ("pidiff", names[0], names[1], dom, body)
            body = self.pred()
            for n in reversed(names):
                body = ("pipoint", n, dom, body)
            return body
        left = self.patom()
        if self.accept("*"):
            return ("pprod", left, self.pred())
        return left

    def _diff_premise_ahead(self, names, dom) -> bool:
        save = self.i
        try:
            self.expect("D")
            self.expect("[")
            carrier = self.type_()
            self.expect("]")
            self.expect("(")
            a = self.ident()
            self.expect(",")
            b = self.ident()
            self.expect(")")
            self.expect("->")
        except DiagnosticError:
            self.i = save
            return False
        if [a, b] != list(names):
            self.i = save
            return False
        if carrier != dom:
            self.error("difference premise must be D[A](x, y) over the bound points")
        return True

    def patom(self):
        if self.accept("D"):
            self.expect("[")
            carrier = self.type_()
            self.expect("]")
            self.expect("(")
            t = self.expr()
            self.expect(",")
            u = self.expr()
            self.expect(")")
            return ("D", carrier, t, u)
        if self.accept("("):
            p = self.pred()
            self.expect(")")
            return p
        t = self.peek()
        if t.kind == "ident" and t.text in self.g.pred_abbrevs:
            self.i += 1
            self.expect("(")
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self.expect(")")
            return ("predapp", t.text, args, t)
        self.error("expected a predicate")

    # -- expressions (raw)
    def expr(self):
        t = self.peek()
        if self.accept("fun"):
            groups = [self.binder()]
            while not self.at("=>"):
                groups.append(self.binder())
            self.expect("=>")
            body = self.expr()
            return ("fun", groups, body, t)
        if self.accept("let"):
            if self.accept("!"):
                x = self.ident()
                self.expect("=")
                s = self.expr()
                self.expect("in")
                return ("letbang", x, s, self.expr())
            self.expect("(")
            x = self.ident()
            self.expect(",")
            y = self.ident()
            self.expect(")")
            self.expect("=")
            s = self.expr()
            self.expect("in")
            return ("lettensor", x, y, s, self.expr())
        head = self.prefix()
        args = []
        while self._starts_prefix():
            args.append(self.prefix())
        if args:
            return ("app", head, args, t)
        return head

    def _starts_prefix(self) -> bool:
        t = self.peek()
        if t.kind in ("ident", "num"):
            return True
        return t.kind in ("sym", "kw") and t.text in ("(", "<", "J", "fst", "snd", "refl", "Der", "!")

    def binder(self):
        if self.accept("("):
            names = [self.ident()]
            while self.peek().kind == "ident":
                names.append(self.ident())
            ty = None
            if self.accept(":"):
                ty = self.type_()
            if self.accept("|"):
                if len(names) != 2:
                    self.error("difference binder needs exactly two point names")
                e = self.ident()
                self.expect(")")
                return [("triple", names[0], names[1], e, ty)]
            self.expect(")")
            return [("plain", n, ty) for n in names]
        return [("plain", self.ident(), None)]

    def prefix(self):
        t = self.peek()
        for kw, tag in (("fst", "fst"), ("snd", "snd"), ("refl", "refl"), ("!", "bang")):
            if self.accept(kw):
                return (tag, self.atom(), t)
        if self.accept("Der"):
            types = None
            if self.accept("["):
                a = self.type_()
                self.expect(",")
                b = self.type_()
                self.expect("]")
                types = (a, b)
            return ("der", self.atom(), types, t)
        return self.atom()

    def atom(self):
        t = self.peek()
        if t.kind == "ident":
            self.i += 1
            return ("var", t.text, t)
        if t.kind == "num":
            self.i += 1
            return ("num", t.text, t)
        if self.accept("("):
            e = self.expr()
            if self.accept(","):
                f = self.expr()
                self.expect(")")
                return ("tpair", e, f, t)
            self.expect(")")
            return e
        if self.accept("<"):
            e = self.expr()
            self.expect(",")
            f = self.expr()
            self.expect(">")
            return ("pair", e, f, t)
        if self.accept("J"):
            if not self.at("["):
                self.error("J requires an explicit motive J[x y. P]")
            self.expect("[")
            x = self.ident()
            y = self.ident()
            carrier = None
            if self.accept(":"):
                carrier = self.type_()
            self.expect(".")
            body = self.pred()
            self.expect("]")
            self.expect("(")
            lhs = self.expr()
            self.expect(",")
            rhs = self.expr()
            self.expect(",")
            diff = self.expr()
            self.expect(",")
            self.expect("[")
            z = self.ident()
            self.expect("]")
            branch = self.expr()
            self.expect(")")
            return ("J", (x, y, carrier, body), lhs, rhs, diff, (z, branch), t)
        self.error("expected an expression")

    # -- declarations
    def file(self) -> SourceFile:
        sf = SourceFile()
        seen = set()
        while self.peek().kind != "eof":
            t = self.peek()
            decl = self.declaration()
            name = getattr(decl, "name", None)
            if name is not None:
                if name in seen:
                    raise DiagnosticError([Diagnostic("error", t.line, t.col, f"duplicate name {name!r}")])
                seen.add(name)
            sf.declarations.append(decl)
        return sf

    def declaration(self):
        t = self.peek()
        if self.accept("calculus"):
            mode = self.ident()
            if mode not in ("stlc", "fuzz"):
                self.error("calculus must be stlc or fuzz", t)
            return Directive("calculus", mode, t.line)
        if self.accept("literals"):
            return Directive("literals", self.type_(), t.line)
        if self.accept("case"):
            name = self.ident()
            first = self.ident()
            second = self.ident()
            return Directive("case", (name, first, second), t.line)
        if self.accept("rules"):
            names = [self.ident()]
            while self.accept(","):
                names.append(self.ident())
            return Directive("rules", tuple(names), t.line)
        if self.accept("type"):
            name = self.ident()
            if self.accept(":="):
                ty = self.type_()
                self.g.type_abbrevs[name] = ty
                return TypeDecl(name, ty, t.line)
            return TypeDecl(name, None, t.line)
        if self.accept("const"):
            name = self.ident()
            self.expect(":")
            ty = self.type_()
            self.g.sorts[name] = "p"
            return ConstDecl(name, ty, t.line)
        if self.accept("dconst"):
            name = self.ident()
            self.expect(":")
            p = resolve_pred(self.pred(), [], self.g)
            self.g.sorts[name] = "d"
            return DConstDecl(name, p, t.line)
        if self.accept("pred"):
            name = self.ident()
            params = []
            while self.accept("("):
                names = [self.ident()]
                while self.peek().kind == "ident":
                    names.append(self.ident())
                self.expect(":")
                ty = self.type_()
                self.expect(")")
                params.extend((n, ty) for n in names)
            self.expect(":=")
            scope = [(n, "p") for n, _ in params]
            body = resolve_pred(self.pred(), scope, self.g)
            self.g.pred_abbrevs[name] = (tuple(params), body)
            return PredDef(name, tuple(params), body, t.line)
        if self.accept("def"):
            name = self.ident()
            classifier = None
            if self.accept(":"):
                classifier = self.classifier()
            self.expect(":=")
            raw = self.expr()
            if classifier is not None and is_predicate(classifier):
                sort = "d"
            elif classifier is not None:
                sort = "p"
            else:
                sort = sort_of(raw, [], self.g)
            term = resolve_diff(raw, [], self.g) if sort == "d" else resolve_prog(raw, [], self.g)
            self.g.sorts[name] = sort
            return Definition(name, classifier, term, sort, t.line, t.col)
        self.error("expected a declaration")

    def classifier(self):
        save = self.i
        try:
            p = self.pred()
            if self.at(":="):
                return resolve_pred(p, [], self.g)
        except DiagnosticError:
            pass
        self.i = save
        return self.type_()


# -------------------------------------------------------------- resolution


def _lookup(name: str, scope: list, g: _Globals, tok=None):
    """Return ('p', index) / ('d', index) for bound names, ('gp'|'gd', name) for globals."""
    pi = di = 0
    for n, s in reversed(scope):
        if n == name:
            return (s, pi if s == "p" else di)
        if s == "p":
            pi += 1
        else:
            di += 1
    if name in g.sorts:
        return ("g" + g.sorts[name], name)
    if g.allow_free:
        return ("gp", name)
    line, col = (tok.line, tok.col) if tok else (0, 0)
    raise DiagnosticError([Diagnostic("error", line, col, f"unbound identifier {name!r}")])


def _tok(raw):
    last = raw[-1] if isinstance(raw, tuple) and raw else None
    return last if isinstance(last, Token) else None


def _fail(raw, msg):
    t = _tok(raw)
    raise DiagnosticError([Diagnostic("error", t.line if t else 0, t.col if t else 0, msg)])


def _group_binders(groups: list, body, g: _Globals) -> list:
    flat = [b for g in groups for b in g]
    plain_run = all(b[0] == "plain" for b in flat)
    if not plain_run or len(flat) < 3:
        return flat
    flags = [i >= 2 and _diff_used(b[1], body, g) for i, b in enumerate(flat)]
    out, i = [], 0
    pending = []
    for b, f in zip(flat, flags):
        if f and len(pending) >= 2:
            x, y = pending[-2], pending[-1]
            out.extend(pending[:-2])
            ty = x[2] if x[2] is not None else y[2]
            out.append(("triple", x[1], y[1], b[1], ty))
            pending = []
        else:
            pending.append(b)
    out.extend(pending)
    return out


def _diff_used(name: str, raw, g: _Globals) -> bool:
    """Syntactic evidence that ``name`` is a difference variable in ``raw``."""
    if isinstance(raw, tuple) and raw[:2] == ("var", name):
        return True
    return _diff_slot(name, raw, g)


def _diff_slot(name: str, raw, g: _Globals) -> bool:
    if not isinstance(raw, tuple) or not raw:
        return False
    tag = raw[0]
    if tag == "J":
        d = raw[4]
        if isinstance(d, tuple) and d[:2] == ("var", name):
            return True
        return any(_diff_slot(name, r, g) for r in (raw[2], raw[3], raw[4])) or (
            raw[5][0] != name and _diff_slot(name, raw[5][1], g)
        )
    if tag == "app":
        head, args = raw[1], raw[2]
        if isinstance(head, tuple) and head[:2] == ("var", name):
            return True
        diff_head = head[0] in ("der", "J") or (head[0] == "var" and g.sorts.get(head[1]) == "d")
        if diff_head and len(args) >= 3 and args[2][:2] == ("var", name):
            return True
        return _diff_slot(name, head, g) or any(_diff_slot(name, a, g) for a in args)
    if tag == "fun":
        bound = {b[1] for g in raw[1] for b in g if b[0] == "plain"} | {
            n for g in raw[1] for b in g if b[0] == "triple" for n in b[1:4]
        }
        return name not in bound and _diff_slot(name, raw[2], g)
    if tag == "pair":
        return _diff_slot(name, raw[1], g) or _diff_slot(name, raw[2], g)
    if tag in ("fst", "snd"):
        return _diff_slot(name, raw[1], g)
    return False


def sort_of(raw, scope: list, g: _Globals) -> str:
    tag = raw[0]
    if tag == "var":
        kind, _ = _lookup(raw[1], scope, g, _tok(raw))
        return "d" if kind in ("d", "gd") else "p"
    if tag == "num":
        return "p"
    if tag == "app":
        return sort_of(raw[1], scope, g)
    if tag == "fun":
        inner = list(scope)
        for b in _group_binders(raw[1], raw[2], g):
            if b[0] == "plain":
                inner.append((b[1], "p"))
            else:
                inner += [(b[1], "p"), (b[2], "p"), (b[3], "d")]
        return sort_of(raw[2], inner, g)
    if tag == "pair":
        return "d" if "d" in (sort_of(raw[1], scope, g), sort_of(raw[2], scope, g)) else "p"
    if tag in ("fst", "snd"):
        return sort_of(raw[1], scope, g)
    if tag in ("refl", "der", "J"):
        return "d"
    return "p"


def resolve_prog(raw, scope: list, g: _Globals):
    tag = raw[0]
    if tag == "var":
        kind, ref = _lookup(raw[1], scope, g, _tok(raw))
        if kind == "p":
            return Var(ref)
        if kind == "gp":
            return Const(ref)
        _fail(raw, f"difference variable {raw[1]!r} used as a program term")
    if tag == "num":
        return Const(raw[1])
    if tag == "app":
        fn = resolve_prog(raw[1], scope, g)
        for a in raw[2]:
            fn = App(fn, resolve_prog(a, scope, g))
        return fn
    if tag == "fun":
        binders = [b for grp in raw[1] for b in grp]
        if any(b[0] == "triple" for b in binders):
            _fail(raw, "difference binder in a program abstraction")
        inner = scope + [(b[1], "p") for b in binders]
        body = resolve_prog(raw[2], inner, g)
        for b in reversed(binders):
            body = Lam(b[2], body)
        return body
    if tag == "pair":
        return Pair(resolve_prog(raw[1], scope, g), resolve_prog(raw[2], scope, g))
    if tag == "tpair":
        return TensorPair(resolve_prog(raw[1], scope, g), resolve_prog(raw[2], scope, g))
    if tag in ("fst", "snd"):
        return Proj(1 if tag == "fst" else 2, resolve_prog(raw[1], scope, g))
    if tag == "bang":
        return BangIntro(resolve_prog(raw[1], scope, g))
    if tag == "letbang":
        s = resolve_prog(raw[2], scope, g)
        return LetBang(s, resolve_prog(raw[3], scope + [(raw[1], "p")], g))
    if tag == "lettensor":
        s = resolve_prog(raw[3], scope, g)
        return LetTensor(s, resolve_prog(raw[4], scope + [(raw[1], "p"), (raw[2], "p")], g))
    _fail(raw, "difference term used where a program term is expected")


def resolve_diff(raw, scope: list, g: _Globals):
    tag = raw[0]
    if tag == "var":
        kind, ref = _lookup(raw[1], scope, g, _tok(raw))
        if kind == "d":
            return DVar(ref)
        if kind == "gd":
            return DConst(ref)
        _fail(raw, f"program term {raw[1]!r} used where a difference term is expected")
    if tag == "app":
        fn = resolve_diff(raw[1], scope, g)
        args = raw[2]
        i = 0
        while i < len(args):
            if i + 2 < len(args) and sort_of(args[i + 2], scope, g) == "d":
                fn = DAppDiff(
                    fn,
                    resolve_prog(args[i], scope, g),
                    resolve_prog(args[i + 1], scope, g),
                    resolve_diff(args[i + 2], scope, g),
                )
                i += 3
            else:
                fn = DAppPoint(fn, resolve_prog(args[i], scope, g))
                i += 1
        return fn
    if tag == "fun":
        binders = _group_binders(raw[1], raw[2], g)
        inner = list(scope)
        for b in binders:
            if b[0] == "plain":
                inner.append((b[1], "p"))
            else:
                inner += [(b[1], "p"), (b[2], "p"), (b[3], "d")]
        body = resolve_diff(raw[2], inner, g)
        for b in reversed(binders):
            body = DLamPoint(b[2], body) if b[0] == "plain" else DLamDiff(b[4], body)
        return body
    if tag == "pair":
        return DPair(resolve_diff(raw[1], scope, g), resolve_diff(raw[2], scope, g))
    if tag in ("fst", "snd"):
        return DProj(1 if tag == "fst" else 2, resolve_diff(raw[1], scope, g))
    if tag == "refl":
        return Refl(resolve_prog(raw[1], scope, g))
    if tag == "der":
        fn = resolve_prog(raw[1], scope, g)
        if raw[2] is None:
            return DerivSugar(fn)
        return der_expansion(fn, raw[2][0], raw[2][1])
    if tag == "J":
        x, y, carrier, body = raw[1]
        motive = Motive(carrier, resolve_pred(body, scope + [(x, "p"), (y, "p")], g))
        z, branch = raw[5]
        return J(
            motive,
            resolve_prog(raw[2], scope, g),
            resolve_prog(raw[3], scope, g),
            resolve_diff(raw[4], scope, g),
            resolve_diff(branch, scope + [(z, "p")], g),
        )
    _fail(raw, "program term used where a difference term is expected")


def resolve_pred(raw, scope: list, g: _Globals):
    tag = raw[0]
    if tag == "D":
        return Diff(raw[1], resolve_prog(raw[2], scope, g), resolve_prog(raw[3], scope, g))
    if tag == "pprod":
        return PProduct(resolve_pred(raw[1], scope, g), resolve_pred(raw[2], scope, g))
    if tag == "pipoint":
        return PiPoint(raw[2], resolve_pred(raw[3], scope + [(raw[1], "p")], g))
    if tag == "pidiff":
        inner = scope + [(raw[1], "p"), (raw[2], "p"), ("", "d")]
        return PiDiff(raw[3], resolve_pred(raw[4], inner, g))
    if tag == "predapp":
        params, body = g.pred_abbrevs[raw[1]]
        if len(params) != len(raw[2]):
            _fail(raw, f"predicate {raw[1]!r} expects {len(params)} arguments")
        args = [resolve_prog(a, scope, g) for a in raw[2]]
        n = len(args)
        out = body
        for k in range(n - 1, -1, -1):
            out = subst_p(out, shift_p(args[k], k))
        return out
    raise DiagnosticError([Diagnostic("error", 0, 0, f"bad predicate {tag}")])


# ------------------------------------------------------------ entry points


def parse(text: str) -> SourceFile:
    """Parse a whole ``.dtt`` file; raises DiagnosticError on failure."""
    p = Parser(text, _Globals(allow_free=False))
    return p.file()


def _names_scope(pnames=(), dnames=()):
    return [(n, "p") for n in pnames] + [(n, "d") for n in dnames]


def parse_type(text: str):
    p = Parser(text)
    ty = p.type_()
    if p.peek().kind != "eof":
        p.error("trailing input")
    return ty


def parse_program(text: str, pnames=(), dconsts=()):
    g = _Globals()
    for n in dconsts:
        g.sorts[n] = "d"
    p = Parser(text, g)
    raw = p.expr()
    if p.peek().kind != "eof":
        p.error("trailing input")
    return resolve_prog(raw, _names_scope(pnames), g)


def parse_difference(text: str, pnames=(), dnames=(), dconsts=()):
    g = _Globals()
    for n in dconsts:
        g.sorts[n] = "d"
    p = Parser(text, g)
    raw = p.expr()
    if p.peek().kind != "eof":
        p.error("trailing input")
    scope = [(n, "p") for n in pnames] + [(n, "d") for n in dnames]
    return resolve_diff(raw, scope, g)


def parse_predicate(text: str, pnames=()):
    g = _Globals()
    p = Parser(text, g)
    raw = p.pred()
    if p.peek().kind != "eof":
        p.error("trailing input")
    return resolve_pred(raw, _names_scope(pnames), g)


# ----------------------------------------------------------------- printer


def show_scale(s: Fraction) -> str:
    s = Fraction(s)
    return str(s.numerator) if s.denominator == 1 else f"{s.numerator}/{s.denominator}"


def pp_type(t, prec: int = 0) -> str:
    if isinstance(t, BaseType):
        return t.name
    if isinstance(t, TypeMeta):
        return f"?{t.ident}"
    if isinstance(t, (Arrow, Lolli)):
        op = "->" if isinstance(t, Arrow) else "-o"
        s = f"{pp_type(t.dom, 1)} {op} {pp_type(t.cod, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(t, (Product, Tensor)):
        op = "*" if isinstance(t, Product) else "**"
        s = f"{pp_type(t.left, 2)} {op} {pp_type(t.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(t, Bang):
        return f"!{show_scale(t.scale)} {pp_type(t.body, 2)}"
    raise TypeError(f"not a type: {t!r}")


class _Names:
    def __init__(self, pnames=(), dnames=()):
        self.p = list(pnames)
        self.d = list(dnames)

    def pvar(self, i):
        return self.p[-1 - i] if i < len(self.p) else f"free{i - len(self.p)}"

    def dvar(self, i):
        return self.d[-1 - i] if i < len(self.d) else f"dfree{i - len(self.d)}"

    def bind_p(self, k=1):
        new = [f"x{len(self.p) + j}" for j in range(k)]
        return new, _Names(self.p + new, self.d)

    def bind_pd(self):
        xs, inner = self.bind_p(2)
        e = f"e{len(self.d)}"
        return xs, e, _Names(inner.p, self.d + [e])


def pp_prog(t, n: _Names, prec: int = 0) -> str:
    c = type(t)
    if c is Var:
        return n.pvar(t.index)
    if c is Const:
        return t.name
    if c is Lam:
        (x,), inner = n.bind_p()
        b = f"({x} : {pp_type(t.annotation)})" if t.annotation is not None else x
        s = f"fun {b} => {pp_prog(t.body, inner, 0)}"
        return f"({s})" if prec > 0 else s
    if c is App:
        s = f"{pp_prog(t.fn, n, 1)} {pp_prog(t.arg, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is Pair:
        return f"<{pp_prog(t.left, n)}, {pp_prog(t.right, n)}>"
    if c is TensorPair:
        return f"({pp_prog(t.left, n)}, {pp_prog(t.right, n)})"
    if c is Proj:
        s = f"{'fst' if t.side == 1 else 'snd'} {pp_prog(t.tm, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is BangIntro:
        s = f"!{pp_prog(t.tm, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is LetBang:
        (x,), inner = n.bind_p()
        s = f"let !{x} = {pp_prog(t.scrutinee, n)} in {pp_prog(t.body, inner)}"
        return f"({s})" if prec > 0 else s
    if c is LetTensor:
        (x, y), inner = n.bind_p(2)
        s = f"let ({x}, {y}) = {pp_prog(t.scrutinee, n)} in {pp_prog(t.body, inner)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f"not a program term: {t!r}")


def pp_pred(p, n: _Names, prec: int = 0) -> str:
    c = type(p)
    if c is Diff:
        return f"D[{pp_type(p.carrier)}]({pp_prog(p.lhs, n)}, {pp_prog(p.rhs, n)})"
    if c is PProduct:
        s = f"{pp_pred(p.left, n, 2)} * {pp_pred(p.right, n, 1)}"
        return f"({s})" if prec > 1 else s
    if c is PiPoint:
        (x,), inner = n.bind_p()
        s = f"Pi {x} : {pp_type(p.dom)}. {pp_pred(p.body, inner)}"
        return f"({s})" if prec > 0 else s
    if c is PiDiff:
        (x, y), _e, inner = n.bind_pd()
        dom = pp_type(p.dom)
        s = f"Pi {x} {y} : {dom}. D[{dom}]({x}, {y}) -> {pp_pred(p.body, inner)}"
        return f"({s})" if prec > 0 else s
    raise TypeError(f"not a predicate: {p!r}")


def pp_diff(a, n: _Names, prec: int = 0) -> str:
    c = type(a)
    if c is DVar:
        return n.dvar(a.index)
    if c is DConst:
        return a.name
    if c is DLamDiff:
        m = match_der(a)
        if m is not None:
            fn, dom, cod = m
            s = f"Der[{pp_type(dom)}, {pp_type(cod)}] {pp_prog(fn, n, 2)}"
            return f"({s})" if prec > 1 else s
        (x, y), e, inner = n.bind_pd()
        ann = f" : {pp_type(a.dom)}" if a.dom is not None else ""
        s = f"fun ({x} {y}{ann} | {e}) => {pp_diff(a.body, inner)}"
        return f"({s})" if prec > 0 else s
    if c is DLamPoint:
        (x,), inner = n.bind_p()
        b = f"({x} : {pp_type(a.dom)})" if a.dom is not None else x
        s = f"fun {b} => {pp_diff(a.body, inner)}"
        return f"({s})" if prec > 0 else s
    if c is DAppPoint:
        s = f"{pp_diff(a.fn, n, 1)} {pp_prog(a.arg, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is DAppDiff:
        s = f"{pp_diff(a.fn, n, 1)} {pp_prog(a.lhs, n, 2)} {pp_prog(a.rhs, n, 2)} {pp_diff(a.diff, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is DPair:
        return f"<{pp_diff(a.left, n)}, {pp_diff(a.right, n)}>"
    if c is DProj:
        s = f"{'fst' if a.side == 1 else 'snd'} {pp_diff(a.tm, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is Refl:
        s = f"refl {pp_prog(a.tm, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is DerivSugar:
        s = f"Der {pp_prog(a.fn, n, 2)}"
        return f"({s})" if prec > 1 else s
    if c is J:
        (x, y), inner = n.bind_p(2)
        carrier = f" : {pp_type(a.motive.carrier)}" if a.motive.carrier is not None else ""
        (z,), binner = n.bind_p()
        return (
            f"J[{x} {y}{carrier}. {pp_pred(a.motive.body, inner)}]"
            f"({pp_prog(a.lhs, n)}, {pp_prog(a.rhs, n)}, {pp_diff(a.diff, n)}, "
            f"[{z}] {pp_diff(a.branch, binner)})"
        )
    raise TypeError(f"not a difference term: {a!r}")


def pretty(node, pnames=(), dnames=()) -> str:
    """Print any syntax node; free variables are named from the given lists."""
    n = _Names(pnames, dnames)
    if is_type(node):
        return pp_type(node)
    if is_program(node):
        return pp_prog(node, n)
    if is_predicate(node):
        return pp_pred(node, n)
    if is_difference(node):
        return pp_diff(node, n)
    if isinstance(node, Motive):
        (x, y), inner = n.bind_p(2)
        return f"[{x} {y} : {pp_type(node.carrier)}. {pp_pred(node.body, inner)}]"
    raise TypeError(f"cannot print {node!r}")


def pretty_decl(d) -> str:
    if isinstance(d, Directive):
        if d.kind == "literals":
            return f"literals {pp_type(d.value)}"
        if d.kind == "rules":
            return "rules " + ", ".join(d.value)
        if d.kind == "case":
            return "case " + " ".join(d.value)
        return f"{d.kind} {d.value}"
    if isinstance(d, TypeDecl):
        return f"type {d.name}" + (f" := {pp_type(d.definition)}" if d.definition is not None else "")
    if isinstance(d, ConstDecl):
        return f"const {d.name} : {pp_type(d.type)}"
    if isinstance(d, DConstDecl):
        return f"dconst {d.name} : {pretty(d.predicate)}"
    if isinstance(d, PredDef):
        names = [n for n, _ in d.params]
        groups = " ".join(f"({n} : {pp_type(t)})" for n, t in d.params)
        return f"pred {d.name} {groups} := {pretty(d.body, names)}"
    if isinstance(d, Definition):
        cls = f" : {pretty(d.classifier)}" if d.classifier is not None else ""
        return f"def {d.name}{cls} := {pretty(d.term)}"
    raise TypeError(d)


def pretty_file(sf: SourceFile) -> str:
    return "\n".join(pretty_decl(d) for d in sf.declarations) + "\n"
