"""Typechecking for program terms, predicates and difference terms.

Program terms are checked bidirectionally with unification metas for
unannotated λs.  Difference terms are checked against predicates compared by
normalize-then-unify under the active rule set.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields, is_dataclass, replace
from fractions import Fraction
from typing import Optional

from .errors import Diagnostic, DiagnosticError, FuelExhausted, TypeCheckError
from .rewriter import BETA, RuleSet, norm_pred
from .subexp import BangChecker, SensContext
from .surface import (
    ConstDecl, DConstDecl, Definition, Directive, PredDef, SourceFile, TypeDecl, pretty,
)
from .syntax import (
    App, Arrow, Bang, BangIntro, BaseType, Const, Context, DAppDiff, DAppPoint, DConst,
    DerivSugar, Diff, DLamDiff, DLamPoint, DPair, DProj, DVar, J, Lam, LetBang, LetTensor,
    Lolli, MalformedTerm, Motive, Pair, PiDiff, PiPoint, PProduct, Product, Proj, Refl, Tensor,
    TensorPair, TypeMeta, Var, apps, der_expansion, is_predicate, shift_p, subst_p, subst_p2,
)

_NUMERAL = re.compile(r"^-?\d+(\.\d+)?(/\d+)?$")


def is_numeral(name: str) -> bool:
    return bool(_NUMERAL.match(name))


@dataclass
class CheckedDef:
    name: str
    sort: str  # "p" or "d"
    term: object
    classifier: object


@dataclass
class Signature:
    calculus: str = "stlc"
    rules: RuleSet = BETA
    base_types: set = field(default_factory=set)
    literal_type: object = None
    consts: dict = field(default_factory=dict)
    dconsts: dict = field(default_factory=dict)
    defs: dict = field(default_factory=dict)

    def const_type(self, name: str):
        if name in self.consts:
            return self.consts[name]
        d = self.defs.get(name)
        if d is not None and d.sort == "p":
            return d.classifier
        if is_numeral(name) and self.literal_type is not None:
            return self.literal_type
        return None


@dataclass(frozen=True)
class PureFactorization:
    carrier: object
    pure: object
    lhs: object
    rhs: object


def map_types(node, f):
    """Apply ``f`` to every type annotation inside a syntax node."""
    if node is None or isinstance(node, (int, str, Fraction)):
        return node
    if isinstance(node, (BaseType, Arrow, Product, Bang, Lolli, Tensor, TypeMeta)):
        return f(node)
    if not is_dataclass(node):
        return node
    kw = {fl.name: map_types(getattr(node, fl.name), f) for fl in fields(node)}
    return type(node)(**kw)


class Checker:
    def __init__(self, sig: Optional[Signature] = None):
        self.sig = sig or Signature()
        self.solution: dict = {}
        self._next = 0

    @property
    def rules(self) -> RuleSet:
        return self.sig.rules

    @property
    def fuzz(self) -> bool:
        return self.sig.calculus == "fuzz"

    # ------------------------------------------------------------ metas
    def fresh(self) -> TypeMeta:
        self._next += 1
        return TypeMeta(self._next)

    def zonk(self, ty):
        c = type(ty)
        if c is TypeMeta:
            if ty.ident in self.solution:
                out = self.zonk(self.solution[ty.ident])
                self.solution[ty.ident] = out
                return out
            return ty
        if c in (Arrow, Lolli):
            return c(self.zonk(ty.dom), self.zonk(ty.cod))
        if c in (Product, Tensor):
            return c(self.zonk(ty.left), self.zonk(ty.right))
        if c is Bang:
            return Bang(ty.scale, self.zonk(ty.body))
        return ty

    def zonk_node(self, node):
        return map_types(node, self.zonk)

    def _occurs(self, ident: int, ty) -> bool:
        ty = self.zonk(ty)
        if type(ty) is TypeMeta:
            return ty.ident == ident
        return any(
            self._occurs(ident, getattr(ty, f.name))
            for f in fields(ty)
            if not isinstance(getattr(ty, f.name), (str, Fraction))
        )

    def unify(self, a, b):
        a, b = self.zonk(a), self.zonk(b)
        if a == b:
            return
        if type(a) is TypeMeta or type(b) is TypeMeta:
            m, other = (a, b) if type(a) is TypeMeta else (b, a)
            if self._occurs(m.ident, other):
                raise TypeCheckError("occurs check: cannot build an infinite type", self.show(m), self.show(other))
            self.solution[m.ident] = other
            return
        if type(a) is not type(b):
            raise TypeCheckError("type mismatch", self.show(a), self.show(b))
        if type(a) is Bang:
            if a.scale != b.scale:
                raise TypeCheckError("scale mismatch", self.show(a), self.show(b))
            return self.unify(a.body, b.body)
        if type(a) is BaseType:
            raise TypeCheckError("type mismatch", self.show(a), self.show(b))
        for f in fields(a):
            self.unify(getattr(a, f.name), getattr(b, f.name))

    def show(self, node, ctx: Optional[Context] = None) -> str:
        node = self.zonk_node(node)
        pnames = [f"v{i}" for i in range(len(ctx.program))] if ctx else []
        dnames = [f"d{i}" for i in range(len(ctx.diff))] if ctx else []
        try:
            return pretty(node, pnames, dnames)
        except Exception:
            return repr(node)

    # ----------------------------------------------------------- types
    def check_type(self, ty):
        c = type(ty)
        if c is BaseType:
            if ty.name not in self.sig.base_types:
                raise TypeCheckError(f"undeclared base type {ty.name}")
            return
        if c is TypeMeta:
            return
        if self.fuzz and c in (Arrow, Product):
            raise TypeCheckError("cartesian type in the sub-exponential calculus", None, self.show(ty))
        if not self.fuzz and c in (Bang, Lolli, Tensor):
            raise TypeCheckError("sub-exponential type outside --calculus=fuzz", None, self.show(ty))
        if c is Bang:
            return self.check_type(ty.body)
        for f in fields(ty):
            self.check_type(getattr(ty, f.name))

    # --------------------------------------------------- program terms
    def infer_program(self, ctx: Context, tm):
        """Return (elaborated term, type)."""
        if self.fuzz:
            return self._infer_fuzz(ctx, tm)
        c = type(tm)
        if c is Var:
            try:
                return tm, ctx.program_type(tm.index)
            except MalformedTerm:
                raise TypeCheckError(f"unbound variable #{tm.index}")
        if c is Const:
            return self._const(tm)
        if c is Lam:
            dom = tm.annotation if tm.annotation is not None else self.fresh()
            self.check_type(dom)
            body, cod = self.infer_program(ctx.push_program(dom), tm.body)
            return Lam(dom, body), Arrow(dom, cod)
        if c is App:
            fn, fty = self.infer_program(ctx, tm.fn)
            fty = self.zonk(fty)
            if type(fty) is TypeMeta:
                dom, cod = self.fresh(), self.fresh()
                self.unify(fty, Arrow(dom, cod))
                fty = Arrow(dom, cod)
            if type(fty) is not Arrow:
                raise TypeCheckError("application head is not a function", "A -> B", self.show(fty))
            arg = self.check_program(ctx, tm.arg, fty.dom)
            return App(fn, arg), fty.cod
        if c is Pair:
            l, a = self.infer_program(ctx, tm.left)
            r, b = self.infer_program(ctx, tm.right)
            return Pair(l, r), Product(a, b)
        if c is Proj:
            t, ty = self.infer_program(ctx, tm.tm)
            ty = self.zonk(ty)
            if type(ty) is TypeMeta:
                a, b = self.fresh(), self.fresh()
                self.unify(ty, Product(a, b))
                ty = Product(a, b)
            if type(ty) is not Product:
                raise TypeCheckError("projection of a non-product", "A * B", self.show(ty))
            return Proj(tm.side, t), ty.left if tm.side == 1 else ty.right
        if c in (BangIntro, LetBang, TensorPair, LetTensor):
            raise TypeCheckError("sub-exponential term outside --calculus=fuzz")
        raise TypeCheckError(f"not a program term: {tm!r}")

    def check_program(self, ctx: Context, tm, ty):
        if self.fuzz:
            return self._check_fuzz(ctx, tm, ty)
        ty = self.zonk(ty)
        if type(tm) is Lam and type(ty) is Arrow:
            if tm.annotation is not None:
                self.unify(tm.annotation, ty.dom)
            body = self.check_program(ctx.push_program(ty.dom), tm.body, ty.cod)
            return Lam(ty.dom, body)
        if type(tm) is Pair and type(ty) is Product:
            return Pair(self.check_program(ctx, tm.left, ty.left), self.check_program(ctx, tm.right, ty.right))
        out, got = self.infer_program(ctx, tm)
        try:
            self.unify(ty, got)
        except TypeCheckError as e:
            raise TypeCheckError(f"{self.show(tm, ctx)} has the wrong type", self.show(ty), self.show(got)) from e
        return out

    def _const(self, tm):
        d = self.sig.defs.get(tm.name)
        if d is not None:
            if d.sort != "p":
                raise TypeCheckError(f"{tm.name} is a difference term, not a program term")
            return d.term, d.classifier
        ty = self.sig.const_type(tm.name)
        if ty is None:
            if is_numeral(tm.name):
                raise TypeCheckError(f"numeral {tm.name} used without a literals directive")
            raise TypeCheckError(f"unknown constant {tm.name}")
        return tm, ty

    def _inline(self, tm):
        """Replace references to program definitions by their bodies."""
        if type(tm) is Const:
            d = self.sig.defs.get(tm.name)
            return _annotate(d.term, d.classifier) if d is not None and d.sort == "p" else tm
        if not is_dataclass(tm) or isinstance(tm, (BaseType, Arrow, Product, Bang, Lolli, Tensor, TypeMeta)):
            return tm
        return type(tm)(**{f.name: self._inline(getattr(tm, f.name)) for f in fields(tm)})

    def _sens_ctx(self, ctx: Context) -> SensContext:
        return SensContext(tuple((f"v{i}", t, math.inf) for i, t in enumerate(ctx.program)))

    def _bang(self) -> BangChecker:
        return BangChecker(lambda n: self.sig.const_type(n))

    def _infer_fuzz(self, ctx: Context, tm):
        tm = self._inline(tm)
        return tm, self._bang().infer(self._sens_ctx(ctx), tm).ty

    def _check_fuzz(self, ctx: Context, tm, ty):
        tm = self._inline(tm)
        self._bang().check(self._sens_ctx(ctx), tm, ty)
        return tm

    # -------------------------------------------------------- predicates
    def check_predicate(self, ctx: Context, p):
        c = type(p)
        if c is Diff:
            self.check_type(p.carrier)
            try:
                lhs = self.check_program(ctx, p.lhs, p.carrier)
                rhs = self.check_program(ctx, p.rhs, p.carrier)
            except TypeCheckError as e:
                raise TypeCheckError(f"carrier mismatch in D[{self.show(p.carrier)}]: {e.message}", e.expected, e.actual)
            return Diff(p.carrier, lhs, rhs)
        if c is PProduct:
            return PProduct(self.check_predicate(ctx, p.left), self.check_predicate(ctx, p.right))
        if c is PiPoint:
            self.check_type(p.dom)
            return PiPoint(p.dom, self.check_predicate(ctx.push_program(p.dom), p.body))
        if c is PiDiff:
            self.check_type(p.dom)
            return PiDiff(p.dom, self.check_predicate(self._diff_binder(ctx, p.dom), p.body))
        raise TypeCheckError(f"not a predicate: {p!r}")

    @staticmethod
    def _diff_binder(ctx: Context, dom) -> Context:
        return ctx.push_program(dom).push_program(dom).push_diff(Diff(dom, Var(1), Var(0)))

    def normal_pred(self, p):
        try:
            return norm_pred(self.zonk_node(p), self.rules)
        except FuelExhausted as e:
            raise TypeCheckError(f"predicate normalization ran out of fuel ({e.fuel})")

    def pred_equal(self, ctx: Context, expected, actual):
        a = self.normal_pred(expected)
        b = self.normal_pred(actual)
        try:
            self._unify_nodes(a, b)
        except TypeCheckError:
            raise TypeCheckError("predicate mismatch", self.show(expected, ctx), self.show(actual, ctx))

    def _unify_nodes(self, a, b):
        if isinstance(a, (BaseType, Arrow, Product, Bang, Lolli, Tensor, TypeMeta)):
            return self.unify(a, b)
        if a is None and b is None:
            return
        if a is None or b is None:
            # an unannotated binder against an annotated one
            return
        if type(a) is not type(b):
            raise TypeCheckError("mismatch")
        if not is_dataclass(a):
            if a != b:
                raise TypeCheckError("mismatch")
            return
        for f in fields(a):
            self._unify_nodes(getattr(a, f.name), getattr(b, f.name))

    # --------------------------------------------------- difference terms
    def infer_difference(self, ctx: Context, a):
        """Return (elaborated term, predicate)."""
        c = type(a)
        if c is DVar:
            try:
                return a, ctx.diff_pred(a.index)
            except MalformedTerm:
                raise TypeCheckError(f"unbound difference variable #{a.index}")
        if c is DConst:
            d = self.sig.defs.get(a.name)
            if d is not None and d.sort == "d":
                return d.term, d.classifier
            if a.name in self.sig.dconsts:
                return a, self.sig.dconsts[a.name]
            raise TypeCheckError(f"unknown difference constant {a.name}")
        if c is Refl:
            t, ty = self.infer_program(ctx, a.tm)
            return Refl(t), Diff(ty, t, t)
        if c is DerivSugar:
            fn, fty = self.infer_program(ctx, a.fn)
            fty = self.zonk(fty)
            if type(fty) is TypeMeta:
                dom, cod = self.fresh(), self.fresh()
                self.unify(fty, Arrow(dom, cod))
                fty = Arrow(dom, cod)
            if type(fty) not in (Arrow, Lolli):
                raise TypeCheckError("Der expects a function", "A -> B", self.show(fty))
            return self.infer_difference(ctx, der_expansion(fn, fty.dom, fty.cod))
        if c is DLamPoint:
            dom = a.dom if a.dom is not None else self.fresh()
            self.check_type(dom)
            body, p = self.infer_difference(ctx.push_program(dom), a.body)
            return DLamPoint(dom, body), PiPoint(dom, p)
        if c is DLamDiff:
            dom = a.dom if a.dom is not None else self.fresh()
            self.check_type(dom)
            body, p = self.infer_difference(self._diff_binder(ctx, dom), a.body)
            return DLamDiff(dom, body), PiDiff(dom, p)
        if c is DAppPoint:
            fn, p = self.infer_difference(ctx, a.fn)
            p = self.normal_pred(p)
            if type(p) is not PiPoint:
                raise TypeCheckError("point application of a non-Π difference", "Pi x : A. P", self.show(p, ctx))
            arg = self.check_program(ctx, a.arg, p.dom)
            return DAppPoint(fn, arg), subst_p(p.body, arg)
        if c is DAppDiff:
            fn, p = self.infer_difference(ctx, a.fn)
            p = self.normal_pred(p)
            if type(p) is not PiDiff:
                raise TypeCheckError(
                    "difference application of a non-Π difference", "Pi x y : A. D[A](x,y) -> P", self.show(p, ctx)
                )
            lhs = self.check_program(ctx, a.lhs, p.dom)
            rhs = self.check_program(ctx, a.rhs, p.dom)
            diff = self.check_difference(ctx, a.diff, Diff(p.dom, lhs, rhs))
            return DAppDiff(fn, lhs, rhs, diff), subst_p2(p.body, lhs, rhs)
        if c is DPair:
            l, p = self.infer_difference(ctx, a.left)
            r, q = self.infer_difference(ctx, a.right)
            return DPair(l, r), PProduct(p, q)
        if c is DProj:
            t, p = self.infer_difference(ctx, a.tm)
            p = self.normal_pred(p)
            if type(p) is not PProduct:
                raise TypeCheckError("projection of a non-product difference", "P * Q", self.show(p, ctx))
            return DProj(a.side, t), p.left if a.side == 1 else p.right
        if c is J:
            return self._infer_j(ctx, a)
        raise TypeCheckError(f"not a difference term: {a!r}")

    def _infer_j(self, ctx: Context, a: J):
        carrier = a.motive.carrier
        if carrier is None:
            _, carrier = self.infer_program(ctx, a.lhs)
        self.check_type(carrier)
        lhs = self.check_program(ctx, a.lhs, carrier)
        rhs = self.check_program(ctx, a.rhs, carrier)
        inner = ctx.push_program(carrier).push_program(carrier)
        body = self.check_predicate(inner, a.motive.body)
        try:
            diff = self.check_difference(ctx, a.diff, Diff(carrier, lhs, rhs))
        except TypeCheckError as e:
            raise TypeCheckError(f"J: difference argument has the wrong type: {e.message}", e.expected, e.actual)
        diag = subst_p2(shift_p(body, 1, cutoff=2), Var(0), Var(0))
        try:
            branch = self.check_difference(ctx.push_program(carrier), a.branch, diag)
        except TypeCheckError as e:
            raise TypeCheckError(
                f"J: branch does not match the diagonal instance of the motive: {e.message}", e.expected, e.actual
            )
        return J(Motive(carrier, body), lhs, rhs, diff, branch), subst_p2(body, lhs, rhs)

    def check_difference(self, ctx: Context, a, p):
        c = type(a)
        if c in (DLamPoint, DLamDiff, DPair):
            q = self.normal_pred(p)
            if c is DLamPoint and type(q) is PiPoint:
                if a.dom is not None:
                    self.unify(a.dom, q.dom)
                return DLamPoint(q.dom, self.check_difference(ctx.push_program(q.dom), a.body, q.body))
            if c is DLamDiff and type(q) is PiDiff:
                if a.dom is not None:
                    self.unify(a.dom, q.dom)
                body = self.check_difference(self._diff_binder(ctx, q.dom), a.body, q.body)
                return DLamDiff(q.dom, body)
            if c is DPair and type(q) is PProduct:
                return DPair(self.check_difference(ctx, a.left, q.left), self.check_difference(ctx, a.right, q.right))
        out, got = self.infer_difference(ctx, a)
        self.pred_equal(ctx, p, got)
        return out

    # ---------------------------------------------------------- purify
    def purify(self, ctx: Context, p) -> PureFactorization:
        c = type(p)
        if c is Diff:
            return PureFactorization(p.carrier, Diff(p.carrier, Var(1), Var(0)), p.lhs, p.rhs)
        if c is PProduct:
            f1 = self.purify(ctx, p.left)
            f2 = self.purify(ctx, p.right)
            pure = PProduct(
                subst_p2(f1.pure, Proj(1, Var(1)), Proj(1, Var(0))),
                subst_p2(f2.pure, Proj(2, Var(1)), Proj(2, Var(0))),
            )
            return PureFactorization(
                Product(f1.carrier, f2.carrier), pure, Pair(f1.lhs, f2.lhs), Pair(f1.rhs, f2.rhs)
            )
        if c is PiPoint:
            fb = self.purify(ctx.push_program(p.dom), p.body)
            pure = PiPoint(p.dom, subst_p2(fb.pure, App(Var(2), Var(0)), App(Var(1), Var(0))))
            return PureFactorization(Arrow(p.dom, fb.carrier), pure, Lam(p.dom, fb.lhs), Lam(p.dom, fb.rhs))
        if c is PiDiff:
            fb = self.purify(self._diff_binder(ctx, p.dom), p.body)
            pure = PiDiff(
                p.dom,
                subst_p2(fb.pure, apps(Var(3), Var(1), Var(0)), apps(Var(2), Var(1), Var(0))),
            )
            return PureFactorization(
                Arrow(p.dom, Arrow(p.dom, fb.carrier)),
                pure,
                Lam(p.dom, Lam(p.dom, fb.lhs)),
                Lam(p.dom, Lam(p.dom, fb.rhs)),
            )
        raise TypeCheckError(f"not a predicate: {p!r}")

    # ----------------------------------------------------------- closing
    def close(self, node):
        """Zonk a finished declaration; unsolved metas are an error."""
        out = self.zonk_node(node)
        left = []

        def find(t):
            if type(t) is TypeMeta:
                left.append(t)
            elif is_dataclass(t):
                for f in fields(t):
                    v = getattr(t, f.name)
                    if not isinstance(v, (str, int, Fraction)):
                        find(v)
            return t

        map_types(out, find)
        if left:
            raise TypeCheckError("cannot infer a type annotation; add one to the binder")
        return out


# ------------------------------------------------------------ top level


def _annotate(tm, ty):
    """Copy a definition's declared domains onto its unannotated λs."""
    if type(tm) is Lam and type(ty) in (Arrow, Lolli):
        return replace(tm, annotation=tm.annotation or ty.dom, body=_annotate(tm.body, ty.cod))
    return tm


def reconstruct(fact: PureFactorization):
    """Substitute the factorization's terms back into its pure predicate."""
    return subst_p2(fact.pure, fact.lhs, fact.rhs)


@dataclass
class DeclResult:
    name: str
    kind: str
    ok: bool
    classifier: object = None
    term: object = None
    diagnostic: Optional[Diagnostic] = None


def elaborate_definition(checker: Checker, d: Definition) -> CheckedDef:
    ctx = Context()
    if d.sort == "p":
        if d.classifier is not None:
            if is_predicate(d.classifier):
                raise TypeCheckError("a program term cannot have a predicate classifier")
            checker.check_type(d.classifier)
            if checker.fuzz:
                term = checker._inline(d.term)
                checker._bang().check(SensContext(), term, d.classifier)
                ty = d.classifier
            else:
                term, ty = checker.check_program(ctx, d.term, d.classifier), d.classifier
        else:
            term, ty = checker.infer_program(ctx, d.term)
        return CheckedDef(d.name, "p", checker.close(term), checker.close(ty))
    if d.classifier is not None:
        if not is_predicate(d.classifier):
            raise TypeCheckError("a difference term cannot have a simple-type classifier")
        p = checker.check_predicate(ctx, d.classifier)
        term = checker.check_difference(ctx, d.term, p)
    else:
        term, p = checker.infer_difference(ctx, d.term)
    return CheckedDef(d.name, "d", checker.close(term), checker.close(p))


def check_file(
    sf: SourceFile,
    rules: Optional[RuleSet] = None,
    calculus: Optional[str] = None,
    keep_going: bool = True,
):
    """Check every declaration.  Returns (signature, list of DeclResult).

    ``rules``/``calculus`` override the file's directives when given.
    """
    sig = Signature()
    if calculus is not None:
        sig.calculus = calculus
    if rules is not None:
        sig.rules = rules
    results = []
    for d in sf.declarations:
        checker = Checker(sig)
        line = getattr(d, "line", 0)
        col = getattr(d, "column", 1) or 1
        name = getattr(d, "name", getattr(d, "kind", ""))
        try:
            if isinstance(d, Directive):
                if d.kind == "calculus" and calculus is None:
                    sig.calculus = d.value
                elif d.kind == "rules" and rules is None:
                    sig.rules = replace(RuleSet.parse(",".join(d.value)), cases=sig.rules.cases)
                elif d.kind == "case":
                    name, first, second = d.value
                    for n in (name, first, second):
                        if n not in sig.consts:
                            raise TypeCheckError(f"case directive names undeclared constant {n}")
                    sig.rules = replace(sig.rules, cases=sig.rules.cases + (tuple(d.value),))
                elif d.kind == "literals":
                    checker.check_type(d.value)
                    sig.literal_type = d.value
                results.append(DeclResult(name, "directive", True))
            elif isinstance(d, TypeDecl):
                if d.definition is None:
                    sig.base_types.add(d.name)
                else:
                    checker.check_type(d.definition)
                results.append(DeclResult(d.name, "type", True))
            elif isinstance(d, ConstDecl):
                checker.check_type(d.type)
                sig.consts[d.name] = d.type
                results.append(DeclResult(d.name, "const", True, d.type))
            elif isinstance(d, DConstDecl):
                p = checker.close(checker.check_predicate(Context(), d.predicate))
                sig.dconsts[d.name] = p
                results.append(DeclResult(d.name, "dconst", True, p))
            elif isinstance(d, PredDef):
                ctx = Context(tuple(t for _, t in d.params))
                for t in ctx.program:
                    checker.check_type(t)
                checker.close(checker.check_predicate(ctx, d.body))
                results.append(DeclResult(d.name, "pred", True))
            elif isinstance(d, Definition):
                cd = elaborate_definition(checker, d)
                sig.defs[d.name] = cd
                results.append(DeclResult(d.name, "def", True, cd.classifier, cd.term))
        except (TypeCheckError, MalformedTerm, FuelExhausted) as e:
            msg = getattr(e, "message", str(e))
            diag = Diagnostic("error", line, col, f"{name}: {msg}", getattr(e, "expected", None), getattr(e, "actual", None))
            results.append(DeclResult(name, "error", False, diagnostic=diag))
            if not keep_going:
                break
    return sig, results


def check_text(text: str, **kw):
    from .surface import parse

    return check_file(parse(text), **kw)


def load_signature(text: str, **kw) -> Signature:
    """Parse and check ``text``; raise DiagnosticError on the first failure."""
    sig, results = check_text(text, **kw)
    bad = [r.diagnostic for r in results if not r.ok]
    if bad:
        raise DiagnosticError(bad)
    return sig


def typer_for(sig: Signature):
    """A program-term type inference function for the rewriter."""

    def typer(ctx: Context, tm):
        ch = Checker(sig)
        _, ty = ch.infer_program(ctx, tm)
        return ch.close(ty)

    return typer
