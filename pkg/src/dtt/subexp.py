"""Sub-exponential fragment: sensitivity contexts, bidirectional checking of
STλC! program terms, and the forgetful translation into STλC."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import TypeCheckError
from .syntax import (
    App, Arrow, Bang, BangIntro, Const, Lam, LetBang, LetTensor, Lolli, Pair, Product, Proj,
    TensorPair, Tensor, Var,
)

Sens = Union[Fraction, float]
INF = math.inf


def sens(x) -> Sens:
    if x == INF or x == "inf":
        return INF
    return Fraction(x)


def s_add(a: Sens, b: Sens) -> Sens:
    if a == INF or b == INF:
        return INF
    return a + b


def s_mul(a: Sens, b: Sens) -> Sens:
    # 0·∞ = 0: an unused variable costs nothing however it is scaled
    if a == 0 or b == 0:
        return Fraction(0)
    if a == INF or b == INF:
        return INF
    return a * b


def s_div(q: Sens, s: Sens) -> Optional[Sens]:
    """Least r with q ≤ r·s, or None if there is none."""
    if q == 0:
        return Fraction(0)
    if s == 0:
        return None
    if s == INF:
        return Fraction(0) if q != INF else None
    if q == INF:
        return INF
    return Fraction(q) / Fraction(s)


def show_sens(s: Sens) -> str:
    return "inf" if s == INF else str(s)


class ContextClash(TypeCheckError):
    pass


@dataclass(frozen=True)
class SensContext:
    """Ordered (name, type, sensitivity) entries."""

    entries: tuple = ()

    def __post_init__(self):
        names = [e[0] for e in self.entries]
        if len(set(names)) != len(names):
            raise ValueError("duplicate names in sensitivity context")
        for _, _, s in self.entries:
            if s < 0:
                raise ValueError("negative sensitivity")

    @classmethod
    def of(cls, *entries) -> "SensContext":
        return cls(tuple((n, t, sens(s)) for n, t, s in entries))

    def lookup(self, name: str):
        for e in self.entries:
            if e[0] == name:
                return e
        return None

    def extend(self, name: str, ty, s) -> "SensContext":
        return SensContext(self.entries + ((name, ty, sens(s)),))

    def __str__(self) -> str:
        return ", ".join(f"{n} ∈_{show_sens(s)} {t}" for n, t, s in self.entries)


def ctx_add(a: SensContext, b: SensContext) -> SensContext:
    out = []
    for name, ty, s in a.entries:
        other = b.lookup(name)
        if other is None:
            out.append((name, ty, s))
        else:
            if other[1] != ty:
                raise ContextClash(f"variable {name} declared at two types", str(ty), str(other[1]))
            out.append((name, ty, s_add(s, other[2])))
    for e in b.entries:
        if a.lookup(e[0]) is None:
            out.append(e)
    return SensContext(tuple(out))


def ctx_scale(s, a: SensContext) -> SensContext:
    s = sens(s)
    if s < 0:
        raise ValueError("negative scale")
    return SensContext(tuple((n, t, s_mul(s, r)) for n, t, r in a.entries))


# ------------------------------------------------------------------ typing
#
# Terms use de Bruijn indices; a usage vector is a tuple of sensitivities,
# one per context entry, index 0 being the innermost variable (last entry).


def _zero(n: int) -> tuple:
    return (Fraction(0),) * n


def _vadd(u: tuple, v: tuple) -> tuple:
    return tuple(s_add(a, b) for a, b in zip(u, v))


def _vscale(s: Sens, u: tuple) -> tuple:
    return tuple(s_mul(s, a) for a in u)


@dataclass(frozen=True)
class Derivation:
    """Result of a successful check: the synthesized least-sensitivity context."""

    ty: object
    usage: SensContext


class BangChecker:
    """Bidirectional checker for STλC!.

    ``types`` lists the context types outermost first and ``budget`` their
    available sensitivities.  ``consts`` maps global names to types; globals
    are closed and cost nothing.
    """

    def __init__(self, consts: Optional[Callable] = None):
        self.consts = consts or (lambda name: None)

    # entry point
    def check(self, ctx: SensContext, tm, ty) -> Derivation:
        types = [t for _, t, _ in ctx.entries]
        usage = self._check(types, tm, ty)
        self._within(ctx, usage)
        names = [n for n, _, _ in ctx.entries]
        return Derivation(ty, SensContext(tuple(zip(names, types, reversed(usage)))))

    def infer(self, ctx: SensContext, tm) -> Derivation:
        types = [t for _, t, _ in ctx.entries]
        ty, usage = self._synth(types, tm)
        self._within(ctx, usage)
        names = [n for n, _, _ in ctx.entries]
        return Derivation(ty, SensContext(tuple(zip(names, types, reversed(usage)))))

    @staticmethod
    def _within(ctx: SensContext, usage: tuple):
        for (name, _, avail), used in zip(reversed(ctx.entries), usage):
            if used > avail:
                raise TypeCheckError(
                    f"sensitivity overrun on {name}: needs {show_sens(used)}, "
                    f"available {show_sens(avail)}"
                )

    def _bind(self, dom):
        """λ over !_s A binds its variable at A with budget s, else budget 1."""
        if type(dom) is Bang:
            return dom.body, dom.scale
        return dom, Fraction(1)

    def _synth(self, types: list, tm):
        n = len(types)
        c = type(tm)
        if c is Var:
            if tm.index >= n:
                raise TypeCheckError(f"unbound variable #{tm.index}")
            u = list(_zero(n))
            u[tm.index] = Fraction(1)
            return types[-1 - tm.index], tuple(u)
        if c is Const:
            ty = self.consts(tm.name)
            if ty is None:
                raise TypeCheckError(f"unknown constant {tm.name}")
            return ty, _zero(n)
        if c is Lam:
            if tm.annotation is None:
                raise TypeCheckError("cannot infer the domain of an unannotated λ")
            inner, budget = self._bind(tm.annotation)
            cod, u = self._synth(types + [inner], tm.body)
            self._spend(u[0], budget)
            return Lolli(tm.annotation, cod), u[1:]
        if c is App:
            fty, uf = self._synth(types, tm.fn)
            if type(fty) is not Lolli:
                raise TypeCheckError("application head is not a linear function", "A ⊸ B", str(fty))
            ua = self._check_arg(types, tm.arg, fty.dom)
            return fty.cod, _vadd(uf, ua)
        if c is TensorPair:
            a, ua = self._synth(types, tm.left)
            b, ub = self._synth(types, tm.right)
            return Tensor(a, b), _vadd(ua, ub)
        if c is LetTensor:
            return self._let_tensor(types, tm, None)
        if c is BangIntro:
            a, u = self._synth(types, tm.tm)
            return Bang(1, a), u
        if c is LetBang:
            return self._let_bang(types, tm, None)
        if c in (Pair, Proj):
            raise TypeCheckError("cartesian pairs are not part of the sub-exponential grammar")
        raise TypeCheckError(f"not a program term: {tm!r}")

    def _check(self, types: list, tm, ty) -> tuple:
        c = type(tm)
        if c is Lam and type(ty) is Lolli:
            if tm.annotation is not None and tm.annotation not in (ty.dom, self._bind(ty.dom)[0]):
                raise TypeCheckError("λ annotation disagrees with expected domain", str(ty.dom), str(tm.annotation))
            inner, budget = self._bind(ty.dom)
            u = self._check(types + [inner], tm.body, ty.cod)
            self._spend(u[0], budget)
            return u[1:]
        if c is BangIntro and type(ty) is Bang:
            return _vscale(ty.scale, self._check(types, tm.tm, ty.body))
        if c is TensorPair and type(ty) is Tensor:
            return _vadd(self._check(types, tm.left, ty.left), self._check(types, tm.right, ty.right))
        if c is LetTensor:
            return self._let_tensor(types, tm, ty)[1]
        if c is LetBang:
            return self._let_bang(types, tm, ty)[1]
        got, u = self._synth(types, tm)
        if got != ty:
            raise TypeCheckError("type mismatch", str(ty), str(got))
        return u

    def _check_arg(self, types: list, arg, dom) -> tuple:
        # implicit promotion: an argument of type A may feed !_s A at cost s·Ψ
        if type(dom) is Bang and type(arg) is not BangIntro:
            try:
                return self._check(types, arg, dom)
            except TypeCheckError:
                return _vscale(dom.scale, self._check(types, arg, dom.body))
        return self._check(types, arg, dom)

    def _let_tensor(self, types, tm, expected):
        sty, us = self._synth(types, tm.scrutinee)
        if type(sty) is not Tensor:
            raise TypeCheckError("let (x,y) on a non-tensor", "A ⊗ B", str(sty))
        inner = types + [sty.left, sty.right]
        if expected is None:
            cty, ub = self._synth(inner, tm.body)
        else:
            cty, ub = expected, self._check(inner, tm.body, expected)
        r = ub[1] if ub[1] == INF or (ub[0] != INF and ub[1] >= ub[0]) else ub[0]
        return cty, _vadd(_vscale(r, us), ub[2:])

    def _let_bang(self, types, tm, expected):
        sty, us = self._synth(types, tm.scrutinee)
        if type(sty) is not Bang:
            raise TypeCheckError("let !x on a non-exponential", "!_s A", str(sty))
        inner = types + [sty.body]
        if expected is None:
            cty, ub = self._synth(inner, tm.body)
        else:
            cty, ub = expected, self._check(inner, tm.body, expected)
        r = s_div(ub[0], sty.scale)
        if r is None:
            raise TypeCheckError(f"variable bound by let ! used at {show_sens(ub[0])} from a !_{sty.scale} value")
        return cty, _vadd(_vscale(r, us), ub[1:])

    @staticmethod
    def _spend(used: Sens, budget: Sens):
        if used > budget:
            raise TypeCheckError(
                f"sensitivity overrun: variable used at {show_sens(used)}, λ allows {show_sens(budget)}"
            )


def check_bang(ctx: SensContext, tm, ty, consts: Optional[Callable] = None) -> Derivation:
    return BangChecker(consts).check(ctx, tm, ty)


# ---------------------------------------------------------------- forget


def forget_type(ty):
    c = type(ty)
    if c is Bang:
        return forget_type(ty.body)
    if c is Lolli:
        return Arrow(forget_type(ty.dom), forget_type(ty.cod))
    if c is Tensor:
        return Product(forget_type(ty.left), forget_type(ty.right))
    if c is Arrow:
        return Arrow(forget_type(ty.dom), forget_type(ty.cod))
    if c is Product:
        return Product(forget_type(ty.left), forget_type(ty.right))
    return ty


def forget(tm):
    """Translate an STλC! term or type into plain STλC."""
    c = type(tm)
    if c in (Bang, Lolli, Tensor, Arrow, Product) or c.__name__ in ("BaseType", "TypeMeta"):
        return forget_type(tm)
    if c is Var or c is Const:
        return tm
    if c is Lam:
        ann = None if tm.annotation is None else forget_type(tm.annotation)
        return Lam(ann, forget(tm.body))
    if c is App:
        return App(forget(tm.fn), forget(tm.arg))
    if c is BangIntro:
        return forget(tm.tm)
    if c is LetBang:
        return App(Lam(None, forget(tm.body)), forget(tm.scrutinee))
    if c is TensorPair:
        return Pair(forget(tm.left), forget(tm.right))
    if c is LetTensor:
        s = forget(tm.scrutinee)
        return App(App(Lam(None, Lam(None, forget(tm.body))), Proj(1, s)), Proj(2, s))
    if c is Pair:
        return Pair(forget(tm.left), forget(tm.right))
    if c is Proj:
        return Proj(tm.side, forget(tm.tm))
    raise TypeError(f"cannot translate {tm!r}")


def forget_context(ctx: SensContext) -> SensContext:
    return SensContext(tuple((n, forget_type(t), s) for n, t, s in ctx.entries))
