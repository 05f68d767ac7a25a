"""Directed rewriting for program terms, difference terms and predicates.

``step`` contracts one redex (leftmost-outermost by default), ``normalize``
iterates it under a fuel budget, and ``equal_modulo`` compares normal forms.
The enabled rules are described by a ``RuleSet``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Callable, Optional

from .errors import FuelExhausted
from .syntax import (
    App, Arrow, BangIntro, Const, Context, DAppDiff, DAppPoint, DConst, DerivSugar, Diff, DLamDiff,
    DLamPoint, DPair, DProj, DVar, J, Lam, LetBang, LetTensor, Motive, Pair, PiDiff, PiPoint,
    PProduct, Product, Proj, Refl, TensorPair, Var, der_expansion, free_p, is_difference,
    is_predicate, is_program, shift_d, shift_p, subst_d, subst_p, subst_p2, subst_pd,
)

DEFAULT_FUEL = 10_000

_FLAG_NAMES = {
    "beta": "beta",
    "eta": "eta",
    "betad": "betad",
    "etad": "etad",
    "dchain": "dchain",
    "jw": "jw",
    "cext": "cext",
    "fext1": "fext1",
    "fext2": "fext2",
    "jeta-plus": "jeta_plus",
    "jeta_plus": "jeta_plus",
}


class RuleSetError(ValueError):
    pass


@dataclass(frozen=True)
class RuleSet:
    """Enabled rewrite axioms.  β is always on.

    ``jeta_plus`` is the forbidden rule J(t,u,a,[x]c(x,x,∂x)) = c(t,u,a); it
    exists only so that its trivialising consequence can be exhibited.
    """

    eta: bool = False
    betad: bool = False
    etad: bool = False
    dchain: bool = False
    jw: bool = False
    cext: bool = False
    fext1: bool = False
    fext2: bool = False
    jeta_plus: bool = False
    # selector constants: (case, first, second) with case first x y = x and
    # case second x y = y; declared by the ``case`` directive
    cases: tuple = ()

    def __post_init__(self):
        if self.fext1 and self.fext2:
            raise RuleSetError("fext1 and fext2 are mutually exclusive")

    @property
    def beta(self) -> bool:
        return True

    @classmethod
    def parse(cls, text: str, base: Optional["RuleSet"] = None) -> "RuleSet":
        """Parse ``beta,eta,...``; items prefixed by ``+`` extend ``base``."""
        flags = {f.name: False for f in fields(cls) if f.name != "cases"}
        if base is not None and text.strip().startswith("+"):
            flags = {f.name: getattr(base, f.name) for f in fields(cls) if f.name != "cases"}
        if base is not None:
            flags["cases"] = base.cases
        for item in filter(None, (s.strip() for s in text.split(","))):
            item = item.lstrip("+").lower()
            if item not in _FLAG_NAMES:
                raise RuleSetError(f"unknown rule {item!r}")
            if item != "beta":
                flags[_FLAG_NAMES[item]] = True
        return cls(**flags)

    def names(self) -> list:
        out = ["beta"]
        for f in fields(self):
            if f.name != "cases" and getattr(self, f.name):
                out.append(f.name.replace("_", "-"))
        return out

    def __str__(self) -> str:
        return ",".join(self.names())


BETA = RuleSet()
ALL_SAFE = RuleSet(eta=True, betad=True, etad=True, dchain=True, jw=True)


def default_fuel() -> int:
    env = os.environ.get("DTTC_FUEL")
    return int(env) if env else DEFAULT_FUEL


# ------------------------------------------------------------ helpers


def instantiate(body, terms: list, extra: int):
    """Replace the ``len(terms)`` innermost bound variables of ``body``.

    ``body`` lives in Γ + [v1..vn] (vn innermost); each term lives in Γ + Δ
    with ``|Δ| = extra``.  Returns the body in Γ + Δ with vk := terms[k-1].
    """
    n = len(terms)
    out = shift_p(body, extra, cutoff=n)
    for k in range(n, 0, -1):
        out = subst_p(out, shift_p(terms[k - 1], k - 1))
    return out


class _Fuel:
    def __init__(self, fuel: int):
        self.total = fuel
        self.left = fuel
        self.last = None

    def spend(self, redex):
        self.last = redex
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted(self.total, redex)


# ------------------------------------------------------ program rewriting


def _case_redex(t, cases: tuple):
    """``case b x y`` with ``b`` a declared selector value."""
    if not cases or type(t) is not App or type(t.fn) is not App or type(t.fn.fn) is not App:
        return None
    head = t.fn.fn.fn
    sel = t.fn.fn.arg
    if type(head) is not Const or type(sel) is not Const:
        return None
    for name, first, second in cases:
        if head.name == name:
            if sel.name == first:
                return t.fn.arg
            if sel.name == second:
                return t.arg
    return None


def _prog_root(t, eta: bool, cases: tuple = ()):
    c = type(t)
    if c is App and type(t.fn) is Lam:
        return subst_p(t.fn.body, t.arg)
    if c is App and cases:
        r = _case_redex(t, cases)
        if r is not None:
            return r
    if c is Proj and type(t.tm) is Pair:
        return t.tm.left if t.side == 1 else t.tm.right
    if c is LetBang and type(t.scrutinee) is BangIntro:
        return subst_p(t.body, t.scrutinee.tm)
    if c is LetTensor and type(t.scrutinee) is TensorPair:
        return subst_p2(t.body, t.scrutinee.left, t.scrutinee.right)
    if eta:
        if c is Lam and type(t.body) is App and t.body.arg == Var(0) and not free_p(t.body.fn, 0):
            return shift_p(t.body.fn, -1)
        if (
            c is Pair
            and type(t.left) is Proj
            and type(t.right) is Proj
            and t.left.side == 1
            and t.right.side == 2
            and t.left.tm == t.right.tm
        ):
            return t.left.tm
    return None


def _prog_children(t):
    c = type(t)
    if c is Lam:
        return [("body", t.body)]
    if c is App:
        return [("fn", t.fn), ("arg", t.arg)]
    if c in (Pair, TensorPair):
        return [("left", t.left), ("right", t.right)]
    if c in (Proj, BangIntro):
        return [("tm", t.tm)]
    if c in (LetBang, LetTensor):
        return [("scrutinee", t.scrutinee), ("body", t.body)]
    return []


def _step_prog(t, eta: bool, innermost: bool, cases: tuple = ()):
    if not innermost:
        r = _prog_root(t, eta, cases)
        if r is not None:
            return r, t
    for name, child in _prog_children(t):
        res = _step_prog(child, eta, innermost, cases)
        if res is not None:
            return replace(t, **{name: res[0]}), res[1]
    if innermost:
        r = _prog_root(t, eta, cases)
        if r is not None:
            return r, t
    return None


def nf_prog(t, eta: bool = True, fuel: Optional[_Fuel] = None, cases: tuple = ()):
    """βη normal form of a program term (η optional)."""
    fuel = fuel or _Fuel(default_fuel())

    def go(t):
        c = type(t)
        if c is App:
            f = go(t.fn)
            if type(f) is Lam:
                fuel.spend(t)
                return go(subst_p(f.body, t.arg))
            out = App(f, go(t.arg))
            r = _case_redex(out, cases)
            if r is not None:
                fuel.spend(out)
                return r
            return out
        if c is Lam:
            b = go(t.body)
            if eta and type(b) is App and b.arg == Var(0) and not free_p(b.fn, 0):
                fuel.spend(t)
                return shift_p(b.fn, -1)
            return Lam(t.annotation, b)
        if c is Proj:
            x = go(t.tm)
            if type(x) is Pair:
                fuel.spend(t)
                return x.left if t.side == 1 else x.right
            return Proj(t.side, x)
        if c is Pair:
            l, r = go(t.left), go(t.right)
            if (
                eta
                and type(l) is Proj
                and type(r) is Proj
                and (l.side, r.side) == (1, 2)
                and l.tm == r.tm
            ):
                fuel.spend(t)
                return l.tm
            return Pair(l, r)
        if c is TensorPair:
            return TensorPair(go(t.left), go(t.right))
        if c is BangIntro:
            return BangIntro(go(t.tm))
        if c is LetBang:
            s = go(t.scrutinee)
            if type(s) is BangIntro:
                fuel.spend(t)
                return go(subst_p(t.body, s.tm))
            return LetBang(s, go(t.body))
        if c is LetTensor:
            s = go(t.scrutinee)
            if type(s) is TensorPair:
                fuel.spend(t)
                return go(subst_p2(t.body, s.left, s.right))
            return LetTensor(s, go(t.body))
        return t

    return go(t)


# ------------------------------------------------------------- predicates


def norm_pred(p, rules: RuleSet, fuel: Optional[_Fuel] = None):
    """Normal form of a predicate: βη on index terms plus the extensionality
    isomorphisms enabled in ``rules`` read as definitional equalities."""
    fuel = fuel or _Fuel(default_fuel())
    c = type(p)
    if c is Diff:
        lhs = nf_prog(p.lhs, True, fuel, rules.cases)
        rhs = nf_prog(p.rhs, True, fuel, rules.cases)
        car = p.carrier
        if rules.cext and type(car) is Product:
            return PProduct(
                norm_pred(Diff(car.left, Proj(1, lhs), Proj(1, rhs)), rules, fuel),
                norm_pred(Diff(car.right, Proj(2, lhs), Proj(2, rhs)), rules, fuel),
            )
        if rules.fext1 and type(car) is Arrow:
            body = Diff(car.cod, App(shift_p(lhs, 1), Var(0)), App(shift_p(rhs, 1), Var(0)))
            return PiPoint(car.dom, norm_pred(body, rules, fuel))
        if rules.fext2 and type(car) is Arrow:
            body = Diff(car.cod, App(shift_p(lhs, 2), Var(1)), App(shift_p(rhs, 2), Var(0)))
            return PiDiff(car.dom, norm_pred(body, rules, fuel))
        return Diff(car, lhs, rhs)
    if c is PProduct:
        return PProduct(norm_pred(p.left, rules, fuel), norm_pred(p.right, rules, fuel))
    if c is PiPoint:
        return PiPoint(p.dom, norm_pred(p.body, rules, fuel))
    if c is PiDiff:
        return PiDiff(p.dom, norm_pred(p.body, rules, fuel))
    raise TypeError(f"not a predicate: {p!r}")


def _is_diagonal(m: Motive) -> bool:
    b = m.body
    return type(b) is Diff and b.carrier == m.carrier and b.lhs == Var(1) and b.rhs == Var(0)


def _same_prog(a, b, fuel, cases: tuple = ()) -> bool:
    return a == b or nf_prog(a, True, fuel, cases) == nf_prog(b, True, fuel, cases)


def _der_shape(j: J, fuel, cases: tuple = ()):
    """If ``j`` is J[a b. D_B(F a, F b)](t, u, a, [z] ∂(F z)) return (B, F z)."""
    body = j.motive.body
    if type(body) is not Diff or type(j.branch) is not Refl:
        return None
    lhs = nf_prog(body.lhs, True, fuel, cases)
    rhs = nf_prog(body.rhs, True, fuel, cases)
    if free_p(lhs, 0) or free_p(rhs, 1):
        return None
    fa = shift_p(lhs, -1)
    fb = subst_p(rhs, Var(0), 1)
    if fa != fb:
        return None
    if nf_prog(j.branch.tm, True, fuel, cases) != fa:
        return None
    return body.carrier, fa


# ------------------------------------------------------ difference rewriting


class Rewriter:
    def __init__(
        self,
        rules: RuleSet,
        fuel: Optional[int] = None,
        typer: Optional[Callable] = None,
        innermost: bool = False,
    ):
        self.rules = rules
        self.fuel = _Fuel(fuel if fuel is not None else default_fuel())
        self.typer = typer
        self.innermost = innermost

    # -- root rules
    def root(self, a, ctx: Context):
        r = self.rules
        c = type(a)
        if c is DAppPoint and type(a.fn) is DLamPoint:
            return subst_p(a.fn.body, a.arg)
        if c is DAppDiff and type(a.fn) is DLamDiff:
            return subst_pd(a.fn.body, a.lhs, a.rhs, a.diff)
        if c is DProj and type(a.tm) is DPair:
            return a.tm.left if a.side == 1 else a.tm.right
        if c is DerivSugar:
            return None
        if r.eta:
            if (
                c is DLamPoint
                and type(a.body) is DAppPoint
                and a.body.arg == Var(0)
                and not free_p(a.body.fn, 0)
            ):
                return shift_p(a.body.fn, -1)
            if (
                c is DLamDiff
                and type(a.body) is DAppDiff
                and (a.body.lhs, a.body.rhs, a.body.diff) == (Var(1), Var(0), DVar(0))
            ):
                fn = a.body.fn
                if not (free_p(fn, 0) or free_p(fn, 1)) and not _free_d0(fn):
                    return shift_d(shift_p(fn, -2), -1)
            if (
                c is DPair
                and type(a.left) is DProj
                and type(a.right) is DProj
                and (a.left.side, a.right.side) == (1, 2)
                and a.left.tm == a.right.tm
            ):
                return a.left.tm
        if c is Refl:
            t = a.tm
            if r.cext and type(t) is Pair:
                return DPair(Refl(t.left), Refl(t.right))
            if r.fext1 and type(t) is Lam:
                return DLamPoint(t.annotation, Refl(t.body))
            if r.fext2 and type(t) is Lam and self.typer is not None and t.annotation is not None:
                try:
                    cod = self.typer(ctx.push_program(t.annotation), t.body)
                except Exception:
                    cod = None
                if cod is not None:
                    return der_expansion(t, t.annotation, cod)
        if c is DProj and type(a.tm) is J and r.cext:
            j = a.tm
            split = self._split_motive(j.motive)
            if split is not None:
                m = split[a.side - 1]
                return J(m, j.lhs, j.rhs, j.diff, DProj(a.side, j.branch))
        if c is J:
            return self._root_j(a, ctx)
        return None

    def _split_motive(self, m: Motive):
        body = norm_pred(m.body, self.rules, self.fuel)
        if type(body) is PProduct:
            return Motive(m.carrier, body.left), Motive(m.carrier, body.right)
        return None

    def _root_j(self, a: J, ctx: Context):
        r = self.rules
        fuel = self.fuel
        if r.betad and type(a.diff) is Refl:
            s = a.diff.tm
            if _same_prog(a.lhs, a.rhs, fuel, r.cases) and _same_prog(a.lhs, s, fuel, r.cases):
                return subst_p(a.branch, a.lhs)
        if r.etad and a.branch == Refl(Var(0)) and _is_diagonal(
            Motive(a.motive.carrier, norm_pred(a.motive.body, BETA, fuel))
        ):
            return a.diff
        if r.jw and not free_p(a.branch, 0):
            return shift_p(a.branch, -1)
        if r.dchain and type(a.diff) is J:
            folded = self._dchain(a)
            if folded is not None:
                return folded
        if r.cext and type(a.branch) is DPair:
            split = self._split_motive(a.motive)
            if split is not None:
                m1, m2 = split
                return DPair(
                    J(m1, a.lhs, a.rhs, a.diff, a.branch.left),
                    J(m2, a.lhs, a.rhs, a.diff, a.branch.right),
                )
        if r.fext1 and r.cext and type(a.branch) is DLamPoint:
            out = self._jlam1b(a)
            if out is not None:
                return out
        if r.fext2 and r.cext and type(a.branch) is DLamDiff:
            out = self._jlam2b(a)
            if out is not None:
                return out
        if r.jeta_plus:
            return jeta_plus_reducts(a)[0]
        return None

    def _dchain(self, outer: J):
        fuel = self.fuel
        inner = outer.diff
        cases = self.rules.cases
        so = _der_shape(outer, fuel, cases)
        si = _der_shape(inner, fuel, cases)
        if so is None or si is None:
            return None
        cod_o, g_body = so
        cod_i, f_body = si
        if outer.motive.carrier != cod_i:
            return None
        if not _same_prog(outer.lhs, subst_p(f_body, inner.lhs), fuel, cases):
            return None
        if not _same_prog(outer.rhs, subst_p(f_body, inner.rhs), fuel, cases):
            return None
        gf = nf_prog(subst_p(shift_p(g_body, 1, cutoff=1), f_body), True, fuel, cases)
        motive = Motive(inner.motive.carrier, Diff(cod_o, shift_p(gf, 1), shift_p(gf, 1, cutoff=1)))
        return J(motive, inner.lhs, inner.rhs, inner.diff, Refl(gf))

    def _jlam1b(self, a: J):
        body = norm_pred(a.motive.body, self.rules, self.fuel)
        lam = a.branch
        if type(body) is not PiPoint or (lam.dom is not None and body.dom != lam.dom):
            return None
        dom = body.dom
        car = Product(a.motive.carrier, dom)
        mbody = instantiate(
            body.body, [Proj(1, Var(1)), Proj(1, Var(0)), Proj(2, Var(1))], extra=3
        )
        branch = instantiate(lam.body, [Proj(1, Var(0)), Proj(2, Var(0))], extra=2)
        return DLamPoint(
            dom,
            J(
                Motive(car, mbody),
                Pair(shift_p(a.lhs, 1), Var(0)),
                Pair(shift_p(a.rhs, 1), Var(0)),
                DPair(shift_p(a.diff, 1), Refl(Var(0))),
                branch,
            ),
        )

    def _jlam2b(self, a: J):
        body = norm_pred(a.motive.body, self.rules, self.fuel)
        lam = a.branch
        if type(body) is not PiDiff or (lam.dom is not None and body.dom != lam.dom):
            return None
        dom = body.dom
        car = Product(a.motive.carrier, dom)
        mbody = instantiate(
            body.body,
            [Proj(1, Var(1)), Proj(1, Var(0)), Proj(2, Var(1)), Proj(2, Var(0))],
            extra=4,
        )
        br = instantiate(lam.body, [Proj(1, Var(0)), Proj(2, Var(0)), Proj(2, Var(0))], extra=3)
        br = shift_d(subst_d(br, Refl(Proj(2, Var(0)))), 1)
        return DLamDiff(
            dom,
            J(
                Motive(car, mbody),
                Pair(shift_p(a.lhs, 2), Var(1)),
                Pair(shift_p(a.rhs, 2), Var(0)),
                DPair(shift_d(shift_p(a.diff, 2), 1), DVar(0)),
                br,
            ),
        )

    # -- traversal
    def step(self, node, ctx: Optional[Context] = None):
        """One leftmost-outermost (or innermost) step; None if normal."""
        ctx = ctx or Context()
        if is_program(node):
            return _step_prog(node, self.rules.eta, self.innermost, self.rules.cases)
        if is_predicate(node):
            return self._step_pred(node, ctx)
        if type(node) is Motive:
            res = self._step_pred(node.body, ctx.push_program(node.carrier).push_program(node.carrier))
            return (Motive(node.carrier, res[0]), res[1]) if res else None
        return self._step_diff(node, ctx)

    def _step_pred(self, p, ctx):
        c = type(p)
        if c is Diff:
            for name in ("lhs", "rhs"):
                res = _step_prog(getattr(p, name), True, self.innermost, self.rules.cases)
                if res:
                    return replace(p, **{name: res[0]}), res[1]
            return None
        if c is PProduct:
            for name in ("left", "right"):
                res = self._step_pred(getattr(p, name), ctx)
                if res:
                    return replace(p, **{name: res[0]}), res[1]
            return None
        if c is PiPoint:
            res = self._step_pred(p.body, ctx.push_program(p.dom))
        else:
            inner = ctx.push_program(p.dom).push_program(p.dom)
            res = self._step_pred(p.body, inner.push_diff(Diff(p.dom, Var(1), Var(0))))
        return (replace(p, body=res[0]), res[1]) if res else None

    def _children(self, a, ctx):
        c = type(a)
        if c is DLamPoint:
            return [("body", a.body, ctx.push_program(a.dom))]
        if c is DLamDiff:
            inner = ctx.push_program(a.dom).push_program(a.dom)
            return [("body", a.body, inner.push_diff(Diff(a.dom, Var(1), Var(0))))]
        if c is DAppPoint:
            return [("fn", a.fn, ctx), ("arg", a.arg, ctx)]
        if c is DAppDiff:
            return [("fn", a.fn, ctx), ("lhs", a.lhs, ctx), ("rhs", a.rhs, ctx), ("diff", a.diff, ctx)]
        if c is DPair:
            return [("left", a.left, ctx), ("right", a.right, ctx)]
        if c is DProj:
            return [("tm", a.tm, ctx)]
        if c is Refl:
            return [("tm", a.tm, ctx)]
        if c is DerivSugar:
            return [("fn", a.fn, ctx)]
        if c is J:
            return [
                ("motive", a.motive, ctx),
                ("lhs", a.lhs, ctx),
                ("rhs", a.rhs, ctx),
                ("diff", a.diff, ctx),
                ("branch", a.branch, ctx.push_program(a.motive.carrier)),
            ]
        return []

    def _step_diff(self, a, ctx):
        if not self.innermost:
            r = self.root(a, ctx)
            if r is not None:
                return r, a
        for name, child, cctx in self._children(a, ctx):
            res = self.step(child, cctx)
            if res is not None:
                return replace(a, **{name: res[0]}), res[1]
        if self.innermost:
            r = self.root(a, ctx)
            if r is not None:
                return r, a
        return None

    def normalize(self, node, ctx: Optional[Context] = None):
        ctx = ctx or Context()
        while True:
            res = self.step(node, ctx)
            if res is None:
                return node
            self.fuel.spend(res[1])
            node = res[0]


def _free_d0(a) -> bool:
    from .syntax import free_d

    return free_d(a, 0)


def jeta_plus_reducts(a: J) -> list:
    """Reducts of the forbidden rule at a J node.

    Any c with c(x,x,∂x) = b is admissible; we return the two extreme
    abstractions: every ∂(x) read as the difference variable, and none.
    """
    abstracted = _replace_refl_var(a.branch, a.diff, 0)
    return [subst_p(abstracted, a.lhs), subst_p(a.branch, a.lhs)]


def _replace_refl_var(b, diff, level: int):
    """Replace ∂(x) (x = program variable ``level``) by ``diff`` lifted into scope."""
    from .syntax import map_vars

    def go(n, pd, dd):
        c = type(n)
        if c is Refl and n.tm == Var(pd):
            return shift_d(shift_p(diff, pd + 1), dd)
        if c is DLamPoint:
            return DLamPoint(n.dom, go(n.body, pd + 1, dd))
        if c is DLamDiff:
            return DLamDiff(n.dom, go(n.body, pd + 2, dd + 1))
        if c is DAppPoint:
            return DAppPoint(go(n.fn, pd, dd), n.arg)
        if c is DAppDiff:
            return DAppDiff(go(n.fn, pd, dd), n.lhs, n.rhs, go(n.diff, pd, dd))
        if c is DPair:
            return DPair(go(n.left, pd, dd), go(n.right, pd, dd))
        if c is DProj:
            return DProj(n.side, go(n.tm, pd, dd))
        if c is J:
            return J(n.motive, n.lhs, n.rhs, go(n.diff, pd, dd), go(n.branch, pd + 1, dd))
        return n

    return go(b, level, 0)


# ------------------------------------------------------------ entry points


def step(node, rules: RuleSet, ctx: Optional[Context] = None, typer=None, innermost: bool = False):
    res = Rewriter(rules, typer=typer, innermost=innermost).step(node, ctx)
    return None if res is None else res[0]


def normalize(
    node,
    rules: RuleSet,
    fuel: Optional[int] = None,
    ctx: Optional[Context] = None,
    typer=None,
    innermost: bool = False,
):
    """Normal form under ``rules``; raises FuelExhausted naming the last redex."""
    if is_predicate(node):
        return norm_pred(node, rules, _Fuel(fuel if fuel is not None else default_fuel()))
    return Rewriter(rules, fuel, typer, innermost).normalize(node, ctx)


def equal_modulo(a, b, rules: RuleSet, fuel: Optional[int] = None, ctx=None, typer=None) -> bool:
    if a == b:
        return True
    na = normalize(a, rules, fuel, ctx, typer)
    nb = normalize(b, rules, fuel, ctx, typer)
    if na == nb:
        return True
    if rules.jeta_plus and is_difference(a) and is_difference(b):
        for x, y in ((na, nb), (nb, na)):
            if type(y) is Refl and trivialization_witness(x, y.tm, rules, fuel, ctx, typer):
                return True
    return False


def trivialization_witness(a, t, rules: RuleSet, fuel=None, ctx=None, typer=None, carrier=None) -> bool:
    """Is a = ∂(t) derivable through the expansion J(t, t, a, [x]∂(x))?

    The expansion is a legitimate term whenever a ∈ D_A(t,t).  It converts to
    ``a`` by the J-η rule; it converts to ∂(t) only through the forbidden rule.
    Returns True iff both a and ∂(t) are reachable in one root step.
    """
    from .syntax import BaseType

    car = carrier if carrier is not None else BaseType("_")
    expansion = J(Motive(car, Diff(car, Var(1), Var(0))), t, t, a, Refl(Var(0)))
    rw = Rewriter(rules, fuel, typer)
    reducts = []
    if rules.jeta_plus:
        reducts.extend(jeta_plus_reducts(expansion))
    single = rw.root(expansion, ctx or Context())
    if single is not None:
        reducts.append(single)
    nfs = {normalize(r, rules, fuel, ctx, typer) for r in reducts}
    want_a = normalize(a, rules, fuel, ctx, typer)
    want_t = normalize(Refl(t), rules, fuel, ctx, typer)
    return want_a in nfs and want_t in nfs
