"""Interpretation of checked terms in a backend.

A backend supplies the model: objects for types, the self-difference r, the
diagonal filler j at distance predicates, and extensional comparison on a
declared test set.  This module does the structural part: evaluating program
and difference terms, decomposing J fillers along the motive's predicate
structure, and building the (i, p) factorization of an arrow.

Value representation shared by all backends:

* program values are Python values; λ is a closure, pairs and tensor pairs
  are tuples and ``!`` is transparent;
* a difference at ``D[Z](l, r)`` is whatever the backend uses for Z;
* at ``P * Q`` it is a pair, at ``Pi x : A. P`` a one-argument callable and at
  ``Pi x y : A. D[A](x, y) -> P`` a callable of (x, y, d).
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .checker import Checker, Signature, is_numeral
from .errors import ModelSoundnessFailure, TypeCheckError, UnsupportedDomain
from .syntax import (
    App, Arrow, Bang, BangIntro, BaseType, Const, Context, DAppDiff, DAppPoint, DConst, DerivSugar,
    Diff, DLamDiff, DLamPoint, DPair, DProj, DVar, J, Lam, LetBang, LetTensor, Lolli, Pair, PiDiff,
    PiPoint, PProduct, Product, Proj, Refl, Tensor, TensorPair, TypeMeta, Var, der_expansion,
)

MAX_POINTS = 64


class SemObject:
    """The interpretation of a simple type.

    ``kind`` is one of base, arrow, product, bang, lolli, tensor.  Base objects
    carry the backend's ``info``; composite ones their ``parts``.
    """

    __slots__ = ("kind", "ty", "parts", "scale", "info", "_points")

    def __init__(self, kind: str, ty, parts: tuple = (), scale=None, info=None):
        self.kind = kind
        self.ty = ty
        self.parts = parts
        self.scale = scale
        self.info = info
        self._points = None

    @property
    def body(self) -> "SemObject":
        return self.parts[0]

    @property
    def is_function(self) -> bool:
        return self.kind in ("arrow", "lolli")

    @property
    def is_pair(self) -> bool:
        return self.kind in ("product", "tensor")

    def __repr__(self):
        return f"SemObject({self.kind}, {self.ty})"


def strip_bang(obj: SemObject) -> SemObject:
    while obj.kind == "bang":
        obj = obj.body
    return obj


class Backend:
    """The model contract.  Subclasses override the hooks marked below."""

    name = "abstract"
    monoidal = False
    tolerance = 0
    # fill Π-over-differences motives as one J over a product carrier rather
    # than pointwise in the bound pair
    product_pidiff = False

    def __init__(self, seed: int = 0, samples: int = 6):
        self.seed = seed
        self.samples = samples

    def rng(self, *salt) -> random.Random:
        return random.Random(repr((self.seed,) + salt))

    # ---------------------------------------------------------- objects
    def base_object(self, name: str, spec: dict) -> SemObject:  # hook
        raise NotImplementedError

    def compose_object(self, kind: str, ty, parts: tuple, scale=None) -> SemObject:
        if self.monoidal and kind in ("arrow", "product"):
            raise UnsupportedDomain(f"the {self.name} backend interprets only the sub-exponential calculus")
        if not self.monoidal and kind in ("bang", "lolli", "tensor"):
            raise UnsupportedDomain(f"the {self.name} backend interprets only the cartesian calculus")
        return SemObject(kind, ty, parts, scale)

    def base_points(self, obj: SemObject) -> list:  # hook
        raise NotImplementedError

    def points(self, obj: SemObject) -> list:
        """The test set of an object: exhaustive when finite, sampled otherwise."""
        if obj._points is None:
            obj._points = self._points(obj)
        return obj._points

    def _points(self, obj: SemObject) -> list:
        if obj.kind == "base":
            return self.base_points(obj)
        if obj.kind == "bang":
            return self.points(obj.body)
        if obj.is_pair:
            left, right = self.points(obj.parts[0]), self.points(obj.parts[1])
            pts = list(itertools.product(left, right))
            if len(pts) > MAX_POINTS:
                pts = self.rng("pairs", str(obj.ty)).sample(pts, MAX_POINTS)
            return pts
        return self.function_points(obj)

    def function_points(self, obj: SemObject) -> list:
        """Sample functions: constants plus random tables on finite domains."""
        dom, cod = obj.parts
        cpts = self.points(cod)
        rng = self.rng("fun", str(obj.ty))
        out = [_const_fn(c) for c in cpts[: self.samples]]
        dpts = self.points(dom)
        if _hashable(dpts) and len(dpts) <= MAX_POINTS:
            for _ in range(self.samples):
                table = {_key(k): rng.choice(cpts) for k in dpts}
                out.append(_table_fn(table))
        return out

    def eq_value(self, obj: SemObject, a, b) -> bool:
        if obj.kind == "base":
            return self.eq_base(obj, a, b)
        if obj.kind == "bang":
            return self.eq_value(obj.body, a, b)
        if obj.is_pair:
            return self.eq_value(obj.parts[0], a[0], b[0]) and self.eq_value(obj.parts[1], a[1], b[1])
        return all(self.eq_value(obj.parts[1], a(k), b(k)) for k in self.points(obj.parts[0]))

    def eq_base(self, obj: SemObject, a, b) -> bool:
        if self.tolerance and isinstance(a, (int, float, Fraction)) and isinstance(b, (int, float, Fraction)):
            return abs(a - b) <= self.tolerance
        return a == b

    # ------------------------------------------------------- differences
    def refl(self, obj: Optional[SemObject], v):  # hook: r_X
        raise NotImplementedError

    def filler_dist(self, Z: SemObject, X: SemObject, F: Callable, G: Callable, cx, x, y, d):  # hook: j
        """The filler at a distance leaf ``D[Z](F(x, y), G(x, y))``.

        ``cx`` is the branch's value at ``D[Z](F(x, x), G(x, x))`` and ``d`` the
        transported difference in ``D[X](x, y)``.
        """
        raise NotImplementedError

    def valid_diff(self, Z: SemObject, lhs, rhs, v) -> bool:  # hook: soundness
        raise NotImplementedError

    def eq_diff(self, Z: SemObject, a, b) -> bool:  # hook
        raise NotImplementedError

    def diff_samples(self, X: SemObject) -> list:  # hook
        """Triples (x, y, d) with d a valid difference in D[X](x, y)."""
        raise NotImplementedError

    def closed_form_i(self, cod: SemObject, x, fx):  # hook: the factorization Remark
        raise NotImplementedError

    # ---------------------------------------------------------- env data
    def parse_point(self, obj: SemObject, data):
        if obj.kind == "base":
            return self.parse_base(obj, data)
        if obj.kind == "bang":
            return self.parse_point(obj.body, data)
        if obj.is_pair:
            if not isinstance(data, list) or len(data) != 2:
                raise ValueError(f"expected a pair for {obj.ty}, got {data!r}")
            return (self.parse_point(obj.parts[0], data[0]), self.parse_point(obj.parts[1], data[1]))
        raise ValueError(f"cannot read a literal function value at {obj.ty}")

    def parse_base(self, obj: SemObject, data):
        return to_number(data) if isinstance(data, (int, float, str)) and _numeric(data) else data

    def numeral(self, text: str, obj: SemObject):
        return self.parse_point(obj, Fraction(text))

    def const_value(self, name: str, obj: SemObject, spec: dict, interp: "Interpreter"):
        return generic_const(self, name, obj, spec)

    def dconst_value(self, name: str, pred, spec: dict, interp: "Interpreter"):
        if "value" in spec:
            return interp.pred_value(pred, (), spec["value"])
        raise ValueError(f"dconst {name}: unsupported entry {sorted(spec)}")

    def parse_diff(self, Z: SemObject, data):  # hook
        raise NotImplementedError

    # ------------------------------------------------------------- misc
    def show(self, v):
        return show_value(v)


# ---------------------------------------------------------------- helpers


def to_number(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(str(x))
    if isinstance(x, str):
        if x in ("inf", "Infinity"):
            return float("inf")
        return Fraction(x)
    return Fraction(x)


def _numeric(x) -> bool:
    if isinstance(x, (int, float, Fraction)):
        return True
    try:
        to_number(x)
        return True
    except (ValueError, ZeroDivisionError):
        return False


def _key(v):
    return v


def _hashable(pts) -> bool:
    try:
        for p in pts:
            hash(p)
        return True
    except TypeError:
        return False


def _const_fn(c):
    return lambda _k: c


def _table_fn(table: dict):
    return lambda k: table[_key(k)]


def leaves(v) -> list:
    """Flatten nested tuples."""
    if isinstance(v, tuple):
        return [x for part in v for x in leaves(part)]
    return [v]


def rebuild(obj: SemObject, flat: list):
    """Inverse of ``leaves`` along the pair structure of ``obj``."""
    it = iter(flat)

    def go(o):
        o = strip_bang(o)
        if o.is_pair:
            return (go(o.parts[0]), go(o.parts[1]))
        return next(it)

    out = go(obj)
    return out


def generic_const(backend: Backend, name: str, obj: SemObject, spec: dict):
    """Constants shared by every backend: literal values, tables and polynomials."""
    if "value" in spec:
        return backend.parse_point(obj, spec["value"])
    o = strip_bang(obj)
    if not o.is_function:
        raise ValueError(f"constant {name}: only 'value' is allowed at {obj.ty}")
    dom, cod = o.parts
    if "table" in spec:
        table = {}
        for arg, res in spec["table"]:
            table[_key(backend.parse_point(dom, arg))] = backend.parse_point(cod, res)

        def fn(k, table=table):
            try:
                return table[_key(k)]
            except KeyError:
                raise UnsupportedDomain(f"{name} is not tabulated at {show_value(k)}")

        return fn
    if "poly" in spec:
        coeffs = [to_number(c) for c in spec["poly"]]

        def fn(k, coeffs=coeffs):
            total, power = 0, 1
            for c in coeffs:
                if c:
                    total = c * power + total
                power = power * k
            return total

        return fn
    if "sum" in spec:
        scale = to_number(spec["sum"])
        return lambda k: scale * _sum(leaves(k))
    if "affine" in spec:
        # c + a1*x1 + ... + an*xn over n curried arguments
        c, *coeffs = [to_number(x) for x in spec["affine"]]

        def collect(args):
            if len(args) == len(coeffs):
                return _sum([c] + [a * x for a, x in zip(coeffs, args)])
            return lambda v: collect(args + (v,))

        return collect(())
    if "case" in spec:
        # case on a two-point type: the first listed value selects the first branch
        first = backend.parse_point(dom, spec["case"][0])
        return lambda w: (lambda a: (lambda b: a if w == first else b))
    if "curried" in spec:
        # a curried table: {"curried": [[a, [[b, res], ...]], ...]}
        inner_obj = strip_bang(cod)
        table = {}
        for arg, rows in spec["curried"]:
            table[_key(backend.parse_point(dom, arg))] = generic_const(backend, name, inner_obj, {"table": rows})
        return lambda k: table[_key(k)]
    raise ValueError(f"constant {name}: unsupported entry {sorted(spec)}")


def _sum(xs):
    total = 0
    for x in xs:
        total = x + total
    return total


def show_value(v):
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else str(v)
    if isinstance(v, tuple):
        return "(" + ", ".join(show_value(x) for x in v) + ")"
    if callable(v):
        return "<function>"
    return str(v)


def json_value(v):
    """A JSON-friendly rendering of a first-order value."""
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else str(v)
    if isinstance(v, float):
        return "inf" if v == float("inf") else v
    if isinstance(v, tuple):
        return [json_value(x) for x in v]
    if isinstance(v, frozenset):
        return sorted(json_value(x) for x in v)
    if callable(v):
        return "<function>"
    if hasattr(v, "to_json"):
        return v.to_json()
    return v if isinstance(v, (int, str, bool)) or v is None else str(v)


# ------------------------------------------------------------- environments


@dataclass
class SemEnv:
    base: dict = field(default_factory=dict)
    consts: dict = field(default_factory=dict)
    dconsts: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def load_env(backend: Backend, sig: Signature, data) -> "Interpreter":
    """Build an interpreter from an env description (dict, JSON text or path)."""
    if isinstance(data, str):
        if data.lstrip().startswith("{"):
            data = json.loads(data)
        else:
            with open(data) as fh:
                data = json.load(fh)
    env = SemEnv(raw=data)
    interp = Interpreter(backend, sig, env)
    types = data.get("types", {})
    for name in sorted(sig.base_types):
        if name not in types:
            raise UnsupportedDomain(f"base type {name} has no assignment in the environment")
        env.base[name] = backend.base_object(name, types[name])
    for name, ty in sig.consts.items():
        spec = data.get("consts", {}).get(name)
        if spec is None:
            continue
        env.consts[name] = backend.const_value(name, interp.obj(ty), spec, interp)
    for name, pred in sig.dconsts.items():
        spec = data.get("dconsts", {}).get(name)
        if spec is None:
            continue
        env.dconsts[name] = backend.dconst_value(name, pred, spec, interp)
    return interp


# --------------------------------------------------------------- evaluation


class Interpreter:
    """Evaluates checked terms of ``sig`` in ``backend`` under ``env``."""

    def __init__(self, backend: Backend, sig: Signature, env: SemEnv):
        self.backend = backend
        self.sig = sig
        self.env = env
        self._objs: dict = {}
        self._defs: dict = {}
        self._types: dict = {}

    # ------------------------------------------------------------ types
    def obj(self, ty) -> SemObject:
        out = self._objs.get(ty)
        if out is None:
            out = self._obj(ty)
            self._objs[ty] = out
        return out

    def _obj(self, ty) -> SemObject:
        b = self.backend
        c = type(ty)
        if c is BaseType:
            if ty.name not in self.env.base:
                raise UnsupportedDomain(f"unbound base type {ty.name}")
            return self.env.base[ty.name]
        if c is Arrow:
            return b.compose_object("arrow", ty, (self.obj(ty.dom), self.obj(ty.cod)))
        if c is Product:
            return b.compose_object("product", ty, (self.obj(ty.left), self.obj(ty.right)))
        if c is Lolli:
            return b.compose_object("lolli", ty, (self.obj(ty.dom), self.obj(ty.cod)))
        if c is Tensor:
            return b.compose_object("tensor", ty, (self.obj(ty.left), self.obj(ty.right)))
        if c is Bang:
            return b.compose_object("bang", ty, (self.obj(ty.body),), scale=ty.scale)
        if c is TypeMeta:
            raise UnsupportedDomain("cannot interpret an unsolved type")
        raise TypeError(f"not a type: {ty!r}")

    def type_of(self, tys: tuple, tm):
        key = (tys, tm)
        if key not in self._types:
            try:
                ch = Checker(self.sig)
                _, ty = ch.infer_program(Context(tys), tm)
                self._types[key] = ch.close(ty)
            except (TypeCheckError, Exception):
                self._types[key] = None
        return self._types[key]

    def obj_of(self, tys: tuple, tm) -> Optional[SemObject]:
        ty = self.type_of(tys, tm)
        return None if ty is None else self.obj(ty)

    # ---------------------------------------------------------- programs
    def prog(self, tm, penv: tuple = ()):
        c = type(tm)
        if c is Var:
            return penv[-1 - tm.index]
        if c is App:
            return self.prog(tm.fn, penv)(self.prog(tm.arg, penv))
        if c is Lam:
            body = tm.body
            return lambda v: self.prog(body, penv + (v,))
        if c is Const:
            return self.const(tm.name)
        if c is Pair or c is TensorPair:
            return (self.prog(tm.left, penv), self.prog(tm.right, penv))
        if c is Proj:
            return self.prog(tm.tm, penv)[tm.side - 1]
        if c is BangIntro:
            return self.prog(tm.tm, penv)
        if c is LetBang:
            return self.prog(tm.body, penv + (self.prog(tm.scrutinee, penv),))
        if c is LetTensor:
            a, b = self.prog(tm.scrutinee, penv)
            return self.prog(tm.body, penv + (a, b))
        raise TypeError(f"not a program term: {tm!r}")

    def const(self, name: str):
        if name in self.env.consts:
            return self.env.consts[name]
        d = self.sig.defs.get(name)
        if d is not None:
            if name not in self._defs:
                self._defs[name] = self.prog(d.term) if d.sort == "p" else self.diff(d.term)
            return self._defs[name]
        if is_numeral(name) and self.sig.literal_type is not None:
            return self.backend.numeral(name, self.obj(self.sig.literal_type))
        raise UnsupportedDomain(f"constant {name} has no assignment in the environment")

    # ------------------------------------------------------- differences
    def diff(self, a, penv: tuple = (), denv: tuple = (), tys: tuple = ()):
        c = type(a)
        if c is DVar:
            return denv[-1 - a.index]
        if c is Refl:
            return self.backend.refl(self.obj_of(tys, a.tm), self.prog(a.tm, penv))
        if c is DAppDiff:
            fn = self.diff(a.fn, penv, denv, tys)
            return fn(self.prog(a.lhs, penv), self.prog(a.rhs, penv), self.diff(a.diff, penv, denv, tys))
        if c is DAppPoint:
            return self.diff(a.fn, penv, denv, tys)(self.prog(a.arg, penv))
        if c is DLamPoint:
            body, inner = a.body, tys + (a.dom,)
            return lambda k: self.diff(body, penv + (k,), denv, inner)
        if c is DLamDiff:
            body, inner = a.body, tys + (a.dom, a.dom)
            return lambda k, k2, e: self.diff(body, penv + (k, k2), denv + (e,), inner)
        if c is DPair:
            return (self.diff(a.left, penv, denv, tys), self.diff(a.right, penv, denv, tys))
        if c is DProj:
            return self.diff(a.tm, penv, denv, tys)[a.side - 1]
        if c is J:
            return self._j(a, penv, denv, tys)
        if c is DConst:
            if a.name in self.env.dconsts:
                return self.env.dconsts[a.name]
            if a.name in self.sig.defs:
                return self.const(a.name)
            raise UnsupportedDomain(f"difference constant {a.name} has no assignment in the environment")
        if c is DerivSugar:
            ty = self.type_of(tys, a.fn)
            if type(ty) not in (Arrow, Lolli):
                raise UnsupportedDomain("Der applied to a term whose type is not known to be a function")
            return self.diff(der_expansion(a.fn, ty.dom, ty.cod), penv, denv, tys)
        raise TypeError(f"not a difference term: {a!r}")

    def _j(self, a: J, penv, denv, tys):
        carrier = a.motive.carrier
        if carrier is None:
            carrier = self.type_of(tys, a.lhs)
        X = self.obj(carrier)
        x = self.prog(a.lhs, penv)
        y = self.prog(a.rhs, penv)
        d = self.diff(a.diff, penv, denv, tys)
        cx = self.diff(a.branch, penv + (x,), denv, tys + (carrier,))
        inner = tys + (carrier, carrier)
        return self.fill(a.motive.body, X, lambda p, q: penv + (p, q), inner, x, y, d, cx)

    def fill(self, P, X: SemObject, mk: Callable, tys: tuple, x, y, d, cx):
        """The filler at motive ``P``, decomposed along its predicate structure."""
        c = type(P)
        if c is Diff:
            Z = self.obj(P.carrier)
            lhs, rhs = P.lhs, P.rhs
            F = lambda p, q: self.prog(lhs, mk(p, q))
            G = lambda p, q: self.prog(rhs, mk(p, q))
            return self.backend.filler_dist(Z, X, F, G, cx, x, y, d)
        if c is PProduct:
            return (
                self.fill(P.left, X, mk, tys, x, y, d, cx[0]),
                self.fill(P.right, X, mk, tys, x, y, d, cx[1]),
            )
        if c is PiPoint:
            body, inner = P.body, tys + (P.dom,)
            return lambda k: self.fill(body, X, lambda p, q: mk(p, q) + (k,), inner, x, y, d, cx(k))
        if c is PiDiff:
            body, inner = P.body, tys + (P.dom, P.dom)
            if self.backend.product_pidiff:
                return self._fill_product(body, X, self.obj(P.dom), mk, inner, x, y, d, cx)
            return lambda k, k2, e: self.fill(
                body, X, lambda p, q: mk(p, q) + (k, k2), inner, x, y, d, cx(k, k2, e)
            )
        raise TypeError(f"not a predicate: {P!r}")

    def _fill_product(self, body, X, D, mk, tys, x, y, d, cx):
        """The Π-over-differences filler as a single J over the carrier X × D,
        transporting (d, e) from (x, k) to (y, k2)."""
        XD = SemObject("product", None, (X, D))
        mk2 = lambda p, q: mk(p[0], q[0]) + (p[1], q[1])

        def at(k, k2, e):
            c0 = cx(k, k, self.backend.refl(D, k))
            return self.fill(body, XD, mk2, tys, (x, k), (y, k2), (d, e), c0)

        return at

    # ------------------------------------------------- predicate-directed
    def pred_value(self, P, penv: tuple, data):
        """Read a JSON difference value at predicate ``P`` (first order only)."""
        c = type(P)
        if c is Diff:
            return self.backend.parse_diff(self.obj(P.carrier), data)
        if c is PProduct:
            return (self.pred_value(P.left, penv, data[0]), self.pred_value(P.right, penv, data[1]))
        raise ValueError("only distance and product predicates take literal difference values")

    def pred_function(self, P, leaf: Callable, penv: tuple = (), diffs: tuple = ()):
        """A value at ``P`` built from its binders.

        Π-binders become callables; at the distance leaf ``leaf(Z, l, r, diffs)``
        receives the interpreted endpoints and every difference bound on the way.
        """
        c = type(P)
        if c is Diff:
            Z = self.obj(P.carrier)
            return leaf(Z, self.prog(P.lhs, penv), self.prog(P.rhs, penv), diffs)
        if c is PProduct:
            return (self.pred_function(P.left, leaf, penv, diffs), self.pred_function(P.right, leaf, penv, diffs))
        if c is PiPoint:
            return lambda k: self.pred_function(P.body, leaf, penv + (k,), diffs)
        if c is PiDiff:
            return lambda k, k2, e: self.pred_function(P.body, leaf, penv + (k, k2), diffs + (e,))
        raise TypeError(f"not a predicate: {P!r}")

    def walk(self, P, penv: tuple, leaf: Callable, values: tuple) -> bool:
        """Apply ``leaf(Z, lhs, rhs, *values)`` at every distance leaf of ``P``.

        Function-shaped predicates are explored on the backend's test set.
        """
        c = type(P)
        if c is Diff:
            Z = self.obj(P.carrier)
            return leaf(Z, self.prog(P.lhs, penv), self.prog(P.rhs, penv), *values)
        if c is PProduct:
            return self.walk(P.left, penv, leaf, tuple(v[0] for v in values)) and self.walk(
                P.right, penv, leaf, tuple(v[1] for v in values)
            )
        if c is PiPoint:
            return all(
                self.walk(P.body, penv + (k,), leaf, tuple(v(k) for v in values))
                for k in self.backend.points(self.obj(P.dom))
            )
        if c is PiDiff:
            return all(
                self.walk(P.body, penv + (k, k2), leaf, tuple(v(k, k2, e) for v in values))
                for k, k2, e in self.backend.diff_samples(self.obj(P.dom))
            )
        raise TypeError(f"not a predicate: {P!r}")

    def sound(self, P, v, penv: tuple = ()) -> bool:
        """Does the difference value ``v`` inhabit ``P``?"""
        return self.walk(P, penv, lambda Z, l, r, w: self.backend.valid_diff(Z, l, r, w), (v,))

    def same_diff(self, P, v, w, penv: tuple = ()) -> bool:
        return self.walk(P, penv, lambda Z, l, r, a, b: self.backend.eq_diff(Z, a, b), (v, w))

    def require_sound(self, P, v, what: str = "value"):
        if not self.sound(P, v):
            raise ModelSoundnessFailure(f"{what} does not inhabit its predicate in the {self.backend.name} model")


# ------------------------------------------------------------ factorization


def refl_arrow(backend: Backend, X: SemObject) -> Callable:
    """r_X : X → (X×X | D X), whose underlying map is the diagonal."""
    return lambda x: ((x, x), backend.refl(X, x))


def factorize(backend: Backend, dom: SemObject, cod: SemObject, f: Callable):
    """f = p ∘ i with i(x) = ⟨⟨x, f x⟩, r(f x)⟩ and p the second point."""
    r = refl_arrow(backend, cod)

    def i(x):
        (fx, _), d = r(f(x))
        return ((x, fx), d)

    def p(z):
        return z[0][1]

    for x in backend.points(dom):
        if not backend.eq_value(cod, p(i(x)), f(x)):
            raise ModelSoundnessFailure("p ∘ i differs from f")
    return i, p
