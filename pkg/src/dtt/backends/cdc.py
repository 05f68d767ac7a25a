"""Cartesian differential model over ℝⁿ with polynomial arrows.

D[A](t, u) is the tangent space at t and ignores u.  The self-difference is
the zero vector; the filler adds to the branch the derivative of the left
index map in its first point argument, taken with dual numbers so that it
also runs on symbolic (polynomial) inputs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from ..errors import UnsupportedDomain
from ..semantics import Backend, SemObject, leaves, rebuild, strip_bang, to_number
from .poly import Poly, PolyArrow, derive


class Dual:
    """a + bε with ε² = 0, over any commutative ring of values."""

    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a = a
        self.b = b

    def _lift(self, o):
        return o if isinstance(o, Dual) else Dual(o, 0)

    def __add__(self, o):
        o = self._lift(o)
        return Dual(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Dual(-self.a, -self.b)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        o = self._lift(o)
        return Dual(self.a * o.a, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Dual({self.a}, {self.b})"


def lift(x, v):
    """Attach the tangent ``v`` to the point ``x``."""
    if isinstance(x, tuple):
        return tuple(lift(a, b) for a, b in zip(x, v))
    if callable(x):
        return lambda k: lift(x(k), v(k))
    return Dual(x, v)


def tangent(r):
    if isinstance(r, Dual):
        return r.b
    if isinstance(r, tuple):
        return tuple(tangent(a) for a in r)
    if callable(r):
        return lambda k: tangent(r(k))
    return Fraction(0)


def zero_like(v):
    if isinstance(v, tuple):
        return tuple(zero_like(a) for a in v)
    if callable(v):
        return lambda k: zero_like(v(k))
    return Fraction(0)


def add(a, b):
    if isinstance(a, tuple):
        return tuple(add(x, y) for x, y in zip(a, b))
    if callable(a):
        return lambda k: add(a(k), b(k))
    return a + b


class CDCBackend(Backend):
    name = "cdc"

    def __init__(self, seed: int = 0, samples: int = 6):
        super().__init__(seed, samples)
        self.arrows: dict = {}

    # ---------------------------------------------------------- objects
    def base_object(self, name: str, spec: dict) -> SemObject:
        if spec.get("kind", "real") != "real":
            raise ValueError(f"CDC base type {name}: only 'real' carriers are supported")
        pts = [to_number(p) for p in spec.get("samples", [-2, -1, 0, "1/2", 1, 3])]
        return SemObject("base", name, info={"points": pts})

    def base_points(self, obj: SemObject) -> list:
        return obj.info["points"]

    def function_points(self, obj: SemObject) -> list:
        dom, cod = obj.parts
        out = [(lambda c: (lambda _k: c))(c) for c in self.points(cod)[:3]]
        if dom.kind == "base" and cod.kind == "base":
            for a, b in ((1, 0), (2, -1), (Fraction(-1, 2), 3)):
                out.append((lambda a, b: (lambda k: a * k + b))(a, b))
        return out

    def eq_base(self, obj, a, b) -> bool:
        return a == b

    def dim(self, obj: SemObject) -> int:
        o = strip_bang(obj)
        if o.kind == "base":
            return 1
        if o.is_pair:
            return self.dim(o.parts[0]) + self.dim(o.parts[1])
        raise UnsupportedDomain(f"{obj.ty} is not a Euclidean space")

    # ------------------------------------------------------ differences
    def refl(self, obj, v):
        return zero_like(v)

    def filler_dist(self, Z, X, F, G, cx, x, y, d):
        return add(cx, tangent(F(lift(x, d), y)))

    def valid_diff(self, Z, lhs, rhs, v) -> bool:
        return self.shape_ok(Z, v)

    def shape_ok(self, Z: SemObject, v) -> bool:
        if Z.kind == "base":
            return isinstance(v, (int, Fraction, Poly))
        if Z.kind == "product":
            return isinstance(v, tuple) and len(v) == 2 and all(self.shape_ok(p, w) for p, w in zip(Z.parts, v))
        return callable(v) and all(self.shape_ok(Z.parts[1], v(k)) for k in self.points(Z.parts[0])[:3])

    def eq_diff(self, Z, a, b) -> bool:
        return self.eq_value(Z, a, b)

    def diff_samples(self, X: SemObject) -> list:
        pts = self.points(X)[:6]
        return [(a, b, v) for a in pts for b in pts[:2] for v in pts[:4]]

    def parse_diff(self, Z, data):
        return self.parse_point(Z, data)

    def closed_form_i(self, cod, x, fx):
        return ((x, fx), self.zero_of(cod))

    def zero_of(self, obj: SemObject):
        """The zero vector of an object, read off its type."""
        if obj.kind == "base":
            return Fraction(0)
        if obj.kind == "product":
            return tuple(self.zero_of(p) for p in obj.parts)
        cod = obj.parts[1]
        return lambda _k: self.zero_of(cod)

    # -------------------------------------------------------- env data
    def const_value(self, name, obj, spec, interp):
        if "components" in spec:
            doms, cod = [], strip_bang(obj)
            while cod.is_function:
                doms.append(cod.parts[0])
                cod = strip_bang(cod.parts[1])
            if not doms:
                raise ValueError(f"constant {name}: components need a function type")
            arrow = PolyArrow.from_spec(sum(self.dim(d) for d in doms), spec["components"])
            if arrow.cod != self.dim(cod):
                raise ValueError(f"constant {name}: expected {self.dim(cod)} components, got {arrow.cod}")
            self.arrows[name] = arrow
            return poly_function(arrow, cod, len(doms))
        return super().const_value(name, obj, spec, interp)


def poly_function(arrow: PolyArrow, cod: SemObject, arity: int = 1) -> Callable:
    """The program value of a polynomial arrow taking ``arity`` curried
    arguments, each a nested tuple of reals."""

    def collect(args):
        if len(args) == arity:
            return rebuild(cod, arrow(*[x for a in args for x in leaves(a)]))
        return lambda v: collect(args + (v,))

    return collect(())


def cdc_derive(f: PolyArrow) -> PolyArrow:
    return derive(f)


def tangent_map(f: Callable, x, v):
    """Directional derivative of a program value f at x along v, via dual numbers."""
    return tangent(f(lift(x, v)))
