"""Change structures: carriers with changes, update ⊕ and difference ⊖.

The self-difference is the nil change x ⊖ x.  The filler walks from F(x, y)
back to F(x, x), along the branch to G(x, x), and out to G(x, y), composing
the three changes with  ∂x + ∂y := ((x ⊕ ∂x) ⊕ ∂y) ⊖ x.
"""

from __future__ import annotations

import itertools
from collections import Counter
from fractions import Fraction
from typing import Callable

from ..errors import ModelSoundnessFailure, UnsupportedDomain
from ..semantics import Backend, SemObject, to_number


class Bag:
    """A finite multiset of naturals."""

    __slots__ = ("items",)

    def __init__(self, items=()):
        self.items = tuple(sorted(int(i) for i in items))

    def __eq__(self, other):
        return isinstance(other, Bag) and self.items == other.items

    def __hash__(self):
        return hash(("bag", self.items))

    def __repr__(self):
        return "{" + ", ".join(map(str, self.items)) + "}"

    def counter(self) -> Counter:
        return Counter(self.items)

    def to_json(self):
        return list(self.items)


class BagChange:
    """Removals and additions, normalized so no element appears in both."""

    __slots__ = ("rem", "add")

    def __init__(self, rem=(), add=()):
        r, a = Counter(int(i) for i in rem), Counter(int(i) for i in add)
        common = r & a
        self.rem = Bag((r - common).elements())
        self.add = Bag((a - common).elements())

    def __eq__(self, other):
        return isinstance(other, BagChange) and (self.rem, self.add) == (other.rem, other.add)

    def __hash__(self):
        return hash((self.rem, self.add))

    def __repr__(self):
        return f"(-{self.rem}, +{self.add})"

    def to_json(self):
        return {"rem": list(self.rem.items), "add": list(self.add.items)}


class ChangeBackend(Backend):
    name = "change"

    # ---------------------------------------------------------- objects
    def base_object(self, name: str, spec: dict) -> SemObject:
        kind = spec.get("kind")
        if kind == "int":
            lo, hi = spec.get("sample", [-3, 3])
            info = {"kind": "int", "points": list(range(int(lo), int(hi) + 1)), "unique": True}
        elif kind == "bag":
            universe = [int(u) for u in spec.get("universe", [0, 1, 2])]
            size = int(spec.get("max_size", 2))
            pts = [Bag(c) for k in range(size + 1) for c in itertools.combinations_with_replacement(universe, k)]
            info = {"kind": "bag", "points": pts, "unique": True}
        elif kind == "finite":
            pts = [_atom(p) for p in spec["points"]]
            if "changes" in spec:
                table = [(_atom(x), _atom(d), _atom(y)) for x, d, y in spec["changes"]]
            else:
                table = [(x, y, y) for x in pts for y in pts]
            plus = {}
            for x, d, y in table:
                if (x, d) in plus and plus[x, d] != y:
                    raise ValueError(f"change structure {name}: {x} ⊕ {d} is not a function")
                plus[x, d] = y
            minus = {}
            for x, d, y in table:
                minus.setdefault((y, x), d)
            counts = Counter((x, y) for x, _, y in table)
            unique = all(counts[x, y] == 1 for x in pts for y in pts)
            if spec.get("unique") and not unique:
                raise ValueError(f"change structure {name} is declared unique but has parallel changes")
            info = {"kind": "finite", "points": pts, "plus": plus, "minus": minus, "unique": unique}
        else:
            raise ValueError(f"change structure {name}: unknown kind {kind!r}")
        obj = SemObject("base", name, info=info)
        bad = cs_violations(self, obj)
        if bad:
            raise ValueError(f"change structure {name} violates the axioms: {bad[0]}")
        return obj

    def base_points(self, obj: SemObject) -> list:
        return obj.info["points"]

    def parse_base(self, obj, data):
        k = obj.info["kind"]
        if k == "int":
            v = to_number(data)
            if v.denominator != 1:
                raise ValueError(f"{data} is not an integer")
            return int(v)
        if k == "bag":
            return Bag(data)
        return _atom(data)

    def numeral(self, text, obj):
        return self.parse_point(obj, text)

    def unique(self, obj: SemObject) -> bool:
        if obj.kind == "base":
            return obj.info["unique"]
        return all(self.unique(p) for p in obj.parts)

    # ---------------------------------------------------- ⊕, ⊖, validity
    def oplus(self, obj: SemObject, x, d):
        k = obj.kind
        if k == "base":
            kind = obj.info["kind"]
            if kind == "int":
                return x + d
            if kind == "bag":
                c = x.counter()
                if d.rem.counter() - c:
                    raise ModelSoundnessFailure(f"{d} is not a change at {x}")
                return Bag((c - d.rem.counter() + d.add.counter()).elements())
            try:
                return obj.info["plus"][x, d]
            except KeyError:
                raise ModelSoundnessFailure(f"{d} is not a change at {x}")
        if k == "product":
            return (self.oplus(obj.parts[0], x[0], d[0]), self.oplus(obj.parts[1], x[1], d[1]))
        dom, cod = obj.parts
        return lambda a: self.oplus(cod, x(a), d(a, self.zero(dom, a)))

    def ominus(self, obj: SemObject, y, x):
        """y ⊖ x: the change from x to y."""
        k = obj.kind
        if k == "base":
            kind = obj.info["kind"]
            if kind == "int":
                return y - x
            if kind == "bag":
                cy, cx = y.counter(), x.counter()
                return BagChange((cx - cy).elements(), (cy - cx).elements())
            return obj.info["minus"][y, x]
        if k == "product":
            return (self.ominus(obj.parts[0], y[0], x[0]), self.ominus(obj.parts[1], y[1], x[1]))
        dom, cod = obj.parts
        return lambda a, da: self.ominus(cod, y(self.oplus(dom, a, da)), x(a))

    def zero(self, obj: SemObject, x):
        return self.ominus(obj, x, x)

    def compose(self, obj: SemObject, x, d1, d2):
        """d1 + d2 at x, with d2 based at x ⊕ d1."""
        return self.ominus(obj, self.oplus(obj, self.oplus(obj, x, d1), d2), x)

    def inverse(self, obj: SemObject, x, d):
        """⊖d: the change from x ⊕ d back to x."""
        return self.ominus(obj, x, self.oplus(obj, x, d))

    def is_change(self, obj: SemObject, x, d) -> bool:
        k = obj.kind
        if k == "base":
            kind = obj.info["kind"]
            if kind == "int":
                return isinstance(d, int) or (isinstance(d, Fraction) and d.denominator == 1)
            if kind == "bag":
                return isinstance(d, BagChange) and not (d.rem.counter() - x.counter())
            return (x, d) in obj.info["plus"]
        if k == "product":
            return self.is_change(obj.parts[0], x[0], d[0]) and self.is_change(obj.parts[1], x[1], d[1])
        dom, cod = obj.parts
        return all(self.is_change(cod, x(a), d(a, da)) for a, _, da in self.diff_samples(dom))

    def change_samples(self, obj: SemObject, x) -> list:
        if obj.kind == "base" and obj.info["kind"] == "finite":
            return [d for (p, d) in obj.info["plus"] if p == x]
        return [self.ominus(obj, y, x) for y in self.points(obj)]

    # ------------------------------------------------------ differences
    def refl(self, obj, v):
        if obj is None:
            raise UnsupportedDomain("the nil change needs the type of its term")
        return self.zero(obj, v)

    def filler_dist(self, Z, X, F, G, cx, x, y, d):
        y2 = self.oplus(X, x, d)
        base = F(x, y)
        d1 = self.ominus(Z, F(x, x), F(x, y2))
        d2 = self.ominus(Z, G(x, y2), G(x, x))
        return self.compose(Z, base, self.compose(Z, base, d1, cx), d2)

    def valid_diff(self, Z, lhs, rhs, v) -> bool:
        try:
            return self.is_change(Z, lhs, v) and self.eq_value(Z, self.oplus(Z, lhs, v), rhs)
        except ModelSoundnessFailure:
            return False

    def eq_diff(self, Z, a, b) -> bool:
        k = Z.kind
        if k == "base":
            return a == b
        if k == "product":
            return self.eq_diff(Z.parts[0], a[0], b[0]) and self.eq_diff(Z.parts[1], a[1], b[1])
        dom, cod = Z.parts
        return all(self.eq_diff(cod, a(x, dx), b(x, dx)) for x, _, dx in self.diff_samples(dom))

    def diff_samples(self, X: SemObject) -> list:
        out = []
        for x in self.points(X)[:12]:
            for d in self.change_samples(X, x)[:12]:
                out.append((x, self.oplus(X, x, d), d))
        return out

    def parse_diff(self, Z, data):
        if Z.kind == "product":
            return (self.parse_diff(Z.parts[0], data[0]), self.parse_diff(Z.parts[1], data[1]))
        if Z.kind != "base":
            raise ValueError("change literals are first order")
        kind = Z.info["kind"]
        if kind == "int":
            return int(to_number(data))
        if kind == "bag":
            return BagChange(data.get("rem", ()), data.get("add", ()))
        return _atom(data)

    def closed_form_i(self, cod, x, fx):
        return ((x, fx), self.nil(cod, fx))

    def nil(self, obj: SemObject, v):
        """0_v written out per structure rather than through ⊖."""
        k = obj.kind
        if k == "base":
            kind = obj.info["kind"]
            if kind == "int":
                return 0
            if kind == "bag":
                return BagChange()
            return next(d for (p, d), q in obj.info["plus"].items() if p == v and q == v)
        if k == "product":
            return (self.nil(obj.parts[0], v[0]), self.nil(obj.parts[1], v[1]))
        dom, cod = obj.parts
        return lambda a, da: change_derivative(self, dom, cod, v, a, da)

    # -------------------------------------------------------- env data
    def const_value(self, name, obj, spec, interp):
        if spec.get("builtin") == "bag_sum":
            return lambda b: sum(b.items)
        if spec.get("builtin") == "square":
            return lambda n: n * n
        return super().const_value(name, obj, spec, interp)

    def dconst_value(self, name, pred, spec, interp):
        v = super().dconst_value(name, pred, spec, interp)
        interp.require_sound(pred, v, f"dconst {name}")
        return v


def _atom(p):
    return int(p) if isinstance(p, (int, float)) and float(p).is_integer() else p


def change_derivative(backend: ChangeBackend, dom: SemObject, cod: SemObject, f: Callable, x, dx):
    """∂f(x, ∂x) = f(x ⊕ ∂x) ⊖ f(x)."""
    if not backend.is_change(dom, x, dx):
        raise ModelSoundnessFailure(f"{dx} is not a change at {x}")
    return backend.ominus(cod, f(backend.oplus(dom, x, dx)), f(x))


def cs_violations(backend: ChangeBackend, obj: SemObject) -> list:
    """Conditions y ⊖ x ∈ Δx and x ⊕ (y ⊖ x) = y on every pair of the test set."""
    bad = []
    pts = backend.points(obj)
    for x in pts:
        for y in pts:
            try:
                d = backend.ominus(obj, y, x)
            except KeyError:
                bad.append(("no change", x, y))
                continue
            if not backend.is_change(obj, x, d):
                bad.append(("not based", x, y, d))
            elif not backend.eq_value(obj, backend.oplus(obj, x, d), y):
                bad.append(("update", x, y, d))
    return bad
