"""Differential logical relations.

A DLR is a ternary relation ρ ⊆ X × L × X over a complete lattice L.  The
distance ‖x, y‖ is the meet of ρ̃(x, y); the self-difference of x is ‖x, x‖,
and the filler at a distance leaf is the join of the branch with the
distances reachable inside the ε-ball around x.

Function spaces use lattice values φ(x, y, ε) that read only (x, ε): the
sup over the ε-ball of the four cross distances.  This is the image of the
retraction between X×L- and X×X×L-indexed maps, and it makes ∂(f) coincide
with Der f.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, Optional

from ..errors import UnsupportedDomain
from ..semantics import Backend, SemObject, to_number
from .metric import grid

INF = float("inf")


class Lattice:
    """A finite lattice given by its order; joins and meets are tabulated."""

    def __init__(self, elements: list, leq_pairs):
        self.elements = list(elements)
        idx = {e: i for i, e in enumerate(self.elements)}
        n = len(self.elements)
        le = [[i == j for j in range(n)] for i in range(n)]
        for a, b in leq_pairs:
            le[idx[a]][idx[b]] = True
        for k in range(n):  # transitive closure
            for i in range(n):
                if le[i][k]:
                    for j in range(n):
                        if le[k][j]:
                            le[i][j] = True
        for i in range(n):
            for j in range(n):
                if i != j and le[i][j] and le[j][i]:
                    raise ValueError(f"order is not antisymmetric on {self.elements[i]}, {self.elements[j]}")
        self._le = le
        self._idx = idx
        self._join = {}
        self._meet = {}
        for i in range(n):
            for j in range(n):
                self._join[i, j] = self._extreme([k for k in range(n) if le[i][k] and le[j][k]], least=True)
                self._meet[i, j] = self._extreme([k for k in range(n) if le[k][i] and le[k][j]], least=False)
        self.bottom = self.elements[self._extreme(list(range(n)), least=True)]
        self.top = self.elements[self._extreme(list(range(n)), least=False)]

    def _extreme(self, cands: list, least: bool) -> int:
        for c in cands:
            if all((self._le[c][o] if least else self._le[o][c]) for o in cands):
                return c
        raise ValueError("not a lattice: a pair has no " + ("join" if least else "meet"))

    def leq(self, a, b) -> bool:
        return self._le[self._idx[a]][self._idx[b]]

    def join(self, xs) -> object:
        acc = self._idx[self.bottom]
        for x in xs:
            acc = self._join[acc, self._idx[x]]
        return self.elements[acc]

    def meet(self, xs) -> object:
        acc = self._idx[self.top]
        for x in xs:
            acc = self._meet[acc, self._idx[x]]
        return self.elements[acc]

    def samples(self) -> list:
        return list(self.elements)


class Reals:
    """ℝ≥0 ∪ {∞} ordered as usual."""

    bottom = Fraction(0)
    top = INF

    def leq(self, a, b) -> bool:
        return a <= b

    def join(self, xs):
        return max(xs, default=Fraction(0))

    def meet(self, xs):
        return min(xs, default=INF)

    def samples(self) -> list:
        return [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)]


def lattice_from_spec(spec) -> Lattice:
    if "chain" in spec:
        els = [_atom(e) for e in spec["chain"]]
        return Lattice(els, list(zip(els, els[1:])))
    els = [_atom(e) for e in spec["elements"]]
    return Lattice(els, [(_atom(a), _atom(b)) for a, b in spec.get("leq", [])])


def _memo(fn: Callable) -> Callable:
    """Cache a difference function at an arrow on its (hashable) samples."""
    if getattr(fn, "_memo", False):
        return fn
    table: dict = {}

    def out(*args):
        try:
            key = args
            hash(key)
        except TypeError:
            return fn(*args)
        if key not in table:
            table[key] = fn(*args)
        return table[key]

    out._memo = True
    return out


def _atom(p):
    return to_number(p) if isinstance(p, (int, float)) else p


class DLRBackend(Backend):
    name = "dlr"
    product_pidiff = True

    # ---------------------------------------------------------- objects
    def base_object(self, name: str, spec: dict) -> SemObject:
        kind = spec.get("kind")
        if kind == "euclidean":
            pts = grid(spec["grid"]) if "grid" in spec else None
            info = {"kind": "euclidean", "points": pts, "lattice": Reals(), "step": to_number(spec["grid"]["step"]) if pts else None}
        elif kind == "finite":
            pts = [_atom(p) for p in spec["points"]]
            lat = lattice_from_spec(spec["lattice"])
            rel = {(_atom(x), _atom(e), _atom(y)) for x, e, y in spec["rel"]}
            info = {"kind": "finite", "points": pts, "lattice": lat, "rel": rel}
        elif kind == "discrete":
            pts = [_atom(p) for p in spec["points"]]
            lat = Lattice([0, 1], [(0, 1)])
            rel = {(x, e, y) for x in pts for y in pts for e in (0, 1) if x == y or e == 1}
            info = {"kind": "finite", "points": pts, "lattice": lat, "rel": rel}
        else:
            raise ValueError(f"DLR base type {name}: unknown kind {kind!r}")
        obj = SemObject("base", name, info=info)
        if info["kind"] == "finite" and spec.get("require_separated", True):
            bad = separation_violations(self, obj)
            if bad:
                raise ValueError(f"DLR base type {name} is not separated: {bad[0]}")
        return obj

    def function_points(self, obj: SemObject) -> list:
        dom, cod = obj.parts
        if dom.kind == "base" and dom.info["kind"] == "euclidean":
            # tables would be undefined off the grid; use constants and affine maps
            out = [(lambda c: (lambda _k: c))(c) for c in self.points(cod)[:3]]
            if cod.kind == "base" and cod.info["kind"] == "euclidean":
                for a, b in ((1, 0), (-1, 2), (2, 0), (Fraction(1, 2), 1)):
                    out.append((lambda a, b: (lambda k: a * k + b))(a, b))
            return out
        return super().function_points(obj)

    def base_points(self, obj: SemObject) -> list:
        pts = obj.info["points"]
        if pts is None:
            raise UnsupportedDomain(f"Euclidean carrier {obj.ty} has no declared grid")
        return pts

    # ----------------------------------------------------- lattice ops
    def rel(self, obj: SemObject, a, e, b) -> bool:
        k = obj.kind
        if k == "base":
            if obj.info["kind"] == "euclidean":
                return e >= abs(a - b)
            return (a, e, b) in obj.info["rel"]
        if k == "product":
            return self.rel(obj.parts[0], a[0], e[0], b[0]) and self.rel(obj.parts[1], a[1], e[1], b[1])
        if k == "arrow":
            dom, cod = obj.parts
            for x, y, eps in self.diff_samples(dom):
                phi = e(x, y, eps)
                for u, v in ((a(x), a(y)), (a(x), b(y)), (b(x), a(y)), (b(x), b(y))):
                    if not self.rel(cod, u, phi, v):
                        return False
            return True
        raise UnsupportedDomain(f"no DLR structure on {obj.ty}")

    def join(self, obj: SemObject, vals: list):
        k = obj.kind
        if k == "base":
            return obj.info["lattice"].join(vals)
        if k == "product":
            return (self.join(obj.parts[0], [v[0] for v in vals]), self.join(obj.parts[1], [v[1] for v in vals]))
        cod = obj.parts[1]
        return lambda x, y, e: self.join(cod, [v(x, y, e) for v in vals])

    def ball(self, X: SemObject, x, eps) -> list:
        if X.kind == "product":
            # the product relation is componentwise, so its balls are products
            return list(itertools.product(self.ball(X.parts[0], x[0], eps[0]), self.ball(X.parts[1], x[1], eps[1])))
        if X.kind == "arrow":
            eps = _memo(eps)
        out = [z for z in self.points(X) if self.rel(X, x, eps, z)]
        if X.kind == "base" and X.info["kind"] == "euclidean" and eps != INF:
            # off-grid centres: the interval's endpoints bound the sup for the
            # monotone and convex maps we interpret
            out += [x - eps, x, x + eps]
        return out

    def dist(self, obj: SemObject, a, b):
        """‖a, b‖: the meet of ρ̃(a, b), structurally."""
        k = obj.kind
        if k == "base":
            if obj.info["kind"] == "euclidean":
                return abs(a - b)
            lat = obj.info["lattice"]
            return lat.meet([e for e in lat.elements if (a, e, b) in obj.info["rel"]])
        if k == "product":
            return (self.dist(obj.parts[0], a[0], b[0]), self.dist(obj.parts[1], a[1], b[1]))
        dom, cod = obj.parts

        def phi(x, _y, eps):
            out = []
            for z in self.ball(dom, x, eps):
                for u, v in ((a(x), a(z)), (a(x), b(z)), (b(x), a(z)), (b(x), b(z))):
                    out.append(self.dist(cod, u, v))
            return self.join(cod, out)

        return _memo(phi)

    # ------------------------------------------------------ differences
    def refl(self, obj, v):
        if obj is None:
            raise UnsupportedDomain("the DLR self-difference needs the type of its term")
        return self.dist(obj, v, v)

    def filler_dist(self, Z, X, F, G, cx, x, y, d):
        reach = [self.dist(Z, F(x, z), G(x, z)) for z in self.ball(X, x, d)]
        return self.join(Z, [cx] + reach)

    def valid_diff(self, Z, lhs, rhs, v) -> bool:
        return self.rel(Z, lhs, v, rhs)

    def eq_diff(self, Z, a, b) -> bool:
        k = Z.kind
        if k == "base":
            return a == b
        if k == "product":
            return self.eq_diff(Z.parts[0], a[0], b[0]) and self.eq_diff(Z.parts[1], a[1], b[1])
        dom, cod = Z.parts
        return all(self.eq_diff(cod, a(x, y, e), b(x, y, e)) for x, y, e in self.diff_samples(dom))

    def lattice_samples(self, obj: SemObject) -> list:
        if obj.kind == "base":
            return obj.info["lattice"].samples()
        if obj.kind == "product":
            return list(itertools.product(self.lattice_samples(obj.parts[0]), self.lattice_samples(obj.parts[1])))
        return []

    def diff_samples(self, X: SemObject) -> list:
        cache = X.info if X.kind == "base" else None
        if cache is not None and "triples" in cache:
            return cache["triples"]
        pts = self.points(X)
        if X.kind == "base" and X.info["kind"] == "euclidean":
            pts = pts[:: max(1, len(pts) // 9)]
        elif X.kind == "arrow" and len(pts) > self.samples:
            half = self.samples // 2
            pts = pts[:half] + pts[len(pts) - (self.samples - half):]
        out = []
        for a in pts:
            for b in pts:
                for e in self.lattice_samples(X):
                    if self.rel(X, a, e, b):
                        out.append((a, b, e))
                if X.kind == "arrow":
                    out.append((a, b, self.dist(X, a, b)))
        if cache is not None:
            cache["triples"] = out
        return out

    def parse_diff(self, Z, data):
        if Z.kind == "product":
            return (self.parse_diff(Z.parts[0], data[0]), self.parse_diff(Z.parts[1], data[1]))
        if Z.kind != "base":
            raise ValueError("DLR difference literals are first order")
        return to_number(data) if Z.info["kind"] == "euclidean" else _atom(data)

    def closed_form_i(self, cod, x, fx):
        return ((x, fx), self.norm(cod, fx))

    def norm(self, obj: SemObject, v):
        """‖v‖_ρ computed by enumeration of ρ̃(v, v), independent of ``dist``."""
        if obj.kind == "base" and obj.info["kind"] == "finite":
            lat = obj.info["lattice"]
            below = [e for e in lat.elements if (v, e, v) in obj.info["rel"]]
            cands = [m for m in lat.elements if all(lat.leq(m, e) for e in below)]
            return next(m for m in cands if all(lat.leq(o, m) for o in cands))
        if obj.kind == "base":
            return Fraction(0)
        if obj.kind == "product":
            return (self.norm(obj.parts[0], v[0]), self.norm(obj.parts[1], v[1]))
        return self.dist(obj, v, v)

    def eq_base(self, obj, a, b) -> bool:
        return a == b


# ---------------------------------------------------------- structure checks


def separation_violations(backend: DLRBackend, obj: SemObject) -> list:
    """ρ(x, ‖x‖, y) must imply x = y."""
    bad = []
    for x in backend.points(obj):
        n = backend.dist(obj, x, x)
        for y in backend.points(obj):
            if y != x and backend.rel(obj, x, n, y):
                bad.append((x, n, y))
    return bad


def is_complete(backend: DLRBackend, obj: SemObject) -> bool:
    """sup{‖x, y‖ | ρ(x, ε, y)} = ε for every x and every lattice element ε."""
    lat = obj.info["lattice"]
    for x in backend.points(obj):
        for e in lat.samples():
            reach = [backend.dist(obj, x, y) for y in backend.points(obj) if backend.rel(obj, x, e, y)]
            if lat.join(reach) != e:
                return False
    return True


def dlr_derivative(backend: DLRBackend, dom: SemObject, cod: SemObject, h: Callable) -> Callable:
    """Closed form of Der h: (x, y, ε) ↦ sup{‖h x, h z‖ | ρ(x, ε, z)}."""
    return lambda x, y, e: backend.join(cod, [backend.dist(cod, h(x), h(z)) for z in backend.ball(dom, x, e)])


# ------------------------------------------------------------ brute force


def brute_force_oracle(space_x: dict, space_z: dict, request: dict):
    """The filler formula evaluated by direct enumeration.

    ``space_*`` hold raw ``points``, lattice ``elements``, ``leq`` pairs (any
    generating set) and ``rel`` triples.  ``request`` gives the base point
    ``x``, the radius ``eps``, tables ``F`` and ``G`` keyed by (x, z), and the
    branch value ``c``.  Nothing is precomputed or shared with the backend.
    """
    els = space_z["elements"]
    order = set(space_z["leq"]) | {(e, e) for e in els}
    changed = True
    while changed:
        changed = False
        for a, b in list(order):
            for c, d in list(order):
                if b == c and (a, d) not in order:
                    order.add((a, d))
                    changed = True

    def le(a, b):
        return (a, b) in order

    def inf(s):
        lbs = [m for m in els if all(le(m, e) for e in s)]
        return [m for m in lbs if all(le(o, m) for o in lbs)][0]

    def sup(s):
        ubs = [m for m in els if all(le(e, m) for e in s)]
        return [m for m in ubs if all(le(m, o) for o in ubs)][0]

    x, eps = request["x"], request["eps"]
    cands = [request["c"]]
    for z in space_x["points"]:
        if (x, eps, z) in space_x["rel"]:
            fz, gz = request["F"][(x, z)], request["G"][(x, z)]
            cands.append(inf([e for e in els if (fz, e, gz) in space_z["rel"]]))
    return sup(cands)


def random_lattice(rng, max_size: int = 8) -> tuple:
    """A random closure system on a 3-element set: a complete lattice under ⊆."""
    while True:
        full = frozenset(range(3))
        fam = {full}
        for _ in range(rng.randint(0, 5)):
            fam.add(frozenset(i for i in range(3) if rng.random() < 0.5))
        closed = False
        while not closed:
            closed = True
            for a in list(fam):
                for b in list(fam):
                    if a & b not in fam:
                        fam.add(a & b)
                        closed = False
        if len(fam) <= max_size:
            els = sorted(fam, key=lambda s: (len(s), sorted(s)))
            names = ["".join(map(str, sorted(s))) or "e" for s in els]
            leq = [(names[i], names[j]) for i, a in enumerate(els) for j, b in enumerate(els) if a <= b]
            return names, leq


def random_dlr(rng, max_points: int = 5, max_lattice: int = 8, density: float = 0.35) -> dict:
    """A random separated finite DLR as an env spec."""
    n = rng.randint(1, max_points)
    pts = list(range(n))
    els, leq = random_lattice(rng, max_lattice)
    bottom = els[0]
    rel = set()
    for x in pts:
        rel.add((x, bottom, x))
        for e in els:
            for y in pts:
                if e != bottom and rng.random() < density:
                    rel.add((x, e, y))
    return {"kind": "finite", "points": pts, "lattice": {"elements": els, "leq": leq}, "rel": sorted(rel)}
