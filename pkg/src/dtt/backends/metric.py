"""Metric model: pseudo-metric spaces and nonexpansive maps.

Differences are upper bounds on distances.  The self-difference is 0 and the
filler adds the transported bound to the branch: j(x, y, r) = c'(x) + r.
Only the sub-exponential calculus is interpreted: ``!_r`` rescales, ``⊗`` sums
distances and ``⊸`` carries the sup metric over the domain's test set.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from ..errors import ModelSoundnessFailure, UnsupportedDomain
from ..semantics import Backend, SemObject, strip_bang, to_number

INF = float("inf")
TOL = 1e-9


def _mul(r, d):
    if r == 0 or d == 0:
        return Fraction(0)
    return r * d


def grid(spec: dict) -> list:
    lo, hi, step = (to_number(spec[k]) for k in ("min", "max", "step"))
    if step <= 0:
        raise ValueError("grid step must be positive")
    out, x = [], lo
    while x <= hi:
        out.append(x)
        x += step
    return out


class MetricBackend(Backend):
    name = "metric"
    monoidal = True
    tolerance = TOL

    # ---------------------------------------------------------- objects
    def base_object(self, name: str, spec: dict) -> SemObject:
        kind = spec.get("kind")
        if kind == "finite":
            pts = [self._atom(p) for p in spec["points"]]
            if "dist" in spec:
                table = {
                    (a, b): to_number(spec["dist"][i][j])
                    for i, a in enumerate(pts)
                    for j, b in enumerate(pts)
                }
            else:
                table = {(a, b): Fraction(0 if a == b else 1) for a in pts for b in pts}
            info = {"kind": "finite", "points": pts, "table": table}
        elif kind == "nat":
            info = {"kind": "line", "points": [Fraction(i) for i in range(int(spec.get("max", 10)) + 1)]}
        elif kind == "real":
            info = {"kind": "line", "points": grid(spec["grid"]) if "grid" in spec else None}
        else:
            raise ValueError(f"metric base type {name}: unknown kind {kind!r}")
        obj = SemObject("base", name, info=info)
        if info["kind"] == "finite":
            bad = pms_violations(self, obj)
            if bad:
                raise ValueError(f"metric base type {name} violates the metric axioms: {bad[0]}")
        return obj

    @staticmethod
    def _atom(p):
        return to_number(p) if isinstance(p, (int, float)) else p

    def base_points(self, obj: SemObject) -> list:
        pts = obj.info["points"]
        if pts is None:
            raise UnsupportedDomain(f"real carrier {obj.ty} has no declared grid")
        return pts

    def dist(self, obj: SemObject, a, b):
        k = obj.kind
        if k == "base":
            if obj.info["kind"] == "finite":
                return obj.info["table"][(a, b)]
            return abs(a - b)
        if k == "bang":
            return _mul(obj.scale, self.dist(obj.body, a, b))
        if k == "tensor":
            return self.dist(obj.parts[0], a[0], b[0]) + self.dist(obj.parts[1], a[1], b[1])
        if k == "lolli":
            dom, cod = obj.parts
            return max((self.dist(cod, a(x), b(x)) for x in self.points(dom)), default=Fraction(0))
        raise UnsupportedDomain(f"no metric on {obj.ty}")

    def function_points(self, obj: SemObject) -> list:
        # constants and the identity-like shifts are nonexpansive at every scale
        dom, cod = obj.parts
        out = [(lambda c: (lambda _k: c))(c) for c in self.points(cod)[: self.samples]]
        if strip_bang(dom).kind == "base" and strip_bang(cod).kind == "base" and strip_bang(dom).info["kind"] == "line":
            scale = dom.scale if dom.kind == "bang" else 1
            if scale >= 1:
                out.append(lambda k: k)
        return out

    # ------------------------------------------------------ differences
    def refl(self, obj, v):
        return Fraction(0)

    def filler_dist(self, Z, X, F, G, cx, x, y, d):
        return cx + d

    def valid_diff(self, Z, lhs, rhs, v) -> bool:
        return v >= 0 and v + TOL >= self.dist(Z, lhs, rhs)

    def eq_diff(self, Z, a, b) -> bool:
        if a == INF or b == INF:
            return a == b
        return abs(a - b) <= TOL

    def diff_samples(self, X: SemObject) -> list:
        pts = self.points(X)[:8]
        out = []
        for a in pts:
            for b in pts:
                d = self.dist(X, a, b)
                out.append((a, b, d))
                out.append((a, b, d + Fraction(1, 2)))
        return out

    def parse_diff(self, Z, data):
        v = to_number(data)
        if v < 0:
            raise ValueError("a metric difference is a nonnegative bound")
        return v

    def closed_form_i(self, cod, x, fx):
        return ((x, fx), 0)

    # -------------------------------------------------------- env data
    def const_value(self, name, obj, spec, interp):
        v = super().const_value(name, obj, spec, interp)
        if obj.kind == "lolli" and spec.get("check", True):
            lipschitz_violation(self, obj, v, name)
        return v

    def dconst_value(self, name, pred, spec, interp):
        kind = spec.get("kind", "value")
        if kind == "value":
            return super().dconst_value(name, pred, spec, interp)
        if kind == "dist":
            return interp.pred_function(pred, lambda Z, l, r, ds: self.dist(Z, l, r))
        if kind == "sum":
            factor = to_number(spec.get("factor", 1))
            return interp.pred_function(pred, lambda Z, l, r, ds: factor * sum(ds, Fraction(0)))
        raise ValueError(f"dconst {name}: unknown kind {kind!r}")


def lipschitz_violation(backend: MetricBackend, obj: SemObject, f: Callable, name: str = "f"):
    """Raise if ``f`` is not nonexpansive from the (rescaled) domain on samples."""
    dom, cod = obj.parts
    pts = backend.points(dom)[:16]
    for x in pts:
        for y in pts:
            lhs = backend.dist(cod, f(x), f(y))
            rhs = backend.dist(dom, x, y)
            if lhs > rhs + TOL:
                raise ModelSoundnessFailure(
                    f"{name} is not nonexpansive at {x}, {y}: output distance {lhs} exceeds {rhs}"
                )


def pms_violations(backend: MetricBackend, obj: SemObject) -> list:
    """The pseudo-metric axioms, checked on every triple of the test set."""
    pts = backend.points(obj)
    d = lambda a, b: backend.dist(obj, a, b)
    bad = []
    for a in pts:
        if d(a, a) != 0:
            bad.append(("reflexivity", a))
        for b in pts:
            if d(a, b) < 0:
                bad.append(("nonnegativity", a, b))
            if abs(d(a, b) - d(b, a)) > TOL:
                bad.append(("symmetry", a, b))
            for c in pts:
                if d(a, b) > d(a, c) + d(c, b) + TOL:
                    bad.append(("triangle", a, b, c))
    return bad


def rescale(r, obj: SemObject) -> SemObject:
    """!_r X as a standalone object."""
    r = Fraction(r)
    if r < 0:
        raise ValueError("negative rescaling")
    return SemObject("bang", obj.ty, (obj,), scale=r)


def m_derivative(backend: MetricBackend, obj: SemObject, f: Callable) -> Callable:
    """Closed form of Der f for a nonexpansive f : X ⊸ Y: (x, y, ε) ↦ ε."""
    lipschitz_violation(backend, obj, f)
    return lambda x, y, e: e


# ------------------------------------------------------------- perforation


def perforation_source(n: int, r) -> tuple:
    """The loop-perforation error term for H averaging f(0..n), and its env.

    f : !_r Nat ⊸ Real and the perforated f* repeats every even sample.  The
    per-sample differences d(i) are refl at even i and Der f at odd i; they
    are combined in the tensor and rescaled into the domain of H.
    """
    r = Fraction(r)
    s = Fraction(1, n + 1)
    rs, ss = _scale(r), _scale(s)

    def tensor_ty(k):
        return "Real" if k == n else f"(Real ** {tensor_ty(k + 1)})"

    def tup(values, k=0):
        return values[k] if k == n else f"({values[k]}, {tup(values, k + 1)})"

    star = [i - (i % 2) for i in range(n + 1)]
    pts = [f"(f !{i})" for i in range(n + 1)]
    spts = [f"(f !{star[i]})" for i in range(n + 1)]
    lines = [
        "-- Loop perforation of index 2 on the average of f(0), ..., f(N).",
        "calculus fuzz",
        "type Nat",
        "type Real",
        "literals Nat",
        f"const f : !{rs} Nat -o Real",
        f"const H : !{ss} {tensor_ty(0)} -o Real",
        "dconst step : Pi x y : Nat. D[Nat](x, y)",
        f"dconst resc : Pi x y : Nat. D[Nat](x, y) -> D[!{rs} Nat](!x, !y)",
        f"dconst avg : Pi p q : {tensor_ty(0)}. D[{tensor_ty(0)}](p, q) -> D[!{ss} {tensor_ty(0)}](!p, !q)",
    ]
    for k in range(n):
        rest = tensor_ty(k + 1)
        lines.append(
            f"dconst tens{k} : Pi x y : Real. D[Real](x, y) -> Pi p q : {rest}. D[{rest}](p, q) -> "
            f"D[{tensor_ty(k)}]((x, p), (y, q))"
        )
    for i in range(n + 1):
        if i % 2 == 0:
            body = f"refl (f !{i})"
        else:
            body = f"Der f !{i} !{i - 1} (resc {i} {i - 1} (step {i} {i - 1}))"
        lines.append(f"def d{i} : D[Real](f !{i}, f !{star[i]}) := {body}")

    def combined(k):
        if k == n:
            return f"d{n}"
        return f"tens{k} {pts[k]} {spts[k]} d{k} {tup(pts, k + 1)} {tup(spts, k + 1)} ({combined(k + 1)})"

    v, vs = tup(pts), tup(spts)
    lines.append(
        f"def perforation : D[Real](H !{v}, H !{vs}) :=\n  Der H !{v} !{vs} (avg {v} {vs} ({combined(0)}))"
    )
    env = {
        "backend": "metric",
        "types": {"Nat": {"kind": "nat", "max": n}, "Real": {"kind": "real"}},
        "consts": {"f": {"poly": [1, str(r)], "check": True}, "H": {"sum": str(s), "check": False}},
        "dconsts": {
            "step": {"kind": "dist"},
            "resc": {"kind": "sum", "factor": str(r)},
            "avg": {"kind": "sum", "factor": str(s)},
            **{f"tens{k}": {"kind": "sum"} for k in range(n)},
        },
    }
    return "\n".join(lines) + "\n", env


def _scale(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def perforation_bound(n: int, r) -> Fraction:
    """The closed form (⌊N/2⌋+1)/(N+1)·r."""
    return Fraction(n // 2 + 1, n + 1) * Fraction(r)
