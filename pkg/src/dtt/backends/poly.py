"""Sparse multivariate polynomials over the rationals, and polynomial arrows
ℝⁿ → ℝᵐ with the cartesian differential operator."""

from __future__ import annotations

from fractions import Fraction
from itertools import product as iproduct
from typing import Iterable, Sequence


def _frac(c) -> Fraction:
    if isinstance(c, float):
        return Fraction(str(c))
    return Fraction(c)


class Poly:
    """Polynomial in ``nvars`` variables: a map from exponent tuples to coefficients."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        out = {}
        for exps, c in (terms or {}).items():
            c = _frac(c)
            if c != 0:
                exps = tuple(exps)
                if len(exps) != nvars:
                    raise ValueError(f"exponent vector {exps} does not have {nvars} entries")
                out[exps] = out.get(exps, Fraction(0)) + c
                if out[exps] == 0:
                    del out[exps]
        self.terms = out

    @classmethod
    def const(cls, nvars: int, c) -> "Poly":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def from_list(cls, nvars: int, spec) -> "Poly":
        """``[[coeff, [e1, ..., en]], ...]`` as used in env files."""
        return cls(nvars, {tuple(e): _frac(c) for c, e in spec})

    def to_list(self) -> list:
        return [[str(c), list(e)] for e, c in sorted(self.terms.items())]

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_value(self):
        if all(sum(e) == 0 for e in self.terms):
            return self.terms.get((0,) * self.nvars, Fraction(0))
        return None

    def _lift(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials over different variable counts")
            return other
        return Poly.const(self.nvars, other)

    def __add__(self, other):
        if not isinstance(other, (Poly, int, Fraction, float)):
            return NotImplemented
        other = self._lift(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Poly(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (Poly, int, Fraction, float)):
            return NotImplemented
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, (Poly, int, Fraction, float)):
            return NotImplemented
        other = self._lift(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Poly(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly.const(self.nvars, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.const(self.nvars, other).terms
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"Poly({self.nvars}, {self.show()})"

    def show(self, names: Sequence[str] = ()) -> str:
        if not self.terms:
            return "0"
        names = list(names) or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), kv[0])):
            mono = "*".join(n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def eval(self, point: Sequence):
        """Evaluate at ``point``, whose entries may be numbers or any ring values."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} arguments, got {len(point)}")
        total = 0
        for e, c in self.terms.items():
            mono = c
            for v, k in zip(point, e):
                for _ in range(k):
                    mono = mono * v
            total = mono + total
        return total

    def partial(self, i: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                out[tuple(d)] = out.get(tuple(d), Fraction(0)) + c * e[i]
        return Poly(self.nvars, out)


def compose_poly(p: Poly, args: Sequence[Poly], nvars: int) -> Poly:
    out = Poly.const(nvars, 0)
    for e, c in p.terms.items():
        mono = Poly.const(nvars, c)
        for a, k in zip(args, e):
            if k:
                mono = mono * (a ** k)
        out = out + mono
    return out


class PolyArrow:
    """An arrow ℝ^dom → ℝ^cod given by ``cod`` polynomials in ``dom`` variables."""

    __slots__ = ("dom", "cod", "comps")

    def __init__(self, dom: int, comps: Iterable[Poly]):
        self.dom = dom
        self.comps = tuple(comps)
        self.cod = len(self.comps)
        for c in self.comps:
            if c.nvars != dom:
                raise ValueError("component over the wrong number of variables")

    @classmethod
    def from_spec(cls, dom: int, spec) -> "PolyArrow":
        return cls(dom, [Poly.from_list(dom, comp) for comp in spec])

    def to_spec(self) -> list:
        return [c.to_list() for c in self.comps]

    def __eq__(self, other):
        return isinstance(other, PolyArrow) and (self.dom, self.comps) == (other.dom, other.comps)

    def __hash__(self):
        return hash((self.dom, self.comps))

    def __repr__(self):
        return f"PolyArrow({self.dom}->{self.cod}: {[c.show() for c in self.comps]})"

    def __call__(self, *point):
        out = [c.eval(point) for c in self.comps]
        return out

    def __add__(self, other: "PolyArrow") -> "PolyArrow":
        _same(self, other)
        return PolyArrow(self.dom, [a + b for a, b in zip(self.comps, other.comps)])

    def then(self, g: "PolyArrow") -> "PolyArrow":
        """g ∘ self."""
        if g.dom != self.cod:
            raise ValueError(f"cannot compose {self.dom}->{self.cod} with {g.dom}->{g.cod}")
        return PolyArrow(self.dom, [compose_poly(c, self.comps, self.dom) for c in g.comps])


def _same(f: PolyArrow, g: PolyArrow):
    if (f.dom, f.cod) != (g.dom, g.cod):
        raise ValueError(f"arrows {f.dom}->{f.cod} and {g.dom}->{g.cod} are not parallel")


# ------------------------------------------------------- cartesian structure


def identity(n: int) -> PolyArrow:
    return PolyArrow(n, [Poly.var(n, i) for i in range(n)])


def zero(dom: int, cod: int) -> PolyArrow:
    return PolyArrow(dom, [Poly.const(dom, 0) for _ in range(cod)])


def proj(n: int, m: int, side: int) -> PolyArrow:
    """Projection ℝ^(n+m) → ℝ^n (side 1) or ℝ^m (side 2)."""
    idx = range(n) if side == 1 else range(n, n + m)
    return PolyArrow(n + m, [Poly.var(n + m, i) for i in idx])


def pair(f: PolyArrow, g: PolyArrow) -> PolyArrow:
    if f.dom != g.dom:
        raise ValueError("pairing arrows with different domains")
    return PolyArrow(f.dom, f.comps + g.comps)


def times(f: PolyArrow, g: PolyArrow) -> PolyArrow:
    """f × g on ℝ^(f.dom + g.dom)."""
    n = f.dom + g.dom
    return pair(proj(f.dom, g.dom, 1).then(f), proj(f.dom, g.dom, 2).then(g))


# ---------------------------------------------------------- derivative


def derive(f: PolyArrow) -> PolyArrow:
    """∂f : ℝ^n × ℝ^n → ℝ^m with ∂f(v, x) = Jf(x)·v.

    The first block of variables is the direction, the second the point.
    """
    n = f.dom
    vs = [Poly.var(2 * n, i) for i in range(n)]
    xs = [Poly.var(2 * n, n + i) for i in range(n)]
    comps = []
    for c in f.comps:
        total = Poly.const(2 * n, 0)
        for i in range(n):
            total = total + vs[i] * compose_poly(c.partial(i), xs, 2 * n)
        comps.append(total)
    return PolyArrow(2 * n, comps)


def derive_oracle(f: PolyArrow) -> PolyArrow:
    """Independent route: the coefficient of t in f(x + t·v)."""
    n = f.dom
    # variables: v (n), x (n), t (1)
    m = 2 * n + 1
    t = Poly.var(m, 2 * n)
    shifted = [Poly.var(m, n + i) + t * Poly.var(m, i) for i in range(n)]
    comps = []
    for c in f.comps:
        g = compose_poly(c, shifted, m)
        lin = {}
        for e, k in g.terms.items():
            if e[-1] == 1:
                lin[e[:-1]] = lin.get(e[:-1], Fraction(0)) + k
        comps.append(Poly(2 * n, lin))
    return PolyArrow(2 * n, comps)


def curry_derive(f: PolyArrow, n: int) -> PolyArrow:
    """∂(λf) for f: ℝ^n × ℝ^k → ℝ^m, presented uncurried.

    λf sends x to the polynomial map y ↦ f(x, y); its derivative at x in
    direction v is again a map of y.  Computed by differentiating in the x
    block only, with the y variables kept as parameters.  Result variables:
    v (n), x (n), y (k).
    """
    k = f.dom - n
    total = 2 * n + k
    vs = [Poly.var(total, i) for i in range(n)]
    args = [Poly.var(total, n + i) for i in range(n + k)]
    comps = []
    for c in f.comps:
        out = Poly.const(total, 0)
        for i in range(n):
            out = out + vs[i] * compose_poly(c.partial(i), args, total)
        comps.append(out)
    return PolyArrow(total, comps)


# -------------------------------------------------------------- axioms


def _rand_poly(rng, nvars: int, degree: int, terms: int = 4) -> Poly:
    out = {}
    for _ in range(terms):
        e = [0] * nvars
        for _ in range(rng.randint(0, degree)):
            e[rng.randrange(nvars)] += 1
        out[tuple(e)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return Poly(nvars, out)


def random_arrow(rng, dom: int, cod: int, degree: int = 3) -> PolyArrow:
    return PolyArrow(dom, [_rand_poly(rng, dom, degree) for _ in range(cod)])


def check_axioms(f: PolyArrow, g: PolyArrow, rng, extra: PolyArrow = None) -> dict:
    """Verify D1–D7 and D-curry as exact identities.

    ``f: ℝ^n → ℝ^m`` and ``g: ℝ^m → ℝ^p``; ``extra`` is a second arrow parallel
    to ``f`` for D1 (random if omitted).  Returns {axiom: (ok, witness)} where
    a failing witness is a point at which the two sides differ.
    """
    n, m = f.dom, f.cod
    h = extra if extra is not None else random_arrow(rng, n, m)
    report = {}

    def agree(name, lhs: PolyArrow, rhs: PolyArrow):
        ok = lhs == rhs
        witness = None
        if not ok:
            pt = [Fraction(rng.randint(-3, 3)) for _ in range(lhs.dom)]
            witness = (pt, lhs(*pt), rhs(*pt))
        prev = report.get(name)
        report[name] = (ok and (prev is None or prev[0]), witness if prev is None or prev[0] else prev[1])

    df = derive(f)
    # D1
    agree("D1", derive(f + h), derive(f) + derive(h))
    agree("D1", derive(zero(n, m)), zero(2 * n, m))
    # D2: additivity in the direction, at arbitrary arrows h1, h2, v : ℝ^q → ℝ^n
    q = n
    a1, a2, v = (random_arrow(rng, q, n, 2) for _ in range(3))
    agree("D2", pair(a1 + a2, v).then(df), pair(a1, v).then(df) + pair(a2, v).then(df))
    agree("D2", pair(zero(q, n), v).then(df), zero(q, m))
    # D3
    agree("D3", derive(identity(n)), proj(n, n, 1))
    if n >= 2:
        k = n - 1
        p1, p2 = proj(1, k, 1), proj(1, k, 2)
        agree("D3", derive(p1), proj(n, n, 1).then(p1))
        agree("D3", derive(p2), proj(n, n, 1).then(p2))
    # D4
    agree("D4", derive(pair(f, h)), pair(derive(f), derive(h)))
    # D5 (chain rule) with the corrected right-hand side ∂g∘⟨∂f, f∘π₂⟩
    agree("D5", derive(f.then(g)), pair(df, proj(n, n, 2).then(f)).then(derive(g)))
    # D6 and D7 on ∂(∂f): variables ((v1, v2), (x1, x2)) with blocks of size n
    ddf = derive(df)
    gq, hq, kq = (random_arrow(rng, q, n, 2) for _ in range(3))
    zq = zero(q, n)
    agree("D6", pair(pair(gq, zq), pair(hq, kq)).then(ddf), pair(gq, kq).then(df))
    agree("D7", pair(pair(zq, hq), pair(gq, kq)).then(ddf), pair(pair(zq, gq), pair(hq, kq)).then(ddf))
    # D-curry: view f as ℝ^a × ℝ^b → ℝ^m and curry the first block
    if n >= 2:
        a = rng.randint(1, n - 1)
        b = n - a
        lhs = curry_derive(f, a)
        # ∂f∘⟨π₁×0, π₂×id⟩ in variables (v, x, y): direction (v, 0), point (x, y)
        total = 2 * a + b
        vs = [Poly.var(total, i) for i in range(a)]
        xs = [Poly.var(total, a + i) for i in range(a)]
        ys = [Poly.var(total, 2 * a + i) for i in range(b)]
        zeros = [Poly.const(total, 0)] * b
        rhs = PolyArrow(total, vs + zeros + xs + ys).then(df)
        agree("D-curry", lhs, rhs)
    else:
        report["D-curry"] = (True, None)
    # the symbolic derivative agrees with the independent expansion route
    agree("oracle", df, derive_oracle(f))
    return report
