"""Random term generators shared by the property tests.

Generators take a ``random.Random`` so hypothesis can drive them through a
drawn seed; shrinking then acts on the seed only, which is enough for
reproducible counterexamples.
"""

import random
from fractions import Fraction

from hypothesis import strategies as st

from dtt.syntax import (
    App,
    Arrow,
    Bang,
    BangIntro,
    BaseType,
    Const,
    DAppDiff,
    DAppPoint,
    DConst,
    Diff,
    DLamDiff,
    DLamPoint,
    DPair,
    DProj,
    DVar,
    J,
    Lam,
    LetBang,
    LetTensor,
    Lolli,
    Motive,
    Pair,
    PiDiff,
    PiPoint,
    PProduct,
    Product,
    Proj,
    Refl,
    Tensor,
    TensorPair,
    Var,
)

A, B = BaseType("A"), BaseType("B")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ------------------------------------------------------ scope-correct terms


def any_type(rng: random.Random, depth: int = 2):
    if depth <= 0 or rng.random() < 0.4:
        return rng.choice([A, B])
    k = rng.randrange(2)
    ctor = (Arrow, Product)[k]
    return ctor(any_type(rng, depth - 1), any_type(rng, depth - 1))


def any_prog(rng: random.Random, np: int, depth: int = 3):
    """A well-scoped (not necessarily well-typed) program term."""
    leaves = [Const(rng.choice(["c", "f", "g"]))] + ([Var(rng.randrange(np))] if np else [])
    if depth <= 0 or rng.random() < 0.3:
        return rng.choice(leaves)
    k = rng.randrange(5)
    if k == 0:
        return Lam(any_type(rng, 1), any_prog(rng, np + 1, depth - 1))
    if k == 1:
        return App(any_prog(rng, np, depth - 1), any_prog(rng, np, depth - 1))
    if k == 2:
        return Pair(any_prog(rng, np, depth - 1), any_prog(rng, np, depth - 1))
    if k == 3:
        return Proj(rng.choice([1, 2]), any_prog(rng, np, depth - 1))
    return rng.choice(leaves)


def any_pred(rng: random.Random, np: int, depth: int = 2):
    ty = rng.choice([A, B])
    if depth <= 0 or rng.random() < 0.4:
        return Diff(ty, any_prog(rng, np, 1), any_prog(rng, np, 1))
    k = rng.randrange(3)
    if k == 0:
        return PProduct(any_pred(rng, np, depth - 1), any_pred(rng, np, depth - 1))
    if k == 1:
        return PiPoint(ty, any_pred(rng, np + 1, depth - 1))
    return PiDiff(ty, any_pred(rng, np + 2, depth - 1))


def any_diff(rng: random.Random, np: int, nd: int, depth: int = 3):
    """A well-scoped difference term over ``np`` program and ``nd`` difference variables."""
    leaves = [DConst("e"), Refl(any_prog(rng, np, 1))] + ([DVar(rng.randrange(nd))] if nd else [])
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice(leaves)
    k = rng.randrange(7)
    sub = lambda p=np, d=nd: any_diff(rng, p, d, depth - 1)
    if k == 0:
        return DLamPoint(rng.choice([A, B]), sub(np + 1))
    if k == 1:
        return DLamDiff(rng.choice([A, B]), sub(np + 2, nd + 1))
    if k == 2:
        return DAppPoint(sub(), any_prog(rng, np, 1))
    if k == 3:
        return DAppDiff(sub(), any_prog(rng, np, 1), any_prog(rng, np, 1), sub())
    if k == 4:
        return DPair(sub(), sub())
    if k == 5:
        return DProj(rng.choice([1, 2]), sub())
    ty = rng.choice([A, B])
    motive = Motive(ty, any_pred(rng, np + 2, 1))
    return J(motive, any_prog(rng, np, 1), any_prog(rng, np, 1), sub(), sub(np + 1))


# ------------------------------------------------------------ typed STλC

STLC_CONSTS = {
    "a0": A,
    "a1": A,
    "b0": B,
    "f": Arrow(A, B),
    "g": Arrow(B, B),
    "h": Arrow(A, Arrow(A, B)),
    "p": Product(A, B),
}

STLC_SOURCE = """
calculus stlc
type A
type B
const a0 : A
const a1 : A
const b0 : B
const f : A -> B
const g : B -> B
const h : A -> A -> B
const p : A * B
dconst e : D[A](a0, a1)
"""


def typed_prog(rng: random.Random, env: list, ty, depth: int = 3):
    """A program term of type ``ty`` in context ``env`` (outermost first)."""
    options = []
    for i, t in enumerate(reversed(env)):
        if t == ty:
            options.append(Var(i))
    for name, t in STLC_CONSTS.items():
        if t == ty:
            options.append(Const(name))
    if depth > 0 or not options:
        if type(ty) is Arrow:
            return Lam(ty.dom, typed_prog(rng, env + [ty.dom], ty.cod, depth - 1))
        if type(ty) is Product and rng.random() < 0.6:
            return Pair(typed_prog(rng, env, ty.left, depth - 1), typed_prog(rng, env, ty.right, depth - 1))
        # eliminations that produce ty
        heads = [(n, t) for n, t in STLC_CONSTS.items() if type(t) is Arrow and t.cod == ty]
        if heads and rng.random() < 0.5:
            name, t = rng.choice(heads)
            return App(Const(name), typed_prog(rng, env, t.dom, depth - 1))
        if ty == A and rng.random() < 0.3:
            return Proj(1, Pair(typed_prog(rng, env, A, depth - 1), typed_prog(rng, env, B, depth - 1)))
        if rng.random() < 0.3:
            dom = rng.choice([A, B])
            body = typed_prog(rng, env + [dom], ty, depth - 1)
            return App(Lam(dom, body), typed_prog(rng, env, dom, depth - 1))
    if options:
        return rng.choice(options)
    return typed_prog(rng, env, ty, 1)


def fun_term(rng: random.Random, dom=A, cod=B, depth: int = 3):
    """A closed function term of type dom -> cod, sometimes η-short."""
    if dom == A and cod == B and rng.random() < 0.2:
        return Const("f")
    return Lam(dom, typed_prog(rng, [dom], cod, depth))


# ------------------------------------------------------------ STλC!

SCALES = [Fraction(1), Fraction(2), Fraction(1, 2)]


def bang_type(rng: random.Random, depth: int = 2):
    if depth <= 0 or rng.random() < 0.35:
        return A
    k = rng.randrange(3)
    if k == 0:
        return Lolli(bang_type(rng, depth - 1), bang_type(rng, depth - 1))
    if k == 1:
        return Tensor(bang_type(rng, depth - 1), bang_type(rng, depth - 1))
    return Bang(rng.choice(SCALES), bang_type(rng, depth - 1))


def bang_term(rng: random.Random, env: list, ty, depth: int = 3):
    """A candidate STλC! term of type ``ty``; linearity is not enforced."""
    vars_ = [Var(i) for i, t in enumerate(reversed(env)) if t == ty]
    if (depth <= 0 or rng.random() < 0.3) and vars_:
        return rng.choice(vars_)
    c = type(ty)
    if c is Lolli:
        inner = ty.dom.body if type(ty.dom) is Bang else ty.dom
        return Lam(ty.dom, bang_term(rng, env + [inner], ty.cod, depth - 1))
    if c is Tensor:
        return TensorPair(bang_term(rng, env, ty.left, depth - 1), bang_term(rng, env, ty.right, depth - 1))
    if c is Bang:
        return BangIntro(bang_term(rng, env, ty.body, depth - 1))
    # eliminations out of the context
    elims = []
    for i, t in enumerate(reversed(env)):
        if type(t) is Lolli and t.cod == ty:
            elims.append(("app", i, t))
        if type(t) is Bang:
            elims.append(("bang", i, t))
        if type(t) is Tensor:
            elims.append(("tensor", i, t))
    if elims and depth > 0:
        kind, i, t = rng.choice(elims)
        if kind == "app":
            dom = t.dom.body if type(t.dom) is Bang else t.dom
            return App(Var(i), bang_term(rng, env, dom, depth - 1))
        if kind == "bang":
            return LetBang(Var(i), bang_term(rng, env + [t.body], ty, depth - 1))
        return LetTensor(Var(i), bang_term(rng, env + [t.left, t.right], ty, depth - 1))
    if vars_:
        return rng.choice(vars_)
    return None


def closed_bang_term(rng: random.Random):
    """A closed (term, type) pair accepted by the graded checker, or None."""
    from dtt.errors import TypeCheckError
    from dtt.subexp import SensContext, check_bang

    ty = Lolli(bang_type(rng, 2), bang_type(rng, 2))
    tm = bang_term(rng, [], ty, 4)
    if tm is None:
        return None
    try:
        check_bang(SensContext(), tm, ty)
    except TypeCheckError:
        return None
    return tm, ty


def bang_terms(n: int, seed: int = 0) -> list:
    rng = random.Random(seed)
    out = {}
    while len(out) < n:
        got = closed_bang_term(rng)
        if got is not None:
            out.setdefault(got[0], got)
    return list(out.values())


# ------------------------------------------------- βD / ηD instances


def equational_instance(rng: random.Random) -> dict:
    """A random (f, t, u, a) with both sides of βD and ηD.

    ``a`` lives in a context holding one difference variable of type
    D_A(t, u); it is that variable, possibly wrapped in redundant J or
    identity-derivative layers.
    """
    from dtt.syntax import der_expansion

    f = fun_term(rng)
    t = typed_prog(rng, [], A, 2)
    u = typed_prog(rng, [], A, 2)
    a = DVar(0)
    for _ in range(rng.randint(0, 2)):
        if rng.random() < 0.5:
            a = J(Motive(A, Diff(A, Var(1), Var(0))), t, u, a, Refl(Var(0)))
        else:
            a = DAppDiff(der_expansion(Lam(A, Var(0)), A, A), t, u, a)
    ident = der_expansion(Lam(A, Var(0)), A, A)
    return {
        "f": f,
        "t": t,
        "u": u,
        "a": a,
        "ctx_pred": Diff(A, t, u),
        "beta_lhs": DAppDiff(der_expansion(f, A, B), t, t, Refl(t)),
        "beta_rhs": Refl(App(f, t)),
        "beta_pred": Diff(B, App(f, t), App(f, t)),
        "eta_lhs": DAppDiff(ident, t, u, a),
        "eta_rhs": a,
    }
