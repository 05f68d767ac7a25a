"""Abstract syntax for difference type theory.

Two type universes (simple types and predicates) and two term sorts
(program terms and difference terms).  Variables are de Bruijn indices;
program variables and difference variables live in separate index spaces,
so a binder of one sort never shifts indices of the other sort.

Binder arities:

    Lam, LetBang, DLamPoint, PiPoint, J branch   1 program variable
    LetTensor, Motive body                        2 program variables
    DLamDiff, PiDiff                              2 program + 1 difference

For two-variable binders the first bound name has index 1 and the second
index 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Union


class MalformedTerm(Exception):
    pass


# ---------------------------------------------------------------- types


@dataclass(frozen=True)
class BaseType:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: "SimpleType"
    cod: "SimpleType"


@dataclass(frozen=True)
class Product:
    left: "SimpleType"
    right: "SimpleType"


@dataclass(frozen=True)
class Bang:
    scale: Fraction
    body: "SimpleType"

    def __post_init__(self):
        if not isinstance(self.scale, Fraction):
            object.__setattr__(self, "scale", Fraction(self.scale))
        if self.scale < 0:
            raise MalformedTerm("negative scale in !_r")


@dataclass(frozen=True)
class Lolli:
    dom: "SimpleType"
    cod: "SimpleType"


@dataclass(frozen=True)
class Tensor:
    left: "SimpleType"
    right: "SimpleType"


@dataclass(frozen=True)
class TypeMeta:
    """Unification variable; only produced by the checker during inference."""

    ident: int


SimpleType = Union[BaseType, Arrow, Product, Bang, Lolli, Tensor, TypeMeta]
TYPE_CLASSES = (BaseType, Arrow, Product, Bang, Lolli, Tensor, TypeMeta)


# ---------------------------------------------------------- program terms


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Lam:
    annotation: Optional[SimpleType]
    body: "ProgramTerm"


@dataclass(frozen=True)
class App:
    fn: "ProgramTerm"
    arg: "ProgramTerm"


@dataclass(frozen=True)
class Pair:
    left: "ProgramTerm"
    right: "ProgramTerm"


@dataclass(frozen=True)
class Proj:
    side: int
    tm: "ProgramTerm"


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class BangIntro:
    tm: "ProgramTerm"


@dataclass(frozen=True)
class LetBang:
    scrutinee: "ProgramTerm"
    body: "ProgramTerm"


@dataclass(frozen=True)
class TensorPair:
    left: "ProgramTerm"
    right: "ProgramTerm"


@dataclass(frozen=True)
class LetTensor:
    scrutinee: "ProgramTerm"
    body: "ProgramTerm"


ProgramTerm = Union[Var, Lam, App, Pair, Proj, Const, BangIntro, LetBang, TensorPair, LetTensor]
PROGRAM_CLASSES = (Var, Lam, App, Pair, Proj, Const, BangIntro, LetBang, TensorPair, LetTensor)


# ------------------------------------------------------------- predicates


@dataclass(frozen=True)
class Diff:
    carrier: SimpleType
    lhs: ProgramTerm
    rhs: ProgramTerm


@dataclass(frozen=True)
class PProduct:
    left: "Predicate"
    right: "Predicate"


@dataclass(frozen=True)
class PiPoint:
    dom: SimpleType
    body: "Predicate"


@dataclass(frozen=True)
class PiDiff:
    dom: SimpleType
    body: "Predicate"


Predicate = Union[Diff, PProduct, PiPoint, PiDiff]
PREDICATE_CLASSES = (Diff, PProduct, PiPoint, PiDiff)


@dataclass(frozen=True)
class Motive:
    carrier: SimpleType
    body: Predicate


# ------------------------------------------------------- difference terms


@dataclass(frozen=True)
class DVar:
    index: int


@dataclass(frozen=True)
class DLamPoint:
    dom: Optional[SimpleType]
    body: "DifferenceTerm"


@dataclass(frozen=True)
class DAppPoint:
    fn: "DifferenceTerm"
    arg: ProgramTerm


@dataclass(frozen=True)
class DLamDiff:
    dom: Optional[SimpleType]
    body: "DifferenceTerm"


@dataclass(frozen=True)
class DAppDiff:
    fn: "DifferenceTerm"
    lhs: ProgramTerm
    rhs: ProgramTerm
    diff: "DifferenceTerm"


@dataclass(frozen=True)
class DPair:
    left: "DifferenceTerm"
    right: "DifferenceTerm"


@dataclass(frozen=True)
class DProj:
    side: int
    tm: "DifferenceTerm"


@dataclass(frozen=True)
class Refl:
    tm: ProgramTerm


@dataclass(frozen=True)
class J:
    motive: Motive
    lhs: ProgramTerm
    rhs: ProgramTerm
    diff: "DifferenceTerm"
    branch: "DifferenceTerm"


@dataclass(frozen=True)
class DConst:
    name: str


@dataclass(frozen=True)
class DerivSugar:
    """Surface ``Der f``; the checker replaces it by its J-expansion."""

    fn: ProgramTerm


DifferenceTerm = Union[
    DVar, DLamPoint, DAppPoint, DLamDiff, DAppDiff, DPair, DProj, Refl, J, DConst, DerivSugar
]
DIFFERENCE_CLASSES = (
    DVar, DLamPoint, DAppPoint, DLamDiff, DAppDiff, DPair, DProj, Refl, J, DConst, DerivSugar,
)


def is_type(x) -> bool:
    return isinstance(x, TYPE_CLASSES)


def is_program(x) -> bool:
    return isinstance(x, PROGRAM_CLASSES)


def is_predicate(x) -> bool:
    return isinstance(x, PREDICATE_CLASSES)


def is_difference(x) -> bool:
    return isinstance(x, DIFFERENCE_CLASSES)


# ---------------------------------------------------------------- context


@dataclass(frozen=True)
class Context:
    """Two-zone context.  Index 0 is the innermost entry of each zone.

    Each difference-zone entry remembers the program-zone length at which it
    was declared so that lookups can shift it into the current scope.
    """

    program: tuple = ()
    diff: tuple = ()

    def push_program(self, ty: SimpleType) -> "Context":
        return Context(self.program + (ty,), self.diff)

    def push_diff(self, pred: Predicate) -> "Context":
        return Context(self.program, self.diff + ((pred, len(self.program)),))

    def program_type(self, index: int) -> SimpleType:
        if not 0 <= index < len(self.program):
            raise MalformedTerm(f"program variable index {index} out of range")
        return self.program[-1 - index]

    def diff_pred(self, index: int) -> Predicate:
        if not 0 <= index < len(self.diff):
            raise MalformedTerm(f"difference variable index {index} out of range")
        pred, level = self.diff[-1 - index]
        return shift_p(pred, len(self.program) - level)


# ------------------------------------------------------ generic traversal

PVarFn = Callable[[int, int, int], object]
DVarFn = Callable[[int, int, int], object]


def map_vars(node, fp: PVarFn, fd: DVarFn, pd: int = 0, dd: int = 0):
    """Rebuild ``node`` replacing each variable.

    ``fp(index, pd, dd)`` handles program variables and ``fd(index, pd, dd)``
    difference variables, where ``pd``/``dd`` count the binders crossed.
    """

    def go(n, pd, dd):
        t = type(n)
        if t is Var:
            return fp(n.index, pd, dd)
        if t is DVar:
            return fd(n.index, pd, dd)
        if t is Const or t is DConst or n is None or t in TYPE_CLASSES:
            return n
        if t is Lam:
            return Lam(n.annotation, go(n.body, pd + 1, dd))
        if t is App:
            return App(go(n.fn, pd, dd), go(n.arg, pd, dd))
        if t is Pair:
            return Pair(go(n.left, pd, dd), go(n.right, pd, dd))
        if t is Proj:
            return Proj(n.side, go(n.tm, pd, dd))
        if t is BangIntro:
            return BangIntro(go(n.tm, pd, dd))
        if t is LetBang:
            return LetBang(go(n.scrutinee, pd, dd), go(n.body, pd + 1, dd))
        if t is TensorPair:
            return TensorPair(go(n.left, pd, dd), go(n.right, pd, dd))
        if t is LetTensor:
            return LetTensor(go(n.scrutinee, pd, dd), go(n.body, pd + 2, dd))
        if t is Diff:
            return Diff(n.carrier, go(n.lhs, pd, dd), go(n.rhs, pd, dd))
        if t is PProduct:
            return PProduct(go(n.left, pd, dd), go(n.right, pd, dd))
        if t is PiPoint:
            return PiPoint(n.dom, go(n.body, pd + 1, dd))
        if t is PiDiff:
            return PiDiff(n.dom, go(n.body, pd + 2, dd + 1))
        if t is Motive:
            return Motive(n.carrier, go(n.body, pd + 2, dd))
        if t is DLamPoint:
            return DLamPoint(n.dom, go(n.body, pd + 1, dd))
        if t is DAppPoint:
            return DAppPoint(go(n.fn, pd, dd), go(n.arg, pd, dd))
        if t is DLamDiff:
            return DLamDiff(n.dom, go(n.body, pd + 2, dd + 1))
        if t is DAppDiff:
            return DAppDiff(go(n.fn, pd, dd), go(n.lhs, pd, dd), go(n.rhs, pd, dd), go(n.diff, pd, dd))
        if t is DPair:
            return DPair(go(n.left, pd, dd), go(n.right, pd, dd))
        if t is DProj:
            return DProj(n.side, go(n.tm, pd, dd))
        if t is Refl:
            return Refl(go(n.tm, pd, dd))
        if t is J:
            return J(
                go(n.motive, pd, dd),
                go(n.lhs, pd, dd),
                go(n.rhs, pd, dd),
                go(n.diff, pd, dd),
                go(n.branch, pd + 1, dd),
            )
        if t is DerivSugar:
            return DerivSugar(go(n.fn, pd, dd))
        raise MalformedTerm(f"not a syntax node: {n!r}")

    return go(node, pd, dd)


def _keep_p(i, pd, dd):
    return Var(i)


def _keep_d(i, pd, dd):
    return DVar(i)


def shift_p(node, d: int, cutoff: int = 0):
    """Add ``d`` to every free program variable at or above ``cutoff``."""
    if d == 0:
        return node

    def fp(i, pd, dd):
        if i >= cutoff + pd:
            if i + d < 0:
                raise MalformedTerm("negative index after shift")
            return Var(i + d)
        return Var(i)

    return map_vars(node, fp, _keep_d)


def shift_d(node, d: int, cutoff: int = 0):
    """Add ``d`` to every free difference variable at or above ``cutoff``."""
    if d == 0:
        return node

    def fd(i, pd, dd):
        if i >= cutoff + dd:
            if i + d < 0:
                raise MalformedTerm("negative index after shift")
            return DVar(i + d)
        return DVar(i)

    return map_vars(node, _keep_p, fd)


def subst_p(node, replacement: ProgramTerm, index: int = 0):
    """Substitute program variable ``index`` by ``replacement`` and remove it.

    With ``index=0`` this instantiates the outermost bound program variable of
    a binder body.  Free variables above ``index`` move down by one.
    """
    if not is_program(replacement):
        raise MalformedTerm("program substitution needs a program term")

    def fp(i, pd, dd):
        if i == index + pd:
            return shift_p(replacement, pd)
        if i > index + pd:
            return Var(i - 1)
        return Var(i)

    return map_vars(node, fp, _keep_d)


def subst_d(node, replacement: DifferenceTerm, index: int = 0):
    """Substitute difference variable ``index`` by ``replacement`` and remove it."""
    if not is_difference(replacement):
        raise MalformedTerm("difference substitution needs a difference term")
    if not (is_difference(node) or is_predicate(node) or isinstance(node, Motive)):
        raise MalformedTerm("difference substitution into a program term")

    def fd(i, pd, dd):
        if i == index + dd:
            return shift_d(shift_p(replacement, pd), dd)
        if i > index + dd:
            return DVar(i - 1)
        return DVar(i)

    return map_vars(node, _keep_p, fd)


def subst_p2(body, first: ProgramTerm, second: ProgramTerm):
    """Instantiate a two-variable binder body: index 1 := first, index 0 := second."""
    return subst_p(subst_p(body, shift_p(second, 1)), first)


def subst_pd(body, first: ProgramTerm, second: ProgramTerm, diff: DifferenceTerm):
    """Instantiate a ``λxyε`` body with (first, second, diff)."""
    return subst_p2(subst_d(body, shift_p(diff, 2)), first, second)


def free_p(node, index: int = 0) -> bool:
    """True if program variable ``index`` occurs free in ``node``."""
    found = []

    def fp(i, pd, dd):
        if i == index + pd:
            found.append(i)
        return Var(i)

    map_vars(node, fp, _keep_d)
    return bool(found)


def free_d(node, index: int = 0) -> bool:
    found = []

    def fd(i, pd, dd):
        if i == index + dd:
            found.append(i)
        return DVar(i)

    map_vars(node, _keep_p, fd)
    return bool(found)


def check_scope(node, pdepth: int, ddepth: int = 0) -> None:
    """Raise MalformedTerm if some variable escapes the given zone sizes."""

    def fp(i, pd, dd):
        if i < 0 or i >= pdepth + pd:
            raise MalformedTerm(f"program variable {i} out of range")
        return Var(i)

    def fd(i, pd, dd):
        if i < 0 or i >= ddepth + dd:
            raise MalformedTerm(f"difference variable {i} out of range")
        return DVar(i)

    map_vars(node, fp, fd)


def alpha_eq(a, b) -> bool:
    """Equality up to bound-variable renaming; identity on de Bruijn syntax."""
    return a == b


def proj(side: int, tm: ProgramTerm) -> ProgramTerm:
    return Proj(side, tm)


def apps(fn: ProgramTerm, *args: ProgramTerm) -> ProgramTerm:
    for a in args:
        fn = App(fn, a)
    return fn


def der_expansion(fn: ProgramTerm, dom: SimpleType, cod: SimpleType) -> DifferenceTerm:
    """``Der f = λxyε. J[x y. D_B(f x, f y)](x, y, ε, [z] ∂(f z))``."""
    motive = Motive(dom, Diff(cod, App(shift_p(fn, 4), Var(1)), App(shift_p(fn, 4), Var(0))))
    branch = Refl(App(shift_p(fn, 3), Var(0)))
    return DLamDiff(dom, J(motive, Var(1), Var(0), DVar(0), branch))


def match_der(tm) -> Optional[tuple]:
    """Recognise a Der-expansion; returns (fn, dom, cod) or None."""
    if type(tm) is not DLamDiff or type(tm.body) is not J:
        return None
    j = tm.body
    if j.lhs != Var(1) or j.rhs != Var(0) or j.diff != DVar(0):
        return None
    if type(j.branch) is not Refl or type(j.branch.tm) is not App or j.branch.tm.arg != Var(0):
        return None
    if free_p(j.branch.tm.fn, 0) or free_p(j.branch.tm.fn, 1) or free_p(j.branch.tm.fn, 2):
        return None
    fn = shift_p(j.branch.tm.fn, -3)
    if tm.dom is None or j.motive.carrier != tm.dom or type(j.motive.body) is not Diff:
        return None
    cod = j.motive.body.carrier
    if der_expansion(fn, tm.dom, cod) != tm:
        return None
    return fn, tm.dom, cod
