import pytest

from dtt.backends import make_backend
from dtt.backends.change import Bag, BagChange, change_derivative, cs_violations
from dtt.semantics import SemObject
from dtt.syntax import Diff, PProduct
from conftest import env_files, interpreter

CHANGE_ENVS = [stem for stem, b in env_files() if b == "change"]


def test_bag_example():
    it = interpreter("bag", "change")
    assert it.const("delta") == 4
    assert it.const("nil") == 0
    sum_ = it.const("sum")
    xs, ys, dxs = it.const("xs"), it.const("ys"), it.env.dconsts["dxs"]
    bag = it.env.base["Bag"]
    assert change_derivative(it.backend, bag, it.env.base["Int"], sum_, xs, dxs) == 4
    assert it.backend.oplus(bag, xs, dxs) == ys


def _judgement_holds(it, pred, v) -> bool:
    """t ⊕ ⟦a⟧ = u, componentwise for products of differences."""
    if type(pred) is Diff:
        Z = it.obj(pred.carrier)
        t, u = it.prog(pred.lhs), it.prog(pred.rhs)
        return it.backend.eq_value(Z, it.backend.oplus(Z, t, v), u)
    if type(pred) is PProduct:
        return _judgement_holds(it, pred.left, v[0]) and _judgement_holds(it, pred.right, v[1])
    return it.sound(pred, v)


@pytest.mark.parametrize("stem", CHANGE_ENVS)
def test_update_reaches_target(stem):
    it = interpreter(stem, "change")
    for name, d in it.sig.defs.items():
        if d.sort == "d":
            assert _judgement_holds(it, d.classifier, it.const(name)), name
    for name, pred in it.sig.dconsts.items():
        assert _judgement_holds(it, pred, it.env.dconsts[name]), name


@pytest.mark.parametrize("stem", CHANGE_ENVS)
def test_change_structure_axioms(stem):
    it = interpreter(stem, "change")
    for name, obj in it.env.base.items():
        assert cs_violations(it.backend, obj) == [], name
        pair = SemObject("product", None, (obj, obj))
        assert cs_violations(it.backend, pair) == [], name


def test_bag_structure():
    b = make_backend("change")
    obj = b.base_object("Bag", {"kind": "bag", "universe": [1, 2], "max_size": 2})
    assert cs_violations(b, obj) == []
    x = b.parse_base(obj, [1, 1])
    assert isinstance(x, Bag)
    d = b.ominus(obj, b.parse_base(obj, [2]), x)
    assert isinstance(d, BagChange)
    assert b.oplus(obj, x, d) == b.parse_base(obj, [2])


def test_removal_of_absent_element_is_not_a_change():
    b = make_backend("change")
    obj = b.base_object("Bag", {"kind": "bag", "universe": [1, 2], "max_size": 2})
    x = b.parse_base(obj, [1])
    bad = b.parse_diff(obj, {"rem": [2], "add": []})
    assert not b.is_change(obj, x, bad)


def test_derivative_of_identity_returns_change():
    it = interpreter("finite", "change")
    did = it.const("did")
    X = it.env.base["X"]
    for x in it.backend.points(X):
        for y in it.backend.points(X):
            d = it.backend.ominus(X, y, x)
            assert did(x, y, d) == d


def test_square_derivative_is_exact():
    it = interpreter("square", "change")
    ds = it.const("dsquare")
    R = it.env.base["R"]
    for x in it.backend.points(R)[:8]:
        for dx in (-2, 1, 3):
            assert ds(x, x + dx, dx) == (x + dx) ** 2 - x * x
