import random
from fractions import Fraction

import pytest
from hypothesis import given

from dtt.backends import make_backend
from dtt.backends.dlr import (
    brute_force_oracle,
    dlr_derivative,
    is_complete,
    random_dlr,
    separation_violations,
)
from dtt.checker import check_text
from dtt.semantics import load_env
from conftest import interpreter
from generators import seeds


@pytest.fixture(scope="module")
def backend():
    return make_backend("dlr")


def filler_case(rng):
    b = make_backend("dlr")
    sx, sz = random_dlr(rng), random_dlr(rng)
    X, Z = b.base_object("X", sx), b.base_object("Z", sz)
    F = {(x, z): rng.choice(sz["points"]) for x in sx["points"] for z in sx["points"]}
    G = {(x, z): rng.choice(sz["points"]) for x in sx["points"] for z in sx["points"]}
    c = rng.choice(sz["lattice"]["elements"])
    return b, sx, sz, X, Z, F, G, c


def space(spec: dict) -> dict:
    lat = spec["lattice"]
    return {"points": spec["points"], "elements": lat["elements"], "leq": lat["leq"], "rel": {tuple(t) for t in spec["rel"]}}


def filler_agrees(rng) -> bool:
    b, sx, sz, X, Z, F, G, c = filler_case(rng)
    ox, oz = space(sx), space(sz)
    for x in sx["points"]:
        for e in sx["lattice"]["elements"]:
            got = b.filler_dist(Z, X, lambda p, q: F[(p, q)], lambda p, q: G[(p, q)], c, x, x, e)
            want = brute_force_oracle(ox, oz, {"x": x, "eps": e, "F": F, "G": G, "c": c})
            if got != want:
                return False
    return True


@given(seeds)
def test_filler_matches_oracle(seed):
    assert filler_agrees(random.Random(seed))


def test_random_structures_are_separated(backend):
    rng = random.Random(7)
    for _ in range(50):
        X = backend.base_object("X", random_dlr(rng))
        assert separation_violations(backend, X) == []


def test_discrete_structure_is_complete(backend):
    X = backend.base_object("X", {"kind": "discrete", "points": ["a", "b", "c"]})
    assert is_complete(backend, X)


def test_unseparated_structure_rejected(backend):
    spec = {
        "kind": "finite",
        "points": [0, 1],
        "lattice": {"chain": [0, 1]},
        "rel": [[0, 0, 0], [1, 0, 1], [0, 0, 1]],
    }
    with pytest.raises(ValueError, match="separated"):
        backend.base_object("X", spec)


SQUARE_GRID = {"kind": "euclidean", "grid": {"min": -3, "max": 3, "step": "1/10"}}


@pytest.mark.parametrize("x", [Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)])
@pytest.mark.parametrize("e", [Fraction(1, 10), Fraction(1, 2), Fraction(1)])
def test_square_derivative(backend, x, e):
    R = backend.base_object("R", SQUARE_GRID)
    step = Fraction(1, 10)
    closed = dlr_derivative(backend, R, R, lambda v: v * v)
    target = 2 * abs(x) * e + e * e
    assert abs(closed(x, x, e) - target) <= 2 * step
    it = interpreter("square", "dlr")
    assert abs(it.const("dsquare")(x, x, e) - target) <= 2 * step


def test_derivative_of_identity_is_radius():
    it = interpreter("finite", "dlr")
    did = it.const("did")
    for x in ["a", "b", "c"]:
        for e in (0, 1):
            assert did(x, x, e) == e


CHAIN_SRC = """
calculus stlc
type R
const f : R -> R
const g : R -> R
def nested : Pi x y : R. D[R](x, y) -> D[R](g (f x), g (f y)) :=
  fun (x y : R | d) => Der g (f x) (f y) (Der f x y d)
def composite : Pi x y : R. D[R](x, y) -> D[R](g (f x), g (f y)) := Der (fun (x : R) => g (f x))
"""

CHAIN_ENV = {
    "backend": "dlr",
    "types": {"R": {"kind": "euclidean", "grid": {"min": -2, "max": 2, "step": "1/10"}}},
    "consts": {"f": {"poly": [0, 0, 1]}, "g": {"poly": [0, -1, 1]}},
}


def test_chain_rule_is_only_an_inequality():
    # f = x², g = w² − w at x = y = 0 and ε = 1
    sig, results = check_text(CHAIN_SRC)
    assert all(r.ok for r in results)
    it = load_env(make_backend("dlr"), sig, CHAIN_ENV)
    one = Fraction(1)
    nested = it.const("nested")(0, 0, one)
    composite = it.const("composite")(0, 0, one)
    assert nested == 2
    assert Fraction(24, 100) <= composite <= Fraction(1, 4)
    for name in ("nested", "composite"):
        assert it.sound(sig.defs[name].classifier, it.const(name))


@pytest.mark.parametrize("stem", ["prelude", "square", "finite", "rewrites"])
def test_corpus_differences_are_sound(stem):
    it = interpreter(stem, "dlr")
    for name, d in it.sig.defs.items():
        if d.sort == "d":
            assert it.sound(d.classifier, it.const(name)), name
