import json

import pytest

from dtt.backends import make_backend
from dtt.errors import ModelSoundnessFailure, UnsupportedDomain
from dtt.semantics import json_value, load_env, refl_arrow
from conftest import CORPUS, corpus_arrows, factorization_failures, interpreter, load


ARROWS = corpus_arrows()


def test_every_backend_has_arrows():
    assert {b for _, b, _ in ARROWS} == {"metric", "dlr", "change", "cdc"}


@pytest.mark.parametrize("stem, backend, name", ARROWS, ids=["-".join(a) for a in ARROWS])
def test_factorization(stem, backend, name):
    assert factorization_failures(stem, backend, name) == ()


@pytest.mark.parametrize("backend", ["dlr", "change", "cdc"])
def test_refl_arrow_is_diagonal(backend):
    it = interpreter("prelude", backend)
    A = it.env.base["A"]
    r = refl_arrow(it.backend, A)
    for x in it.backend.points(A):
        (a, b), d = r(x)
        assert a == b == x
        assert it.backend.valid_diff(A, x, x, d)


def test_missing_base_type():
    sig, _ = load("square")
    with pytest.raises(UnsupportedDomain):
        load_env(make_backend("dlr"), sig, {"backend": "dlr", "types": {}})


def test_unsound_axiom_rejected():
    sig, _ = load("bag")
    data = json.loads((CORPUS / "bag.change.json").read_text())
    data["dconsts"]["dxs"] = {"value": {"rem": [1], "add": [4]}}
    with pytest.raises(ModelSoundnessFailure):
        load_env(make_backend("change"), sig, data)


def test_backend_rejects_other_calculus():
    sig, _ = load("rewrites_fuzz")
    with pytest.raises(UnsupportedDomain):
        it = load_env(make_backend("dlr"), sig, {"types": {"A": {"kind": "discrete", "points": [0]}, "R": {"kind": "discrete", "points": [0]}}})
        it.obj(sig.consts["f"])


def test_json_values():
    it = interpreter("prelude", "dlr")
    assert json_value(it.const("C2")) == [1, 2]
    assert json.dumps(json_value(it.const("t0"))) == "[0, 1]"
