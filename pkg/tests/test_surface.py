import random

import pytest
from hypothesis import given

from dtt.checker import check_text
from dtt.errors import DiagnosticError
from dtt.surface import parse, parse_difference, parse_program, parse_type, pp_type, pretty, pretty_file, tokenize
from dtt.syntax import Arrow, Bang, BaseType, Lolli
from generators import STLC_SOURCE, any_diff, any_prog, fun_term, seeds
from conftest import CORPUS

DCONSTS = ("e",)


@given(seeds)
def test_program_roundtrip(seed):
    t = any_prog(random.Random(seed), 0, 4)
    assert parse_program(pretty(t), dconsts=DCONSTS) == t


@given(seeds)
def test_difference_roundtrip(seed):
    t = any_diff(random.Random(seed), 0, 0, 4)
    assert parse_difference(pretty(t), dconsts=DCONSTS) == t


@given(seeds)
def test_typed_roundtrip(seed):
    t = fun_term(random.Random(seed))
    assert parse_program(pretty(t)) == t


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.dtt")), ids=lambda p: p.name)
def test_file_roundtrip(path):
    sf = parse(path.read_text())
    assert parse(pretty_file(sf)).declarations == sf.declarations


def test_corpus_terms_roundtrip():
    sig, _ = check_text((CORPUS / "prelude.dtt").read_text())
    for d in sig.defs.values():
        back = parse_difference(pretty(d.term), dconsts=tuple(sig.dconsts)) if d.sort == "d" else parse_program(pretty(d.term))
        assert back == d.term


def test_types():
    assert parse_type("!2 A -o B") == Lolli(Bang(2, BaseType("A")), BaseType("B"))
    assert parse_type("A -> B -> A") == Arrow(BaseType("A"), Arrow(BaseType("B"), BaseType("A")))
    for text in ["A -> B -> A", "(A -> B) -> A", "!1/2 (A ** A) -o A", "A * B -> A"]:
        assert parse_type(pp_type(parse_type(text))) == parse_type(text)


def test_unicode_tokens():
    assert [t.text for t in tokenize("λ x ⊸ y")] == [t.text for t in tokenize("fun x -o y")]


def test_parse_error_has_position():
    with pytest.raises(DiagnosticError) as info:
        parse(STLC_SOURCE + "\ndef bad : A := (a0\n")
    diag = info.value.diagnostics[0]
    assert diag.line > 0
