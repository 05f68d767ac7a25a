from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from dtt.backends import make_backend
from dtt.checker import check_text
from dtt.semantics import factorize, load_env
from dtt.syntax import Arrow, Lolli

CORPUS = Path(__file__).resolve().parents[1] / "src" / "dtt" / "corpus"

settings.register_profile("dtt", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("dtt")


def corpus_text(stem: str) -> str:
    return (CORPUS / f"{stem}.dtt").read_text()


def load(stem: str, **kw):
    """Checked signature and declaration results of a corpus file."""
    return check_text(corpus_text(stem), **kw)


def interpreter(stem: str, backend: str, **kw):
    sig, results = load(stem)
    assert all(r.ok for r in results), [r.diagnostic for r in results if not r.ok]
    return load_env(make_backend(backend, **kw), sig, str(CORPUS / f"{stem}.{backend}.json"))


def env_files():
    """(stem, backend) for every environment file in the corpus."""
    out = []
    for p in sorted(CORPUS.glob("*.json")):
        stem, backend = p.name.split(".")[:2]
        out.append((stem, backend))
    return out


def corpus_arrows() -> list:
    """(stem, backend, name) for every interpreted arrow constant."""
    out = []
    for stem, backend in env_files():
        it = interpreter(stem, backend)
        for name, ty in it.sig.consts.items():
            if type(ty) in (Arrow, Lolli) and name in it.env.consts:
                out.append((stem, backend, name))
    return out


@lru_cache(maxsize=None)
def factorization_failures(stem: str, backend: str, name: str) -> tuple:
    """Points where p ∘ i ≠ f or i differs from the backend's closed form.

    Exhaustive over the backend's points of the domain (all points on finite
    carriers, the declared grid or samples otherwise).  Cached because the
    higher-order DLR constants are expensive to compare.
    """
    it = interpreter(stem, backend)
    b = it.backend
    dom, cod = it.obj(it.sig.consts[name]).parts
    f = it.const(name)
    i, p = factorize(b, dom, cod, f)
    bad = []
    for x in b.points(dom):
        (x1, fx), d = i(x)
        (x2, fx2), d2 = b.closed_form_i(cod, x, f(x))
        ok = b.eq_value(cod, p(i(x)), f(x)) and b.eq_value(dom, x1, x2) and b.eq_value(cod, fx, fx2)
        if not (ok and b.eq_diff(cod, d, d2)):
            bad.append(x)
    return tuple(bad)


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


# ------------------------------------------------------ acceptance summary

ACCEPTANCE: dict = {}


def record(number: int, ok: bool, detail: str) -> None:
    """Register the outcome of an acceptance criterion for the summary."""
    ACCEPTANCE[number] = (ok, detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
