"""The ``dttc`` command: check, normalize, eval, derive and corpus.

Exit codes: 0 success, 1 check failure, 2 evaluation failure, 3 configuration
error.  Reports are deterministic for a fixed configuration; wall-clock timing
is included only with ``--timing``.
"""

from __future__ import annotations

import argparse
import glob
import json
import os
import sys
import time
from dataclasses import dataclass, field, replace
from typing import Optional

from .checker import Checker, check_file, typer_for
from .errors import DiagnosticError, FuelExhausted, ModelSoundnessFailure, UnsupportedDomain, dump_json
from .rewriter import ALL_SAFE, RuleSet, RuleSetError, default_fuel, normalize, trivialization_witness
from .semantics import Interpreter, json_value, load_env, strip_bang
from .surface import parse, pretty
from .syntax import (
    Arrow, Const, Context, DConst, Diff, Lolli, PiDiff, PiPoint, PProduct, der_expansion,
)

EXIT_OK, EXIT_CHECK, EXIT_EVAL, EXIT_CONFIG = 0, 1, 2, 3
BACKEND_NAMES = ("metric", "dlr", "change", "cdc")
CORPUS_DIR = os.path.join(os.path.dirname(__file__), "corpus")
TABLE_ROWS = 24


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    file: Optional[str] = None
    calculus: Optional[str] = None
    rules: Optional[str] = None
    backend: Optional[str] = None
    env: Optional[str] = None
    term: Optional[str] = None
    seed: int = 0
    samples: int = 6
    fuel: Optional[int] = None
    fmt: str = "text"
    keep_going: bool = False
    timing: bool = False

    def rule_set(self, base: Optional[RuleSet] = None) -> Optional[RuleSet]:
        if self.rules is None:
            return None
        try:
            return RuleSet.parse(self.rules, base)
        except RuleSetError as e:
            raise ConfigError(str(e))


@dataclass
class Report:
    command: str
    file: Optional[str] = None
    declarations: list = field(default_factory=list)
    result: dict = field(default_factory=dict)
    diagnostics: list = field(default_factory=list)
    exit_code: int = EXIT_OK
    timing: Optional[float] = None

    def to_json(self) -> dict:
        out = {
            "command": self.command,
            "file": self.file,
            "declarations": self.declarations,
            "result": self.result,
            "diagnostics": self.diagnostics,
            "exit_code": self.exit_code,
        }
        if self.timing is not None:
            out["timing"] = round(self.timing, 3)
        return out


# ---------------------------------------------------------------- helpers


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e.strerror}")


def _check(cfg: RunConfig, report: Report, keep_going: bool = True):
    """Parse and check ``cfg.file``; fill the declaration rows of ``report``."""
    text = _read(cfg.file)
    try:
        sf = parse(text)
    except DiagnosticError as e:
        report.diagnostics.extend(d.to_json() for d in e.diagnostics)
        report.exit_code = EXIT_CHECK
        return None, []
    sig, results = check_file(sf, rules=cfg.rule_set(), calculus=cfg.calculus, keep_going=keep_going)
    for r in results:
        if r.kind == "directive":
            continue
        row = {"name": r.name, "kind": r.kind, "ok": r.ok}
        if r.ok and r.classifier is not None:
            row["type"] = pretty(r.classifier)
        if r.diagnostic is not None:
            row["diagnostic"] = r.diagnostic.to_json()
            report.diagnostics.append(r.diagnostic.to_json())
        report.declarations.append(row)
    if not all(r.ok for r in results):
        report.exit_code = EXIT_CHECK
    return sig, results


def _signature(cfg: RunConfig, report: Report):
    sig, results = _check(cfg, report, keep_going=False)
    if sig is None or report.exit_code:
        return None
    return sig


def _interpreter(cfg: RunConfig, sig) -> Interpreter:
    from .backends import make_backend

    if cfg.backend is None or cfg.env is None:
        raise ConfigError("this command needs --backend and --env")
    if cfg.backend not in BACKEND_NAMES:
        raise ConfigError(f"unknown backend {cfg.backend!r}")
    backend = make_backend(cfg.backend, seed=cfg.seed, samples=cfg.samples)
    try:
        data = json.loads(_read(cfg.env))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{cfg.env}: invalid JSON: {e}")
    declared = data.get("backend")
    if declared is not None and declared != cfg.backend:
        raise ConfigError(f"{cfg.env} is an environment for the {declared} backend")
    try:
        return load_env(backend, sig, data)
    except (ValueError, KeyError) as e:
        raise ConfigError(f"{cfg.env}: {e}")


def render(interp: Interpreter, classifier, v):
    """A JSON rendering of a value: first-order data directly, functions as
    behavior tables over the backend's test set."""
    b = interp.backend
    c = type(classifier)
    if c is Diff:
        return render_obj(interp, interp.obj(classifier.carrier), v, diff=True)
    if c is PProduct:
        return [render(interp, classifier.left, v[0]), render(interp, classifier.right, v[1])]
    if c is PiPoint:
        pts = b.points(interp.obj(classifier.dom))[:TABLE_ROWS]
        return {"table": [[json_value(k), render(interp, classifier.body, v(k))] for k in pts]}
    if c is PiDiff:
        rows = b.diff_samples(interp.obj(classifier.dom))[:TABLE_ROWS]
        return {
            "table": [
                [json_value(x), json_value(y), json_value(e), render(interp, classifier.body, v(x, y, e))]
                for x, y, e in rows
            ]
        }
    return render_obj(interp, interp.obj(classifier), v)


def render_obj(interp: Interpreter, obj, v, diff: bool = False):
    o = strip_bang(obj)
    if not callable(v):
        return json_value(v)
    if o.is_function and not diff:
        pts = interp.backend.points(o.parts[0])[:TABLE_ROWS]
        return {"table": [[json_value(k), render_obj(interp, o.parts[1], v(k))] for k in pts]}
    return "<function>"


def _lookup(sig, name: str):
    if name in sig.defs:
        d = sig.defs[name]
        return d.sort, d.classifier
    if name in sig.consts:
        return "p", sig.consts[name]
    if name in sig.dconsts:
        return "d", sig.dconsts[name]
    raise ConfigError(f"no declaration named {name!r}")


# --------------------------------------------------------------- commands


def run_check(cfg: RunConfig) -> Report:
    report = Report("check", cfg.file)
    _check(cfg, report, keep_going=cfg.keep_going)
    return report


def run_normalize(cfg: RunConfig) -> Report:
    report = Report("normalize", cfg.file)
    sig = _signature(cfg, report)
    if sig is None:
        return report
    if cfg.term is None:
        raise ConfigError("normalize needs --term")
    if cfg.term not in sig.defs:
        raise ConfigError(f"no definition named {cfg.term!r}")
    rules = replace(cfg.rule_set(sig.rules) or sig.rules, cases=sig.rules.cases)
    d = sig.defs[cfg.term]
    try:
        nf = normalize(d.term, rules, cfg.fuel, Context(), typer_for(sig))
    except FuelExhausted as e:
        report.exit_code = EXIT_EVAL
        report.diagnostics.append(
            {"severity": "error", "message": f"fuel {e.fuel} exhausted at {pretty(e.last_redex)}"}
        )
        return report
    report.result = {
        "term": cfg.term,
        "rules": str(rules),
        "input": pretty(d.term),
        "normal_form": pretty(nf),
        "type": pretty(d.classifier),
    }
    return report


def run_eval(cfg: RunConfig) -> Report:
    report = Report("eval", cfg.file)
    sig = _signature(cfg, report)
    if sig is None:
        return report
    if cfg.term is None:
        raise ConfigError("eval needs --term")
    sort, classifier = _lookup(sig, cfg.term)
    interp = _interpreter(cfg, sig)
    try:
        if sort == "p":
            v = interp.const(cfg.term)
            sound = None
        else:
            v = interp.diff(DConst(cfg.term))
            sound = interp.sound(classifier, v)
        out = {"term": cfg.term, "backend": cfg.backend, "type": pretty(classifier), "value": render(interp, classifier, v)}
    except (UnsupportedDomain, ModelSoundnessFailure) as e:
        report.exit_code = EXIT_EVAL
        report.diagnostics.append({"severity": "error", "message": str(e)})
        return report
    if sound is not None:
        out["sound"] = sound
        if not sound:
            report.exit_code = EXIT_EVAL
            report.diagnostics.append({"severity": "error", "message": f"{cfg.term} does not inhabit its predicate"})
    report.result = out
    return report


def run_derive(cfg: RunConfig) -> Report:
    report = Report("derive", cfg.file)
    sig = _signature(cfg, report)
    if sig is None:
        return report
    if cfg.term is None:
        raise ConfigError("derive needs a function name")
    sort, ty = _lookup(sig, cfg.term)
    if sort != "p" or type(ty) not in (Arrow, Lolli):
        report.exit_code = EXIT_CHECK
        report.diagnostics.append({"severity": "error", "message": f"{cfg.term} is not function-typed"})
        return report
    expansion = der_expansion(Const(cfg.term), ty.dom, ty.cod)
    ch = Checker(sig)
    _, pred = ch.infer_difference(Context(), expansion)
    pred = ch.close(pred)
    out = {"function": cfg.term, "expansion": pretty(expansion), "type": pretty(pred)}
    if cfg.backend is not None:
        interp = _interpreter(cfg, sig)
        try:
            v = interp.diff(expansion)
            out["backend"] = cfg.backend
            out["semantics"] = render(interp, pred, v)
            if cfg.backend == "cdc":
                out["symbolic"] = symbolic_derivative(interp, ty, v)
        except (UnsupportedDomain, ModelSoundnessFailure) as e:
            report.exit_code = EXIT_EVAL
            report.diagnostics.append({"severity": "error", "message": str(e)})
            return report
    report.result = out
    return report


def symbolic_derivative(interp: Interpreter, ty, v) -> list:
    """Evaluate a CDC derivative at polynomial variables (direction v, point x)."""
    from .backends.poly import Poly
    from .semantics import leaves, rebuild

    dom = interp.obj(ty.dom)
    n = interp.backend.dim(dom)
    names = ["v", "x"] if n == 1 else [f"v{i + 1}" for i in range(n)] + [f"x{i + 1}" for i in range(n)]
    vs = rebuild(dom, [Poly.var(2 * n, i) for i in range(n)])
    xs = rebuild(dom, [Poly.var(2 * n, n + i) for i in range(n)])
    out = v(xs, xs, vs)
    return [p.show(names) if isinstance(p, Poly) else json_value(p) for p in leaves(out)]


# ----------------------------------------------------------------- corpus


def _env_files(directory: str, stem: str) -> list:
    out = []
    for path in sorted(glob.glob(os.path.join(directory, f"{stem}.*.json"))):
        backend = os.path.basename(path)[len(stem) + 1 : -len(".json")]
        if backend in BACKEND_NAMES:
            out.append((backend, path))
    return out


def _self_axioms(sig) -> list:
    """Axioms a ∈ D_A(t, t): the inputs of the trivialization detector."""
    return [(name, p) for name, p in sig.dconsts.items() if type(p) is Diff and p.lhs == p.rhs]


SUPPORTED_RULE_SETS = (
    RuleSet(),
    ALL_SAFE,
    replace(ALL_SAFE, cext=True),
    replace(ALL_SAFE, cext=True, fext1=True),
    replace(ALL_SAFE, cext=True, fext2=True),
)


def run_corpus(cfg: RunConfig) -> Report:
    directory = cfg.file or CORPUS_DIR
    if not os.path.isdir(directory):
        raise ConfigError(f"corpus directory {directory} does not exist")
    report = Report("corpus", directory)
    cases = []
    forced = cfg.rule_set(ALL_SAFE)

    def add(kind, name, ok, detail="", repro=""):
        row = {"case": kind, "name": name, "ok": ok}
        if detail:
            row["detail"] = detail
        if not ok and repro:
            row["reproduce"] = repro
        cases.append(row)

    for path in sorted(glob.glob(os.path.join(directory, "*.dtt"))):
        base = os.path.basename(path)
        stem = base[: -len(".dtt")]
        expect_fail = "mutant" in stem
        sf = parse(_read(path))
        sig, results = check_file(sf, calculus=cfg.calculus)
        for r in results:
            if r.kind in ("directive", "type", "const", "dconst"):
                continue
            if expect_fail:
                add("reject", f"{base}:{r.name}", not r.ok, "" if not r.ok else "accepted", f"dttc check {path}")
            else:
                add("check", f"{base}:{r.name}", r.ok, r.diagnostic.message if r.diagnostic else "", f"dttc check {path}")
        if expect_fail or not all(r.ok for r in results):
            continue
        for name, p in _self_axioms(sig):
            rule_sets = [replace(forced, cases=sig.rules.cases)] if forced else [replace(rs, cases=sig.rules.cases) for rs in SUPPORTED_RULE_SETS]
            for rs in rule_sets:
                fired = trivialization_witness(
                    DConst(name), p.lhs, rs, cfg.fuel, Context(), typer_for(sig), carrier=p.carrier
                )
                add(
                    "trivialization",
                    f"{base}:{name}[{rs}]",
                    not fired,
                    f"{name} = refl derivable: the interpretation trivializes" if fired else "",
                    f"dttc corpus {directory} --rules={rs}",
                )
        for backend, env in _env_files(directory, stem):
            sub = replace(cfg, command="eval", file=path, backend=backend, env=env)
            try:
                interp = _interpreter(sub, sig)
            except (ConfigError, ModelSoundnessFailure, UnsupportedDomain) as e:
                add("env", f"{base}[{backend}]", False, str(e), f"dttc eval {path} --backend={backend} --env={env}")
                continue
            for name, d in sig.defs.items():
                repro = f"dttc eval {path} --backend={backend} --env={env} --term={name} --seed={cfg.seed}"
                try:
                    v = interp.const(name)
                    ok = interp.sound(d.classifier, v) if d.sort == "d" else True
                    add("eval", f"{base}:{name}[{backend}]", ok, "" if ok else "unsound value", repro)
                except UnsupportedDomain as e:
                    add("eval", f"{base}:{name}[{backend}]", True, f"skipped: {e}")
                except ModelSoundnessFailure as e:
                    add("eval", f"{base}:{name}[{backend}]", False, str(e), repro)
    failed = [c for c in cases if not c["ok"]]
    report.result = {"cases": cases, "passed": len(cases) - len(failed), "failed": len(failed)}
    if failed:
        evals = any(c["case"] in ("eval", "env") for c in failed)
        report.exit_code = EXIT_EVAL if evals and all(c["case"] in ("eval", "env") for c in failed) else EXIT_CHECK
    return report


COMMANDS = {
    "check": run_check,
    "normalize": run_normalize,
    "eval": run_eval,
    "derive": run_derive,
    "corpus": run_corpus,
}


# ------------------------------------------------------------------ output


def format_text(report: Report) -> str:
    lines = []
    for row in report.declarations:
        if report.command != "check" and row["ok"]:
            continue
        status = "ok" if row["ok"] else "FAIL"
        lines.append(f"{status:4} {row['kind']:6} {row['name']}" + (f" : {row['type']}" if "type" in row else ""))
    for d in report.diagnostics:
        loc = f"{report.file}:{d['line']}:{d['column']}: " if "line" in d else ""
        lines.append(f"{loc}{d.get('severity', 'error')}: {d['message']}")
        if "expected" in d:
            lines.append(f"  expected: {d['expected']}\n  actual:   {d.get('actual')}")
    res = report.result
    if report.command == "corpus" and res:
        for c in res["cases"]:
            status = "PASS" if c["ok"] else "FAIL"
            extra = f"  ({c['detail']})" if c.get("detail") else ""
            lines.append(f"{status} {c['case']:14} {c['name']}{extra}")
            if "reproduce" in c:
                lines.append(f"     reproduce: {c['reproduce']}")
        lines.append(f"{res['passed']} passed, {res['failed']} failed")
    elif res:
        for key, val in res.items():
            text = val if isinstance(val, str) else json.dumps(val, sort_keys=True)
            lines.append(f"{key}: {text}")
    if report.timing is not None:
        lines.append(f"time: {report.timing:.3f}s")
    return "\n".join(lines)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dttc", description="Difference type theory toolkit.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--calculus", choices=("stlc", "fuzz"))
        sp.add_argument("--rules", help="comma-separated rules; a leading + extends the file's set")
        sp.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
        sp.add_argument("--fuel", type=int, default=None)
        sp.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    def backend(sp, required: bool):
        sp.add_argument("--backend", choices=BACKEND_NAMES, required=required)
        sp.add_argument("--env", required=required)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--samples", type=int, default=6)

    sp = sub.add_parser("check", help="typecheck every declaration")
    sp.add_argument("file")
    sp.add_argument("--keep-going", action="store_true")
    common(sp)

    sp = sub.add_parser("normalize", help="normalize a definition")
    sp.add_argument("file")
    sp.add_argument("--term", required=True)
    common(sp)

    sp = sub.add_parser("eval", help="evaluate a definition in a backend")
    sp.add_argument("file")
    sp.add_argument("--term", required=True)
    common(sp)
    backend(sp, True)

    sp = sub.add_parser("derive", help="the derivative of a function")
    sp.add_argument("file")
    sp.add_argument("term", metavar="function")
    common(sp)
    backend(sp, False)

    sp = sub.add_parser("corpus", help="run the golden corpus")
    sp.add_argument("file", nargs="?", metavar="directory")
    common(sp)
    backend(sp, False)
    return p


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    values = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    cfg = RunConfig(**values)
    if cfg.fuel is None:
        cfg.fuel = default_fuel()
    start = time.perf_counter()
    try:
        report = COMMANDS[cfg.command](cfg)
    except ConfigError as e:
        report = Report(cfg.command, cfg.file, exit_code=EXIT_CONFIG)
        report.diagnostics.append({"severity": "error", "message": str(e)})
    except (ModelSoundnessFailure, UnsupportedDomain) as e:
        # raised while loading the environment, before any term is evaluated
        report = Report(cfg.command, cfg.file, exit_code=EXIT_EVAL)
        report.diagnostics.append({"severity": "error", "message": str(e)})
    if cfg.timing:
        report.timing = time.perf_counter() - start
    if cfg.fmt == "json":
        print(dump_json(report.to_json()))
    else:
        print(format_text(report))
    return report.exit_code


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
