from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from typing import Optional


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    line: int
    column: int
    message: str
    expected: Optional[str] = None
    actual: Optional[str] = None

    def text(self, path: str = "<input>") -> str:
        out = f"{path}:{self.line}:{self.column}: {self.severity}: {self.message}"
        if self.expected is not None:
            out += f"\n  expected: {self.expected}\n  actual:   {self.actual}"
        return out

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


class DiagnosticError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


class TypeCheckError(Exception):
    """Raised by the checker; carries an optional expected/actual pair."""

    def __init__(self, message: str, expected: Optional[str] = None, actual: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.expected = expected
        self.actual = actual


class FuelExhausted(Exception):
    def __init__(self, fuel: int, last_redex):
        self.fuel = fuel
        self.last_redex = last_redex
        super().__init__(f"fuel {fuel} exhausted")


class UnsupportedDomain(Exception):
    pass


class ModelSoundnessFailure(Exception):
    pass


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
