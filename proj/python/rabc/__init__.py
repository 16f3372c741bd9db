"""Resource bound analysis for a borrow calculus.

Thin wrappers over the C++ core; every result is plain Python data.
"""

import json

from ._rabc import EvalError, ParseError, TypingError
from . import _rabc

__all__ = ["EvalError", "ParseError", "TypingError", "validate", "analyze", "run", "check"]


def validate(source: str) -> dict:
    """Parse and validate; returns {"ok": bool, "errors": [...]}."""
    return json.loads(_rabc.validate(source))


def analyze(source: str, current_only: bool = False, w_sig: str = "1024", w_int: str = "1/1024") -> dict:
    """Infer signatures; same schema as `rabc analyze --json`."""
    return json.loads(_rabc.analyze(source, current_only, w_sig, w_int))


def run(source: str, fn: str, args: list, fuel: int = 10_000_000) -> dict:
    """Execute fn on argument literals such as "[1,2,3]"; returns ret and cost."""
    return json.loads(_rabc.run(source, fn, [str(a) for a in args], fuel))


def check(source: str, lo: int = 0, hi: int = 50, fn: str = "") -> list:
    """Measured cost against the inferred bound for sizes lo..hi."""
    return json.loads(_rabc.check(source, lo, hi, fn))
