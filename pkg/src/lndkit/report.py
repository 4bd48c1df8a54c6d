"""Structured pass/fail records shared by every named check."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Dict, List

from .ideal import BudgetExceeded
from .polyring import Poly

PASS = "pass"
FAIL = "fail"
ERROR = "error"
EXCEEDED = "exceeded-bounds"
STATUSES = (PASS, FAIL, ERROR, EXCEEDED)


class CheckFailed(Exception):
    """A verification produced a counterexample; ``witnesses`` names it."""

    def __init__(self, message: str, **witnesses):
        self.witnesses = witnesses
        super().__init__(message)


def serialize(value: Any) -> Any:
    """Convert witnesses to JSON-friendly values; polynomials use the
    expression grammar."""
    if isinstance(value, Poly):
        return str(value)
    if isinstance(value, dict):
        return {str(k): serialize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [serialize(v) for v in value]
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    return str(value)


@dataclass
class Report:
    name: str
    status: str = PASS
    witnesses: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)
    subchecks: Dict[str, str] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == PASS

    def check(self, label: str, passed: bool, **witnesses) -> bool:
        """Record a sub-check; a failure downgrades the report and keeps the
        witnesses under ``label``."""
        self.subchecks[label] = PASS if passed else FAIL
        if not passed:
            if self.status == PASS:
                self.status = FAIL
            for k, v in witnesses.items():
                self.witnesses[f"{label}.{k}"] = v
        return passed

    def absorb(self, label: str, other: "Report") -> bool:
        """Fold a nested report in as a single sub-check."""
        self.subchecks[label] = other.status
        for k, v in other.subchecks.items():
            self.subchecks[f"{label}/{k}"] = v
        for k, v in other.witnesses.items():
            self.witnesses[f"{label}.{k}"] = v
        if other.status != PASS and self.status == PASS:
            self.status = other.status
        return other.ok

    def to_dict(self, timing: bool = True) -> Dict[str, Any]:
        d = {
            "name": self.name,
            "status": self.status,
            "witnesses": serialize(self.witnesses),
            "notes": list(self.notes),
            "subchecks": dict(self.subchecks),
        }
        if timing:
            d["elapsed"] = round(self.elapsed, 6)
        return d

    def summary(self) -> str:
        line = f"[{self.status}] {self.name}"
        if self.status != PASS:
            failed = [k for k, v in self.subchecks.items() if v != PASS and "/" not in k]
            if failed:
                line += f"  (failed: {', '.join(failed)})"
        return line


@contextmanager
def reporting(name: str):
    """Run a block as a named check, turning exceptions into report states.

    Budget overruns become ``exceeded-bounds``, :class:`CheckFailed` becomes
    ``fail`` with its witnesses, anything else becomes ``error``.
    """
    rep = Report(name)
    start = time.perf_counter()
    try:
        yield rep
    except BudgetExceeded as exc:
        rep.status = EXCEEDED
        rep.notes.append(str(exc))
    except CheckFailed as exc:
        rep.status = FAIL
        rep.notes.append(str(exc))
        rep.witnesses.update(exc.witnesses)
    except Exception as exc:  # captured per check, never aborts a batch
        rep.status = ERROR
        rep.notes.append(f"{type(exc).__name__}: {exc}")
    finally:
        rep.elapsed = time.perf_counter() - start
