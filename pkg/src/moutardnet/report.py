"""Structured pass/fail records produced by every certifier."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np

MAX_WITNESSES = 200


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


@dataclass
class VerificationReport:
    """Outcome of one certifier run.

    ``passed`` holds exactly when the worst residual is within ``tol`` and no
    witness cell was recorded.  Witnesses are lattice positions (base vertex of
    the failing face, or the failing vertex for vertex-star checks), worst first.
    """

    check: str
    passed: bool
    max_residual: float
    mean_residual: float
    witnesses: list[tuple[int, ...]]
    skipped: int = 0
    tol: float = 0.0
    checked: int = 0
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_residuals(cls, check, residuals, tol, skipped=0, failures=(), details=None):
        """Build a report from a mapping ``cell -> residual``.

        ``failures`` lists cells that fail for a non-residual reason (e.g. a
        degenerate stencil); they become witnesses whatever their residual.
        """
        residuals = {tuple(int(i) for i in k): float(v) for k, v in residuals.items()}
        values = np.array(list(residuals.values()), dtype=float)
        bad = [k for k, v in residuals.items() if not (v <= tol)]
        bad.sort(key=lambda k: -residuals[k] if np.isfinite(residuals[k]) else -np.inf)
        for cell in failures:
            cell = tuple(int(i) for i in cell)
            if cell not in bad:
                bad.append(cell)
        if values.size:
            finite = values[np.isfinite(values)]
            max_res = float(np.max(values)) if finite.size == values.size else float("inf")
            mean_res = float(np.mean(finite)) if finite.size else float("inf")
        else:
            max_res = mean_res = 0.0
        return cls(
            check=check,
            passed=not bad,
            max_residual=max_res,
            mean_residual=mean_res,
            witnesses=bad[:MAX_WITNESSES],
            skipped=int(skipped),
            tol=float(tol),
            checked=len(residuals),
            details=dict(details or {}),
        )

    @property
    def worst(self):
        return self.witnesses[0] if self.witnesses else None

    def to_dict(self) -> dict:
        return _jsonable(
            {
                "check": self.check,
                "passed": self.passed,
                "max_residual": self.max_residual,
                "mean_residual": self.mean_residual,
                "witnesses": [list(w) for w in self.witnesses],
                "skipped": self.skipped,
                "checked": self.checked,
                "tol": self.tol,
                "details": self.details,
            }
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (
            f"[{status}] {self.check}: max residual {self.max_residual:.3e} "
            f"(tol {self.tol:.1e}), {self.checked} checked, {self.skipped} skipped"
        )
        if self.witnesses:
            line += f", worst cell {self.witnesses[0]}"
        return line

    def __bool__(self):
        return self.passed
