"""Residual records and pass/fail reports shared by all identity suites."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class IdentityResidual:
    """Worst-case residual of one identity over a batch of inputs.

    ``max_abs`` is the normalized residual (raw residual divided by the
    input scale of the sample), ``raw_max_abs`` the unnormalized one and
    ``scale`` the scale of the worst sample.
    """

    name: str
    max_abs: float
    raw_max_abs: float = 0.0
    scale: float = 1.0
    shape: tuple = ()
    samples: int = 1
    tol: float | None = None

    def __post_init__(self):
        if not self.max_abs >= 0:
            raise ValueError(f"residual of {self.name!r} is not a non-negative number")

    def effective_tol(self, tol: float) -> float:
        """The entry's own tolerance if it has one, else ``tol``."""
        return tol if self.tol is None else self.tol

    def passed(self, tol: float) -> bool:
        return self.max_abs <= self.effective_tol(tol)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "residual": self.max_abs,
            "raw_residual": self.raw_max_abs,
            "scale": self.scale,
            "shape": list(self.shape),
            "samples": self.samples,
        }


def residual_from(name, residual, scale=1.0, samples=None, tol=None) -> IdentityResidual:
    """Reduce a (batched) residual array to an :class:`IdentityResidual`.

    ``residual`` has the batch on its leading axis when ``scale`` is an array
    of per-sample scales; otherwise the whole array is one sample.
    """
    res = np.abs(np.asarray(residual))
    scale = np.asarray(scale, dtype=float)
    if scale.ndim == 0:
        raw = float(res.max()) if res.size else 0.0
        return IdentityResidual(name, raw / float(scale), raw, float(scale),
                                tuple(res.shape), samples or 1, tol)
    if res.shape[0] == 0:
        return IdentityResidual(name, 0.0, 0.0, 1.0, tuple(res.shape[1:]), 0, tol)
    per_sample = res.reshape(res.shape[0], -1).max(axis=1) if res.ndim > 1 else res
    normed = per_sample / scale
    worst = int(np.argmax(normed))
    return IdentityResidual(name, float(normed[worst]), float(per_sample[worst]),
                            float(scale[worst]), tuple(res.shape[1:]),
                            samples or int(res.shape[0]), tol)


@dataclass
class IdentityReport:
    """A collection of residuals judged against one tolerance."""

    tol: float
    entries: list = field(default_factory=list)
    title: str = ""

    def add(self, entry: IdentityResidual) -> IdentityResidual:
        self.entries.append(entry)
        return entry

    def extend(self, entries):
        for e in entries:
            self.add(e)

    @property
    def passed(self) -> bool:
        return all(e.passed(self.tol) for e in self.entries)

    @property
    def failures(self) -> list:
        return [e for e in self.entries if not e.passed(self.tol)]

    def __getitem__(self, name) -> IdentityResidual:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self):
        return [e.name for e in self.entries]

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "tol": self.tol,
            "passed": self.passed,
            "identities": [dict(e.to_dict(), passed=e.passed(self.tol), tol=e.effective_tol(self.tol))
                           for e in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def lines(self):
        for e in self.entries:
            mark = "PASS" if e.passed(self.tol) else "FAIL"
            yield f"{mark}  {e.name:<48s} {e.max_abs:.3e}  (tol {e.effective_tol(self.tol):.1e})"
