"""Solve diagnostics shared by the dense and split solvers."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np


@dataclass
class SolveReport:
    """What a solve did and how well it went.

    ``timings`` holds wall time per phase in seconds, ``factor_sizes`` the
    scalar count of each stored factor, keyed by factor name.
    """

    solver: str
    residual: float = float("nan")
    timings: dict = field(default_factory=dict)
    factor_sizes: dict = field(default_factory=dict)
    condition: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def total_time(self) -> float:
        return float(sum(self.timings.values()))

    @contextmanager
    def phase(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "relative_residual": self.residual,
            "timings": dict(self.timings),
            "total_time": self.total_time,
            "factor_sizes": dict(self.factor_sizes),
            "condition_estimates": dict(self.condition),
            "warnings": list(self.warnings),
        }


def relative_residual(r, b) -> float:
    """``||r|| / ||b||``, falling back to ``||r||`` when ``b`` vanishes."""
    nb = float(np.linalg.norm(b))
    nr = float(np.linalg.norm(r))
    return nr / nb if nb > 0 else nr
