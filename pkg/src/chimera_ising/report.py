"""Solver result record shared by the exact solvers, the heuristic and the harness."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

STATUSES = ("optimal", "heuristic", "capped", "error")
SCHEMA_VERSION = 1


@dataclass
class SolveReport:
    """Outcome of one solver call.

    Energies are integer numerators over ``gamma``.  ``status == "optimal"``
    means the energy is proven minimal, so it doubles as the lower bound.
    ``meta`` holds run-dependent data such as timings; everything else is a
    deterministic function of the inputs.
    """

    solver: str
    energy_num: int | None
    gamma: int
    spins: np.ndarray | None
    status: str
    lower_bound_num: int | None = None
    elapsed_ms: float = 0.0
    successes: int | None = None
    runs: int | None = None
    trace: list = field(default_factory=list)
    message: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == "optimal" and self.lower_bound_num is None:
            self.lower_bound_num = self.energy_num
        if (self.energy_num is not None and self.lower_bound_num is not None
                and self.energy_num < self.lower_bound_num):
            raise ValueError("energy below the lower bound")

    @property
    def energy(self) -> Fraction | None:
        return None if self.energy_num is None else Fraction(self.energy_num, self.gamma)

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "solver": self.solver,
            "status": self.status,
            "energy_num": self.energy_num,
            "gamma": self.gamma,
            "energy": None if self.energy_num is None else self.energy_num / self.gamma,
            "lower_bound_num": self.lower_bound_num,
            "spins": None if self.spins is None else [int(x) for x in self.spins],
            "successes": self.successes,
            "runs": self.runs,
            "trace": self.trace,
            "message": self.message,
            "elapsed_ms": round(self.elapsed_ms, 3),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SolveReport":
        spins = d.get("spins")
        return cls(
            solver=d["solver"], energy_num=d.get("energy_num"), gamma=d["gamma"],
            spins=None if spins is None else np.array(spins, dtype=np.int8),
            status=d["status"], lower_bound_num=d.get("lower_bound_num"),
            elapsed_ms=d.get("elapsed_ms", 0.0), successes=d.get("successes"),
            runs=d.get("runs"), trace=d.get("trace") or [], message=d.get("message", ""),
            meta=d.get("meta") or {},
        )

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def error(cls, solver: str, gamma: int, message: str) -> "SolveReport":
        return cls(solver, None, gamma, None, "error", message=message)
