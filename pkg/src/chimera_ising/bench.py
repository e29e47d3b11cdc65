"""Batch runs, optimality gaps, time-to-solution and summary tables.

Energies stay integer numerators over gamma throughout; gaps are exact
fractions and only become floats when written out.

JSON record layout (``schema`` 1), one object per instance::

    {"schema": 1, "instance": id, "family": str, "nodes": int, "edges": int,
     "gamma": int, "best_num": int | null, "reference_num": int | null,
     "reports": {solver: SolveReport dict},
     "gaps": {solver: {"value": float, "exact": "p/q", "absolute": bool}}}

CSV summary columns, one row per family: ``family, instances,
nodes_min, nodes_max, nodes_avg, edges_min, edges_max, edges_avg,
opt_known`` followed by ``best_<s>, gap_max_<s>, gap_avg_<s>`` for every
solver ``s``.  Gaps are percentages; instances whose best energy is zero
contribute absolute differences to ``absgap_max_<s>`` instead.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

from .exact import brute_force, solve_exact
from .report import SolveReport
from .selby import DEFAULT_SEEDS, HeuristicConfig, run_parallel
from .transforms import IsingInstance

RECORD_SCHEMA = 1


def t99(p: float, t_anneal: float) -> float:
    """Time to see an optimum with 99 % confidence from per-run success rate p.

    p = 0 gives infinity; p = 1 gives one run's duration.
    """
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValueError(f"success probability {p} outside [0, 1]")
    if p == 0.0:
        return math.inf
    if p == 1.0:
        return t_anneal
    return math.log(0.01) / math.log1p(-p) * t_anneal


class Gap(NamedTuple):
    """Percent gap, or the plain energy difference when the best energy is 0."""

    value: Fraction
    absolute: bool

    def __float__(self) -> float:
        return float(self.value)


def gap(energy, best_num: int, gamma: int = 10) -> Gap:
    """100 (E - E_best) / |E_best|; ``energy`` is a numerator or a SolveReport."""
    e = energy.energy_num if isinstance(energy, SolveReport) else energy
    if isinstance(energy, SolveReport):
        gamma = energy.gamma
    if e is None:
        raise ValueError("report carries no energy")
    if e < best_num:
        raise ValueError("energy below the best known energy")
    if best_num == 0:
        return Gap(Fraction(e, gamma), True)
    return Gap(Fraction(100 * (e - best_num), abs(best_num)), False)


def success_probability(energies: Sequence[int], best_num: int, within_percent: float = 0.0) -> float:
    """Share of runs hitting the best energy, or staying within the given
    percentage of it."""
    if not energies:
        raise ValueError("no runs")
    if within_percent < 0:
        raise ValueError("tolerance must be non-negative")
    limit = Fraction(within_percent).limit_denominator(10**9)
    hits = 0
    for e in energies:
        g = gap(e, best_num)
        hits += g.value == 0 if g.absolute else g.value <= limit
    return hits / len(energies)


# ---------------------------------------------------------------------------
# solvers


@dataclass(frozen=True)
class Budget:
    """Per-instance limits handed to every solver."""

    time_limit: float | None = 30.0
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    w: int = 3
    max_passes: int | None = None
    brute_cap: int = 24
    width_cap: int = 20


def _brute(inst: IsingInstance, b: Budget) -> SolveReport:
    return brute_force(inst, cap=b.brute_cap)


def _dp(inst: IsingInstance, b: Budget) -> SolveReport:
    return solve_exact(inst, width_cap=b.width_cap)


def _selby(inst: IsingInstance, b: Budget) -> SolveReport:
    cfg = HeuristicConfig(w=b.w, time_limit=b.time_limit, max_passes=b.max_passes,
                          width_cap=b.width_cap)
    return run_parallel(inst, cfg, b.seeds)


SOLVERS: dict[str, Callable[[IsingInstance, Budget], SolveReport]] = {
    "brute": _brute,
    "dp": _dp,
    "selby": _selby,
}


@dataclass
class BenchRecord:
    instance: str
    family: str
    nodes: int
    edges: int
    gamma: int
    reports: dict[str, SolveReport] = field(default_factory=dict)
    reference_num: int | None = None

    @property
    def best_num(self) -> int | None:
        vals = [r.energy_num for r in self.reports.values() if r.energy_num is not None]
        if self.reference_num is not None:
            vals.append(self.reference_num)
        return min(vals) if vals else None

    @property
    def opt_known(self) -> bool:
        best = self.best_num
        return any(r.status == "optimal" and r.energy_num == best for r in self.reports.values())

    def gaps(self) -> dict[str, Gap]:
        best = self.best_num
        return {s: gap(r.energy_num, best, self.gamma)
                for s, r in self.reports.items() if r.energy_num is not None}

    def to_dict(self) -> dict:
        return {
            "schema": RECORD_SCHEMA, "instance": self.instance, "family": self.family,
            "nodes": self.nodes, "edges": self.edges, "gamma": self.gamma,
            "best_num": self.best_num, "reference_num": self.reference_num,
            "reports": {s: r.to_dict() for s, r in self.reports.items()},
            "gaps": {s: {"value": float(g.value), "exact": str(g.value), "absolute": g.absolute}
                     for s, g in self.gaps().items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BenchRecord":
        if d.get("schema") != RECORD_SCHEMA:
            raise ValueError(f"unsupported record schema {d.get('schema')!r}")
        return cls(d["instance"], d["family"], d["nodes"], d["edges"], d["gamma"],
                   {s: SolveReport.from_dict(r) for s, r in d["reports"].items()},
                   d.get("reference_num"))


def _run_one(args) -> BenchRecord:
    name, inst, solvers, budget, ref = args
    nodes, edges = inst.stats()
    rec = BenchRecord(name, inst.family or "unknown", nodes, edges, inst.gamma, reference_num=ref)
    for s in solvers:
        try:
            rec.reports[s] = SOLVERS[s](inst, budget)
        except Exception as exc:  # quarantine: one bad solver call never stops the batch
            rec.reports[s] = SolveReport.error(s, inst.gamma, f"{type(exc).__name__}: {exc}")
    return rec


def run_batch(instances: Iterable[tuple[str, IsingInstance]] | Mapping[str, IsingInstance],
              solvers: Sequence[str], budget: Budget = Budget(),
              references: Mapping[str, int] | None = None, workers: int = 1) -> list[BenchRecord]:
    """Run every solver on every instance; records come back in input order."""
    unknown = [s for s in solvers if s not in SOLVERS]
    if unknown:
        raise ValueError(f"unknown solver(s) {', '.join(unknown)}; known: {', '.join(SOLVERS)}")
    items = list(instances.items() if isinstance(instances, Mapping) else instances)
    refs = references or {}
    jobs = [(name, inst, tuple(solvers), budget, refs.get(name)) for name, inst in items]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


# ---------------------------------------------------------------------------
# summaries


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        x = float(x)
    if isinstance(x, float):
        return f"{x:.4f}"
    return str(x)


def summarize(records: Sequence[BenchRecord], solvers: Sequence[str] | None = None) -> list[dict]:
    """One row per family, families in order of first appearance."""
    if solvers is None:
        solvers = list(dict.fromkeys(s for r in records for s in r.reports))
    fams: dict[str, list[BenchRecord]] = {}
    for r in records:
        fams.setdefault(r.family, []).append(r)
    rows = []
    for fam, recs in fams.items():
        nodes = [r.nodes for r in recs]
        edges = [r.edges for r in recs]
        row = {
            "family": fam, "instances": len(recs),
            "nodes_min": min(nodes), "nodes_max": max(nodes), "nodes_avg": Fraction(sum(nodes), len(nodes)),
            "edges_min": min(edges), "edges_max": max(edges), "edges_avg": Fraction(sum(edges), len(edges)),
            "opt_known": sum(r.opt_known for r in recs),
        }
        for s in solvers:
            pct, absolute, best = [], [], 0
            for r in recs:
                g = r.gaps().get(s)
                if g is None:
                    continue
                best += g.value == 0
                (absolute if g.absolute else pct).append(g.value)
            row[f"best_{s}"] = best
            row[f"gap_max_{s}"] = max(pct) if pct else ""
            row[f"gap_avg_{s}"] = sum(pct, Fraction(0)) / len(pct) if pct else ""
            row[f"absgap_max_{s}"] = max(absolute) if absolute else ""
        rows.append(row)
    return rows


def summary_csv(rows: Sequence[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    cols = list(rows[0])
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(cols)
    for row in rows:
        wr.writerow([_fmt(row.get(c, "")) for c in cols])
    return buf.getvalue()


def records_json(records: Sequence[BenchRecord]) -> str:
    """JSON lines, one record per instance."""
    return "".join(json.dumps(r.to_dict(), sort_keys=True) + "\n" for r in records)


def parse_records(text: str) -> list[BenchRecord]:
    return [BenchRecord.from_dict(json.loads(line)) for line in text.splitlines() if line.strip()]
