"""Subgraph-sampling heuristic for Chimera Ising instances.

The heuristic repeatedly picks a large induced subgraph of low width,
freezes every spin outside it and replaces the spins inside it by their
exact conditional optimum.  The subgraphs H(w, o, i, j) drop, in every
(w+1)-th cell column (o = 0) or row (o = 1), the nodes that carry the
couplers to the next column (row), except in one exempt row (column) j.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .exact import DEFAULT_WIDTH_CAP, SweepDecomposition, build_sweep, condition, solve_dp
from .report import SolveReport
from .rng import PortableRng
from .transforms import IsingInstance

DEFAULT_SEEDS = tuple(range(4711, 4791))


@dataclass(frozen=True)
class SubsetSpec:
    w: int
    orientation: int
    i: int
    j: int


def subset_nodes(k: int, spec: SubsetSpec, faulty: Iterable[int] = ()) -> np.ndarray:
    """Working qubits of H(w, orientation, i, j) on C_k, sorted."""
    w, o, i, j = spec.w, spec.orientation, spec.i, spec.j
    if w < 1 or o not in (0, 1):
        raise ValueError(f"invalid subset parameters {spec}")
    if not 0 <= i <= w:
        raise ValueError(f"residue i={i} outside 0..{w}")
    if not 0 <= j < k:
        raise ValueError(f"exempt index j={j} outside 0..{k - 1}")
    keep = np.ones(8 * k * k, dtype=bool)
    for line in range(i, k - 1, w + 1):  # the last line has no outgoing couplers
        for other in range(k):
            if other == j:
                continue
            r, c = (other, line) if o == 0 else (line, other)
            base = r * 8 * k + c * 8 + (4 if o == 0 else 0)
            keep[base:base + 4] = False
    bad = list(faulty)
    if bad:
        keep[bad] = False
    return np.flatnonzero(keep)


def collection(w: int, x: int, y: int, z: int) -> list[SubsetSpec]:
    """The ordered outer-pass family: both orientations, all residues from y."""
    return ([SubsetSpec(w, x, (y + d) % (w + 1), z) for d in range(w + 1)]
            + [SubsetSpec(w, 1 - x, (y + d) % (w + 1), z) for d in range(w + 1)])


class SubsetCache:
    """Node sets and elimination orders of the subsets of one instance."""

    def __init__(self, inst: IsingInstance):
        if inst.graph is None:
            raise ValueError("the heuristic needs an instance on a Chimera graph")
        self.inst = inst
        self.graph = inst.graph
        self._data: dict[SubsetSpec, tuple[np.ndarray, SweepDecomposition]] = {}

    def get(self, spec: SubsetSpec) -> tuple[np.ndarray, SweepDecomposition]:
        hit = self._data.get(spec)
        if hit is None:
            g = self.graph
            nodes = subset_nodes(g.k, spec, g.faulty_nodes)
            sweep = build_sweep(g.adjacency(), nodes.tolist(), g.k,
                                (spec.w, spec.orientation, spec.i, spec.j))
            hit = self._data[spec] = (nodes, sweep)
        return hit


def inner(inst: IsingInstance, s, spec: SubsetSpec, prefer=None,
          cache: SubsetCache | None = None, width_cap: int = DEFAULT_WIDTH_CAP) -> np.ndarray:
    """Replace the spins of the subset by their exact conditional optimum.

    ``prefer`` is a full-length +-1 vector used to break ties.
    """
    cache = cache or SubsetCache(inst)
    nodes, sweep = cache.get(spec)
    problem = condition(inst, s, nodes)
    pref = None if prefer is None else np.asarray(prefer)[nodes]
    rep = solve_dp(problem, sweep, pref, width_cap)
    out = np.array(s, dtype=np.int8)
    out[nodes] = rep.spins
    return out


def outer(inst: IsingInstance, s, rng: PortableRng, w: int = 3, prefer=None,
          cache: SubsetCache | None = None, deadline: float | None = None,
          log: list | None = None, width_cap: int = DEFAULT_WIDTH_CAP) -> np.ndarray:
    """One pass over a random collection; stops early once ``deadline`` passes.

    ``log``, when given, receives the energy numerator after every inner call.
    """
    cache = cache or SubsetCache(inst)
    k = inst.graph.k
    x, y, z = rng.below(2), rng.below(w + 1), rng.below(k)
    for spec in collection(w, x, y, z):
        if deadline is not None and time.monotonic() >= deadline:
            break
        s = inner(inst, s, spec, prefer, cache, width_cap)
        if log is not None:
            log.append(inst.energy_num(s))
    return s


@dataclass(frozen=True)
class HeuristicConfig:
    """Parameters of one heuristic run.

    ``time_limit`` is wall-clock seconds.  ``max_passes`` and
    ``target_energy_num`` are optional extra stop conditions; with a pass
    limit and no time limit the run is fully deterministic.
    """

    w: int = 3
    perturb_frac: float = 0.20
    restart: str = "perturb"
    time_limit: float | None = 30.0
    seed: int = 4711
    max_passes: int | None = None
    target_energy_num: int | None = None
    width_cap: int = DEFAULT_WIDTH_CAP

    def __post_init__(self):
        if self.w < 1:
            raise ValueError("w must be at least 1")
        if not 0 < self.perturb_frac <= 1:
            raise ValueError("perturbation fraction must lie in (0, 1]")
        if self.restart not in ("perturb", "fresh"):
            raise ValueError("restart must be 'perturb' or 'fresh'")


def _random_config(inst: IsingInstance, rng: PortableRng) -> np.ndarray:
    s = rng.spins(inst.n)
    for v in inst.graph.faulty_nodes:
        s[v] = 1
    return s


def _perturb(inst: IsingInstance, s: np.ndarray, rng: PortableRng, frac: float) -> np.ndarray:
    k = inst.graph.k
    cells = rng.sample(k * k, math.ceil(frac * k * k))
    s = s.copy()
    faulty = inst.graph.faulty_nodes
    for cell in sorted(cells):
        r, c = divmod(cell, k)
        base = r * 8 * k + c * 8
        for v in range(base, base + 8):
            bit = rng.bit()
            if v not in faulty:
                s[v] = 1 - 2 * bit
    return s


def run_heuristic(inst: IsingInstance, cfg: HeuristicConfig = HeuristicConfig(),
                  cache: SubsetCache | None = None) -> SolveReport:
    """Outer passes with restarts until a stop condition holds.

    ``trace`` lists every improvement as {"pass", "energy_num"}; the
    matching wall-clock offsets are in ``meta["trace_ms"]``.  The
    per-pass best energies are in ``meta["pass_best"]`` and the energies
    after every inner call, grouped by pass, in ``meta["inner_log"]``.
    """
    t0 = time.monotonic()
    cache = cache or SubsetCache(inst)
    deadline = None if cfg.time_limit is None else t0 + cfg.time_limit
    rng = PortableRng(cfg.seed)
    s = _random_config(inst, rng)
    prefer = rng.spins(inst.n)
    best_s, best = s.copy(), inst.energy_num(s)
    trace = [{"pass": 0, "energy_num": best}]
    trace_ms = [0.0]
    pass_best, inner_log = [], []
    passes = 0

    def done() -> bool:
        if cfg.target_energy_num is not None and best <= cfg.target_energy_num:
            return True
        if cfg.max_passes is not None and passes >= cfg.max_passes:
            return True
        return deadline is not None and time.monotonic() >= deadline

    while not done():
        if passes:
            if cfg.restart == "perturb":
                s = _perturb(inst, best_s, rng, cfg.perturb_frac)
            else:
                s = _random_config(inst, rng)
        log: list[int] = []
        s = outer(inst, s, rng, cfg.w, prefer, cache, deadline, log, cfg.width_cap)
        passes += 1
        inner_log.append(log)
        e = inst.energy_num(s)
        if e < best:
            best, best_s = e, s.copy()
            trace.append({"pass": passes, "energy_num": best})
            trace_ms.append(round((time.monotonic() - t0) * 1e3, 3))
        pass_best.append(best)

    return SolveReport(
        "selby", best, inst.gamma, best_s, "heuristic",
        elapsed_ms=(time.monotonic() - t0) * 1e3, trace=trace,
        meta={"seed": cfg.seed, "passes": passes, "w": cfg.w, "restart": cfg.restart,
              "trace_ms": trace_ms, "pass_best": pass_best, "inner_log": inner_log},
    )


def _run_one(args):
    inst, cfg = args
    return run_heuristic(inst, cfg)


def run_parallel(inst: IsingInstance, cfg: HeuristicConfig, seeds: Sequence[int] = DEFAULT_SEEDS,
                 workers: int = 1) -> SolveReport:
    """Independent runs, one per seed, reduced to the best energy.

    Ties go to the earliest seed in ``seeds``.  ``successes`` counts the
    runs that reached the best energy found.
    """
    t0 = time.monotonic()
    jobs = [(inst, replace(cfg, seed=sd)) for sd in seeds]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_run_one, jobs))
    else:
        cache = SubsetCache(inst)
        reports = [run_heuristic(i, c, cache) for i, c in jobs]
    best = min(range(len(reports)), key=lambda a: (reports[a].energy_num, a))
    rep = reports[best]
    energies = [r.energy_num for r in reports]
    return SolveReport(
        "selby", rep.energy_num, inst.gamma, rep.spins, "heuristic",
        elapsed_ms=(time.monotonic() - t0) * 1e3, trace=rep.trace,
        successes=sum(e == rep.energy_num for e in energies), runs=len(reports),
        meta={"seeds": list(seeds), "best_seed": jobs[best][1].seed, "energies": energies,
              "runs": [r.meta for r in reports]},
    )
