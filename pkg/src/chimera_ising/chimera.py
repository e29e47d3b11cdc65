"""Chimera graph topology, fault lists and the coupling granularity set.

Node numbering is row-major over cells, then side, then unit::

    index = row * 8k + col * 8 + side * 4 + unit

Side 0 (left) nodes carry the vertical couplers to the cell below, side 1
(right) nodes carry the horizontal couplers to the cell to the right.  When
a field node is requested it is numbered ``8k**2``, after every qubit.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

LEFT = 0
RIGHT = 1
UNITS = 4


class ChimeraError(ValueError):
    """Raised for invalid coordinates, node ids or fault entries."""


class ChimeraCoord(NamedTuple):
    row: int
    col: int
    side: int
    unit: int

    def index(self, k: int) -> int:
        check_coord(self, k)
        return self.row * 8 * k + self.col * 8 + self.side * 4 + self.unit

    @classmethod
    def from_index(cls, v: int, k: int) -> "ChimeraCoord":
        if not 0 <= v < 8 * k * k:
            raise ChimeraError(f"node {v} out of range for C_{k}")
        return cls(v // (8 * k), (v // 8) % k, (v // 4) % 2, v % 4)


def check_coord(c: ChimeraCoord, k: int) -> None:
    row, col, side, unit = c
    if not (0 <= row < k and 0 <= col < k and side in (0, 1) and 0 <= unit < UNITS):
        raise ChimeraError(f"invalid coordinate {tuple(c)} for C_{k}")


def node_index(k: int, row: int, col: int, side: int, unit: int) -> int:
    return ChimeraCoord(row, col, side, unit).index(k)


# ---------------------------------------------------------------------------
# granularity


@dataclass(frozen=True)
class Granularity:
    """The value set {-1, -1 + 1/gamma, ..., 1 - 1/gamma, 1}."""

    gamma: int = 10

    def __post_init__(self):
        if not isinstance(self.gamma, int) or self.gamma < 1:
            raise ValueError(f"gamma must be a positive integer, got {self.gamma!r}")

    def values(self) -> list[Fraction]:
        return [Fraction(n, self.gamma) for n in range(-self.gamma, self.gamma + 1)]

    def contains(self, x) -> bool:
        x = _exact(x)
        return abs(x) <= 1 and (x * self.gamma).denominator == 1

    def numerator(self, x) -> int:
        """Numerator (over gamma) of the member of the set nearest to ``x``."""
        scaled = abs(_exact(x)) * self.gamma
        n = math.floor(scaled + Fraction(1, 2))  # half away from zero on |x|
        if _exact(x) < 0:
            n = -n
        return max(-self.gamma, min(self.gamma, n))


def _exact(x) -> Fraction:
    """Exact rational view of ``x``; floats go through their shortest repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot snap non-finite value {x!r}")
        return Fraction(repr(x))
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, np.floating):
        return _exact(float(x))
    return Fraction(str(x))


def snap_to_granularity(x, g: Granularity | int = 10) -> float:
    """Nearest member of the granularity set; midpoints round away from zero.

    Floats are read through their shortest decimal representation, so
    ``0.25`` is treated as the exact midpoint 1/4 and snaps to 0.3.
    """
    if isinstance(g, int):
        g = Granularity(g)
    return g.numerator(x) / g.gamma


# ---------------------------------------------------------------------------
# fault lists


@dataclass(frozen=True)
class FaultList:
    nodes: tuple[ChimeraCoord, ...] = ()
    couplers: tuple[tuple[ChimeraCoord, ChimeraCoord], ...] = ()

    def restrict(self, k: int) -> "FaultList":
        """Entries that lie inside the top-left k x k cell block."""
        inside = lambda c: c.row < k and c.col < k
        return FaultList(
            tuple(c for c in self.nodes if inside(c)),
            tuple(p for p in self.couplers if inside(p[0]) and inside(p[1])),
        )


_FAULT_LINE = re.compile(r"^(node|coupler)((?:\s+-?\d+)+)$")


def parse_fault_list(text: str, source: str = "<string>") -> FaultList:
    nodes, couplers = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _FAULT_LINE.match(line)
        nums = [int(t) for t in m.group(2).split()] if m else []
        if m and m.group(1) == "node" and len(nums) == 4:
            nodes.append(ChimeraCoord(*nums))
        elif m and m.group(1) == "coupler" and len(nums) == 8:
            couplers.append((ChimeraCoord(*nums[:4]), ChimeraCoord(*nums[4:])))
        else:
            raise ChimeraError(f"{source}:{lineno}: malformed fault entry {raw.strip()!r}")
    return FaultList(tuple(nodes), tuple(couplers))


def read_fault_list(path) -> FaultList:
    path = Path(path)
    return parse_fault_list(path.read_text(), str(path))


def format_fault_list(faults: FaultList) -> str:
    lines = [f"node {c.row} {c.col} {c.side} {c.unit}" for c in faults.nodes]
    for a, b in faults.couplers:
        lines.append(f"coupler {a.row} {a.col} {a.side} {a.unit} {b.row} {b.col} {b.side} {b.unit}")
    return "\n".join(lines) + "\n"


def example_faults(k: int = 16) -> FaultList:
    """Illustrative fault list (17 qubits, 2 couplers on C_16).

    The real machine's faulty elements are not public.  This list is made
    up so that the derived counts match the published ones: 2031 working
    qubits and 7950 nonzero edges for the ±1 family on C_16, and 507 working
    qubits with 1951 edges when restricted to the top-left C_8.
    """
    text = resources.files(__package__).joinpath("data/faults_c16_example.txt").read_text()
    faults = parse_fault_list(text, "faults_c16_example.txt")
    return faults.restrict(k) if k < 16 else faults


# ---------------------------------------------------------------------------
# graph


def _chimera_edges(k: int) -> np.ndarray:
    """All couplers of the fault-free C_k as a sorted (m, 2) array."""
    r, c, a, b = np.meshgrid(np.arange(k), np.arange(k), np.arange(4), np.arange(4), indexing="ij")
    base = (r * 8 * k + c * 8).ravel()
    intra = np.stack([base + a.ravel(), base + 4 + b.ravel()], axis=1)
    r, c, u = np.meshgrid(np.arange(k), np.arange(k), np.arange(4), indexing="ij")
    r, c, u = r.ravel(), c.ravel(), u.ravel()
    down = r + 1 < k
    vert = np.stack([r * 8 * k + c * 8 + u, (r + 1) * 8 * k + c * 8 + u], axis=1)[down]
    right = c + 1 < k
    horiz = np.stack([r * 8 * k + c * 8 + 4 + u, r * 8 * k + (c + 1) * 8 + 4 + u], axis=1)[right]
    edges = np.concatenate([intra, vert, horiz]).astype(np.int64)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return edges[order]


class ChimeraGraph:
    """Immutable C_k topology with faulty elements removed.

    ``edges`` lists couplers (u < v) in lexicographic order; with a field
    node the field edges (i, v) follow the Chimera edges.
    """

    def __init__(self, k: int, faulty_nodes: Iterable = (), faulty_couplers: Iterable = (),
                 with_field: bool = False):
        if not isinstance(k, (int, np.integer)) or k < 1:
            raise ChimeraError(f"k must be a positive integer, got {k!r}")
        self.k = k = int(k)
        self.num_qubits = 8 * k * k
        self.with_field = bool(with_field)
        self.field_node = self.num_qubits if with_field else None

        bad = set()
        for f in faulty_nodes:
            bad.add(self._as_index(f))
        self.faulty_nodes = frozenset(bad)

        full = _chimera_edges(k)
        full_set = set(map(tuple, full.tolist()))
        broken = set()
        for pair in faulty_couplers:
            u, v = sorted(self._as_index(p) for p in pair)
            if (u, v) not in full_set:
                raise ChimeraError(f"faulty coupler {self.coord(u)}-{self.coord(v)} is not a coupler of C_{k}")
            broken.add((u, v))
        self.faulty_couplers = frozenset(broken)

        keep = np.ones(len(full), dtype=bool)
        if bad:
            badarr = np.fromiter(bad, dtype=np.int64)
            keep &= ~np.isin(full[:, 0], badarr) & ~np.isin(full[:, 1], badarr)
        if broken:
            code = full[:, 0] * self.num_qubits + full[:, 1]
            keep &= ~np.isin(code, np.array([u * self.num_qubits + v for u, v in broken]))
        self.chimera_edges = full[keep]

        working = np.array([v for v in range(self.num_qubits) if v not in bad], dtype=np.int64)
        self.qubits = working
        if with_field:
            fe = np.stack([working, np.full(len(working), self.field_node)], axis=1)
            self.edges = np.concatenate([self.chimera_edges, fe]).astype(np.int64)
            self.nodes = np.append(working, self.field_node)
        else:
            self.edges = self.chimera_edges
            self.nodes = working

        size = self.num_qubits + (1 if with_field else 0)
        adj = [[] for _ in range(size)]
        for u, v in self.edges.tolist():
            adj[u].append(v)
            adj[v].append(u)
        self._adj = tuple(tuple(sorted(a)) for a in adj)
        self._sealed = True

    def __setattr__(self, name, value):
        if getattr(self, "_sealed", False):
            raise AttributeError("ChimeraGraph is immutable")
        super().__setattr__(name, value)

    def _key(self):
        return self.k, self.faulty_nodes, self.faulty_couplers, self.with_field

    def __eq__(self, other):
        return isinstance(other, ChimeraGraph) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _as_index(self, f) -> int:
        if isinstance(f, (int, np.integer)):
            if not 0 <= f < self.num_qubits:
                raise ChimeraError(f"node {f} out of range for C_{self.k}")
            return int(f)
        return ChimeraCoord(*f).index(self.k)

    @property
    def num_nodes(self) -> int:
        return len(self.nodes)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def coord(self, v: int) -> ChimeraCoord:
        return ChimeraCoord.from_index(v, self.k)

    def index(self, row: int, col: int, side: int, unit: int) -> int:
        return ChimeraCoord(row, col, side, unit).index(self.k)

    def is_working(self, v: int) -> bool:
        if v == self.field_node:
            return True
        return 0 <= v < self.num_qubits and v not in self.faulty_nodes

    def neighbors(self, v: int) -> list[int]:
        if not isinstance(v, (int, np.integer)) or not self.is_working(int(v)):
            raise ChimeraError(f"node {v} is not a working node of this C_{self.k}")
        return list(self._adj[int(v)])

    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Neighbor tuples indexed by node id (empty for faulty nodes)."""
        return self._adj

    def color(self, v: int) -> int:
        """Two-coloring of the qubits: side XOR parity of row + col."""
        c = self.coord(v)
        return c.side ^ ((c.row + c.col) & 1)

    def __repr__(self) -> str:
        return (f"ChimeraGraph(k={self.k}, faulty_nodes={len(self.faulty_nodes)}, "
                f"faulty_couplers={len(self.faulty_couplers)}, with_field={self.with_field})")


def build(k: int, faults: FaultList | None = None, with_field: bool = False) -> ChimeraGraph:
    faults = faults or FaultList()
    return ChimeraGraph(k, faults.nodes, faults.couplers, with_field)
