"""Ising instances, the energy function and exact problem transformations.

All weights are integer numerators over a common denominator ``gamma``, so
energies, cut values and QUBO values are exact.  The public helpers return
:class:`fractions.Fraction` values; the ``*_num`` variants return the raw
integer numerators used by the solvers.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np

from .chimera import ChimeraGraph


class InstanceError(ValueError):
    """Raised for structurally invalid instances or configurations."""


def _as_spins(s, n: int) -> np.ndarray:
    s = np.asarray(s)
    if s.shape != (n,):
        raise InstanceError(f"expected {n} spins, got shape {s.shape}")
    if not np.all((s == 1) | (s == -1)):
        raise InstanceError("spins must be +1 or -1")
    return s.astype(np.int64)


@dataclass(frozen=True, eq=False)
class IsingInstance:
    """H(s) = sum_e J_e s_u s_v + sum_i h_i s_i, weights over ``gamma``.

    ``edges`` is an (m, 2) array with u < v, sorted and duplicate free.
    When ``graph`` is a :class:`ChimeraGraph` the spins are its qubits and
    every edge must be one of its couplers.
    """

    n: int
    h: np.ndarray
    edges: np.ndarray
    J: np.ndarray
    gamma: int = 10
    graph: ChimeraGraph | None = None
    name: str = ""
    family: str = ""

    def __post_init__(self):
        h = np.asarray(self.h, dtype=np.int64).reshape(-1)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        J = np.asarray(self.J, dtype=np.int64).reshape(-1)
        if h.shape != (self.n,):
            raise InstanceError(f"field has {h.size} entries for {self.n} spins")
        if len(edges) != len(J):
            raise InstanceError("edge and coupling arrays differ in length")
        if int(self.gamma) < 1:
            raise InstanceError("gamma must be a positive integer")
        if len(edges):
            if edges.min() < 0 or edges.max() >= self.n:
                raise InstanceError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise InstanceError("self loops are not allowed")
            edges = np.sort(edges, axis=1)
            order = np.lexsort((edges[:, 1], edges[:, 0]))
            edges, J = edges[order], J[order]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise InstanceError("duplicate edge")
        if self.graph is not None:
            g = self.graph
            if self.n != g.num_qubits:
                raise InstanceError(f"Chimera instance needs {g.num_qubits} spins, got {self.n}")
            allowed = set(map(tuple, g.chimera_edges.tolist()))
            for u, v in edges.tolist():
                if (u, v) not in allowed:
                    raise InstanceError(f"edge ({u}, {v}) is not a working coupler")
            for v in g.faulty_nodes:
                if h[v] != 0:
                    raise InstanceError(f"faulty qubit {v} carries a field")
        for name, arr in (("h", h), ("edges", edges), ("J", J)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "gamma", int(self.gamma))

    # -- construction -------------------------------------------------------

    @classmethod
    def from_dicts(cls, n: int, h: Mapping[int, int] | None = None,
                   J: Mapping[tuple[int, int], int] | None = None, gamma: int = 10,
                   **kw) -> "IsingInstance":
        hv = np.zeros(n, dtype=np.int64)
        for i, val in (h or {}).items():
            hv[i] = val
        items = sorted((tuple(sorted(e)), val) for e, val in (J or {}).items())
        edges = np.array([e for e, _ in items], dtype=np.int64).reshape(-1, 2)
        Jv = np.array([val for _, val in items], dtype=np.int64)
        return cls(n, hv, edges, Jv, gamma, **kw)

    @classmethod
    def from_real(cls, n: int, h: Mapping[int, float], J: Mapping[tuple[int, int], float],
                  denominator: int, **kw) -> "IsingInstance":
        """Round real weights to the nearest multiple of 1/denominator."""
        rnd = lambda x: int(np.floor(abs(x) * denominator + 0.5)) * (1 if x >= 0 else -1)
        return cls.from_dicts(n, {i: rnd(v) for i, v in h.items()},
                              {e: rnd(v) for e, v in J.items()}, denominator, **kw)

    def replace(self, **changes) -> "IsingInstance":
        base = dict(n=self.n, h=self.h, edges=self.edges, J=self.J, gamma=self.gamma,
                    graph=self.graph, name=self.name, family=self.family)
        base.update(changes)
        return IsingInstance(**base)

    # -- queries ------------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    def energy_num(self, s) -> int:
        s = _as_spins(s, self.n)
        val = int(np.dot(self.h, s))
        if self.m:
            val += int(np.dot(self.J, s[self.edges[:, 0]] * s[self.edges[:, 1]]))
        return val

    def energy(self, s) -> Fraction:
        return Fraction(self.energy_num(s), self.gamma)

    def respects_granularity(self) -> bool:
        """True when every weight lies in [-1, 1] on the gamma grid."""
        lim = self.gamma
        return bool(np.all(np.abs(self.h) <= lim) and np.all(np.abs(self.J) <= lim))

    def abs_weight_sum(self) -> int:
        return int(np.abs(self.h).sum() + np.abs(self.J).sum())

    def neighbor_lists(self) -> list[list[tuple[int, int]]]:
        """Per node, (neighbor, coupling numerator) pairs."""
        nb: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for (u, v), w in zip(self.edges.tolist(), self.J.tolist()):
            nb[u].append((v, w))
            nb[v].append((u, w))
        return nb

    def stats(self) -> tuple[int, int]:
        """Node and edge counts of the MaxCut graph, isolated nodes dropped.

        Nodes are spins touching a nonzero coupling or field, plus the field
        node when any field is nonzero; edges are the nonzero weights.
        """
        nz = self.J != 0
        touched = np.zeros(self.n, dtype=bool)
        touched[self.edges[nz, 0]] = True
        touched[self.edges[nz, 1]] = True
        has_h = self.h != 0
        touched |= has_h
        field = 1 if has_h.any() else 0
        return int(touched.sum()) + field, int(nz.sum() + has_h.sum())


def energy(inst: IsingInstance, s) -> Fraction:
    return inst.energy(s)


# ---------------------------------------------------------------------------
# MaxCut


@dataclass(frozen=True, eq=False)
class MaxCutInstance:
    """Weighted graph for max sum_{ij in delta(W)} c_ij; ``field_node`` is v."""

    n: int
    edges: np.ndarray
    c: np.ndarray
    gamma: int = 10
    field_node: int | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        c = np.asarray(self.c, dtype=np.int64).reshape(-1)
        if len(edges) != len(c):
            raise InstanceError("edge and weight arrays differ in length")
        if len(edges) and (edges.min() < 0 or edges.max() >= self.n):
            raise InstanceError("edge endpoint out of range")
        if self.field_node is not None and not 0 <= self.field_node < self.n:
            raise InstanceError(f"field node {self.field_node} is not a node")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "c", c)

    @property
    def total_weight_num(self) -> int:
        return int(self.c.sum())


@dataclass(frozen=True, eq=False)
class CutVector:
    """Side set W (boolean mask over nodes) and its characteristic vector x."""

    side: np.ndarray
    x: np.ndarray

    @classmethod
    def from_side(cls, inst: MaxCutInstance, side) -> "CutVector":
        side = np.asarray(side, dtype=bool)
        if side.shape != (inst.n,):
            raise InstanceError(f"side mask needs {inst.n} entries")
        x = (side[inst.edges[:, 0]] != side[inst.edges[:, 1]]).astype(np.int8)
        return cls(side, x)


def cut_value_num(inst: MaxCutInstance, cut: CutVector) -> int:
    side = np.asarray(cut.side, dtype=bool)
    if side.shape != (inst.n,) or np.asarray(cut.x).shape != (len(inst.edges),):
        raise InstanceError("cut does not match the instance dimensions")
    expected = side[inst.edges[:, 0]] != side[inst.edges[:, 1]]
    if not np.array_equal(expected, np.asarray(cut.x, dtype=bool)):
        raise InstanceError("x is not the characteristic vector of delta(W)")
    return int(inst.c[expected].sum())


def cut_value(inst: MaxCutInstance, cut: CutVector) -> Fraction:
    return Fraction(cut_value_num(inst, cut), inst.gamma)


def ising_to_maxcut(inst: IsingInstance) -> MaxCutInstance:
    """c_ij = J_ij on couplers, c_iv = h_i on field edges with h_i != 0.

    The field node is numbered ``inst.n`` and is only added when some field
    is nonzero.  Energy recovery: H(s) = sum(c) - 2 * cut(W).
    """
    hs = np.flatnonzero(inst.h)
    if len(hs):
        v = inst.n
        fe = np.stack([hs, np.full(len(hs), v)], axis=1)
        edges = np.concatenate([inst.edges, fe])
        c = np.concatenate([inst.J, inst.h[hs]])
        return MaxCutInstance(inst.n + 1, edges, c, inst.gamma, v)
    return MaxCutInstance(inst.n, inst.edges.copy(), inst.J.copy(), inst.gamma, None)


def maxcut_solution_to_spins(cut: CutVector, field_node: int | None) -> np.ndarray:
    """s_i = 1 - 2 x_iv, read off the side set so absent field edges work too.

    Without a field node every node is a spin and node 0 is fixed to +1.
    """
    side = np.asarray(cut.side, dtype=bool)
    if field_node is None:
        if side.size == 0:
            return np.zeros(0, dtype=np.int8)
        ref = side[0]
        return np.where(side == ref, 1, -1).astype(np.int8)
    if not 0 <= field_node < side.size or field_node != side.size - 1:
        raise InstanceError(f"field node {field_node} must be the last node of the cut graph")
    return np.where(side[:field_node] == side[field_node], 1, -1).astype(np.int8)


def spins_to_cut(inst: MaxCutInstance, s) -> CutVector:
    """Side set of a spin vector: W = spins equal to -1 (field node on +1 side)."""
    s = np.asarray(s)
    side = np.zeros(inst.n, dtype=bool)
    side[: len(s)] = s < 0
    return CutVector.from_side(inst, side)


# ---------------------------------------------------------------------------
# QUBO


@dataclass(frozen=True, eq=False)
class QuboInstance:
    """f(x) = sum_{i<j} Q_ij x_i x_j + sum_i q_i x_i, numerators over gamma."""

    Q: np.ndarray
    q: np.ndarray
    gamma: int = 10

    def __post_init__(self):
        Q = np.asarray(self.Q, dtype=np.int64)
        q = np.asarray(self.q, dtype=np.int64).reshape(-1)
        n = len(q)
        if Q.shape != (n, n):
            raise InstanceError(f"Q must be {n}x{n}")
        if np.any(np.tril(Q) != 0):
            raise InstanceError("Q must be strictly upper triangular with zero diagonal")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return len(self.q)

    def value_num(self, x) -> int:
        x = np.asarray(x, dtype=np.int64)
        return int(x @ self.Q @ x + self.q @ x)

    def value(self, x) -> Fraction:
        return Fraction(self.value_num(x), self.gamma)


@dataclass(frozen=True)
class QuboRecovery:
    """Maps an Ising energy back to the QUBO value.

    With the coefficients as written (``sense="min"``), 4 f(x) = H(s) + C.
    For maximization the Ising coefficients are negated, 4 f(x) = C - H(s),
    so the Ising minimum yields the QUBO maximum.  x_i = (s_i + 1) / 2.
    """

    constant: int
    sense: str
    gamma: int

    def value(self, ising_energy_num: int) -> Fraction:
        sign = 1 if self.sense == "min" else -1
        return Fraction(self.constant + sign * ising_energy_num, 4 * self.gamma)

    @staticmethod
    def x_from_spins(s) -> np.ndarray:
        return ((np.asarray(s, dtype=np.int64) + 1) // 2).astype(np.int8)


def qubo_to_ising(qubo: QuboInstance, sense: str = "max") -> tuple[IsingInstance, QuboRecovery]:
    """J_ij = Q_ij, h_i = sum_{j<i} Q_ji + sum_{j>i} Q_ij + 2 q_i (negated for max)."""
    if sense not in ("max", "min"):
        raise ValueError("sense must be 'max' or 'min'")
    Q, q = qubo.Q, qubo.q
    h = Q.sum(axis=0) + Q.sum(axis=1) + 2 * q
    iu, ju = np.nonzero(Q)
    Jv = Q[iu, ju]
    C = int(Q.sum() + 2 * q.sum())
    if sense == "max":
        h, Jv = -h, -Jv
    inst = IsingInstance(qubo.n, h, np.stack([iu, ju], axis=1), Jv, qubo.gamma)
    return inst, QuboRecovery(C, sense, qubo.gamma)


# ---------------------------------------------------------------------------
# preprocessing


@dataclass(frozen=True, eq=False)
class Preprocessed:
    """Result of fixing dominated spins.

    ``reduced`` keeps the original numbering; fixed spins are left isolated
    with zero field.  optimum(original) = optimum(reduced) + offset.
    """

    fixed: dict[int, int]
    reduced: IsingInstance
    offset_num: int

    @property
    def offset(self) -> Fraction:
        return Fraction(self.offset_num, self.reduced.gamma)

    def expand(self, s) -> np.ndarray:
        """Full configuration from one of the reduced instance."""
        s = np.array(s, dtype=np.int8)
        for i, v in self.fixed.items():
            s[i] = v
        return s


def preprocess_dominated_fields(inst: IsingInstance) -> Preprocessed:
    """Fix every spin with |h_i| >= sum_j |J_ij| to -sign(h_i), to fixpoint.

    A spin with zero field and no remaining couplings is fixed to +1.
    """
    h = inst.h.copy()
    nb = [dict() for _ in range(inst.n)]
    for (u, v), w in zip(inst.edges.tolist(), inst.J.tolist()):
        if w:
            nb[u][v] = w
            nb[v][u] = w
    load = [sum(abs(w) for w in d.values()) for d in nb]
    fixed: dict[int, int] = {}
    offset = 0
    queue = deque(range(inst.n))
    queued = [True] * inst.n
    while queue:
        i = queue.popleft()
        queued[i] = False
        if i in fixed or abs(h[i]) < load[i]:
            continue
        si = -1 if h[i] > 0 else 1
        fixed[i] = si
        offset += int(h[i]) * si
        h[i] = 0
        for j, w in nb[i].items():
            h[j] += w * si
            del nb[j][i]
            load[j] -= abs(w)
            if j not in fixed and not queued[j]:
                queue.append(j)
                queued[j] = True
        nb[i].clear()
        load[i] = 0
    keep = [k for k, (u, v) in enumerate(inst.edges.tolist()) if u not in fixed and v not in fixed]
    reduced = inst.replace(h=h, edges=inst.edges[keep], J=inst.J[keep])
    return Preprocessed(dict(sorted(fixed.items())), reduced, offset)
