"""Exact ground states: exhaustive enumeration and elimination-order DP.

The dynamic program eliminates spins one at a time along a fixed order.
Eliminating a spin combines every table that mentions it, minimizes it out
and leaves a table over its *scope*: the not-yet-eliminated spins it
interacts with, directly or through earlier eliminations.  The largest
scope is the width of the order, and the work per spin is O(2**width).
For Chimera graphs the orders are built from the grid structure:

* full C_k: rows top to bottom, in each row the right-side nodes first and
  then the left-side nodes, giving width 4k;
* subsets H(w, o, i, j) used by the heuristic: cut cells first, then each
  block of uncut columns from both ends towards the exempt row, giving
  width 4w + 3 (8 for w = 1), or 4w + 7 when the last block reaches the
  boundary column with w + 1 columns, because boundary right-side nodes
  are never cut.
"""

from __future__ import annotations

import heapq
import time
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .report import SolveReport
from .transforms import IsingInstance

DEFAULT_WIDTH_CAP = 20
DEFAULT_BRUTE_CAP = 24
_LOW_BITS = 16


class WidthExceeded(ValueError):
    """The elimination order is wider than the configured cap."""


class TooLarge(ValueError):
    """The instance exceeds the enumeration cap."""


# ---------------------------------------------------------------------------
# brute force


def _independent_set(n: int, nbrs: list[set[int]]) -> list[int]:
    """Larger color class of each bipartite component, greedy elsewhere."""
    color = [-1] * n
    chosen = []
    for root in range(n):
        if color[root] >= 0:
            continue
        color[root] = 0
        comp, queue, bipartite = [root], deque([root]), True
        while queue:
            v = queue.popleft()
            for u in nbrs[v]:
                if color[u] < 0:
                    color[u] = 1 - color[v]
                    comp.append(u)
                    queue.append(u)
                elif color[u] == color[v]:
                    bipartite = False
        if bipartite:
            side0 = [v for v in comp if color[v] == 0]
            side1 = [v for v in comp if color[v] == 1]
            chosen += side0 if len(side0) >= len(side1) else side1
            continue
        blocked = set()
        for v in sorted(comp, key=lambda v: (len(nbrs[v]), v)):
            if v not in blocked:
                chosen.append(v)
                blocked.add(v)
                blocked |= nbrs[v]
    return sorted(chosen)


def brute_force(inst: IsingInstance, cap: int = DEFAULT_BRUTE_CAP,
                exhaustive: bool = False) -> SolveReport:
    """Minimum energy by enumerating every configuration.

    By default the spins of an independent set are not enumerated: with
    the others fixed each of them is minimized in closed form
    (s_i = -sign(local field)), which covers all 2**n configurations while
    enumerating only the complement.  ``cap`` bounds the enumerated count.
    The enumeration visits the high spins in Gray-code order, updating the
    partial sums by one flip at a time, and the low 16 spins as a vector.
    Ties are resolved by enumeration order.
    """
    t0 = time.perf_counter()
    n = inst.n
    nz = inst.J != 0
    edges, J = inst.edges[nz], inst.J[nz]
    nbrs = [set() for _ in range(n)]
    for u, v in edges.tolist():
        nbrs[u].add(v)
        nbrs[v].add(u)
    free = [] if exhaustive else _independent_set(n, nbrs)
    free_set = set(free)
    enum = [v for v in range(n) if v not in free_set]
    if len(enum) > cap:
        raise TooLarge(f"{len(enum)} enumerated spins exceed the brute-force cap of {cap}")

    nc, nf = len(enum), len(free)
    pos_c = {v: a for a, v in enumerate(enum)}
    pos_f = {v: a for a, v in enumerate(free)}
    Jcc = np.zeros((nc, nc), dtype=np.int64)
    Jcf = np.zeros((nc, nf), dtype=np.int64)
    for (u, v), w in zip(edges.tolist(), J.tolist()):
        if u in pos_c and v in pos_c:
            a, b = sorted((pos_c[u], pos_c[v]))
            Jcc[a, b] = w
        elif u in pos_c:
            Jcf[pos_c[u], pos_f[v]] = w
        else:
            Jcf[pos_c[v], pos_f[u]] = w
    hc = inst.h[enum].astype(np.int64)
    hf = inst.h[free].astype(np.int64)

    L = min(nc, _LOW_BITS)
    T = nc - L
    idx = np.arange(1 << L, dtype=np.int64)
    S = (1 - 2 * ((idx[:, None] >> np.arange(L)) & 1)).astype(np.int64)
    E_low = S @ hc[:L] + ((S @ Jcc[:L, :L]) * S).sum(axis=1)
    F_low = S @ Jcf[:L] if nf else None
    J_lt = Jcc[:L, L:] + Jcc[L:, :L].T  # low x top couplings
    J_tt = Jcc[L:, L:] + Jcc[L:, L:].T
    s_top = np.ones(T, dtype=np.int64)
    g_low = J_lt @ s_top
    E_top = int(hc[L:] @ s_top + s_top @ np.triu(Jcc[L:, L:]) @ s_top)
    f_free = hf + (Jcf[L:].T @ s_top if nf else 0)

    best, best_top, best_low = None, None, None
    for step in range(1 << T):
        if step:
            p = (step & -step).bit_length() - 1
            sp = s_top[p]
            E_top -= 2 * sp * int(hc[L + p] + J_tt[p] @ s_top)
            g_low -= 2 * sp * J_lt[:, p]
            if nf:
                f_free = f_free - 2 * sp * Jcf[L + p]
            s_top[p] = -sp
        E = E_low + S @ g_low + E_top
        if nf:
            E = E - np.abs(F_low + f_free).sum(axis=1)
        a = int(np.argmin(E))
        if best is None or E[a] < best:
            best, best_top, best_low = int(E[a]), s_top.copy(), a

    spins = np.ones(n, dtype=np.int8)
    sc = np.concatenate([S[best_low], best_top]) if nc else np.zeros(0, dtype=np.int64)
    spins[enum] = sc
    if nf:
        field = hf + sc @ Jcf
        spins[free] = np.where(field > 0, -1, 1)
    energy = inst.energy_num(spins)
    assert energy == best, "brute-force bookkeeping mismatch"
    return SolveReport("brute_force", energy, inst.gamma, spins, "optimal",
                       elapsed_ms=(time.perf_counter() - t0) * 1e3,
                       meta={"enumerated": nc, "closed_form": nf})


# ---------------------------------------------------------------------------
# elimination orders


@dataclass(frozen=True)
class SweepDecomposition:
    """Elimination order with the scope of every step.

    ``scopes[t]`` lists the neighbors of ``order[t]`` that are still active
    when it is eliminated (original couplings plus fill); every edge of the
    graph is covered by the step of whichever endpoint goes first.
    """

    order: tuple[int, ...]
    scopes: tuple[tuple[int, ...], ...]
    width: int
    label: str = ""


def _local_adjacency(adjacency, nodes: Iterable[int]) -> dict[int, set[int]]:
    nodes = set(int(v) for v in nodes)
    return {v: {u for u in adjacency[v] if u in nodes} for v in sorted(nodes)}


def _leaf_first(adj: dict[int, set[int]], order: Sequence[int]) -> list[int]:
    """Move nodes that become leaves under repeated leaf removal to the front."""
    deg = {v: len(n) for v, n in adj.items()}
    removed: set[int] = set()
    queue = deque(v for v in order if deg[v] <= 1)
    front = []
    while queue:
        v = queue.popleft()
        if v in removed:
            continue
        removed.add(v)
        front.append(v)
        for u in adj[v]:
            if u not in removed:
                deg[u] -= 1
                if deg[u] == 1:
                    queue.append(u)
    return front + [v for v in order if v not in removed]


def _eliminate(adj: dict[int, set[int]], order: Sequence[int]) -> tuple[tuple, int]:
    work = {v: set(n) for v, n in adj.items()}
    scopes, width = [], 0
    for v in order:
        nb = work.pop(v)
        scopes.append(tuple(sorted(nb)))
        width = max(width, len(nb))
        for x in nb:
            wx = work[x]
            wx.discard(v)
            wx |= nb
            wx.discard(x)
    return tuple(scopes), width


def _min_degree_order(adj: dict[int, set[int]]) -> list[int]:
    work = {v: set(n) for v, n in adj.items()}
    heap = [(len(n), v) for v, n in work.items()]
    heapq.heapify(heap)
    order = []
    while heap:
        d, v = heapq.heappop(heap)
        if v not in work or d != len(work[v]):
            continue
        nb = work.pop(v)
        order.append(v)
        for x in nb:
            work[x].discard(v)
            work[x] |= nb - {x}
            heapq.heappush(heap, (len(work[x]), x))
    return order


def _grid_id(k: int, o: int):
    """Node id under orientation o: o = 1 transposes rows/columns and sides."""
    if o == 0:
        return lambda r, c, s, u: r * 8 * k + c * 8 + s * 4 + u
    return lambda r, c, s, u: c * 8 * k + r * 8 + (1 - s) * 4 + u


def grid_order(k: int, o: int = 0) -> list[int]:
    """Full C_k order of width 4k: per row, parallel-side nodes, then crossing ones."""
    vid = _grid_id(k, o)
    return [vid(r, c, s, u) for r in range(k) for s in (1, 0) for c in range(k) for u in range(4)]


def subset_order(k: int, w: int, o: int, i: int, j: int) -> list[int]:
    """Order for the heuristic's subset H(w, o, i, j) (all qubit ids, unfiltered)."""
    vid = _grid_id(k, o)
    cuts = [c for c in range(k - 1) if c % (w + 1) == i]
    out = []
    for x in cuts:  # the single kept cell of each cut column
        out += [vid(j, x, 0, u) for u in range(4)] + [vid(j, x, 1, u) for u in range(4)]
    blocks, cur = [], []
    for c in range(k):
        if c in cuts:
            if cur:
                blocks.append(cur)
            cur = []
        else:
            cur.append(c)
    if cur:
        blocks.append(cur)
    for b in blocks:
        if b[-1] == k - 1:
            rows, last = list(range(k)), []
        else:
            rows, last = list(range(j)) + list(range(k - 1, j, -1)), [j]
        for r in rows:
            out += [vid(r, c, s, u) for s in (1, 0) for c in b for u in range(4)]
        for r in last:
            out += [vid(r, c, s, u) for s in (0, 1) for c in b for u in range(4)]
    seen, res = set(), []
    for v in out:
        if v not in seen:
            seen.add(v)
            res.append(v)
    rest = [v for v in range(8 * k * k) if v not in seen]
    return rest + res


def build_sweep(adjacency, nodes: Iterable[int], k: int | None = None,
                subset: tuple[int, int, int, int] | None = None) -> SweepDecomposition:
    """Elimination order for the subgraph induced by ``nodes``.

    ``adjacency`` maps node id to neighbor ids.  With ``k`` the Chimera
    grid orders are tried (both orientations, plus the subset order when
    ``subset = (w, o, i, j)`` is given) and the narrowest wins; without it a
    greedy minimum-degree order is used.  For subsets the result never
    exceeds the width of the full grid.
    """
    adj = _local_adjacency(adjacency, nodes)
    candidates = []
    if k is not None:
        if subset is not None:
            candidates.append(("subset", subset_order(k, *subset)))
        # on grids wider than 2(w+1) cells the grid orders (width near 4k)
        # cannot beat the subset order (width at most 4w+7)
        if subset is None or k <= 2 * (subset[0] + 1):
            candidates += [("grid-rows", grid_order(k, 0)), ("grid-cols", grid_order(k, 1))]
    else:
        candidates.append(("min-degree", _min_degree_order(adj)))
    best = None
    for label, order in candidates:
        order = [v for v in order if v in adj]
        extra = sorted(set(adj) - set(order))  # field node or foreign ids
        order = _leaf_first(adj, extra + order)
        scopes, width = _eliminate(adj, order)
        if best is None or width < best.width:
            best = SweepDecomposition(tuple(order), scopes, width, label)
    if best is None:
        best = SweepDecomposition((), (), 0, "empty")
    return best


# ---------------------------------------------------------------------------
# conditional problems and the DP


@dataclass(frozen=True, eq=False)
class ConditionalProblem:
    """Spins of ``nodes`` free, every other spin frozen.

    ``h`` holds the effective fields h_i + sum_{j outside} J_ij s_j, ``edges``
    the couplings inside the subset as local index pairs, and ``offset`` the
    energy of everything that does not involve a free spin.
    """

    nodes: np.ndarray
    h: np.ndarray
    edges: np.ndarray
    J: np.ndarray
    offset: int
    gamma: int


def condition(inst: IsingInstance, s, nodes: Iterable[int]) -> ConditionalProblem:
    nodes = np.unique(np.fromiter(nodes, dtype=np.int64))
    s = np.asarray(s, dtype=np.int64)
    inside = np.zeros(inst.n, dtype=bool)
    inside[nodes] = True
    local = np.full(inst.n, -1, dtype=np.int64)
    local[nodes] = np.arange(len(nodes))
    u, v = inst.edges[:, 0], inst.edges[:, 1]
    iu, iv = inside[u], inside[v]
    both = iu & iv
    h = inst.h[nodes].astype(np.int64)
    only_u = iu & ~iv
    only_v = iv & ~iu
    np.add.at(h, local[u[only_u]], inst.J[only_u] * s[v[only_u]])
    np.add.at(h, local[v[only_v]], inst.J[only_v] * s[u[only_v]])
    out = ~iu & ~iv
    offset = int(np.dot(inst.J[out], s[u[out]] * s[v[out]])) + int(np.dot(inst.h[~inside], s[~inside]))
    edges = np.stack([local[u[both]], local[v[both]]], axis=1)
    return ConditionalProblem(nodes, h, edges, inst.J[both].astype(np.int64), offset, inst.gamma)


def _dp(n: int, order_local: np.ndarray, h, edges, J, prefer_bits, dtype):
    pos = np.empty(n, dtype=np.int64)
    pos[order_local] = np.arange(n)
    buckets: list[list] = [[] for _ in range(n)]
    for a in np.flatnonzero(h).tolist():
        buckets[pos[a]].append(((int(pos[a]),), np.array([h[a], -h[a]], dtype=dtype)))
    for (a, b), w in zip(edges.tolist(), J.tolist()):
        if w == 0:
            continue
        pa, pb = int(pos[a]), int(pos[b])
        if pa > pb:
            pa, pb = pb, pa
        buckets[pa].append(((pa, pb), np.array([[w, -w], [-w, w]], dtype=dtype)))
    total_const = 0
    back: list = [None] * n
    for t in range(n):
        facs = buckets[t]
        buckets[t] = None
        prefer = bool(prefer_bits[t])
        if not facs:
            back[t] = ((), prefer)
            continue
        scope = sorted(set().union(*(f[0] for f in facs)))
        where = {p: a for a, p in enumerate(scope)}
        table = np.zeros((2,) * len(scope), dtype=dtype)
        for sc, tab in facs:
            shape = [1] * len(scope)
            for p in sc:
                shape[where[p]] = 2
            table += tab.reshape(shape)
        t0, t1 = table[0], table[1]
        choose = (t1 <= t0) if prefer else (t1 < t0)
        msg = np.minimum(t0, t1)
        rest = tuple(scope[1:])
        back[t] = (rest, choose)
        if rest:
            buckets[rest[0]].append((rest, msg))
        else:
            total_const += int(msg)
    bits = np.zeros(n, dtype=np.int8)
    for t in range(n - 1, -1, -1):
        rest, choose = back[t]
        bits[t] = choose[tuple(bits[list(rest)])] if rest else choose
    spins = np.empty(n, dtype=np.int8)
    spins[order_local] = 1 - 2 * bits
    return total_const, spins


def solve_dp(problem: ConditionalProblem, sweep: SweepDecomposition | None = None,
             prefer=None, width_cap: int = DEFAULT_WIDTH_CAP,
             adjacency=None, k: int | None = None) -> SolveReport:
    """Exact conditional optimum of ``problem`` along ``sweep``.

    ``prefer`` is a +-1 vector over ``problem.nodes`` giving the spin taken
    whenever both choices tie; the default prefers +1.  With a fixed
    preference the returned configuration is unique: it is the
    lexicographically preferred optimum in reverse elimination order.
    Without a sweep one is built from ``adjacency`` (or from the problem's
    own couplings).  The reported energy includes the frozen offset.
    """
    t0 = time.perf_counter()
    nodes = problem.nodes
    n = len(nodes)
    if sweep is None:
        if adjacency is None:
            adjacency = {int(v): [] for v in nodes}
            for a, b in problem.edges.tolist():
                adjacency[int(nodes[a])].append(int(nodes[b]))
                adjacency[int(nodes[b])].append(int(nodes[a]))
        sweep = build_sweep(adjacency, nodes.tolist(), k)
    if sweep.width > width_cap:
        raise WidthExceeded(f"elimination width {sweep.width} exceeds the cap of {width_cap}")
    local = {int(v): a for a, v in enumerate(nodes.tolist())}
    if len(sweep.order) != n or any(v not in local for v in sweep.order):
        raise ValueError("sweep does not match the problem's node set")
    bound = int(np.abs(problem.h).sum() + np.abs(problem.J).sum())
    if bound >= 2 ** 62:
        raise OverflowError("weight magnitudes overflow 64-bit energies")
    dtype = np.int32 if bound < 2 ** 31 - 1 else np.int64
    order_local = np.array([local[v] for v in sweep.order], dtype=np.int64)
    if prefer is None:
        prefer_bits = np.zeros(n, dtype=bool)
    else:
        prefer = np.asarray(prefer)
        if prefer.shape != (n,):
            raise ValueError("prefer must have one entry per free spin")
        prefer_bits = (prefer < 0)[order_local]
    value, spins = _dp(n, order_local, problem.h, problem.edges, problem.J, prefer_bits, dtype)
    return SolveReport("dp", value + problem.offset, problem.gamma, spins, "optimal",
                       elapsed_ms=(time.perf_counter() - t0) * 1e3,
                       meta={"width": sweep.width, "order": sweep.label})


def instance_adjacency(inst: IsingInstance):
    """Adjacency used for orders: the Chimera topology when known."""
    if inst.graph is not None:
        return inst.graph.adjacency()
    adj = [[] for _ in range(inst.n)]
    for u, v in inst.edges.tolist():
        adj[u].append(v)
        adj[v].append(u)
    return adj


def solve_exact(inst: IsingInstance, width_cap: int = DEFAULT_WIDTH_CAP,
                prefer=None) -> SolveReport:
    """Ground state of a whole instance with the DP."""
    t0 = time.perf_counter()
    nodes = np.arange(inst.n)
    problem = condition(inst, np.ones(inst.n, dtype=np.int8), nodes)
    k = inst.graph.k if inst.graph is not None else None
    sweep = build_sweep(instance_adjacency(inst), nodes.tolist(), k)
    rep = solve_dp(problem, sweep, prefer, width_cap)
    rep.elapsed_ms = (time.perf_counter() - t0) * 1e3
    return rep
