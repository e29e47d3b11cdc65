"""Seeded instance generators and the fixed clique embedding.

Every generator is a pure function of its arguments: random choices come
from :class:`PortableRng` in a fixed order (extra faulty qubits, then
couplings in sorted edge order, then fields in node order).  All weights
are numerators over gamma = 10.  Couplings drawn as zero are not stored.
Without an explicit fault list the illustrative hardware faults apply;
pass ``FaultList()`` for a fault-free graph.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chimera import ChimeraGraph, FaultList, build, example_faults
from .rng import PortableRng
from .transforms import IsingInstance

GAMMA = 10
FAMILIES = ("mgw", "rfr", "selby", "mis", "lga", "k64-ising", "k64-maxcut")
CHAIN_STRENGTH = 10  # numerator of the -1.0 chain coupling


class InstanceRejected(Exception):
    """A generator declined to emit an instance; not a failure."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _faults(k: int, faults: FaultList | None) -> FaultList:
    """None selects the illustrative hardware fault list restricted to C_k."""
    return example_faults(k) if faults is None else faults.restrict(k)


def _graph(k: int, faults: FaultList | None, extra_faulty: int, rng: PortableRng) -> ChimeraGraph:
    g = build(k, _faults(k, faults))
    if extra_faulty:
        working = g.qubits.tolist()
        if extra_faulty > len(working):
            raise ValueError(f"cannot declare {extra_faulty} more faulty qubits; only {len(working)} work")
        picked = sorted(working[a] for a in rng.sample(len(working), extra_faulty))
        g = ChimeraGraph(k, sorted(g.faulty_nodes) + picked, g.faulty_couplers)
    return g


def _instance(g: ChimeraGraph, J: list[int], h: np.ndarray, family: str, seed: int) -> IsingInstance:
    J = np.array(J, dtype=np.int64)
    nz = J != 0
    return IsingInstance(g.num_qubits, h, g.chimera_edges[nz], J[nz], GAMMA, graph=g,
                         name=f"{family}-c{g.k}-{g.num_nodes}-s{seed}", family=family)


def gen_mgw(k: int, seed: int, faults: FaultList | None = None,
            total_faulty: int | None = None) -> IsingInstance:
    """±1 on every working coupler and field.

    ``total_faulty`` declares additional random qubits faulty until that
    many are faulty in total.
    """
    rng = PortableRng(seed)
    base = build(k, _faults(k, faults))
    extra = 0
    if total_faulty is not None:
        extra = total_faulty - len(base.faulty_nodes)
        if extra < 0:
            raise ValueError(f"fault list already has {len(base.faulty_nodes)} faulty qubits")
    g = _graph(k, faults, extra, rng)
    J = [GAMMA * (1 - 2 * rng.bit()) for _ in range(len(g.chimera_edges))]
    h = np.zeros(g.num_qubits, dtype=np.int64)
    for v in g.qubits.tolist():
        h[v] = GAMMA * (1 - 2 * rng.bit())
    return _instance(g, J, h, "mgw", seed)


def gen_rfr(k: int, seed: int, faults: FaultList | None = None) -> IsingInstance:
    """Uniform over all 21 grid values on every working coupler and field."""
    rng = PortableRng(seed)
    g = build(k, _faults(k, faults))
    J = [rng.below(2 * GAMMA + 1) - GAMMA for _ in range(len(g.chimera_edges))]
    h = np.zeros(g.num_qubits, dtype=np.int64)
    for v in g.qubits.tolist():
        h[v] = rng.below(2 * GAMMA + 1) - GAMMA
    return _instance(g, J, h, "rfr", seed)


def gen_selby(k: int, seed: int, faults: FaultList | None = None) -> IsingInstance:
    """Intra-cell couplings in [-0.5, 0.5], inter-cell in [-1, 1], zero field."""
    rng = PortableRng(seed)
    g = build(k, _faults(k, faults))
    J = []
    for u, v in g.chimera_edges.tolist():
        half = GAMMA // 2 if u // 8 == v // 8 else GAMMA
        J.append(rng.below(2 * half + 1) - half)
    return _instance(g, J, np.zeros(g.num_qubits, dtype=np.int64), "selby", seed)


def gen_mis(k: int, seed: int, faults: FaultList | None = None) -> IsingInstance:
    """Couplings 0.1 or 0 with equal odds; h_i = sum of incident couplings - 0.2."""
    rng = PortableRng(seed)
    g = build(k, _faults(k, faults))
    J = [rng.bit() for _ in range(len(g.chimera_edges))]
    h = np.zeros(g.num_qubits, dtype=np.int64)
    for (u, v), w in zip(g.chimera_edges.tolist(), J):
        h[u] += w
        h[v] += w
    h[g.qubits] -= 2
    return _instance(g, J, h, "mis", seed)


# ---------------------------------------------------------------------------
# clique embedding


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class CliqueEmbedding:
    """Logical node a -> chain of qubits, listed along the chain path."""

    k: int
    chains: tuple[tuple[int, ...], ...]
    chain_strength: int = CHAIN_STRENGTH

    @property
    def num_logical(self) -> int:
        return len(self.chains)

    def chain_edges(self, graph: ChimeraGraph) -> list[tuple[int, int]]:
        out = []
        for chain in self.chains:
            members = set(chain)
            for q in chain:
                out += [(q, r) for r in graph.neighbors(q) if r in members and q < r]
        return sorted(out)

    def coupler(self, a: int, b: int, graph: ChimeraGraph) -> tuple[int, int]:
        """The physical coupler used for logical edge (a, b): the smallest one."""
        target = set(self.chains[b])
        best = None
        for q in self.chains[a]:
            for r in graph.neighbors(q):
                if r in target:
                    e = (min(q, r), max(q, r))
                    best = e if best is None or e < best else best
        if best is None:
            raise EmbeddingError(f"no coupler joins chains {a} and {b}")
        return best

    def decode(self, s) -> np.ndarray:
        """Majority vote per chain; a tie takes the lowest-index qubit's spin."""
        s = np.asarray(s)
        out = np.empty(len(self.chains), dtype=np.int8)
        for a, chain in enumerate(self.chains):
            tot = int(s[list(chain)].sum())
            out[a] = 1 if tot > 0 else -1 if tot < 0 else s[min(chain)]
        return out

    def encode(self, logical_spins) -> np.ndarray:
        """Chain-consistent physical configuration; unused qubits get +1."""
        s = np.ones(8 * self.k * self.k, dtype=np.int8)
        for a, chain in enumerate(self.chains):
            s[list(chain)] = logical_spins[a]
        return s


def build_clique_embedding(k: int = 16, faults: FaultList | None = None,
                           chains=None) -> CliqueEmbedding:
    """Embedding of K_{4k} into C_k.

    Logical node a = 4p + u uses the left-side unit-u qubits of cell column
    p in rows 0..p and the right-side unit-u qubits of cell row p in columns
    p..k-1; the two arms meet inside cell (p, p).  Every chain has k + 1
    qubits.  ``chains`` replaces the construction by a user-supplied one.
    """
    g = build(k, faults)
    if chains is None:
        idx = lambda r, c, s, u: r * 8 * k + c * 8 + s * 4 + u
        chains = []
        for p in range(k):
            for u in range(4):
                chains.append(tuple([idx(r, p, 0, u) for r in range(p + 1)]
                                    + [idx(p, c, 1, u) for c in range(p, k)]))
    emb = CliqueEmbedding(k, tuple(tuple(int(q) for q in c) for c in chains))
    check_embedding(emb, g)
    return emb


def check_embedding(emb: CliqueEmbedding, g: ChimeraGraph) -> None:
    """Raise unless chains are disjoint, connected and pairwise coupled."""
    owner: dict[int, int] = {}
    broken = []
    for a, chain in enumerate(emb.chains):
        for q in chain:
            if q in owner:
                raise EmbeddingError(f"qubit {q} is in chains {owner[q]} and {a}")
            owner[q] = a
        if any(not g.is_working(q) for q in chain) or not _connected(chain, g):
            broken.append(a)
    if broken:
        raise EmbeddingError(f"broken chains: {broken}")
    n = len(emb.chains)
    linked = set()
    for u, v in g.chimera_edges.tolist():
        a, b = owner.get(u), owner.get(v)
        if a is not None and b is not None and a != b:
            linked.add((min(a, b), max(a, b)))
    missing = n * (n - 1) // 2 - len(linked)
    if missing:
        raise EmbeddingError(f"{missing} logical pairs have no coupler")


def _connected(chain, g: ChimeraGraph) -> bool:
    members = set(chain)
    seen, stack = {chain[0]}, [chain[0]]
    while stack:
        q = stack.pop()
        for r in g.neighbors(q):
            if r in members and r not in seen:
                seen.add(r)
                stack.append(r)
    return seen == members


@dataclass(frozen=True, eq=False)
class EmbeddedInstance:
    """Physical instance plus what is needed to map results back.

    For any chain-consistent configuration,
    physical energy = logical energy + ``offset_num``.
    """

    instance: IsingInstance
    logical: IsingInstance
    embedding: CliqueEmbedding
    offset_num: int

    def decode(self, s) -> np.ndarray:
        return self.embedding.decode(s)


def required_chain_strength(logical: IsingInstance) -> int:
    """Chain strength demanded by the acceptance rule: the largest half of a
    node's total coupling magnitude, rounded up."""
    load = np.zeros(logical.n, dtype=np.int64)
    np.add.at(load, logical.edges[:, 0], np.abs(logical.J))
    np.add.at(load, logical.edges[:, 1], np.abs(logical.J))
    return int(-(-load.max() // 2)) if logical.n else 0


def embed(logical: IsingInstance, emb: CliqueEmbedding,
          chain_strength: int = CHAIN_STRENGTH) -> EmbeddedInstance:
    """Map a logical instance onto C_k through ``emb``.

    Each field is split over its chain as evenly as integers allow (larger
    shares on the earlier qubits), each coupling goes to one coupler and
    every chain coupler gets -chain_strength.
    """
    if logical.n > emb.num_logical:
        raise EmbeddingError(f"{logical.n} logical nodes exceed {emb.num_logical} chains")
    g = build(emb.k)
    n = g.num_qubits
    h = np.zeros(n, dtype=np.int64)
    for a in range(logical.n):
        chain, val = emb.chains[a], int(logical.h[a])
        q, r = divmod(abs(val), len(chain))
        sign = 1 if val >= 0 else -1
        for t, qubit in enumerate(chain):
            h[qubit] = sign * (q + (1 if t < r else 0))
    J: dict[tuple[int, int], int] = {}
    chain_edges = []
    for a in range(logical.n):
        sub = emb.chains[a]
        members = set(sub)
        for qb in sub:
            for r in g.neighbors(qb):
                if r in members and qb < r:
                    chain_edges.append((qb, r))
    for e in chain_edges:
        J[e] = -chain_strength
    for (a, b), w in zip(logical.edges.tolist(), logical.J.tolist()):
        if w:
            e = emb.coupler(a, b, g)
            J[e] = J.get(e, 0) + w
    phys = IsingInstance.from_dicts(n, dict(enumerate(h.tolist())), J, logical.gamma, graph=g,
                                    name=logical.name, family=logical.family)
    return EmbeddedInstance(phys, logical, emb, -chain_strength * len(chain_edges))


def _random_graph(n: int, p: float, rng: PortableRng) -> list[tuple[int, int]]:
    return [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]


def _accept(logical: IsingInstance, emb: CliqueEmbedding, chain_strength: int) -> EmbeddedInstance:
    need = required_chain_strength(logical)
    if need > chain_strength:
        raise InstanceRejected(f"chains need strength {need}/{GAMMA}, above {chain_strength}/{GAMMA}")
    out = embed(logical, emb, chain_strength)
    inst = out.instance
    if np.abs(inst.h).max(initial=0) > GAMMA or np.abs(inst.J).max(initial=0) > GAMMA:
        raise InstanceRejected("embedded coefficients leave [-1, 1]")
    return out


def gen_k64_ising(p: float, seed: int, k: int = 16, attempts: int = 1,
                  chain_strength: int = CHAIN_STRENGTH,
                  emb: CliqueEmbedding | None = None) -> EmbeddedInstance:
    """Random graph on 4k logical nodes with ±1 couplings, embedded into C_k.

    Node weights are uniform on {-|N(i)|+1, ..., |N(i)|-1}, so no logical
    node is dominated by its field.  Up to ``attempts`` graphs are drawn
    from the seed's stream; the first accepted one is returned.
    """
    emb = emb or build_clique_embedding(k)
    rng = PortableRng(seed)
    n = 4 * k
    reason = "no attempt made"
    for _ in range(attempts):
        edges = _random_graph(n, p, rng)
        J = {e: 1 - 2 * rng.bit() for e in edges}
        deg = np.zeros(n, dtype=np.int64)
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        h = {a: rng.integers(-int(deg[a]) + 1, int(deg[a]) - 1) for a in range(n) if deg[a] > 0}
        if (deg == 0).any():
            reason = "isolated logical node cannot avoid the dominated-field rule"
            continue
        logical = IsingInstance.from_dicts(n, h, J, GAMMA, name=f"k64ising-p{p}-s{seed}",
                                           family="k64-ising")
        try:
            return _accept(logical, emb, chain_strength)
        except InstanceRejected as exc:
            reason = exc.reason
    raise InstanceRejected(reason)


def gen_k64_maxcut(p: float, seed: int, k: int = 16, attempts: int = 1,
                   chain_strength: int = CHAIN_STRENGTH,
                   emb: CliqueEmbedding | None = None) -> EmbeddedInstance:
    """Random unweighted graph on 4k logical nodes: minimize sum s_i s_j.

    Couplings are 0.1 and there is no field, so the maximum cut size is
    recovered with :func:`cut_size`.
    """
    emb = emb or build_clique_embedding(k)
    rng = PortableRng(seed)
    n = 4 * k
    reason = "no attempt made"
    for _ in range(attempts):
        edges = _random_graph(n, p, rng)
        logical = IsingInstance.from_dicts(n, {}, {e: 1 for e in edges}, GAMMA,
                                           name=f"k64maxcut-p{p}-s{seed}", family="k64-maxcut")
        try:
            return _accept(logical, emb, chain_strength)
        except InstanceRejected as exc:
            reason = exc.reason
    raise InstanceRejected(reason)


def cut_size(logical: IsingInstance, s) -> int:
    """-(sum_{ij in E} s_i s_j - |E|) / 2 for an unweighted logical graph."""
    s = np.asarray(s, dtype=np.int64)
    e = logical.edges
    total = int((s[e[:, 0]] * s[e[:, 1]]).sum())
    return (len(e) - total) // 2


def generate(family: str, k: int, seed: int, **params):
    """Dispatch by family name; k64 families return an :class:`EmbeddedInstance`."""
    if family == "mgw":
        return gen_mgw(k, seed, params.get("faults"), params.get("total_faulty"))
    if family in ("rfr", "selby", "mis"):
        fn = {"rfr": gen_rfr, "selby": gen_selby, "mis": gen_mis}[family]
        return fn(k, seed, params.get("faults"))
    if family == "k64-ising":
        return gen_k64_ising(params.get("p", 0.23), seed, k, params.get("attempts", 1))
    if family == "k64-maxcut":
        return gen_k64_maxcut(params.get("p", 0.18), seed, k, params.get("attempts", 1))
    if family == "lga":
        raise ValueError("lga instances are read from files and re-binned, not generated")
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def load_lga(text: str, source: str = "<string>", name: str = "") -> IsingInstance:
    """Re-bin a real-valued ``ising-real`` file into an lga instance on the grid."""
    from .formats import parse_real_instance, rebin

    n, h, J = parse_real_instance(text, source)
    return rebin(n, h, J, GAMMA, name=name, family="lga")
