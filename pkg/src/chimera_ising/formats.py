"""Plain-text file formats for instances, spin vectors and embeddings.

Instance grammar (one record per line, ``#`` starts a comment)::

    ising <n> <m> <gamma>          header, must come first
    name <token>                   optional
    family <token>                 optional
    chimera <k>                    optional: spins are the qubits of C_k
    faulty <node>                  optional, repeatable (needs chimera)
    faultyc <u> <v>                optional, repeatable (needs chimera)
    h <node> <numerator>           field, repeatable, zero when absent
    J <u> <v> <numerator>          coupling, exactly m of them

Weights are integers; the represented value is numerator / gamma.  The
sibling ``maxcut <n> <m> <gamma>`` header takes ``field <v>`` and
``c <u> <v> <numerator>`` lines.  Real-valued inputs use the header
``ising-real <n> <m>`` with decimal ``h``/``J`` values and are converted
with :func:`rebin`.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .chimera import ChimeraGraph, Granularity
from .transforms import IsingInstance, MaxCutInstance


class FormatError(ValueError):
    """Malformed file content; the message names the file and line."""


def _tokens(text: str, source: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if line:
            yield lineno, line


def _ints(parts, lineno, source, count):
    if len(parts) != count:
        raise FormatError(f"{source}:{lineno}: expected {count} fields after {parts[0]!r}")
    try:
        return [int(p) for p in parts[1:]]
    except ValueError:
        raise FormatError(f"{source}:{lineno}: non-integer field in {' '.join(parts)!r}") from None


def format_instance(inst: IsingInstance) -> str:
    out = [f"ising {inst.n} {inst.m} {inst.gamma}"]
    if inst.name:
        out.append(f"name {inst.name}")
    if inst.family:
        out.append(f"family {inst.family}")
    g = inst.graph
    if g is not None:
        out.append(f"chimera {g.k}")
        out += [f"faulty {v}" for v in sorted(g.faulty_nodes)]
        out += [f"faultyc {u} {v}" for u, v in sorted(g.faulty_couplers)]
    out += [f"h {i} {int(inst.h[i])}" for i in np.flatnonzero(inst.h)]
    out += [f"J {u} {v} {w}" for (u, v), w in zip(inst.edges.tolist(), inst.J.tolist())]
    return "\n".join(out) + "\n"


def parse_instance(text: str, source: str = "<string>") -> IsingInstance:
    lines = _tokens(text, source)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError(f"{source}: empty instance file") from None
    if head[0] != "ising":
        raise FormatError(f"{source}:{lineno}: expected 'ising' header, got {head[0]!r}")
    n, m, gamma = _ints(head, lineno, source, 4)
    if n < 0 or m < 0 or gamma < 1:
        raise FormatError(f"{source}:{lineno}: header values out of range")
    name = family = ""
    k = None
    faulty, faultyc = [], []
    h = np.zeros(n, dtype=np.int64)
    seen_h = set()
    J: dict[tuple[int, int], int] = {}
    for lineno, parts in lines:
        key = parts[0]
        if key in ("name", "family"):
            if len(parts) != 2:
                raise FormatError(f"{source}:{lineno}: {key} takes one token")
            name, family = (parts[1], family) if key == "name" else (name, parts[1])
        elif key == "chimera":
            (k,) = _ints(parts, lineno, source, 2)
            if k < 1 or 8 * k * k != n:
                raise FormatError(f"{source}:{lineno}: C_{k} does not have {n} qubits")
        elif key == "faulty":
            faulty.append(_ints(parts, lineno, source, 2)[0])
        elif key == "faultyc":
            faultyc.append(tuple(_ints(parts, lineno, source, 3)))
        elif key == "h":
            i, val = _ints(parts, lineno, source, 3)
            if not 0 <= i < n:
                raise FormatError(f"{source}:{lineno}: node {i} out of range")
            if i in seen_h:
                raise FormatError(f"{source}:{lineno}: duplicate field for node {i}")
            seen_h.add(i)
            h[i] = val
        elif key == "J":
            u, v, val = _ints(parts, lineno, source, 4)
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise FormatError(f"{source}:{lineno}: bad edge ({u}, {v})")
            e = (min(u, v), max(u, v))
            if e in J:
                raise FormatError(f"{source}:{lineno}: duplicate coupling {e}")
            J[e] = val
        else:
            raise FormatError(f"{source}:{lineno}: unknown record {key!r}")
    if len(J) != m:
        raise FormatError(f"{source}: header announces {m} couplings, found {len(J)}")
    if (faulty or faultyc) and k is None:
        raise FormatError(f"{source}: fault records need a chimera line")
    graph = None
    if k is not None:
        try:
            graph = ChimeraGraph(k, faulty, faultyc)
        except ValueError as exc:
            raise FormatError(f"{source}: {exc}") from None
    edges = sorted(J)
    try:
        return IsingInstance(n, h, np.array(edges, dtype=np.int64).reshape(-1, 2),
                             np.array([J[e] for e in edges], dtype=np.int64), gamma,
                             graph=graph, name=name, family=family)
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None


def write_instance(inst: IsingInstance, path) -> None:
    Path(path).write_text(format_instance(inst), encoding="utf-8", newline="\n")


def read_instance(path) -> IsingInstance:
    path = Path(path)
    return parse_instance(path.read_text(), str(path))


# ---------------------------------------------------------------------------
# maxcut


def format_maxcut(inst: MaxCutInstance) -> str:
    out = [f"maxcut {inst.n} {len(inst.edges)} {inst.gamma}"]
    if inst.field_node is not None:
        out.append(f"field {inst.field_node}")
    out += [f"c {u} {v} {w}" for (u, v), w in zip(inst.edges.tolist(), inst.c.tolist())]
    return "\n".join(out) + "\n"


def parse_maxcut(text: str, source: str = "<string>") -> MaxCutInstance:
    lines = _tokens(text, source)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError(f"{source}: empty maxcut file") from None
    if head[0] != "maxcut":
        raise FormatError(f"{source}:{lineno}: expected 'maxcut' header, got {head[0]!r}")
    n, m, gamma = _ints(head, lineno, source, 4)
    field = None
    edges, weights = [], []
    for lineno, parts in lines:
        if parts[0] == "field":
            (field,) = _ints(parts, lineno, source, 2)
        elif parts[0] == "c":
            u, v, w = _ints(parts, lineno, source, 4)
            if not (0 <= u < n and 0 <= v < n) or u == v:
                raise FormatError(f"{source}:{lineno}: bad edge ({u}, {v})")
            edges.append((u, v))
            weights.append(w)
        else:
            raise FormatError(f"{source}:{lineno}: unknown record {parts[0]!r}")
    if len(edges) != m:
        raise FormatError(f"{source}: header announces {m} edges, found {len(edges)}")
    try:
        return MaxCutInstance(n, np.array(edges, dtype=np.int64).reshape(-1, 2),
                              np.array(weights, dtype=np.int64), gamma, field)
    except ValueError as exc:
        raise FormatError(f"{source}: {exc}") from None


# ---------------------------------------------------------------------------
# real-valued input and re-binning


def parse_real_instance(text: str, source: str = "<string>"):
    """Read an ``ising-real`` file into (n, h dict, J dict) of floats."""
    lines = _tokens(text, source)
    try:
        lineno, head = next(lines)
    except StopIteration:
        raise FormatError(f"{source}: empty instance file") from None
    if head[0] != "ising-real" or len(head) != 3:
        raise FormatError(f"{source}:{lineno}: expected 'ising-real <n> <m>' header")
    n, m = int(head[1]), int(head[2])
    h, J = {}, {}
    for lineno, parts in lines:
        try:
            if parts[0] == "h" and len(parts) == 3:
                h[int(parts[1])] = float(parts[2])
            elif parts[0] == "J" and len(parts) == 4:
                u, v = int(parts[1]), int(parts[2])
                J[(min(u, v), max(u, v))] = float(parts[3])
            else:
                raise FormatError(f"{source}:{lineno}: unknown record {' '.join(parts)!r}")
        except ValueError as exc:
            if isinstance(exc, FormatError):
                raise
            raise FormatError(f"{source}:{lineno}: bad number in {' '.join(parts)!r}") from None
    if len(J) != m:
        raise FormatError(f"{source}: header announces {m} couplings, found {len(J)}")
    return n, h, J


def rebin(n: int, h: dict, J: dict, gamma: int = 10, **kw) -> IsingInstance:
    """Scale so the largest magnitude is 1, then snap every weight to the grid."""
    g = Granularity(gamma)
    scale = max([abs(x) for x in list(h.values()) + list(J.values())] + [0.0])
    if scale == 0:
        scale = 1.0
    hn = {i: g.numerator(v / scale) for i, v in h.items()}
    Jn = {e: g.numerator(v / scale) for e, v in J.items()}
    return IsingInstance.from_dicts(n, hn, {e: w for e, w in Jn.items() if w}, gamma, **kw)


# ---------------------------------------------------------------------------
# spins and embeddings


def format_spins(s) -> str:
    return " ".join(str(int(x)) for x in s) + "\n"


def parse_spins(text: str, source: str = "<string>") -> np.ndarray:
    vals = []
    for lineno, parts in _tokens(text, source):
        for p in parts:
            if p not in ("1", "+1", "-1"):
                raise FormatError(f"{source}:{lineno}: spin must be +1 or -1, got {p!r}")
            vals.append(int(p))
    return np.array(vals, dtype=np.int8)


def format_embedding(chains) -> str:
    return "".join(" ".join(str(q) for q in chain) + "\n" for chain in chains)


def parse_embedding(text: str, source: str = "<string>") -> list[tuple[int, ...]]:
    chains = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].split()
        if not line:
            continue
        try:
            chains.append(tuple(int(p) for p in line))
        except ValueError:
            raise FormatError(f"{source}:{lineno}: chain entries must be node ids") from None
    return chains
