"""Immutable attributed undirected graphs in CSR form.

Nodes are interned to dense indices ``0..n-1`` in ascending order of their
original IDs, so every per-node quantity is a plain numpy array. Attributes
are stored as a float array with NaN marking a missing value.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np
import scipy.sparse as sp

from paradoxlab.errors import ParadoxError

MAGIC = b"PDXG"
SNAPSHOT_VERSION = 1

_ID_INT = 0
_ID_STR = 1


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """Undirected simple graph with an optional real attribute per node.

    Attributes
    ----------
    indptr, indices : ndarray of int64
        CSR adjacency; each neighbor list is sorted ascending and the
        adjacency is symmetric.
    attribute : ndarray of float64
        Per-node value in [-1, 1], NaN where missing.
    ids : ndarray
        Original node IDs (int64 or object array of str), sorted ascending.
    meta : dict
        Construction diagnostics (skipped self-loops etc.). Not part of
        equality or serialization.
    """

    indptr: np.ndarray
    indices: np.ndarray
    attribute: np.ndarray
    ids: np.ndarray
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @cached_property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    @cached_property
    def has_attribute(self) -> np.ndarray:
        return ~np.isnan(self.attribute)

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric 0/1 adjacency matrix sharing the CSR arrays."""
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    @cached_property
    def _index(self) -> dict:
        return {k: i for i, k in enumerate(self.ids.tolist())}

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def row_of_entries(self) -> np.ndarray:
        """Source node of every CSR entry (the COO row array)."""
        return np.repeat(np.arange(self.n, dtype=np.int64), self.degree)

    def edges(self) -> np.ndarray:
        """Undirected edges as an (m, 2) array with u < v, lexicographically sorted."""
        rows = self.row_of_entries()
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def index_of(self, original_id: Any) -> int:
        key = original_id
        if self.ids.dtype.kind in "iu":
            key = int(original_id)
        elif not isinstance(key, str):
            key = str(key)
        return self._index[key]

    def with_attributes(self, values: Mapping[Any, float]) -> "AttributedGraph":
        """Return a copy whose attributes are set from ``{original_id: value}``.

        IDs absent from the graph are ignored and counted in
        ``meta["unmatched_attributes"]``; graph nodes absent from the mapping
        keep a missing attribute.
        """
        attr = np.full(self.n, np.nan)
        unmatched = 0
        for key, value in values.items():
            try:
                i = self.index_of(key)
            except (KeyError, ValueError):
                unmatched += 1
                continue
            attr[i] = value
        _check_attributes(attr)
        meta = dict(self.meta, unmatched_attributes=unmatched)
        return AttributedGraph(self.indptr, self.indices, attr, self.ids, meta)

    def with_attribute_array(self, attr: np.ndarray) -> "AttributedGraph":
        attr = np.asarray(attr, dtype=np.float64)
        if attr.shape != (self.n,):
            raise ValueError(f"attribute array must have shape ({self.n},)")
        _check_attributes(attr)
        return AttributedGraph(self.indptr, self.indices, attr.copy(), self.ids, dict(self.meta))

    def subgraph(self, keep: np.ndarray) -> "AttributedGraph":
        """Induced subgraph on the nodes where ``keep`` is true."""
        keep = np.asarray(keep, dtype=bool)
        new_index = np.cumsum(keep) - 1
        rows = self.row_of_entries()
        mask = keep[rows] & keep[self.indices]
        # monotone relabelling keeps entries sorted by (row, col)
        new_rows = new_index[rows[mask]]
        new_cols = new_index[self.indices[mask]]
        n_new = int(keep.sum())
        indptr = np.zeros(n_new + 1, dtype=np.int64)
        np.cumsum(np.bincount(new_rows, minlength=n_new), out=indptr[1:])
        return AttributedGraph(
            indptr, new_cols.astype(np.int64), self.attribute[keep].copy(), self.ids[keep], dict(self.meta)
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttributedGraph):
            return NotImplemented
        return (
            np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.attribute, other.attribute, equal_nan=True)
            and self.ids.tolist() == other.ids.tolist()
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"AttributedGraph(n={self.n}, m={self.m}, attributed={int(self.has_attribute.sum())})"


def _check_attributes(attr: np.ndarray) -> None:
    present = attr[~np.isnan(attr)]
    if not np.all(np.isfinite(present)) or np.any(np.abs(present) > 1.0):
        raise ValueError("attributes must be finite and within [-1, 1]")


def _as_id_array(values: list) -> np.ndarray:
    if all(isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in values):
        return np.array(values, dtype=np.int64)
    return np.array([v if isinstance(v, str) else str(v) for v in values], dtype=object)


def _split_pairs(edges: Any) -> tuple[np.ndarray, np.ndarray]:
    src = getattr(edges, "src", None)
    dst = getattr(edges, "dst", None)
    if src is not None and dst is not None:
        return np.asarray(src), np.asarray(dst)
    pairs = list(edges)
    if not pairs:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    both = _as_id_array([p[0] for p in pairs] + [p[1] for p in pairs])
    return both[: len(pairs)], both[len(pairs) :]


def _csr_from_pairs(a: np.ndarray, b: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """CSR arrays from unique undirected pairs (a < b)."""
    rows = np.concatenate([a, b])
    cols = np.concatenate([b, a])
    keys = np.sort(rows * n + cols)
    rows = keys // n
    indices = keys - rows * n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return indptr, indices.astype(np.int64)


def build_undirected(
    edges: Iterable[tuple[Any, Any]],
    mode: str = "reciprocal",
    nodes: Iterable[Any] | None = None,
) -> AttributedGraph:
    """Build a canonical undirected graph from directed edges.

    Parameters
    ----------
    edges : iterable of (source, target) pairs, or an object with ``src`` and
        ``dst`` arrays (see :class:`paradoxlab.ingest.EdgeList`).
    mode : {"reciprocal", "symmetrize"}
        ``reciprocal`` keeps {u, v} only if both (u, v) and (v, u) occur;
        ``symmetrize`` keeps {u, v} if either direction occurs.
    nodes : iterable, optional
        Declared node IDs; these are kept even when isolated.

    Self-edges are skipped and counted in ``meta["self_loops"]``.
    """
    if mode in ("reciprocal", "reciprocal-only"):
        reciprocal = True
    elif mode == "symmetrize":
        reciprocal = False
    else:
        raise ValueError(f"unknown mode {mode!r}")

    src, dst = _split_pairs(edges)
    declared_list = [] if nodes is None else list(nodes)
    declared = _as_id_array(declared_list) if declared_list else np.empty(0, dtype=src.dtype)
    if declared.size and (src.dtype.kind in "iu") != (declared.dtype.kind in "iu"):
        # mixed ID kinds: fall back to string IDs everywhere
        src, dst, declared = (np.array([str(x) for x in a], dtype=object) for a in (src, dst, declared))
    parts = [src, dst, declared]
    all_ids = np.concatenate(parts) if any(p.size for p in parts) else np.empty(0, dtype=np.int64)
    uniq, inverse = np.unique(all_ids, return_inverse=True)
    k = len(uniq)
    u = inverse[: len(src)].astype(np.int64)
    v = inverse[len(src) : 2 * len(src)].astype(np.int64)

    self_loop = u == v
    n_self = int(self_loop.sum())
    u, v = u[~self_loop], v[~self_loop]

    if reciprocal:
        keys = np.unique(u * k + v)
        rkeys = v * k + u
        pos = np.searchsorted(keys, rkeys)
        pos[pos == len(keys)] = 0
        found = keys.size > 0
        has_reverse = (keys[pos] == rkeys) if found else np.zeros(len(u), dtype=bool)
        sel = has_reverse & (u < v)
        a, b = u[sel], v[sel]
    else:
        a, b = np.minimum(u, v), np.maximum(u, v)
    pair_keys = np.unique(a * k + b)
    a = pair_keys // k if k else pair_keys
    b = pair_keys - a * k

    keep = np.zeros(k, dtype=bool)
    keep[a] = True
    keep[b] = True
    if declared.size:
        keep[inverse[2 * len(src) :]] = True
    new_index = np.cumsum(keep) - 1
    n = int(keep.sum())
    indptr, indices = _csr_from_pairs(new_index[a], new_index[b], max(n, 1))
    indptr = indptr[: n + 1]

    ids = uniq[keep]
    if ids.dtype.kind in "iu":
        ids = ids.astype(np.int64)
    elif ids.dtype != object:
        ids = ids.astype(str).astype(object)
    meta = {
        "directed_edges": int(len(src)),
        "self_loops": n_self,
        "undirected_edges": int(len(pair_keys)),
        "mode": "reciprocal" if reciprocal else "symmetrize",
    }
    return AttributedGraph(indptr, indices, np.full(n, np.nan), ids, meta)


def filter_min_degree(g: AttributedGraph, k: int, iterate: bool = False) -> AttributedGraph:
    """Drop nodes with degree below ``k`` and return the induced subgraph.

    With ``iterate=True`` removal repeats until a fixed point (the k-core).
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    while True:
        keep = g.degree >= k
        if keep.all():
            return g
        g = g.subgraph(keep)
        if not iterate:
            return g


@dataclass(frozen=True)
class NeighborStats:
    """Neighborhood summary of one node; NaN marks an undefined mean."""

    degree: int
    mean_neighbor_degree: float
    mean_neighbor_attribute: float
    attributed_neighbors: int

    @property
    def has_degree_mean(self) -> bool:
        return self.degree > 0

    @property
    def has_attribute_mean(self) -> bool:
        return self.attributed_neighbors > 0


def neighbor_stats(g: AttributedGraph, u: int) -> NeighborStats:
    nbrs = g.neighbors(u)
    deg = len(nbrs)
    mean_deg = float(g.degree[nbrs].mean()) if deg else float("nan")
    attrs = g.attribute[nbrs]
    attrs = attrs[~np.isnan(attrs)]
    mean_attr = float(attrs.mean()) if len(attrs) else float("nan")
    return NeighborStats(deg, mean_deg, mean_attr, len(attrs))


@dataclass(frozen=True)
class NeighborTable:
    """Vectorized :class:`NeighborStats` for every node."""

    degree: np.ndarray
    mean_neighbor_degree: np.ndarray
    mean_neighbor_attribute: np.ndarray
    attributed_neighbors: np.ndarray


def neighbor_table(g: AttributedGraph) -> NeighborTable:
    deg = g.degree
    A = g.adjacency
    with np.errstate(invalid="ignore", divide="ignore"):
        # integer-valued float sums are exact, so this is order independent
        mean_deg = (A @ deg.astype(np.float64)) / deg
        present = g.has_attribute.astype(np.float64)
        count = A @ present
        attr_sum = A @ np.where(g.has_attribute, g.attribute, 0.0)
        mean_attr = attr_sum / count
    mean_deg[deg == 0] = np.nan
    mean_attr[count == 0] = np.nan
    return NeighborTable(deg, mean_deg, mean_attr, count.astype(np.int64))


def save_snapshot(g: AttributedGraph, path: str | Path) -> None:
    """Write the canonical binary snapshot (little-endian, bit-exact)."""
    present = g.has_attribute
    parts = [
        MAGIC,
        struct.pack("<IQQ", SNAPSHOT_VERSION, g.n, g.m),
        g.indptr.astype("<i8").tobytes(),
        g.indices.astype("<i8").tobytes(),
        np.where(present, g.attribute, 0.0).astype("<f8").tobytes(),
        np.packbits(present, bitorder="little").tobytes(),
    ]
    if g.ids.dtype.kind in "iu":
        parts += [struct.pack("<B", _ID_INT), g.ids.astype("<i8").tobytes()]
    else:
        parts.append(struct.pack("<B", _ID_STR))
        for s in g.ids:
            raw = str(s).encode("utf-8")
            parts += [struct.pack("<I", len(raw)), raw]
    Path(path).write_bytes(b"".join(parts))


def load_snapshot(path: str | Path) -> AttributedGraph:
    buf = Path(path).read_bytes()
    if buf[:4] != MAGIC:
        raise ValueError(f"{path}: not a graph snapshot")
    version, n, m = struct.unpack_from("<IQQ", buf, 4)
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"{path}: unsupported snapshot version {version}")
    off = 4 + struct.calcsize("<IQQ")

    def take(dtype: str, count: int) -> np.ndarray:
        nonlocal off
        arr = np.frombuffer(buf, dtype=dtype, count=count, offset=off)
        off += arr.nbytes
        return arr

    indptr = take("<i8", n + 1).astype(np.int64)
    indices = take("<i8", 2 * m).astype(np.int64)
    values = take("<f8", n).astype(np.float64)
    present = np.unpackbits(take("u1", (n + 7) // 8), bitorder="little")[:n].astype(bool)
    (kind,) = struct.unpack_from("<B", buf, off)
    off += 1
    if kind == _ID_INT:
        ids = take("<i8", n).astype(np.int64)
    else:
        out = []
        for _ in range(n):
            (length,) = struct.unpack_from("<I", buf, off)
            off += 4
            out.append(buf[off : off + length].decode("utf-8"))
            off += length
        ids = np.array(out, dtype=object)
    attr = np.where(present, values, np.nan)
    return AttributedGraph(indptr, indices, attr, ids, {})


def require_nonempty(g: AttributedGraph) -> None:
    if g.n == 0:
        raise ParadoxError("graph is empty")
