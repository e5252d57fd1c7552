"""Oriented graphs, paths, face models and block operators on path spaces.

Conventions
-----------
A face ``(r p/q s)`` has left edge ``r``, top ``p``, bottom ``q`` and right ``s``;
it satisfies ``s(p)=s(r), r(p)=s(s), r(r)=s(q), r(q)=r(s)``.  The operator of a
face model sends the path ``(p, s)`` to ``sum w[r p/q s] (r, q)``, so its
matrix entry in row ``(r, q)`` and column ``(p, s)`` is ``w[r p/q s]``.

Paths of a fixed length are ordered lexicographically by the declaration index
of their edges; bare vertices follow the declaration order of the vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import InvalidFace, ModelError

#: entries outside the block pattern smaller than this (relative) are treated as rounding noise
BLOCK_LEAK_TOL = 1e-12


class Edge(NamedTuple):
    id: str
    src: str
    dst: str


class Path(NamedTuple):
    start: str
    end: str
    edges: tuple[str, ...]

    @property
    def length(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        if not self.edges:
            return self.start
        return "(" + ",".join(self.edges) + ")"


class _PathTable:
    """Index arrays for all paths of one length."""

    def __init__(self, paths: tuple[Path, ...], src: np.ndarray, dst: np.ndarray, edge_idx: np.ndarray):
        self.paths = paths
        self.src = src
        self.dst = dst
        self.edge_idx = edge_idx
        self.index = {p: i for i, p in enumerate(paths)}
        self.by_edges = {p.edges: i for i, p in enumerate(paths)} if edge_idx.shape[1] else {}


class OrientedGraph:
    """A finite oriented graph ``(V, G^1)``; immutable after construction."""

    def __init__(self, vertices: Iterable[str], edges: Iterable[Sequence[str]]):
        self.vertices: tuple[str, ...] = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise ModelError("duplicate vertex id")
        vset = set(self.vertices)
        es = []
        for e in edges:
            eid, src, dst = (str(x) for x in e)
            if src not in vset or dst not in vset:
                raise ModelError(f"edge {eid!r} has an endpoint outside the vertex set")
            es.append(Edge(eid, src, dst))
        self.edges: tuple[Edge, ...] = tuple(es)
        if len({e.id for e in es}) != len(es):
            raise ModelError("duplicate edge id")
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self.edge_index = {e.id: i for i, e in enumerate(self.edges)}
        self._edge_src = np.array([self.vertex_index[e.src] for e in es], dtype=int)
        self._edge_dst = np.array([self.vertex_index[e.dst] for e in es], dtype=int)
        self._out = [[k for k, e in enumerate(es) if e.src == v] for v in self.vertices]
        self._tables: dict[int, _PathTable] = {}
        self._splits: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}

    def __repr__(self) -> str:
        return f"OrientedGraph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def source(self, edge_id: str) -> str:
        return self.edges[self.edge_index[edge_id]].src

    def range(self, edge_id: str) -> str:
        return self.edges[self.edge_index[edge_id]].dst

    # -- paths ---------------------------------------------------------------

    def _table(self, m: int) -> _PathTable:
        if m < 0:
            raise ValueError("path length must be nonnegative")
        tab = self._tables.get(m)
        if tab is not None:
            return tab
        if m == 0:
            nv = len(self.vertices)
            idx = np.arange(nv)
            paths = tuple(Path(v, v, ()) for v in self.vertices)
            tab = _PathTable(paths, idx, idx.copy(), np.zeros((nv, 0), dtype=int))
        elif m == 1:
            ne = len(self.edges)
            paths = tuple(Path(e.src, e.dst, (e.id,)) for e in self.edges)
            tab = _PathTable(paths, self._edge_src.copy(), self._edge_dst.copy(), np.arange(ne).reshape(ne, 1))
        else:
            prev = self._table(m - 1)
            rows = []
            for i in range(len(prev.paths)):
                for k in self._out[prev.dst[i]]:
                    rows.append((i, k))
            if rows:
                pi = np.array([r[0] for r in rows], dtype=int)
                ek = np.array([r[1] for r in rows], dtype=int)
                edge_idx = np.concatenate([prev.edge_idx[pi], ek[:, None]], axis=1)
                src = prev.src[pi]
                dst = self._edge_dst[ek]
            else:
                edge_idx = np.zeros((0, m), dtype=int)
                src = dst = np.zeros(0, dtype=int)
            paths = tuple(
                Path(self.vertices[s], self.vertices[d], tuple(self.edges[k].id for k in row))
                for s, d, row in zip(src, dst, edge_idx)
            )
            tab = _PathTable(paths, src, dst, edge_idx)
        self._tables[m] = tab
        return tab

    def paths(self, m: int) -> tuple[Path, ...]:
        return self._table(m).paths

    def dim(self, m: int) -> int:
        return len(self._table(m).paths)

    def path_index(self, m: int) -> dict[Path, int]:
        return self._table(m).index

    def endpoints(self, m: int) -> tuple[np.ndarray, np.ndarray]:
        """Source and range vertex indices of every path of length ``m``."""
        tab = self._table(m)
        return tab.src, tab.dst

    def edge_indices(self, m: int) -> np.ndarray:
        return self._table(m).edge_idx

    def path(self, edges: Sequence[str], start: str | None = None) -> Path:
        """Build a path from edge ids, checking composability."""
        edges = tuple(edges)
        if not edges:
            if start is None or start not in self.vertex_index:
                raise ModelError("a length-0 path needs a valid start vertex")
            return Path(start, start, ())
        for a, b in zip(edges, edges[1:]):
            if self.range(a) != self.source(b):
                raise ModelError(f"edges {a!r} and {b!r} do not compose")
        s = self.source(edges[0])
        if start is not None and start != s:
            raise ModelError("start vertex does not match the first edge")
        return Path(s, self.range(edges[-1]), edges)

    def lookup(self, path: Path | Sequence[str]) -> int:
        """Position of a path in the canonical order of its length."""
        if isinstance(path, Path):
            return self._table(path.length).index[path]
        edges = tuple(path)
        return self._table(len(edges)).by_edges[edges]

    def split(self, m: int, k: int) -> tuple[np.ndarray, np.ndarray]:
        """For each path of length ``m``: indices of its first ``k`` edges and of the rest.

        Length-0 pieces are indexed by vertex (start for the head, end for the tail).
        """
        key = (m, k)
        if key not in self._splits:
            tab = self._table(m)
            if not 0 <= k <= m:
                raise ValueError("split point out of range")
            if k == 0:
                head = tab.src.copy()
            else:
                head_tab = self._table(k)
                head = np.array([head_tab.by_edges[p.edges[:k]] for p in tab.paths], dtype=int)
            if k == m:
                tail = tab.dst.copy()
            else:
                tail_tab = self._table(m - k)
                tail = np.array([tail_tab.by_edges[p.edges[k:]] for p in tab.paths], dtype=int)
            self._splits[key] = (head, tail)
        return self._splits[key]

    def block_mask(self, m: int) -> np.ndarray:
        src, dst = self.endpoints(m)
        return (src[:, None] == src[None, :]) & (dst[:, None] == dst[None, :])

    def blocks(self, m: int) -> list[tuple[tuple[str, str], np.ndarray]]:
        """Index sets of the (source, range) blocks, in canonical order."""
        src, dst = self.endpoints(m)
        out = []
        for i, v in enumerate(self.vertices):
            for j, u in enumerate(self.vertices):
                idx = np.flatnonzero((src == i) & (dst == j))
                if idx.size:
                    out.append(((v, u), idx))
        return out


def enumerate_paths(graph: OrientedGraph, m: int) -> tuple[Path, ...]:
    return graph.paths(m)


def is_face(graph: OrientedGraph, r: str, p: str, q: str, s: str) -> bool:
    S, R = graph.source, graph.range
    return S(p) == S(r) and R(p) == S(s) and R(r) == S(q) and R(q) == R(s)


@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Operator on the span of the length-``degree`` paths preserving (source, range) blocks."""

    graph: OrientedGraph
    degree: int
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        d = self.graph.dim(self.degree)
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match path space of dimension {d}")
        outside = ~self.graph.block_mask(self.degree)
        if outside.any():
            leak = np.abs(mat[outside]).max() if mat.size else 0.0
            scale = max(1.0, float(np.abs(mat).max()))
            if leak > BLOCK_LEAK_TOL * scale:
                i, j = np.argwhere(outside & (np.abs(mat) == leak))[0]
                ps = self.graph.paths(self.degree)
                raise ValueError(f"entry ({ps[i]}, {ps[j]}) breaks block preservation")
            mat[outside] = 0.0
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, graph: OrientedGraph, m: int) -> "BlockOperator":
        return cls(graph, m, np.eye(graph.dim(m)))

    @classmethod
    def diagonal(cls, graph: OrientedGraph, m: int, values: Sequence[complex]) -> "BlockOperator":
        return cls(graph, m, np.diag(np.asarray(values, dtype=complex)))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entry(self, p: Path | Sequence[str], q: Path | Sequence[str]) -> complex:
        return complex(self.matrix[self.graph.lookup(p), self.graph.lookup(q)])

    def _check(self, other: "BlockOperator") -> None:
        if other.graph is not self.graph or other.degree != self.degree:
            raise ValueError("operators live on different path spaces")

    def __matmul__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.graph, self.degree, self.matrix @ other.matrix)

    def __add__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.graph, self.degree, self.matrix + other.matrix)

    def __sub__(self, other: "BlockOperator") -> "BlockOperator":
        self._check(other)
        return BlockOperator(self.graph, self.degree, self.matrix - other.matrix)

    def __mul__(self, c: complex) -> "BlockOperator":
        return BlockOperator(self.graph, self.degree, self.matrix * complex(c))

    __rmul__ = __mul__

    def __neg__(self) -> "BlockOperator":
        return BlockOperator(self.graph, self.degree, -self.matrix)

    def __repr__(self) -> str:
        return f"BlockOperator(degree={self.degree}, dim={self.dim})"


#: operators on the edge space are block operators of degree 1
EdgeOperator = BlockOperator


class FaceModel:
    """Weights on the faces of an oriented graph; missing faces have weight 0."""

    def __init__(self, graph: OrientedGraph, weights: Mapping[tuple[str, str, str, str], complex]):
        self.graph = graph
        ws: dict[tuple[str, str, str, str], complex] = {}
        for key, val in weights.items():
            r, p, q, s = key
            for e in key:
                if e not in graph.edge_index:
                    raise InvalidFace(f"unknown edge {e!r} in face {key}")
            if not is_face(graph, r, p, q, s):
                raise InvalidFace(f"({r} {p}/{q} {s}) is not a face")
            ws[(r, p, q, s)] = complex(val)
        self.weights = ws
        self._op: BlockOperator | None = None

    def weight(self, r: str, p: str, q: str, s: str) -> complex:
        return self.weights.get((r, p, q, s), 0j)

    @property
    def operator(self) -> BlockOperator:
        if self._op is None:
            self._op = model_as_operator(self)
        return self._op

    @classmethod
    def from_operator(cls, op: BlockOperator, atol: float = 0.0) -> "FaceModel":
        """Read face weights back from a degree-2 operator (entries with modulus > atol)."""
        if op.degree != 2:
            raise ValueError("face models correspond to degree-2 operators")
        paths = op.graph.paths(2)
        rows, cols = np.nonzero(np.abs(op.matrix) > atol)
        weights = {}
        for i, j in zip(rows, cols):
            r, q = paths[i].edges
            p, s = paths[j].edges
            weights[(r, p, q, s)] = op.matrix[i, j]
        return cls(op.graph, weights)

    def scaled(self, eta: complex) -> "FaceModel":
        return FaceModel(self.graph, {k: v * eta for k, v in self.weights.items()})

    def __repr__(self) -> str:
        return f"FaceModel({self.graph!r}, {len(self.weights)} faces)"


def model_as_operator(model: FaceModel) -> BlockOperator:
    g = model.graph
    idx = g._table(2).by_edges
    mat = np.zeros((g.dim(2), g.dim(2)), dtype=complex)
    for (r, p, q, s), val in model.weights.items():
        if not is_face(g, r, p, q, s):
            raise InvalidFace(f"({r} {p}/{q} {s}) is not a face")
        mat[idx[(r, q)], idx[(p, s)]] += val
    return BlockOperator(g, 2, mat)


def truncated_tensor(f: BlockOperator, g: BlockOperator) -> BlockOperator:
    if f.graph is not g.graph:
        raise ValueError("operators live on different graphs")
    m, n = f.degree, g.degree
    head, tail = f.graph.split(m + n, m)
    mat = f.matrix[np.ix_(head, head)] * g.matrix[np.ix_(tail, tail)]
    return BlockOperator(f.graph, m + n, mat)


def identity(graph: OrientedGraph, m: int) -> BlockOperator:
    return BlockOperator.identity(graph, m)


def embed(f: BlockOperator, position: int, n: int) -> BlockOperator:
    """``id^(position-1) (x) f (x) id^(rest)`` on paths of length ``n`` (1-based position)."""
    before = position - 1
    after = n - before - f.degree
    if before < 0 or after < 0:
        raise ValueError("operator does not fit at this position")
    g = f.graph
    out = f
    if before:
        out = truncated_tensor(identity(g, before), out)
    if after:
        out = truncated_tensor(out, identity(g, after))
    return out


def tensor_power(f: BlockOperator, n: int) -> BlockOperator:
    out = identity(f.graph, 0)
    for _ in range(n):
        out = truncated_tensor(out, f)
    return out


def partial_trace_last(f: BlockOperator, weight: BlockOperator) -> BlockOperator:
    n = f.degree
    if n < 1:
        raise ValueError("partial trace needs degree >= 1")
    if weight.degree != 1 or weight.graph is not f.graph:
        raise ValueError("weight must be an edge operator on the same graph")
    g = f.graph
    head, last = g.split(n, n - 1)
    t = f.matrix * weight.matrix[np.ix_(last, last)].T
    a = np.zeros((g.dim(n), g.dim(n - 1)))
    a[np.arange(g.dim(n)), head] = 1.0
    return BlockOperator(g, n - 1, a.T @ t @ a)
