"""Model-level checks: braid relation, closability, Hecke/BMW relations, group-like
commutation and Markov enhancement constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import BlockOperator, FaceModel, OrientedGraph, embed, partial_trace_last, truncated_tensor
from .errors import MuZero, NotClosable, NotEnhanced, SingularBlock
from .numerics import MAX_CONDITION, invert


@dataclass
class CheckReport:
    check: str
    passed: bool
    residual: float
    witness: Any = None
    details: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        # non-finite residuals (e.g. a construction that could not be built) become null
        res = float(self.residual)
        out = {"check": self.check, "pass": bool(self.passed), "residual": res if np.isfinite(res) else None,
               "witness": self.witness}
        if self.details:
            out["details"] = self.details
        return out


def max_abs(mat: np.ndarray) -> float:
    return float(np.abs(mat).max()) if mat.size else 0.0


def relative_residual(diff: np.ndarray, scale: float) -> float:
    return max_abs(diff) / max(scale, 1e-300)


def _witness(op_graph: OrientedGraph, degree: int, diff: np.ndarray) -> list[str]:
    i, j = np.unravel_index(int(np.argmax(np.abs(diff))), diff.shape)
    ps = op_graph.paths(degree)
    return [str(ps[i]), str(ps[j])]


def _report(name: str, diff: np.ndarray, scale: float, tol: float, graph: OrientedGraph, degree: int,
            **details) -> CheckReport:
    res = relative_residual(diff, scale)
    ok = res < tol
    return CheckReport(name, ok, res, None if ok else _witness(graph, degree, diff), details)


def check_star_triangular(model: FaceModel, tol: float = 1e-9) -> CheckReport:
    w = model.operator
    w1 = embed(w, 1, 3).matrix
    w2 = embed(w, 2, 3).matrix
    diff = w1 @ w2 @ w1 - w2 @ w1 @ w2
    return _report("star_triangular", diff, max_abs(w.matrix) ** 3, tol, model.graph, 3)


# ---------------------------------------------------------------------------
# Lyubashenko double

TILDE = "~"


def reversed_edge(eid: str) -> str:
    return TILDE + eid


@dataclass
class LyubashenkoDouble:
    """The double of a face model on the graph with edges ``G^1 + reversed(G^1)``.

    ``w_ld`` and ``w_ld_minus`` are the two rectangular operators from the span of
    ``(~p, q)`` paths (columns, in ``mixed_in`` order) to the span of ``(r, ~s)``
    paths (rows, in ``mixed_out`` order).
    """

    base: FaceModel
    graph: OrientedGraph
    model: FaceModel
    operator: BlockOperator
    w_ld: np.ndarray
    w_ld_minus: np.ndarray
    mixed_in: np.ndarray
    mixed_out: np.ndarray
    plain: np.ndarray
    tilde: np.ndarray


def double_graph(graph: OrientedGraph) -> OrientedGraph:
    edges = [(e.id, e.src, e.dst) for e in graph.edges]
    for e in graph.edges:
        if reversed_edge(e.id) in graph.edge_index:
            raise ValueError(f"edge id {reversed_edge(e.id)!r} clashes with the reversed-edge naming")
        edges.append((reversed_edge(e.id), e.dst, e.src))
    return OrientedGraph(graph.vertices, edges)


def _invert_between(mat: np.ndarray, rows: np.ndarray, cols: np.ndarray, graph: OrientedGraph,
                    which: str) -> np.ndarray:
    """Blockwise inverse of a map from span(cols) to span(rows); result maps rows -> cols."""
    src, dst = graph.endpoints(2)
    out = np.zeros((len(cols), len(rows)), dtype=complex)
    keys = sorted({(src[i], dst[i]) for i in rows} | {(src[j], dst[j]) for j in cols})
    for a, b in keys:
        ri = np.flatnonzero((src[rows] == a) & (dst[rows] == b))
        ci = np.flatnonzero((src[cols] == a) & (dst[cols] == b))
        label = (graph.vertices[a], graph.vertices[b])
        if len(ri) != len(ci):
            raise NotClosable(which, label, f"block is {len(ri)}x{len(ci)}")
        blk = mat[np.ix_(ri, ci)]
        cond = np.linalg.cond(blk)
        if not np.isfinite(cond) or cond > MAX_CONDITION:
            raise NotClosable(which, label, f"condition number {cond:.3g}")
        out[np.ix_(ci, ri)] = np.linalg.inv(blk)
    return out


def build_lyubashenko_double(model: FaceModel) -> LyubashenkoDouble:
    g = model.graph
    W = model.operator.matrix
    Winv = invert(model.operator).matrix
    ld = double_graph(g)
    ne = len(g.edges)
    two = ld.edge_indices(2)
    is_t = two >= ne
    plain = np.flatnonzero(~is_t[:, 0] & ~is_t[:, 1])
    mixed_out = np.flatnonzero(~is_t[:, 0] & is_t[:, 1])  # (r, ~s)
    mixed_in = np.flatnonzero(is_t[:, 0] & ~is_t[:, 1])  # (~p, q)
    tilde = np.flatnonzero(is_t[:, 0] & is_t[:, 1])

    def base_index(a: int, b: int) -> int | None:
        return g._table(2).by_edges.get((g.edges[a].id, g.edges[b].id))

    w_ld = np.zeros((len(mixed_out), len(mixed_in)), dtype=complex)
    w_ld_minus = np.zeros_like(w_ld)
    for c, k in enumerate(mixed_out):
        r, s = two[k, 0], two[k, 1] - ne
        for d, l in enumerate(mixed_in):
            p, q = two[l, 0] - ne, two[l, 1]
            row, col = base_index(p, r), base_index(q, s)
            if row is None or col is None:
                continue
            w_ld[c, d] = Winv[row, col]
            w_ld_minus[c, d] = W[row, col]

    full = np.zeros((ld.dim(2), ld.dim(2)), dtype=complex)
    base_pos = np.array([base_index(two[k, 0], two[k, 1]) for k in plain], dtype=int)
    full[np.ix_(plain, plain)] = W[np.ix_(base_pos, base_pos)]
    full[np.ix_(mixed_out, mixed_in)] = w_ld
    # invertibility of w_ld itself is part of closability
    _invert_between(w_ld, mixed_out, mixed_in, ld, "w_LD")
    full[np.ix_(mixed_in, mixed_out)] = _invert_between(w_ld_minus, mixed_out, mixed_in, ld, "w_LD^-")
    for a, k in enumerate(tilde):
        rt, qt = two[k, 0] - ne, two[k, 1] - ne
        for b, l in enumerate(tilde):
            pt, st = two[l, 0] - ne, two[l, 1] - ne
            row, col = base_index(st, pt), base_index(qt, rt)
            if row is None or col is None:
                continue
            full[k, l] = W[row, col]
    op = BlockOperator(ld, 2, full)
    return LyubashenkoDouble(model, ld, FaceModel.from_operator(op), op, w_ld, w_ld_minus,
                             mixed_in, mixed_out, plain, tilde)


def is_closable(model: FaceModel) -> bool:
    try:
        build_lyubashenko_double(model)
    except (NotClosable, SingularBlock):
        return False
    return True


def check_double_star_triangular(dbl: LyubashenkoDouble, tol: float = 1e-9) -> CheckReport:
    rep = check_star_triangular(dbl.model, tol)
    rep.check = "double_star_triangular"
    return rep


# ---------------------------------------------------------------------------
# relation suites


def check_hecke(model: FaceModel, a: complex, b: complex, tol: float = 1e-9) -> CheckReport:
    w = model.operator.matrix
    eye = np.eye(w.shape[0])
    diff = (w - a * eye) @ (w - b * eye)
    scale = max(max_abs(w), abs(a), abs(b)) ** 2
    return _report("hecke", diff, scale, tol, model.graph, 2)


def bmw_relations(model: FaceModel, lam: complex, q: complex) -> list[tuple[str, np.ndarray]]:
    """All relations of the BMW list as (name, left - right) on paths of length 3."""
    mu = q - 1 / q
    if abs(mu) < 1e-12:
        raise MuZero("q - 1/q vanishes")
    w = model.operator
    winv = invert(w)
    e = (w.matrix - winv.matrix) / mu + np.eye(w.dim)
    e_op = BlockOperator(model.graph, 2, e)
    g = {1: embed(w, 1, 3).matrix, 2: embed(w, 2, 3).matrix}
    E = {1: embed(e_op, 1, 3).matrix, 2: embed(e_op, 2, 3).matrix}
    one = np.eye(g[1].shape[0])
    zeta = -(lam - 1 / lam) / mu + 1
    rels = []
    for i in (1, 2):
        gi, ei = g[i], E[i]
        rels.append((f"cubic_{i}", (gi - one / lam) @ (gi + q * one) @ (gi - one / q)))
    rels.append(("braid", g[1] @ g[2] @ g[1] - g[2] @ g[1] @ g[2]))
    rels.append(("e1g2e1", E[1] @ g[2] @ E[1] - lam * E[1]))
    rels.append(("e2g1e2", E[2] @ g[1] @ E[2] - lam * E[2]))
    for i in (1, 2):
        gi, ei = g[i], E[i]
        rels.append((f"g{i}^2", gi @ gi - (-mu * gi + mu / lam * ei + one)))
        rels.append((f"e{i}^2", ei @ ei - zeta * ei))
        rels.append((f"e{i}g{i}", ei @ gi - ei / lam))
        rels.append((f"g{i}e{i}", gi @ ei - ei / lam))
    for i, j in ((1, 2), (2, 1)):
        gi, gj, ei, ej = g[i], g[j], E[i], E[j]
        rels.append((f"e{i}e{j}e{i}", ei @ ej @ ei - ei))
        rels.append((f"e{i}g{j}e{i}", ei @ gj @ ei - lam * ei))
        rels.append((f"e{i}e{j}g{i}", ei @ ej @ gi - (ei @ gj - mu * ei @ ej + mu * ei)))
        rels.append((f"g{i}e{j}e{i}", gi @ ej @ ei - (gj @ ei - mu * ej @ ei + mu * ei)))
        rels.append((f"e{i}g{j}g{i}", ei @ gj @ gi - ei @ ej))
        rels.append((f"g{i}g{j}e{i}", gi @ gj @ ei - ej @ ei))
        rels.append((f"g{i}e{j}g{i}", gi @ ej @ gi - gj @ ei @ gj
                     - (mu * (ei @ gj + gj @ ei - ej @ gi - gi @ ej) + mu ** 2 * (ei - ej))))
    return rels


def check_bmw(model: FaceModel, lam: complex, q: complex, tol: float = 1e-9) -> CheckReport:
    rels = bmw_relations(model, lam, q)
    scale = max(max_abs(model.operator.matrix), abs(lam), abs(1 / lam), abs(q), abs(1 / q)) ** 3
    worst, first_fail, residuals = 0.0, None, {}
    for name, diff in rels:
        r = relative_residual(diff, scale)
        residuals[name] = r
        worst = max(worst, r)
        if r >= tol and first_fail is None:
            first_fail = name
    return CheckReport("bmw", first_fail is None, worst, first_fail, {"relations": residuals})


def check_glf_commutant(model: FaceModel, G: BlockOperator, tol: float = 1e-9) -> CheckReport:
    if G.degree != 1 or G.graph is not model.graph:
        raise ValueError("G must be an edge operator on the model's graph")
    w = model.operator.matrix
    gg = truncated_tensor(G, G).matrix
    diff = gg @ w - w @ gg
    scale = max_abs(gg) * max_abs(w)
    return _report("glf_commutant", diff, scale, tol, model.graph, 2)


# ---------------------------------------------------------------------------
# enhancement


def _scalar_of(op: BlockOperator, tol: float, side: str) -> complex:
    mat = op.matrix
    scale = max(max_abs(mat), 1e-300)
    off = mat - np.diag(np.diag(mat))
    if max_abs(off) > tol * scale:
        raise NotEnhanced(side, max_abs(off) / scale, "not block-scalar")
    diag = np.diag(mat)
    c = complex(diag.mean())
    g = op.graph
    for (_, _), idx in g.blocks(1):
        vals = diag[idx]
        if np.abs(vals - vals[0]).max() > tol * scale:
            raise NotEnhanced(side, float(np.abs(vals - vals[0]).max() / scale), "not block-scalar")
    spread = float(np.abs(diag - c).max()) / scale
    if spread > tol:
        raise NotEnhanced(side, spread, "block-scalar but block-dependent")
    return c


def enhancement_constants(model: FaceModel, M: BlockOperator, tol: float = 1e-9) -> tuple[complex, complex]:
    """Scalars ``c_+-`` with ``tr_2((1 (x) M) w^(+-1)) = c_+- id``."""
    w = model.operator
    plus = partial_trace_last(w, M)
    minus = partial_trace_last(invert(w), M)
    return _scalar_of(plus, tol, "positive"), _scalar_of(minus, tol, "negative")
