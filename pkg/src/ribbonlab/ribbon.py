"""Ribbon and modified ribbon operators, the trace criterion and group-like evaluation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Iterable, Mapping

import numpy as np

from .core import BlockOperator, OrientedGraph, Path
from .numerics import invert, operator_sqrt
from .serialization import decode_complex, encode_complex

if TYPE_CHECKING:
    from .drinfeld import DrinfeldOperators
    from .verify import CheckReport


class GroupLikeVector:
    """A finite linear combination of matrix coefficients ``e(p/q)``.

    Terms of different lengths may be mixed, which lets ``det - 1`` be a single vector.
    """

    def __init__(self, terms: Mapping[tuple[Path, Path], complex]):
        clean: dict[tuple[Path, Path], complex] = {}
        for (p, q), c in terms.items():
            if p.length != q.length:
                raise ValueError("e(p/q) needs paths of equal length")
            clean[(p, q)] = clean.get((p, q), 0j) + complex(c)
        self.terms = clean

    @classmethod
    def unit(cls, graph: OrientedGraph) -> "GroupLikeVector":
        """``1 = sum_{i,j} e(i/j)`` over pairs of vertices."""
        vs = graph.paths(0)
        return cls({(a, b): 1.0 for a in vs for b in vs})

    @property
    def degrees(self) -> set[int]:
        return {p.length for p, _ in self.terms}

    def __add__(self, other: "GroupLikeVector") -> "GroupLikeVector":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return GroupLikeVector(out)

    def __neg__(self) -> "GroupLikeVector":
        return GroupLikeVector({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "GroupLikeVector") -> "GroupLikeVector":
        return self + (-other)

    def __mul__(self, c: complex) -> "GroupLikeVector":
        return GroupLikeVector({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __len__(self) -> int:
        return len(self.terms)

    def to_json(self) -> list[dict[str, Any]]:
        def enc(p: Path) -> dict[str, Any]:
            return {"start": p.start, "edges": list(p.edges)}

        return [{"p": enc(p), "q": enc(q), "c": encode_complex(c)} for (p, q), c in self.terms.items()]

    @classmethod
    def from_json(cls, graph: OrientedGraph, data: Iterable[dict[str, Any]]) -> "GroupLikeVector":
        terms = {}
        for item in data:
            p = graph.path(item["p"]["edges"], item["p"]["start"])
            q = graph.path(item["q"]["edges"], item["q"]["start"])
            terms[(p, q)] = terms.get((p, q), 0j) + decode_complex(item["c"])
        return cls(terms)


def evaluate_glf(G: BlockOperator, v: GroupLikeVector) -> complex:
    """Value of the group-like functional of ``G`` on ``v``: products of edge entries,
    and ``delta_ij`` on vertex coefficients ``e(i/j)``."""
    g = G.graph
    idx = g.edge_index
    mat = G.matrix
    total = 0j
    for (p, q), c in v.terms.items():
        if p.length == 0:
            total += c * (p.start == q.start)
            continue
        val = c
        for a, b in zip(p.edges, q.edges):
            val *= mat[idx[a], idx[b]]
            if val == 0:
                break
        total += val
    return complex(total)


@dataclass
class RibbonSolution:
    sign: str
    V: BlockOperator
    M: BlockOperator
    residuals: dict[str, float] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        from .serialization import encode_matrix

        return {"sign": self.sign, "V": encode_matrix(self.V.matrix), "M": encode_matrix(self.M.matrix),
                "residuals": self.residuals}


def _sign_key(M: BlockOperator) -> tuple[float, float]:
    tr = complex(np.trace(M.matrix))
    return (tr.real, tr.imag)


def ribbon_solve(ops: "DrinfeldOperators", tol: float = 1e-9, cluster_tol: float = 1e-7
                 ) -> tuple[RibbonSolution, RibbonSolution]:
    """The two solutions ``+-V`` of ``V^2 = pi(U1 U2^-1)`` with ``M = pi(U1) V^-1``.

    ``V`` is the principal square root; the solution labelled ``+`` is the one whose
    modified ribbon has positive real trace (ties broken by the imaginary part).
    """
    from .verify import check_glf_commutant, max_abs, relative_residual

    target = ops.ribbon_target
    mtarget = ops.mrib_target
    V = operator_sqrt(target, cluster_tol)
    M = ops.U1 @ invert(V)
    sols = []
    for s in (1, -1):
        Vs, Ms = V * s, M * s
        res = {
            "V^2": relative_residual((Vs @ Vs - target).matrix, max(max_abs(target.matrix), 1e-300)),
            "M^2": relative_residual((Ms @ Ms - mtarget).matrix, max(max_abs(mtarget.matrix), 1e-300)),
            "glf": check_glf_commutant(ops.model, Ms, tol).residual,
        }
        sols.append((Vs, Ms, res))
    if _sign_key(sols[1][1]) > _sign_key(sols[0][1]):
        sols.reverse()
    plus = RibbonSolution("+", *sols[0])
    minus = RibbonSolution("-", *sols[1])
    return plus, minus


def s2_factors(graph: OrientedGraph, s2: np.ndarray | BlockOperator) -> np.ndarray:
    """S^2 scale factors per pair of edges; a diagonal operator ``D`` stands for ``D_p / D_q``."""
    if isinstance(s2, BlockOperator):
        d = np.diag(s2.matrix)
        return d[:, None] / d[None, :]
    s2 = np.asarray(s2, dtype=complex)
    if s2.shape != (graph.dim(1), graph.dim(1)):
        raise ValueError("S^2 factors need one entry per pair of edges")
    return s2


def mcrit_check(M: BlockOperator, s2diag: np.ndarray | BlockOperator, tol: float = 1e-9) -> "CheckReport":
    """``M E_pq M^-1 = S^2-factor(p,q) E_pq`` for every matrix unit, and ``Tr M = Tr M^-1 != 0``."""
    from .verify import CheckReport

    factors = s2_factors(M.graph, s2diag)
    m = M.matrix
    minv = invert(M).matrix
    n = m.shape[0]
    scale = max(float(np.abs(m).max()) * float(np.abs(minv).max()), 1e-300)
    conj = 0.0
    worst_pair = None
    for p in range(n):
        for q in range(n):
            diff = np.outer(m[:, p], minv[q, :])
            diff[p, q] -= factors[p, q]
            r = float(np.abs(diff).max()) / scale
            if r > conj:
                conj, worst_pair = r, (M.graph.edges[p].id, M.graph.edges[q].id)
    tr, tri = complex(np.trace(m)), complex(np.trace(minv))
    tscale = max(abs(tr), abs(tri), 1e-300)
    trace_gap = abs(tr - tri) / tscale
    details = {"conjugation": conj, "trace_gap": trace_gap, "trace": encode_complex(tr),
               "trace_inverse": encode_complex(tri)}
    if conj >= tol:
        return CheckReport("mcrit", False, conj, {"clause": "conjugation", "pair": list(worst_pair)}, details)
    if trace_gap >= tol:
        return CheckReport("mcrit", False, trace_gap, {"clause": "trace_equality"}, details)
    if abs(tr) < tol:
        return CheckReport("mcrit", False, abs(tr), {"clause": "trace_nonzero"}, details)
    return CheckReport("mcrit", True, max(conj, trace_gap), None, details)


def quotient_vanishing(M: BlockOperator, ideal_vectors: Mapping[str, GroupLikeVector] | Iterable[GroupLikeVector],
                       tol: float = 1e-9) -> "CheckReport":
    from .verify import CheckReport

    if not isinstance(ideal_vectors, Mapping):
        ideal_vectors = {f"v{k}": v for k, v in enumerate(ideal_vectors)}
    values = {name: evaluate_glf(M, v) for name, v in ideal_vectors.items()}
    worst_name, worst = None, 0.0
    for name, val in values.items():
        if abs(val) >= worst:
            worst_name, worst = name, abs(val)
    ok = worst < tol
    return CheckReport("quotient_vanishing", ok, worst, None if ok else worst_name,
                       {"values": {k: encode_complex(v) for k, v in values.items()}})
