"""Lyubashenko forms on degree-1 generators and the Drinfeld operators on the edge space.

``pi(X)`` is the matrix ``pi(X)[p, q] = X(e(p/q))``, matching the coaction
``rho(q) = sum_p p (x) e(p/q)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BlockOperator, FaceModel, truncated_tensor
from .errors import NonInvertibleDrinfeld
from .numerics import invert
from .verify import CheckReport, LyubashenkoDouble, build_lyubashenko_double, max_abs, relative_residual


@dataclass
class LyubashenkoForms:
    """``q_plus[p, q, r, s] = Q+(e(p/q), e(r/s))`` and likewise ``q_minus``; indices are edge positions."""

    edges: tuple[str, ...]
    q_plus: np.ndarray
    q_minus: np.ndarray

    def plus(self, p: str, q: str, r: str, s: str) -> complex:
        i = {e: k for k, e in enumerate(self.edges)}
        return complex(self.q_plus[i[p], i[q], i[r], i[s]])

    def minus(self, p: str, q: str, r: str, s: str) -> complex:
        i = {e: k for k, e in enumerate(self.edges)}
        return complex(self.q_minus[i[p], i[q], i[r], i[s]])


def lyubashenko_forms(dbl: LyubashenkoDouble) -> LyubashenkoForms:
    """``Q+(e(p/q), e(r/s)) = w_LD^-1[~q s/r ~p]`` and ``Q-(e(p/q), e(r/s)) = w_LD[~s q/p ~r]``.

    A face ``(a b/c d)`` of the double is the entry in row ``(a, c)`` and column ``(b, d)``.
    """
    g = dbl.base.graph
    ld = dbl.graph
    ne = len(g.edges)
    full = dbl.operator.matrix
    full_inv = invert(dbl.operator).matrix
    # position of the length-2 path (a, b) of the double, or -1
    pos = -np.ones((2 * ne, 2 * ne), dtype=int)
    for k, row in enumerate(ld.edge_indices(2)):
        pos[row[0], row[1]] = k
    t = np.arange(ne) + ne  # reversed edges
    e = np.arange(ne)
    qp = np.zeros((ne, ne, ne, ne), dtype=complex)
    qm = np.zeros_like(qp)
    P, Q, R, S = np.meshgrid(e, e, e, e, indexing="ij")
    # Q+: row (~q, r), column (s, ~p)
    row, col = pos[t[Q], R], pos[S, t[P]]
    ok = (row >= 0) & (col >= 0)
    qp[ok] = full_inv[row[ok], col[ok]]
    # Q-: row (~s, p), column (q, ~r)
    row, col = pos[t[S], P], pos[Q, t[R]]
    ok = (row >= 0) & (col >= 0)
    qm[ok] = full[row[ok], col[ok]]
    return LyubashenkoForms(tuple(x.id for x in g.edges), qp, qm)


@dataclass
class DrinfeldOperators:
    model: FaceModel
    U1: BlockOperator
    U1inv: BlockOperator
    U2inv: BlockOperator
    U2: BlockOperator

    @property
    def ribbon_target(self) -> BlockOperator:
        """Image of ``U1 U2^-1``."""
        return self.U1 @ self.U2inv

    @property
    def mrib_target(self) -> BlockOperator:
        """Image of ``U1 U2``."""
        return self.U1 @ self.U2


def drinfeld_operators(model: FaceModel, forms: LyubashenkoForms, tol: float = 1e-9) -> DrinfeldOperators:
    g = model.graph
    qm, qp = forms.q_minus, forms.q_plus
    u1 = BlockOperator(g, 1, np.einsum("tqpt->pq", qm))
    u2inv = BlockOperator(g, 1, np.einsum("pttq->pq", qm))
    u1inv = BlockOperator(g, 1, np.einsum("tqpt->pq", qp))
    u2 = BlockOperator(g, 1, np.einsum("pttq->pq", qp))
    eye = np.eye(g.dim(1))
    for name, a, b in (("U1", u1, u1inv), ("U2", u2, u2inv)):
        scale = max(1.0, max_abs(a.matrix) * max_abs(b.matrix))
        res = relative_residual(a.matrix @ b.matrix - eye, scale)
        if not res < tol:
            raise NonInvertibleDrinfeld(f"{name} times its inverse misses the identity by {res:.3g}")
    return DrinfeldOperators(model, u1, u1inv, u2inv, u2)


def drinfeld_from_model(model: FaceModel, tol: float = 1e-9) -> DrinfeldOperators:
    return drinfeld_operators(model, lyubashenko_forms(build_lyubashenko_double(model)), tol)


def uu_commutation_check(ops: DrinfeldOperators, w: BlockOperator, tol: float = 1e-9) -> CheckReport:
    worst, which = 0.0, None
    for name, u in (("U1", ops.U1), ("U2inv", ops.U2inv)):
        uu = truncated_tensor(u, u).matrix
        diff = uu @ w.matrix - w.matrix @ uu
        r = relative_residual(diff, max(max_abs(uu) * max_abs(w.matrix), 1e-300))
        if r > worst:
            worst, which = r, name
    ok = worst < tol
    return CheckReport("uu_commutation", ok, worst, None if ok else which)
