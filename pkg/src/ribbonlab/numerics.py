"""Dense linear algebra on block operators."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .core import BlockOperator
from .errors import ClusterAmbiguity, SingularBlock, ZeroEigenvalue

#: blocks with a larger condition number are reported as singular
MAX_CONDITION = 1e13


def invert(f: BlockOperator) -> BlockOperator:
    g = f.graph
    out = np.zeros_like(f.matrix)
    for (v, u), idx in g.blocks(f.degree):
        out[np.ix_(idx, idx)] = invert_block(f.matrix[np.ix_(idx, idx)], (v, u))
    return BlockOperator(g, f.degree, out)


def invert_block(block: np.ndarray, label: tuple[str, str]) -> np.ndarray:
    if block.shape[0] != block.shape[1]:
        raise SingularBlock(*label, float("inf"))
    cond = np.linalg.cond(block) if block.size else 1.0
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularBlock(*label, float(cond))
    return np.linalg.inv(block)


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    projectors: tuple[BlockOperator, ...]
    nilpotent: BlockOperator


def _cluster(values: np.ndarray, tol: float) -> list[list[complex]]:
    # single linkage at radius tol, processed in a fixed order for determinism
    order = np.lexsort((values.imag, values.real))
    clusters: list[list[complex]] = []
    for v in values[order]:
        hits = [c for c in clusters if min(abs(v - x) for x in c) <= tol]
        if not hits:
            clusters.append([v])
            continue
        merged = hits[0]
        merged.append(v)
        for c in hits[1:]:
            merged.extend(c)
            clusters.remove(c)
    return clusters


def eigenvalue_clusters(f: BlockOperator, tol: float) -> list[tuple[complex, int]]:
    """Cluster representatives (means) and algebraic multiplicities of ``f``."""
    vals = []
    for _, idx in f.graph.blocks(f.degree):
        vals.extend(np.linalg.eigvals(f.matrix[np.ix_(idx, idx)]))
    clusters = _cluster(np.asarray(vals, dtype=complex), tol)
    reps = [(complex(np.mean(c)), len(c)) for c in clusters]
    for i in range(len(reps)):
        for j in range(i + 1, len(reps)):
            if abs(reps[i][0] - reps[j][0]) < 10 * tol:
                raise ClusterAmbiguity(reps[i][0], reps[j][0], tol)
    return reps


def _series_inverse(c: np.ndarray, n: int) -> np.ndarray:
    """First ``n`` Taylor coefficients of ``1 / sum c_k y^k``."""
    out = np.zeros(n, dtype=complex)
    out[0] = 1 / c[0]
    for k in range(1, n):
        acc = sum(c[j] * out[k - j] for j in range(1, min(k, len(c) - 1) + 1))
        out[k] = -acc / c[0]
    return out


def _matpow_apply(mat: np.ndarray, shifts: list[tuple[complex, int]]) -> np.ndarray:
    out = np.eye(mat.shape[0], dtype=complex)
    eye = np.eye(mat.shape[0])
    for lam, m in shifts:
        shifted = mat - lam * eye
        for _ in range(m):
            out = out @ shifted
    return out


def spectral(f: BlockOperator, tol: float) -> SpectralData:
    """Jordan decomposition ``f = sum lambda_i P_i + N`` with ``P_i`` polynomials in ``f``.

    Each projector is the Hermite interpolation polynomial that equals 1 to order
    ``m_i`` at its own cluster and vanishes to order ``m_j`` at the others.
    """
    reps = eigenvalue_clusters(f, tol)
    a = f.matrix
    d = a.shape[0]
    eye = np.eye(d)
    projectors = []
    for i, (lam, m) in enumerate(reps):
        others = [(mu, k) for j, (mu, k) in enumerate(reps) if j != i]
        if not others:
            projectors.append(eye.astype(complex))
            continue
        # Taylor coefficients of g_i(lam + y) = prod (y + lam - mu)^k up to y^(m-1)
        coeffs = np.zeros(m, dtype=complex)
        coeffs[0] = 1.0
        for mu, k in others:
            lin = np.array([lam - mu, 1.0], dtype=complex)
            for _ in range(k):
                coeffs = np.convolve(coeffs, lin)[:m]
        h = _series_inverse(coeffs, m)
        y = a - lam * eye
        hy = np.zeros((d, d), dtype=complex)
        for c in h[::-1]:
            hy = hy @ y + c * eye
        projectors.append(hy @ _matpow_apply(a, others))
    s = sum(lam * p for (lam, _), p in zip(reps, projectors))
    g = f.graph
    return SpectralData(
        tuple(lam for lam, _ in reps),
        tuple(m for _, m in reps),
        tuple(BlockOperator(g, f.degree, p) for p in projectors),
        BlockOperator(g, f.degree, a - s),
    )


def h_coefficients(terms: int) -> list[float]:
    """Coefficients of ``h(X) = 1 + sum_{n=0}^{terms} (-1)^n 2^(-2n-1) C(2n,n)/(n+1) X^(n+1)``."""
    out = [1.0]
    for n in range(terms + 1):
        out.append((-1) ** n * 2.0 ** (-2 * n - 1) * comb(2 * n, n) / (n + 1))
    return out


def operator_sqrt(f: BlockOperator, tol: float = 1e-7) -> BlockOperator:
    """Principal square root ``V = sum sqrt(lambda_i) P_i h(S^-1 N)``.

    The h-series runs up to the dimension of the edge space, which bounds the
    nilpotency index of ``S^-1 N``.
    """
    sd = spectral(f, tol)
    for lam in sd.eigenvalues:
        if abs(lam) < tol:
            raise ZeroEigenvalue(lam)
    d = f.dim
    s_inv = sum(p.matrix / lam for lam, p in zip(sd.eigenvalues, sd.projectors))
    x = s_inv @ sd.nilpotent.matrix
    hx = np.zeros((d, d), dtype=complex)
    for c in h_coefficients(f.graph.dim(1))[::-1]:
        hx = hx @ x + c * np.eye(d)
    root = sum(np.sqrt(lam) * p.matrix for lam, p in zip(sd.eigenvalues, sd.projectors))
    return BlockOperator(f.graph, f.degree, root @ hx)


def _null_space(mat: np.ndarray, tol: float) -> np.ndarray:
    if mat.shape[1] == 0:
        return np.zeros((0, 0), dtype=complex)
    _, sv, vh = np.linalg.svd(mat, full_matrices=True)
    top = sv[0] if sv.size else 0.0
    rank = int(np.sum(sv > tol * max(top, 1.0)))
    return vh[rank:].conj().T


def commutant_basis(ops: list[BlockOperator], tol: float = 1e-9) -> list[np.ndarray]:
    """Basis of the block-preserving matrices commuting with every operator in ``ops``.

    Constraints are imposed one operator at a time on the current solution space,
    which keeps every SVD no wider than the number of block entries.
    """
    if not ops:
        raise ValueError("need at least one operator")
    g, deg = ops[0].graph, ops[0].degree
    d = g.dim(deg)
    free = np.flatnonzero(g.block_mask(deg).ravel())
    basis = np.eye(free.size, dtype=complex)
    eye = np.eye(d)
    for op in ops:
        if basis.shape[1] == 0:
            break
        f = op.matrix
        # row-major vec(X f - f X) = (I (x) f^T - f (x) I) vec(X)
        lmap = (np.kron(eye, f.T) - np.kron(f, eye))[:, free]
        ker = _null_space(lmap @ basis, tol)
        basis = basis @ ker
        if basis.shape[1]:
            q, _ = np.linalg.qr(basis)
            basis = q
    out = []
    for k in range(basis.shape[1]):
        x = np.zeros(d * d, dtype=complex)
        x[free] = basis[:, k]
        out.append(x.reshape(d, d))
    return out


def commutant_dimension(f: BlockOperator, tol: float = 1e-9) -> int:
    """Dimension of ``{X block-preserving : X f = f X}``."""
    return len(commutant_basis([f], tol))


def double_commutant_dimension(f: BlockOperator, tol: float = 1e-9) -> int:
    """Dimension of the commutant of the commutant of ``f`` (the algebra ``f`` generates blockwise)."""
    first = commutant_basis([f], tol)
    ops = [BlockOperator(f.graph, f.degree, x) for x in first]
    return len(commutant_basis(ops, tol))
