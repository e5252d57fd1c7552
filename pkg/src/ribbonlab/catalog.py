"""Built-in models: Jimbo R-matrices of types A-D and SU(N)_L SOS models."""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .core import BlockOperator, FaceModel, OrientedGraph, Path, embed
from .errors import BadParams, DimensionMismatch
from .ribbon import GroupLikeVector
from .serialization import decode_complex, decode_matrix, encode_complex, encode_matrix


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class ClassicalParams:
    """Type, rank and deformation parameter of a quantized classical group.

    ``q_half`` is the primary parameter; ``q = q_half**2``.  For types A, C and D
    only integer powers of ``q`` occur, so the branch of ``q_half`` is irrelevant.
    """

    type: str
    rank: int
    q_half: complex
    eta: complex = 1.0

    @classmethod
    def create(cls, type: str, rank: int, q: complex | None = None, eta: complex = 1.0,
               q_half: complex | None = None) -> "ClassicalParams":
        if q_half is None:
            if q is None:
                raise BadParams("give q or q_half")
            q_half = cmath.sqrt(complex(q))
        elif q is not None and abs(complex(q_half) ** 2 - complex(q)) > 1e-12 * max(1.0, abs(q)):
            raise BadParams("q_half**2 != q")
        p = cls(type.upper(), int(rank), complex(q_half), complex(eta))
        p.validate()
        return p

    def validate(self) -> None:
        if self.type not in "ABCD" or len(self.type) != 1:
            raise BadParams(f"unknown type {self.type!r}")
        if self.type == "A" and self.rank < 1:
            raise BadParams("type A needs rank >= 1")
        if self.type != "A" and self.rank < 2:
            raise BadParams(f"type {self.type} needs rank >= 2")
        if abs(self.q_half) == 0 or abs(self.q ** 2 - 1) < 1e-12:
            raise BadParams("q must be nonzero with q^2 != 1")
        if self.eta == 0:
            raise BadParams("eta must be nonzero")

    @property
    def q(self) -> complex:
        return self.q_half ** 2

    @property
    def N(self) -> int:
        return {"A": self.rank + 1, "B": 2 * self.rank + 1}.get(self.type, 2 * self.rank)

    @property
    def nu(self) -> int:
        return {"A": 0, "B": -1, "C": 1, "D": -1}[self.type]

    def sigma(self, i: int) -> int:
        if self.type == "A":
            return 1
        mid = (self.N + 1) / 2
        return 1 if i < mid else (0 if i == mid else -1)

    def epsilon(self, i: int) -> int:
        return 1 if i <= (self.N + 1) / 2 else -self.nu

    def bar(self, i: int) -> float:
        return i - self.sigma(i) * self.nu / 2

    def prime(self, i: int) -> int:
        return self.N + 1 - i

    def qpow(self, x: float) -> complex:
        """``q**x`` for ``x`` a multiple of 1/2, through the stored square root."""
        k = round(2 * x)
        if abs(2 * x - k) > 1e-9:
            raise ValueError("exponent must be a multiple of 1/2")
        return self.q_half ** k

    @property
    def lam(self) -> complex | None:
        if self.type == "A":
            return None
        return -self.nu * self.qpow(-self.N - self.nu)


@dataclass(frozen=True)
class SOSParams:
    """``t = exp(i pi k / (N+L))``; ``zeta`` is the ``zeta_root``-th solution of ``zeta^N = eps^(N-1) t``
    unless given explicitly."""

    N: int
    L: int
    k: int = 1
    eps: int = 1
    zeta_root: int = 0
    zeta: complex | None = None

    def __post_init__(self):
        if self.N < 2 or self.L < 2:
            raise BadParams("SOS models need N >= 2 and L >= 2")
        if math.gcd(self.k, 2 * (self.N + self.L)) != 1:
            raise BadParams(f"t = exp(i pi {self.k}/{self.N + self.L}) is not a primitive {2 * (self.N + self.L)}-th root of 1")
        if self.eps not in (1, -1):
            raise BadParams("eps must be 1 or -1")
        if self.zeta is not None and self.zeta == 0:
            raise BadParams("zeta must be nonzero")

    @property
    def t(self) -> complex:
        return cmath.exp(1j * math.pi * self.k / (self.N + self.L))

    def zeta_value(self) -> complex:
        if self.zeta is not None:
            return complex(self.zeta)
        theta = math.pi * self.k / (self.N + self.L)
        if self.eps ** (self.N - 1) == -1:
            theta += math.pi
        return cmath.exp(1j * (theta + 2 * math.pi * self.zeta_root) / self.N)

    def qint(self, n: int) -> complex:
        t = self.t
        return (t ** n - t ** (-n)) / (t - 1 / t)


# ---------------------------------------------------------------------------
# catalog entries


@dataclass
class CatalogEntry:
    """A catalog model together with the closed-form data attached to it."""

    model: FaceModel
    family: str
    params: dict[str, Any]
    m_plus: np.ndarray
    m_minus: np.ndarray
    s2: np.ndarray
    lam: complex | None = None
    q: complex | None = None
    eta: complex = 1.0
    hecke: tuple[complex, complex] | None = None
    det: GroupLikeVector | None = None
    quad: GroupLikeVector | None = None
    quad_vector: np.ndarray | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def graph(self) -> OrientedGraph:
        return self.model.graph

    def m_operator(self, sign: str = "plus") -> BlockOperator:
        vals = self.m_plus if sign in ("plus", "+") else self.m_minus
        return BlockOperator.diagonal(self.graph, 1, vals)

    def ideal_vectors(self) -> dict[str, GroupLikeVector]:
        out = {}
        unit = GroupLikeVector.unit(self.graph)
        if self.det is not None:
            out["det - 1"] = self.det - unit
        if self.quad is not None:
            out["quad - 1"] = self.quad - unit
        return out

    def to_metadata(self) -> dict[str, Any]:
        meta: dict[str, Any] = {
            "family": self.family,
            "params": self.params,
            "m_plus": [encode_complex(z) for z in self.m_plus],
            "m_minus": [encode_complex(z) for z in self.m_minus],
            "s2": encode_matrix(self.s2),
            "lambda": None if self.lam is None else encode_complex(self.lam),
            "q": None if self.q is None else encode_complex(self.q),
            "eta": encode_complex(self.eta),
            "hecke": None if self.hecke is None else [encode_complex(z) for z in self.hecke],
            "det": None if self.det is None else self.det.to_json(),
            "quad": None if self.quad is None else self.quad.to_json(),
            "quad_vector": None if self.quad_vector is None else [encode_complex(z) for z in self.quad_vector],
        }
        meta.update(self.extra)
        return meta

    @classmethod
    def from_metadata(cls, model: FaceModel, meta: dict[str, Any]) -> "CatalogEntry":
        g = model.graph

        def opt(key, fn):
            val = meta.get(key)
            return None if val is None else fn(val)

        known = {"family", "params", "m_plus", "m_minus", "s2", "lambda", "q", "eta", "hecke",
                 "det", "quad", "quad_vector"}
        return cls(
            model=model,
            family=meta.get("family", "custom"),
            params=meta.get("params", {}),
            m_plus=np.array([decode_complex(z) for z in meta["m_plus"]]),
            m_minus=np.array([decode_complex(z) for z in meta["m_minus"]]),
            s2=decode_matrix(meta["s2"]),
            lam=opt("lambda", decode_complex),
            q=opt("q", decode_complex),
            eta=decode_complex(meta.get("eta", 1.0)),
            hecke=opt("hecke", lambda v: tuple(decode_complex(z) for z in v)),
            det=opt("det", lambda v: GroupLikeVector.from_json(g, v)),
            quad=opt("quad", lambda v: GroupLikeVector.from_json(g, v)),
            quad_vector=opt("quad_vector", lambda v: np.array([decode_complex(z) for z in v])),
            extra={k: v for k, v in meta.items() if k not in known},
        )


def _vertex_graph(n: int) -> OrientedGraph:
    return OrientedGraph(["*"], [(str(i), "*", "*") for i in range(1, n + 1)])


def _unit(n: int, r: int, s: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[r - 1, s - 1] = 1.0
    return e


def jimbo_rmatrix(p: ClassicalParams) -> np.ndarray:
    """Jimbo's braid-form R-matrix (without the eta factor) as an N^2 x N^2 matrix."""
    n = p.N
    q = p.q
    E = lambda r, s: _unit(n, r, s)  # noqa: E731
    R = np.zeros((n * n, n * n), dtype=complex)
    rng = range(1, n + 1)
    if p.type == "A":
        for r in rng:
            R += np.kron(E(r, r), E(r, r)) / q
        for r in rng:
            for s in rng:
                if r != s:
                    R += np.kron(E(r, s), E(s, r))
                if r > s:
                    R -= (q - 1 / q) * np.kron(E(r, r), E(s, s))
        return R
    pr = p.prime
    for r in rng:
        if r != pr(r):
            R += np.kron(E(r, r), E(r, r)) / q + q * np.kron(E(r, pr(r)), E(pr(r), r))
        else:
            R += np.kron(E(r, r), E(r, r))
    for r in rng:
        for s in rng:
            if r != s and r != pr(s):
                R += np.kron(E(r, s), E(s, r))
            if r > s:
                coef = p.epsilon(r) * p.epsilon(s) * p.qpow(p.bar(r) - p.bar(s))
                R += (q - 1 / q) * (-np.kron(E(r, r), E(s, s)) + coef * np.kron(E(r, pr(s)), E(pr(r), s)))
    return R


def jimbo_m_diagonal(p: ClassicalParams) -> np.ndarray:
    n = p.N
    return np.array([p.qpow(2 * i - n - 1 - p.sigma(i) * p.nu) for i in range(1, n + 1)])


def jimbo_s2(p: ClassicalParams) -> np.ndarray:
    n = p.N
    out = np.empty((n, n), dtype=complex)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            out[i - 1, j - 1] = p.qpow(2 * (i - j) - (p.sigma(i) - p.sigma(j)) * p.nu)
    return out


def quad_vector(p: ClassicalParams) -> np.ndarray:
    """``sum_i eps_i q^(bar i + 1/2) u_i (x) u_i'`` in the basis of length-2 paths."""
    n = p.N
    v = np.zeros(n * n, dtype=complex)
    for i in range(1, n + 1):
        v[(i - 1) * n + (p.prime(i) - 1)] = p.epsilon(i) * p.qpow(p.bar(i) + 0.5)
    return v


def group_like_from_vector(graph: OrientedGraph, m: int, vec: np.ndarray) -> GroupLikeVector:
    """Group-like element of a one-dimensional subcomodule spanned by ``vec``:
    ``(1/a_p0) sum_q a_q e(p0/q)`` with ``p0`` the first path where ``a`` is nonzero."""
    paths = graph.paths(m)
    nz = np.flatnonzero(np.abs(vec) > 1e-14 * np.abs(vec).max())
    p0 = paths[nz[0]]
    a0 = vec[nz[0]]
    return GroupLikeVector({(p0, paths[j]): vec[j] / a0 for j in nz})


def det_vector_A(p: ClassicalParams) -> GroupLikeVector:
    """Quantum determinant of type A from the top q-exterior power.

    The functional ``phi`` on paths of length N that factors through the q-exterior
    algebra is the common left eigenvector of all braid generators with the
    antisymmetric eigenvalue ``-eta q``; the generators preserve letter multisets,
    so it is computed on the span of the permutations of ``(1..N)``.
    """
    if p.type != "A":
        raise BadParams("det_vector_A needs type A")
    n = p.N
    if n > 5:
        raise BadParams("det_vector_A is limited to N <= 5")
    graph = _vertex_graph(n)
    w = BlockOperator(graph, 2, p.eta * jimbo_rmatrix(p))
    perms = list(itertools.permutations(range(1, n + 1)))
    idx = np.array([graph.lookup(tuple(str(i) for i in pm)) for pm in perms])
    rows = []
    for k in range(1, n):
        wk = embed(w, k, n).matrix[np.ix_(idx, idx)]
        rows.append(wk.T + p.eta * p.q * np.eye(len(perms)))
    stacked = np.vstack(rows)
    _, sv, vh = np.linalg.svd(stacked)
    null = vh[np.sum(sv > 1e-9 * max(1.0, sv[0])):]
    if null.shape[0] != 1:
        raise DimensionMismatch(f"antisymmetric line has dimension {null.shape[0]}, expected 1")
    phi = null[0].conj()
    phi = phi / phi[0]  # perms[0] is the identity permutation
    ref = graph.path(tuple(str(i) for i in range(1, n + 1)))
    terms = {}
    for pm, c in zip(perms, phi):
        if abs(c) > 1e-14:
            terms[(graph.path(tuple(str(i) for i in pm)), ref)] = c
    return GroupLikeVector(terms)


def jimbo_model(p: ClassicalParams) -> CatalogEntry:
    n = p.N
    graph = _vertex_graph(n)
    op = BlockOperator(graph, 2, p.eta * jimbo_rmatrix(p))
    model = FaceModel.from_operator(op)
    m = jimbo_m_diagonal(p)
    q = p.q
    params: dict[str, Any] = {"type": p.type, "rank": p.rank, "q": encode_complex(q),
                              "q_half": encode_complex(p.q_half), "eta": encode_complex(p.eta), "N": n, "nu": p.nu}
    entry = CatalogEntry(model=model, family="jimbo", params=params, m_plus=m, m_minus=-m,
                         s2=jimbo_s2(p), lam=p.lam, q=q, eta=p.eta)
    if p.type == "A":
        entry.hecke = (p.eta / q, -p.eta * q)
        if n <= 5:
            entry.det = det_vector_A(p)
    else:
        v = quad_vector(p)
        entry.quad_vector = v
        entry.quad = group_like_from_vector(graph, 2, v)
    return entry


# ---------------------------------------------------------------------------
# SOS models


def sos_vertices(N: int, L: int) -> list[tuple[int, ...]]:
    out = [lam + (0,) for lam in itertools.product(range(L + 1), repeat=N - 1)
           if all(lam[i] >= lam[i + 1] for i in range(N - 2))]
    return sorted(out)


def vertex_id(lam: tuple[int, ...]) -> str:
    return ",".join(str(x) for x in lam)


def _add_box(lam: tuple[int, ...], i: int, L: int) -> tuple[int, ...] | None:
    mu = list(lam)
    mu[i - 1] += 1
    if mu[-1] == 1:
        mu = [x - 1 for x in mu]
    if mu[0] > L or mu[-1] != 0 or any(mu[k] < mu[k + 1] for k in range(len(mu) - 1)):
        return None
    return tuple(mu)


def sos_graph(N: int, L: int) -> tuple[OrientedGraph, dict[str, tuple[tuple[int, ...], int]]]:
    """The graph on partitions with edges ``lam -> lam + e_i``; returns the edge labels too."""
    verts = sos_vertices(N, L)
    edges, labels = [], {}
    for lam in verts:
        for i in range(1, N + 1):
            mu = _add_box(lam, i, L)
            if mu is not None:
                eid = f"{vertex_id(lam)}|{i}"
                edges.append((eid, vertex_id(lam), vertex_id(mu)))
                labels[eid] = (lam, i)
    return OrientedGraph([vertex_id(v) for v in verts], edges), labels


def sos_D(p: SOSParams, lam: tuple[int, ...]) -> complex:
    out = 1.0 + 0j
    for i in range(1, p.N + 1):
        for j in range(i + 1, p.N + 1):
            out *= p.qint(lam[i - 1] - lam[j - 1] + j - i) / p.qint(j - i)
    return out


def inversion_count(rows: tuple[int, ...]) -> int:
    """``Card{(k,l) : k < l, i_k < i_l}`` taken literally."""
    return sum(1 for a, b in itertools.combinations(range(len(rows)), 2) if rows[a] < rows[b])


def sos_model(p: SOSParams) -> CatalogEntry:
    N, t = p.N, p.t
    zeta = p.zeta_value()
    graph, labels = sos_graph(N, p.L)
    d2 = graph.dim(2)
    mat = np.zeros((d2, d2), dtype=complex)
    paths2 = graph.paths(2)
    by_rows = {}
    for k, path in enumerate(paths2):
        lam, i = labels[path.edges[0]]
        _, j = labels[path.edges[1]]
        by_rows[(path.start, i, j)] = k
    for (start, i, j), k in by_rows.items():
        if i == j:
            mat[k, k] = t / zeta
            continue
        lam = tuple(int(x) for x in start.split(","))
        d = lam[i - 1] - lam[j - 1] + j - i
        qd = p.qint(d)
        if abs(qd) < 1e-12:
            raise BadParams(f"q-integer [{d}] vanishes")
        mat[k, k] = -(t ** (-d)) / (zeta * qd)
        dag = by_rows.get((start, j, i))
        if dag is not None:
            mat[dag, k] = p.eps * p.qint(d - 1) / (zeta * qd)
    model = FaceModel.from_operator(BlockOperator(graph, 2, mat))

    D = {v: sos_D(p, tuple(int(x) for x in v.split(","))) for v in graph.vertices}
    m_plus = np.array([D[e.dst] / D[e.src] for e in graph.edges])
    n_e = len(graph.edges)
    s2 = np.empty((n_e, n_e), dtype=complex)
    for a, ea in enumerate(graph.edges):
        for b, eb in enumerate(graph.edges):
            s2[a, b] = D[ea.dst] * D[eb.src] / (D[ea.src] * D[eb.dst])

    det = sos_det_vector(p, graph, labels, D)
    compatible = abs(zeta ** N - p.eps ** (N - 1) * t) < 1e-9
    params = {"N": N, "L": p.L, "k": p.k, "eps": p.eps, "zeta_root": p.zeta_root,
              "t": encode_complex(t), "zeta": encode_complex(zeta)}
    return CatalogEntry(
        model=model, family="sos", params=params, m_plus=m_plus, m_minus=-m_plus, s2=s2,
        hecke=(t / zeta, -1 / (zeta * t)), det=det,
        extra={"D": {v: encode_complex(z) for v, z in D.items()}, "det_braiding_compatible": bool(compatible)},
    )


def _rows_of(path: Path, labels) -> tuple[int, ...]:
    return tuple(labels[e][1] for e in path.edges)


def sos_det_vector(p: SOSParams, graph: OrientedGraph, labels, D: dict[str, complex],
                   references: dict[str, Path] | None = None) -> GroupLikeVector:
    """``det = sum_{lam,mu} D(mu)/D(lam) sum_{p in G^N_lam,lam} (-eps)^(L(p)+L(q_mu)) e(p/q_mu)``.

    ``q_mu`` defaults to the first closed path at ``mu`` in canonical order.
    """
    N = p.N
    closed: dict[str, list[Path]] = {v: [] for v in graph.vertices}
    for path in graph.paths(N):
        if path.start == path.end:
            closed[path.start].append(path)
    refs = {}
    for v in graph.vertices:
        if references and v in references:
            refs[v] = references[v]
        elif closed[v]:
            refs[v] = closed[v][0]
        else:
            raise DimensionMismatch(f"no closed path of length {N} at vertex {v}")
    sign = -p.eps
    terms = {}
    for lam in graph.vertices:
        for mu in graph.vertices:
            ref = refs[mu]
            lq = inversion_count(_rows_of(ref, labels))
            for path in closed[lam]:
                lp = inversion_count(_rows_of(path, labels))
                terms[(path, ref)] = D[mu] / D[lam] * sign ** (lp + lq)
    return GroupLikeVector(terms)


def sos_closed_paths(graph: OrientedGraph, m: int) -> dict[str, list[Path]]:
    out: dict[str, list[Path]] = {v: [] for v in graph.vertices}
    for path in graph.paths(m):
        if path.start == path.end:
            out[path.start].append(path)
    return out


def scale_model(model: FaceModel, eta: complex, tol: float = 1e-9) -> FaceModel:
    """Multiply every weight by ``eta``; star-triangularity is re-checked."""
    from .verify import check_star_triangular

    if eta == 0:
        raise BadParams("eta must be nonzero")
    out = model.scaled(eta)
    before = check_star_triangular(model, tol)
    after = check_star_triangular(out, tol)
    if before.passed and not after.passed:
        raise AssertionError("rescaling broke star-triangularity")
    return out


def scale_entry(entry: CatalogEntry, eta: complex) -> CatalogEntry:
    """Rescale a catalog model and carry its metadata along.

    For SOS models the weights are proportional to ``1/zeta``, so rescaling by
    ``eta`` replaces ``zeta`` by ``zeta/eta`` and re-evaluates the det-compatibility flag.
    """
    eta = complex(eta)
    model = scale_model(entry.model, eta)
    hecke = None if entry.hecke is None else (entry.hecke[0] * eta, entry.hecke[1] * eta)
    new = replace(entry, model=model, hecke=hecke, eta=entry.eta * eta, extra=dict(entry.extra),
                  params=dict(entry.params))
    if entry.family == "sos":
        zeta = decode_complex(entry.params["zeta"]) / eta
        t = decode_complex(entry.params["t"])
        N, eps = entry.params["N"], entry.params["eps"]
        new.params["zeta"] = encode_complex(zeta)
        new.extra["det_braiding_compatible"] = bool(abs(zeta ** N - eps ** (N - 1) * t) < 1e-9)
    elif entry.family == "jimbo":
        new.params["eta"] = encode_complex(new.eta)
        if entry.det is not None:
            p = ClassicalParams.create(entry.params["type"], entry.params["rank"],
                                       q_half=decode_complex(entry.params["q_half"]), eta=new.eta)
            new.det = det_vector_A(p)
    return new


def standard_models() -> dict[str, CatalogEntry]:
    """The models used throughout the acceptance suite."""
    t8 = {}
    t8["A1"] = jimbo_model(ClassicalParams.create("A", 1, q=1.3))
    t8["A2"] = jimbo_model(ClassicalParams.create("A", 2, q=1.3))
    t8["A3"] = jimbo_model(ClassicalParams.create("A", 3, q=1.3))
    t8["B2"] = jimbo_model(ClassicalParams.create("B", 2, q_half=1.2))
    t8["C2"] = jimbo_model(ClassicalParams.create("C", 2, q=1.2))
    t8["D2"] = jimbo_model(ClassicalParams.create("D", 2, q=1.2))
    t8["SOS(2,2)"] = sos_model(SOSParams(2, 2))
    t8["SOS(2,3)"] = sos_model(SOSParams(2, 3))
    t8["SOS(3,2)"] = sos_model(SOSParams(3, 2))
    return t8
