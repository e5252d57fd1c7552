"""Braid group representations on path spaces and link invariants of braid closures."""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from functools import reduce
from typing import Any


from .core import BlockOperator, FaceModel, OrientedGraph, embed, identity, partial_trace_last
from .errors import TooLarge, ZeroUnknot
from .numerics import invert
from .serialization import encode_complex
from .verify import CheckReport, enhancement_constants

#: refuse path spaces with more edge words than this
MAX_WORDS = 10**6
#: above this many edge words, dense evaluation is slow
WARN_WORDS = 10**4


@dataclass(frozen=True)
class BraidWord:
    n: int
    word: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a braid needs at least one strand")
        for i, s in self.word:
            if not 1 <= i <= self.n - 1 or s not in (1, -1):
                raise ValueError(f"generator {s * i} is out of range for {self.n} strands")

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> "BraidWord":
        """Whitespace-separated signed integers; ``-2`` is the inverse of the second generator."""
        gens = []
        for tok in text.split():
            k = int(tok)
            if k == 0:
                raise ValueError("generator index 0 is not allowed")
            gens.append((abs(k), 1 if k > 0 else -1))
        if n is None:
            n = max((i for i, _ in gens), default=0) + 1
        return cls(n, tuple(gens))

    def __str__(self) -> str:
        return " ".join(str(i * s) for i, s in self.word)

    def __len__(self) -> int:
        return len(self.word)

    @property
    def e_plus(self) -> int:
        return sum(1 for _, s in self.word if s > 0)

    @property
    def e_minus(self) -> int:
        return sum(1 for _, s in self.word if s < 0)

    @property
    def writhe(self) -> int:
        return self.e_plus - self.e_minus

    def inverse(self) -> "BraidWord":
        return BraidWord(self.n, tuple((i, -s) for i, s in reversed(self.word)))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        n = max(self.n, other.n)
        return BraidWord(n, self.word + other.word)


def _guard(graph: OrientedGraph, n: int) -> None:
    words = len(graph.edges) ** n
    if words > MAX_WORDS:
        raise TooLarge(f"{len(graph.edges)}^{n} edge words exceed the dense limit of {MAX_WORDS}")
    if words > WARN_WORDS:
        warnings.warn(f"{words} edge words: dense evaluation will be slow; a sparse mode would help", stacklevel=3)


def braid_representation(model: FaceModel, n: int) -> dict[tuple[int, int], BlockOperator]:
    _guard(model.graph, n)
    w = model.operator
    winv = invert(w)
    out = {}
    for i in range(1, n):
        out[(i, 1)] = embed(w, i, n)
        out[(i, -1)] = embed(winv, i, n)
    return out


def braid_image(model: FaceModel, beta: BraidWord,
                rep: dict[tuple[int, int], BlockOperator] | None = None) -> BlockOperator:
    rep = rep if rep is not None else braid_representation(model, beta.n)
    start = identity(model.graph, beta.n)
    return reduce(lambda acc, g: acc @ rep[g], beta.word, start)


def markov_trace(f: BlockOperator, M: BlockOperator) -> dict[str, complex]:
    out = f
    for _ in range(f.degree):
        out = partial_trace_last(out, M)
    return {v: complex(out.matrix[k, k]) for k, v in enumerate(f.graph.vertices)}


@dataclass
class InvariantReport:
    braid: str
    strands: int
    framed: dict[str, complex]
    e_plus: int
    e_minus: int
    c_plus: complex
    c_minus: complex
    writhe_corrected: dict[str, complex]
    unknot: dict[str, complex]
    normalized: dict[str, complex]
    notices: list[str] = field(default_factory=list)

    @property
    def writhe(self) -> int:
        return self.e_plus - self.e_minus

    def value(self) -> complex:
        """Normalized value at the first vertex where it is defined."""
        return next(iter(self.normalized.values()))

    def vertex_spread(self) -> float:
        vals = list(self.normalized.values())
        return max((abs(a - vals[0]) for a in vals), default=0.0)

    def to_json(self) -> dict[str, Any]:
        enc = lambda d: {k: encode_complex(v) for k, v in d.items()}  # noqa: E731
        return {
            "braid": self.braid, "strands": self.strands, "writhe": self.writhe,
            "e_plus": self.e_plus, "e_minus": self.e_minus,
            "c_plus": encode_complex(self.c_plus), "c_minus": encode_complex(self.c_minus),
            "framed": enc(self.framed), "writhe_corrected": enc(self.writhe_corrected),
            "unknot": enc(self.unknot), "normalized": enc(self.normalized),
            "vertex_spread": self.vertex_spread(), "notices": self.notices,
        }


def link_invariant(model: FaceModel, M: BlockOperator, beta: BraidWord, tol: float = 1e-9,
                   constants: tuple[complex, complex] | None = None) -> InvariantReport:
    c_plus, c_minus = constants if constants is not None else enhancement_constants(model, M, tol)
    framed = markov_trace(braid_image(model, beta), M)
    unknot = markov_trace(identity(model.graph, 1), M)
    factor = c_plus ** (-beta.e_plus) * c_minus ** (-beta.e_minus)
    corrected = {v: factor * x for v, x in framed.items()}
    normalized, notices = {}, []
    for v, x in corrected.items():
        if abs(unknot[v]) < tol:
            notices.append(f"quantum dimension vanishes at vertex {v}; normalized value omitted")
        else:
            normalized[v] = x / unknot[v]
    if not normalized:
        raise ZeroUnknot("the quantum dimension vanishes at every vertex")
    return InvariantReport(str(beta), beta.n, framed, beta.e_plus, beta.e_minus, c_plus, c_minus,
                           corrected, unknot, normalized, notices)


def _random_word(rng: random.Random, n: int, length: int) -> BraidWord:
    if n < 2:
        return BraidWord(n)
    return BraidWord(n, tuple((rng.randint(1, n - 1), rng.choice((1, -1))) for _ in range(length)))


def markov_move_suite(model: FaceModel, M: BlockOperator, beta: BraidWord, trials: int = 20, seed: int = 0,
                      max_strands: int = 4, max_length: int = 8, tol: float = 1e-8) -> CheckReport:
    """Drift of the normalized invariant under random conjugations and stabilizations."""
    rng = random.Random(seed)
    constants = enhancement_constants(model, M)
    base = link_invariant(model, M, beta, constants=constants)
    drift, worst = 0.0, None
    for _ in range(trials):
        moved = beta
        room = (max_length - len(beta)) // 2
        if moved.n >= 2 and room >= 1:
            gamma = _random_word(rng, moved.n, rng.randint(1, room))
            moved = gamma * moved * gamma.inverse()
        if moved.n < max_strands and len(moved) < max_length and rng.random() < 0.5:
            moved = BraidWord(moved.n + 1, moved.word + ((moved.n, rng.choice((1, -1))),))
        rep = link_invariant(model, M, moved, constants=constants)
        for v, x in base.normalized.items():
            if v in rep.normalized:
                d = abs(rep.normalized[v] - x)
                if d > drift:
                    drift, worst = d, str(moved)
    ok = drift < tol
    return CheckReport("markov_moves", ok, drift, None if ok else worst, {"trials": trials, "seed": seed})
