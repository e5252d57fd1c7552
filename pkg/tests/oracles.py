"""Independent reference computations used by the tests."""

from __future__ import annotations

import itertools

import numpy as np


def kauffman_bracket_closure(n: int, word: list[int], A: complex) -> complex:
    """State sum of the Kauffman bracket for the closure of a braid word.

    A positive crossing resolves as ``A * (vertical) + A^-1 * (cup-cap)`` and a negative
    one with ``A`` and ``A^-1`` exchanged.  Loops are counted by union-find over the
    strand segments between crossing levels.
    """
    levels = len(word)
    delta = -A ** 2 - A ** -2
    total = 0j
    for state in itertools.product((0, 1), repeat=levels):
        parent = list(range((levels + 1) * n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(a, b):
            parent[find(a)] = find(b)

        node = lambda lev, pos: lev * n + pos  # noqa: E731
        weight = 1 + 0j
        for lev, g in enumerate(word):
            i = abs(g) - 1
            for pos in range(n):
                if pos not in (i, i + 1):
                    union(node(lev, pos), node(lev + 1, pos))
            vertical = state[lev] == 0
            if vertical:
                union(node(lev, i), node(lev + 1, i))
                union(node(lev, i + 1), node(lev + 1, i + 1))
            else:
                union(node(lev, i), node(lev, i + 1))
                union(node(lev + 1, i), node(lev + 1, i + 1))
            positive = g > 0
            weight *= A if vertical == positive else 1 / A
        for pos in range(n):
            union(node(levels, pos), node(0, pos))
        loops = len({find(x) for x in range((levels + 1) * n)})
        total += weight * delta ** loops
    return total


def jones_from_bracket(n: int, word: list[int], A: complex) -> complex:
    """Writhe-normalized bracket divided by the unknot: ``(-A^3)^-w <L> / delta``."""
    writhe = sum(1 if g > 0 else -1 for g in word)
    delta = -A ** 2 - A ** -2
    return (-A ** 3) ** (-writhe) * kauffman_bracket_closure(n, word, A) / delta


def trefoil_jones(t: complex) -> complex:
    """Jones polynomial of the right-handed trefoil, ``-t^-4 + t^-3 + t^-1``."""
    return -t ** -4 + t ** -3 + t ** -1


def enhancement_a1(q: complex) -> tuple[complex, complex]:
    """Partial traces of ``(1 (x) M) R`` and its inverse for the 4x4 type-A1 R-matrix, by hand."""
    R = np.array([[1 / q, 0, 0, 0], [0, 0, 1, 0], [0, 1, -(q - 1 / q), 0], [0, 0, 0, 1 / q]], dtype=complex)
    M = np.diag([1 / q, q])
    def tr2(X):
        X4 = X.reshape(2, 2, 2, 2)
        return np.einsum("aibj,ji->ab", X4, M)
    return tr2(R)[0, 0], tr2(np.linalg.inv(R))[0, 0]
