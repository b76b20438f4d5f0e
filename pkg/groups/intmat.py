# groups/intmat.py
"""
Matrizes inteiras exatas (tuplas de tuplas de int) para ℤⁿ e ℤ²⋊_Aℤ.
Only what the catalog needs: products, determinant and the inverse of a
unimodular matrix.
"""
from __future__ import annotations

from typing import Dict, Sequence, Tuple

from lib.errors import CatalogError

IntMatrix = Tuple[Tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    mat = tuple(tuple(int(v) for v in row) for row in rows)
    if not mat or any(len(row) != len(mat) for row in mat):
        raise CatalogError(f"matrix must be square and non-empty: {rows!r}")
    return mat


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    cols = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in a)


def mat_vec(a: IntMatrix, v: Sequence[int]) -> Tuple[int, ...]:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def det(a: IntMatrix) -> int:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    # expansão de Laplace pela primeira linha (n pequeno)
    total = 0
    for j in range(n):
        minor = tuple(row[:j] + row[j + 1:] for row in a[1:])
        total += (-1) ** j * a[0][j] * det(minor)
    return total


def trace(a: IntMatrix) -> int:
    return sum(a[i][i] for i in range(len(a)))


def unimodular_inverse(a: IntMatrix) -> IntMatrix:
    """Inverse over ℤ via the adjugate; requires det = ±1."""
    d = det(a)
    if d not in (1, -1):
        raise CatalogError(f"matrix not invertible over Z (det={d})")
    n = len(a)
    if n == 1:
        return ((d,),)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = tuple(row[:j] + row[j + 1:] for k, row in enumerate(a) if k != i)
            adj[j][i] = (-1) ** (i + j) * det(minor)
    return tuple(tuple(v * d for v in row) for row in adj)


class MatrixPowers:
    """A^k para todo k inteiro, com cache (entradas crescem exponencialmente)."""

    def __init__(self, a: IntMatrix):
        self.a = a
        self.a_inv = unimodular_inverse(a)
        self._cache: Dict[int, IntMatrix] = {0: identity(len(a)), 1: a, -1: self.a_inv}

    def __call__(self, k: int) -> IntMatrix:
        hit = self._cache.get(k)
        if hit is not None:
            return hit
        step = 1 if k > 0 else -1
        nearest = max((j for j in self._cache if j * step >= 0 and abs(j) <= abs(k)), key=abs)
        mat = self._cache[nearest]
        base = self._cache[step]
        for j in range(nearest + step, k + step, step):
            mat = mat_mul(mat, base)
            self._cache[j] = mat
        return mat
