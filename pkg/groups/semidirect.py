# groups/semidirect.py
"""
ℤ² ⋊_A ℤ para A hiperbólica com det ±1.

Form (v1, v2, k) is the pair (v, t^k) with t v t⁻¹ = A v; the product is
(v, k)·(w, l) = (v + A^k w, k + l).
"""
from __future__ import annotations

from typing import List, Tuple

from lib.errors import CatalogError

from .base import Form, Group, GroupDescriptor, GroupElement, Word
from .intmat import MatrixPowers, as_matrix, det, mat_vec, trace

E1, E1_INV, E2, E2_INV, T, T_INV = range(6)


def check_hyperbolic(rows) -> None:
    a = as_matrix(rows)
    if len(a) != 2:
        raise CatalogError("ZsdZ2 needs a 2x2 matrix A")
    d, tr = det(a), trace(a)
    if d == 1 and abs(tr) > 2:
        return
    if d == -1 and tr != 0:
        return
    raise CatalogError(f"A={rows!r} is not hyperbolic with |det A| = 1 (det={d}, tr={tr})")


class TorusBundle(Group):
    name = "ZsdZ2"

    def __init__(self, descriptor: GroupDescriptor):
        check_hyperbolic(descriptor.params["A"])
        self.matrix = as_matrix(descriptor.params["A"])
        self.powers = MatrixPowers(self.matrix)
        super().__init__(descriptor)

    def _identity_form(self) -> Form:
        return (0, 0, 0)

    def _mul(self, a: Form, b: Form) -> Form:
        w = mat_vec(self.powers(a[2]), b[:2])
        return (a[0] + w[0], a[1] + w[1], a[2] + b[2])

    def _inv(self, a: Form) -> Form:
        w = mat_vec(self.powers(-a[2]), a[:2])
        return (-w[0], -w[1], -a[2])

    def default_generators(self) -> List[Tuple[str, Form]]:
        return [
            ("e1", (1, 0, 0)),
            ("e1^-1", (-1, 0, 0)),
            ("e2", (0, 1, 0)),
            ("e2^-1", (0, -1, 0)),
            ("t", (0, 0, 1)),
            ("t^-1", (0, 0, -1)),
        ]

    @staticmethod
    def _vector_word(v1: int, v2: int) -> List[int]:
        return [E1 if v1 > 0 else E1_INV] * abs(v1) + [E2 if v2 > 0 else E2_INV] * abs(v2)

    def relators(self) -> List[Word]:
        rels: List[Word] = [(E1, E2, E1_INV, E2_INV)]
        for i, letter in ((0, E1), (1, E2)):
            col = (self.matrix[0][i], self.matrix[1][i])
            # t e_i t⁻¹ (A e_i)⁻¹
            rels.append((T, letter, T_INV) + tuple(self._vector_word(-col[0], -col[1])))
        return rels

    def normal_word(self, x: GroupElement) -> Word:
        """e1^v1 e2^v2 t^k"""
        self._check(x)
        v1, v2, k = x.form
        return tuple(self._vector_word(v1, v2) + [T if k > 0 else T_INV] * abs(k))
