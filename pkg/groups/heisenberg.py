# groups/heisenberg.py
"""
Grupo de Heisenberg inteiro H₃.

Form (a, b, c) is the upper unitriangular matrix [[1,a,c],[0,1,b],[0,0,1]];
x = (1,0,0), y = (0,1,0) and the center is generated by z = xyx⁻¹y⁻¹ = (0,0,1).
"""
from __future__ import annotations

from typing import List, Tuple

from .base import Form, Group, GroupElement, Word

X, X_INV, Y, Y_INV = 0, 1, 2, 3
Z_WORD: Word = (X, Y, X_INV, Y_INV)
Z_INV_WORD: Word = (Y, X, Y_INV, X_INV)


class Heisenberg(Group):
    name = "Heisenberg"

    def _identity_form(self) -> Form:
        return (0, 0, 0)

    def _mul(self, a: Form, b: Form) -> Form:
        return (a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1])

    def _inv(self, a: Form) -> Form:
        return (-a[0], -a[1], a[0] * a[1] - a[2])

    def default_generators(self) -> List[Tuple[str, Form]]:
        return [
            ("x", (1, 0, 0)),
            ("x^-1", (-1, 0, 0)),
            ("y", (0, 1, 0)),
            ("y^-1", (0, -1, 0)),
        ]

    def relators(self) -> List[Word]:
        # [x, z] e [y, z]
        return [
            (X,) + Z_WORD + (X_INV,) + Z_INV_WORD,
            (Y,) + Z_WORD + (Y_INV,) + Z_INV_WORD,
        ]

    def normal_word(self, x: GroupElement) -> Word:
        """x^a y^b z^(c-ab)"""
        self._check(x)
        a, b, c = x.form
        word: List[int] = []
        word.extend([X if a > 0 else X_INV] * abs(a))
        word.extend([Y if b > 0 else Y_INV] * abs(b))
        k = c - a * b
        for _ in range(abs(k)):
            word.extend(Z_WORD if k > 0 else Z_INV_WORD)
        return tuple(word)

    def central(self, k: int) -> GroupElement:
        return self.element((0, 0, k))
