# groups/lamplighter.py
"""
Lamplighter ℤ/2 ≀ ℤ com geradores t, t⁻¹ e a (involução).

Form (cursor, *lamps) with the lit lamps sorted ascending; the product is
(c, L)·(d, M) = (c + d, L Δ (M + c)).
"""
from __future__ import annotations

from typing import List, Optional, Tuple

from .base import Form, Group, GroupElement, Word

T, T_INV, A = 0, 1, 2


class Lamplighter(Group):
    name = "Lamplighter"

    def _identity_form(self) -> Form:
        return (0,)

    def _mul(self, a: Form, b: Form) -> Form:
        c = a[0]
        lamps = set(a[1:]).symmetric_difference(v + c for v in b[1:])
        return (c + b[0],) + tuple(sorted(lamps))

    def _inv(self, a: Form) -> Form:
        c = a[0]
        return (-c,) + tuple(v - c for v in a[1:])

    def default_generators(self) -> List[Tuple[str, Form]]:
        return [("t", (1,)), ("t^-1", (-1,)), ("a", (0, 0))]

    def relators(self) -> List[Word]:
        rels: List[Word] = [(A, A)]
        for k in (1, 2):
            conj = (T,) * k + (A,) + (T_INV,) * k
            rels.append((A,) + conj + (A,) + conj)
        return rels

    def normal_word(self, x: GroupElement) -> Word:
        self._check(x)
        cursor, lamps = x.form[0], x.form[1:]
        word: List[int] = []
        pos = 0
        for target in list(lamps) + [cursor]:
            step = T if target > pos else T_INV
            word.extend([step] * abs(target - pos))
            pos = target
            word.append(A)
        word.pop()
        return tuple(word)

    def exact_length(self, x: GroupElement) -> Optional[int]:
        """#lamps + shortest walk from 0 covering every lamp and ending at the cursor."""
        cursor, lamps = x.form[0], x.form[1:]
        lo = min((0, cursor) + tuple(lamps))
        hi = max((0, cursor) + tuple(lamps))
        left_first = -lo + (hi - lo) + (hi - cursor)
        right_first = hi + (hi - lo) + (cursor - lo)
        return len(lamps) + min(left_first, right_first)
