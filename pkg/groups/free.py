# groups/free.py
"""
Grupo livre F_r: forma canônica = palavra reduzida de letras ±i (i = 1..r).
"""
from __future__ import annotations

import string
from typing import List, Optional, Tuple

from .base import Form, Group, GroupDescriptor, GroupElement, Word


def _reduce_join(a: Form, b: Form) -> Form:
    # a e b já reduzidas: só há cancelamento na junção
    i = 0
    n = min(len(a), len(b))
    while i < n and a[len(a) - 1 - i] == -b[i]:
        i += 1
    return a[: len(a) - i] + b[i:]


class FreeGroup(Group):
    name = "Free"

    def __init__(self, descriptor: GroupDescriptor):
        self.rank = int(descriptor.params["rank"])
        super().__init__(descriptor)

    def _identity_form(self) -> Form:
        return ()

    def _mul(self, a: Form, b: Form) -> Form:
        return _reduce_join(a, b)

    def _inv(self, a: Form) -> Form:
        return tuple(-v for v in reversed(a))

    def letter_name(self, i: int) -> str:
        if self.rank <= 26:
            return string.ascii_lowercase[i - 1]
        return f"x{i}"

    def default_generators(self) -> List[Tuple[str, Form]]:
        out: List[Tuple[str, Form]] = []
        for i in range(1, self.rank + 1):
            name = self.letter_name(i)
            out.append((name, (i,)))
            out.append((f"{name}^-1", (-i,)))
        return out

    def normal_word(self, x: GroupElement) -> Word:
        self._check(x)
        return tuple(2 * (v - 1) if v > 0 else 2 * (-v - 1) + 1 for v in x.form)

    def exact_length(self, x: GroupElement) -> Optional[int]:
        return len(x.form)
