# groups/abelian.py
"""
ℤⁿ com a base padrão ±e_i, e o grupo trivial (quociente da extensão trivial).
"""
from __future__ import annotations

from typing import List, Optional, Tuple

from .base import Form, Group, GroupDescriptor, GroupElement, Word


class FreeAbelian(Group):
    name = "Zn"

    def __init__(self, descriptor: GroupDescriptor):
        self.rank = int(descriptor.params["n"])
        super().__init__(descriptor)

    def _identity_form(self) -> Form:
        return (0,) * self.rank

    def _mul(self, a: Form, b: Form) -> Form:
        return tuple(x + y for x, y in zip(a, b))

    def _inv(self, a: Form) -> Form:
        return tuple(-x for x in a)

    def unit(self, i: int, sign: int = 1) -> Form:
        v = [0] * self.rank
        v[i] = sign
        return tuple(v)

    def default_generators(self) -> List[Tuple[str, Form]]:
        out: List[Tuple[str, Form]] = []
        for i in range(self.rank):
            out.append((f"+e{i + 1}", self.unit(i, 1)))
            out.append((f"-e{i + 1}", self.unit(i, -1)))
        return out

    def relators(self) -> List[Word]:
        # comutadores e_i e_j e_i⁻¹ e_j⁻¹
        rels: List[Word] = []
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                rels.append((2 * i, 2 * j, 2 * i + 1, 2 * j + 1))
        return rels

    def normal_word(self, x: GroupElement) -> Word:
        self._check(x)
        word: List[int] = []
        for i, v in enumerate(x.form):
            word.extend([2 * i if v > 0 else 2 * i + 1] * abs(v))
        return tuple(word)

    def exact_length(self, x: GroupElement) -> Optional[int]:
        return sum(abs(v) for v in x.form)


class TrivialGroup(Group):
    """Grupo com um elemento; S vazio."""
    name = "Trivial"

    def _identity_form(self) -> Form:
        return ()

    def _mul(self, a: Form, b: Form) -> Form:
        return ()

    def _inv(self, a: Form) -> Form:
        return ()

    def default_generators(self) -> List[Tuple[str, Form]]:
        return []

    def normal_word(self, x: GroupElement) -> Word:
        self._check(x)
        return ()

    def exact_length(self, x: GroupElement) -> Optional[int]:
        return 0
