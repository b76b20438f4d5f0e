# groups/baumslag_solitar.py
"""
BS(1, m) = ⟨a, b | b a b⁻¹ = a^m⟩ como grupo afim {x ↦ m^e·x + r}.

Form (p, k, e) stands for the matrix [[m^e, r], [0, 1]] with r = p / m^k in
lowest terms (k ≥ 0, and m ∤ p whenever k > 0). Entries are Python ints, so
the arithmetic stays exact however deep the element is.
"""
from __future__ import annotations

from typing import List, Tuple

from .base import Form, Group, GroupDescriptor, GroupElement, Word

A, A_INV, B, B_INV = 0, 1, 2, 3


class BaumslagSolitar(Group):
    name = "BS1m"

    def __init__(self, descriptor: GroupDescriptor):
        self.m = int(descriptor.params["m"])
        super().__init__(descriptor)

    # ---- racionais m-ádicos ----
    def _normalize(self, p: int, k: int) -> Tuple[int, int]:
        m = self.m
        if k < 0:
            return p * m ** (-k), 0
        if p == 0:
            return 0, 0
        while k > 0 and p % m == 0:
            p //= m
            k -= 1
        return p, k

    def _add(self, p1: int, k1: int, p2: int, k2: int) -> Tuple[int, int]:
        K = max(k1, k2)
        m = self.m
        return self._normalize(p1 * m ** (K - k1) + p2 * m ** (K - k2), K)

    def _scale(self, p: int, k: int, e: int) -> Tuple[int, int]:
        """m^e · p/m^k"""
        if e >= 0:
            return self._normalize(p * self.m ** e, k)
        return self._normalize(p, k - e)

    # ---- lei de grupo ----
    def _identity_form(self) -> Form:
        return (0, 0, 0)

    def _mul(self, a: Form, b: Form) -> Form:
        p2, k2 = self._scale(b[0], b[1], a[2])
        p, k = self._add(a[0], a[1], p2, k2)
        return (p, k, a[2] + b[2])

    def _inv(self, a: Form) -> Form:
        p, k = self._scale(-a[0], a[1], -a[2])
        return (p, k, -a[2])

    def default_generators(self) -> List[Tuple[str, Form]]:
        return [
            ("a", (1, 0, 0)),
            ("a^-1", (-1, 0, 0)),
            ("b", (0, 0, 1)),
            ("b^-1", (0, 0, -1)),
        ]

    def relators(self) -> List[Word]:
        return [(B, A, B_INV) + (A_INV,) * self.m]

    def translation(self, p: int, k: int = 0) -> GroupElement:
        """Elemento x ↦ x + p/m^k (membro do núcleo da b-exponente)."""
        p, k = self._normalize(p, k)
        return self.element((p, k, 0))

    def _horner(self, q: int, letter: int) -> List[int]:
        # a^(m·q) = b a^q b⁻¹, recursivamente
        if q == 0:
            return []
        d = q % self.m
        return [B] + [letter] * d + self._horner(q // self.m, letter) + [B_INV]

    def normal_word(self, x: GroupElement) -> Word:
        """b^-k a^p b^k b^e"""
        self._check(x)
        p, k, e = x.form
        word: List[int] = [B_INV] * k
        word.extend(self._power_word(p))
        word.extend([B] * k)
        word.extend([B if e > 0 else B_INV] * abs(e))
        return tuple(word)

    def _power_word(self, p: int) -> List[int]:
        # a^p pelo esquema de Horner: a^(d + m·q) = a^d · b a^q b⁻¹
        letter = A if p > 0 else A_INV
        n = abs(p)
        d = n % self.m
        return [letter] * d + self._horner(n // self.m, letter)
