# groups/base.py
"""
Interface base dos grupos do catálogo.

Every concrete group implements the exact arithmetic on *canonical forms*
(flat tuples of Python ints) and exposes a default marking; ``MarkedGroup``
pins a finite symmetric generating set, ``GroupHom`` and
``GroupAutomorphism`` map between markings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import orjson
from pydantic import BaseModel, ConfigDict, Field

from lib.errors import NotInSubgroupError, UsageError
from lib.reports import CheckReport, digest, form_text

Form = Tuple[int, ...]
Word = Tuple[int, ...]


@dataclass(frozen=True, slots=True)
class GroupElement:
    """Immutable group element; equality is equality of (group, canonical form)."""
    family: str
    form: Form

    @property
    def canonical_key(self) -> Form:
        return self.form

    def __repr__(self) -> str:
        return f"<{self.family} {form_text(self.form)}>"


class GroupDescriptor(BaseModel):
    """
    Descritor de catálogo (nome + parâmetros).
    Serializable as key-value text so cached tables can be keyed by its digest.
    """
    model_config = ConfigDict(frozen=True)

    name: str = Field(..., description="Catalog name (ex.: 'Heisenberg')")
    params: Dict[str, Any] = Field(default_factory=dict)

    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(
            f"{k}={orjson.dumps(v).decode()}" for k, v in sorted(self.params.items())
        )
        return f"{self.name}({inner})"

    def to_text(self) -> str:
        lines = [f"name={self.name}"]
        for k, v in sorted(self.params.items()):
            lines.append(f"params.{k}={orjson.dumps(v).decode()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GroupDescriptor":
        name: Optional[str] = None
        params: Dict[str, Any] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            k, v = line.split("=", 1)
            k, v = k.strip(), v.strip()
            if k == "name":
                name = v
            elif k.startswith("params."):
                try:
                    params[k[len("params."):]] = orjson.loads(v)
                except orjson.JSONDecodeError:
                    params[k[len("params."):]] = v
        if not name:
            raise UsageError("descriptor text without 'name='")
        return cls(name=name, params=params)

    def digest(self) -> str:
        return digest({"name": self.name, "params": self.params})


class Group:
    """
    Aritmética exata de um grupo finitamente gerado.
    Subclasses implement ``_mul``/``_inv`` on canonical forms plus the default marking.
    """
    name: str = "base"

    def __init__(self, descriptor: GroupDescriptor):
        self.descriptor = descriptor
        self.label = descriptor.label()
        self._identity = GroupElement(self.label, self._identity_form())

    # ---- to be implemented by each group ----
    def _identity_form(self) -> Form:
        raise NotImplementedError("group must define its identity form")

    def _mul(self, a: Form, b: Form) -> Form:
        raise NotImplementedError("group must implement _mul")

    def _inv(self, a: Form) -> Form:
        raise NotImplementedError("group must implement _inv")

    def default_generators(self) -> List[Tuple[str, Form]]:
        """(label, form) pairs in catalog order, closed under inverses."""
        raise NotImplementedError("group must list its default generators")

    def relators(self) -> List[Word]:
        """Relators over the default generator indices (beyond s·s⁻¹)."""
        return []

    def normal_word(self, x: GroupElement) -> Word:
        """Some word over the default generators evaluating to ``x``."""
        raise NotImplementedError("group must provide normal words")

    def exact_length(self, x: GroupElement) -> Optional[int]:
        """Closed-form word length for the default marking, when classical."""
        return None

    # ---- generic API ----
    def element(self, form: Sequence[int]) -> GroupElement:
        return GroupElement(self.label, tuple(int(v) for v in form))

    def identity(self) -> GroupElement:
        return self._identity

    def _check(self, x: GroupElement) -> None:
        if x.family != self.label:
            raise UsageError(f"element {x!r} does not belong to {self.label}")

    def mul(self, x: GroupElement, y: GroupElement) -> GroupElement:
        if x.family != self.label or y.family != self.label:
            raise UsageError(f"mixed-group operands {x!r}, {y!r} for {self.label}")
        return GroupElement(self.label, self._mul(x.form, y.form))

    def inv(self, x: GroupElement) -> GroupElement:
        self._check(x)
        return GroupElement(self.label, self._inv(x.form))

    def product(self, *xs: GroupElement) -> GroupElement:
        acc = self._identity
        for x in xs:
            acc = self.mul(acc, x)
        return acc

    def power(self, x: GroupElement, k: int) -> GroupElement:
        base = x if k >= 0 else self.inv(x)
        acc, k = self._identity, abs(k)
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def conjugate(self, a: GroupElement, x: GroupElement) -> GroupElement:
        """a·x·a⁻¹"""
        return self.mul(self.mul(a, x), self.inv(a))

    def commutator(self, x: GroupElement, y: GroupElement) -> GroupElement:
        """x·y·x⁻¹·y⁻¹"""
        return self.product(x, y, self.inv(x), self.inv(y))

    def is_identity(self, x: GroupElement) -> bool:
        return x == self._identity

    def __repr__(self) -> str:
        return f"<Group {self.label}>"


@dataclass(frozen=True, eq=False)
class MarkedGroup:
    """
    Grupo + conjunto gerador finito simétrico S (ordem determinística).
    ``standard`` marks the catalog default marking (closed forms apply).
    """
    group: Group
    generators: Tuple[GroupElement, ...]
    labels: Tuple[str, ...]
    relators: Tuple[Word, ...] = ()
    standard: bool = False
    inverse_index: Tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.generators):
            raise UsageError("one label per generator required")
        ident = self.group.identity()
        seen: Dict[GroupElement, int] = {}
        for i, s in enumerate(self.generators):
            self.group._check(s)
            if s == ident:
                raise UsageError(f"identity in generating set at position {i}")
            if s in seen:
                raise UsageError(f"duplicate generator {s!r}")
            seen[s] = i
        inverse = []
        for s in self.generators:
            j = seen.get(self.group.inv(s))
            if j is None:
                raise UsageError(f"generating set not symmetric: missing inverse of {s!r}")
            inverse.append(j)
        object.__setattr__(self, "inverse_index", tuple(inverse))

    @property
    def descriptor(self) -> GroupDescriptor:
        return self.group.descriptor

    @property
    def label(self) -> str:
        return self.group.label

    def marking_digest(self) -> str:
        return digest(
            {
                "descriptor": {"name": self.descriptor.name, "params": self.descriptor.params},
                "generators": [form_text(s.form) for s in self.generators],
            }
        )

    def identity(self) -> GroupElement:
        return self.group.identity()

    def mul(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return self.group.mul(x, y)

    def inv(self, x: GroupElement) -> GroupElement:
        return self.group.inv(x)

    def evaluate(self, word: Iterable[int]) -> GroupElement:
        acc = self.group.identity()
        for i in word:
            acc = self.group.mul(acc, self.generators[i])
        return acc

    def word_label(self, word: Iterable[int]) -> str:
        return " ".join(self.labels[i] for i in word) or "1"

    def normal_word(self, x: GroupElement) -> Word:
        if not self.standard:
            raise UsageError(f"normal words need the default marking of {self.label}")
        return self.group.normal_word(x)

    def exact_length(self, x: GroupElement) -> Optional[int]:
        return self.group.exact_length(x) if self.standard else None

    def __len__(self) -> int:
        return len(self.generators)

    def __repr__(self) -> str:
        return f"<MarkedGroup {self.label} S={list(self.labels)}>"


def default_marking(group: Group) -> MarkedGroup:
    pairs = group.default_generators()
    return MarkedGroup(
        group=group,
        generators=tuple(group.element(f) for _, f in pairs),
        labels=tuple(lbl for lbl, _ in pairs),
        relators=tuple(tuple(r) for r in group.relators()),
        standard=True,
    )


def marking_by(group: Group, elements: Sequence[GroupElement], labels: Sequence[str]) -> MarkedGroup:
    """Marking by an explicit symmetric set; ``standard`` when it is the default one."""
    gens = tuple(elements)
    default = tuple(group.element(f) for _, f in group.default_generators())
    return MarkedGroup(
        group=group,
        generators=gens,
        labels=tuple(labels),
        relators=tuple(tuple(r) for r in group.relators()) if gens == default else (),
        standard=gens == default,
    )


@dataclass(frozen=True, eq=False)
class GroupHom:
    """
    Homomorfismo definido pelas imagens dos geradores.
    ``formula`` is an optional closed form; word evaluation is the fallback.
    """
    source: MarkedGroup
    target: MarkedGroup
    generator_images: Tuple[GroupElement, ...]
    formula: Optional[Callable[[GroupElement], GroupElement]] = None

    def __post_init__(self) -> None:
        if len(self.generator_images) != len(self.source.generators):
            raise UsageError("one image per source generator required")
        for img in self.generator_images:
            self.target.group._check(img)

    def __call__(self, x: GroupElement) -> GroupElement:
        self.source.group._check(x)
        if self.formula is not None:
            return self.formula(x)
        return self.on_word(self.source.normal_word(x))

    def on_word(self, word: Iterable[int]) -> GroupElement:
        g = self.target.group
        acc = g.identity()
        for i in word:
            acc = g.mul(acc, self.generator_images[i])
        return acc

    def check_relations(self) -> CheckReport:
        """Images satisfy s·s⁻¹ = 1 and every catalog relator of the source."""
        report = CheckReport(name=f"relations {self.source.label}->{self.target.label}")
        words: List[Word] = [(i, j) for i, j in enumerate(self.source.inverse_index)]
        words.extend(self.source.relators)
        for w in words:
            value = self.on_word(w)
            report.record(
                self.target.group.is_identity(value),
                witness={"relator": self.source.word_label(w), "value": repr(value)},
            )
        return report

    def check_formula(self, elements: Iterable[GroupElement]) -> CheckReport:
        """Closed form agrees with word evaluation on the given elements."""
        report = CheckReport(name="hom formula")
        if self.formula is None:
            return report
        for x in elements:
            via_word = self.on_word(self.source.normal_word(x))
            report.record(via_word == self.formula(x), witness=repr(x))
        return report


@dataclass(frozen=True, eq=False)
class GroupAutomorphism:
    """
    Automorfismo com inversa explícita.
    modular_factor is the Haar scaling; identically 1 for discrete groups.
    """
    forward: GroupHom
    backward: GroupHom
    modular_factor: float = 1.0
    conjugator: Optional[GroupElement] = None

    def __call__(self, x: GroupElement) -> GroupElement:
        return self.forward(x)

    @property
    def marked(self) -> MarkedGroup:
        return self.forward.source

    def inverse(self) -> "GroupAutomorphism":
        conj = None if self.conjugator is None else self.marked.inv(self.conjugator)
        return GroupAutomorphism(self.backward, self.forward, 1.0 / self.modular_factor, conj)

    def iterate(self, x: GroupElement, k: int) -> GroupElement:
        """α^k(x) for any integer k."""
        step = self.forward if k >= 0 else self.backward
        for _ in range(abs(k)):
            x = step(x)
        return x

    def check_round_trip(self, elements: Iterable[GroupElement]) -> CheckReport:
        report = CheckReport(name="automorphism round trip")
        for x in elements:
            report.record(
                self.backward(self.forward(x)) == x and self.forward(self.backward(x)) == x,
                witness=repr(x),
            )
        return report


def require_member(member: Callable[[GroupElement], bool], x: GroupElement, what: str = "N") -> None:
    if not member(x):
        raise NotInSubgroupError(f"{x!r} is not an element of {what}")
