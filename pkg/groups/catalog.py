# groups/catalog.py
"""
Catálogo de grupos: nome + parâmetros -> MarkedGroup com geradores padrão.

Also ships the catalog extensions 1 → N → G → Q → 1 (membership predicate,
quotient map, intrinsic generators of N) and the automorphism constructors.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple, Type

from lib.errors import CatalogError, UsageError

from .abelian import FreeAbelian, TrivialGroup
from .base import (
    Group,
    GroupAutomorphism,
    GroupDescriptor,
    GroupElement,
    GroupHom,
    MarkedGroup,
    default_marking,
    marking_by,
)
from .baumslag_solitar import BaumslagSolitar
from .free import FreeGroup
from .heisenberg import Heisenberg
from .intmat import as_matrix, mat_vec, unimodular_inverse
from .lamplighter import Lamplighter
from .semidirect import TorusBundle

logger = logging.getLogger(__name__)

# nome -> (classe, parâmetros padrão)
_REGISTRY: Dict[str, Tuple[Type[Group], Dict[str, Any]]] = {
    "Zn": (FreeAbelian, {"n": 1}),
    "Free": (FreeGroup, {"rank": 2}),
    "Heisenberg": (Heisenberg, {}),
    "BS1m": (BaumslagSolitar, {"m": 2}),
    "Lamplighter": (Lamplighter, {}),
    "ZsdZ2": (TorusBundle, {"A": [[2, 1], [1, 1]]}),
    "Trivial": (TrivialGroup, {}),
}

CATALOG_NAMES: Tuple[str, ...] = tuple(_REGISTRY)

# amenáveis com crescimento exponencial: sem RD, razões RD superpolinomiais
AMENABLE_EXPONENTIAL: Tuple[str, ...] = ("BS1m", "Lamplighter", "ZsdZ2")


def _positive_int(name: str, key: str, value: Any, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise CatalogError(f"{name}: parameter {key} must be an integer >= {minimum} (got {value!r})")
    return value


def resolve_descriptor(name: str, params: Optional[Mapping[str, Any]] = None) -> GroupDescriptor:
    """Valida nome/parâmetros e completa os defaults."""
    if name not in _REGISTRY:
        raise CatalogError(f"unknown group {name!r}; known: {', '.join(CATALOG_NAMES)}")
    _, defaults = _REGISTRY[name]
    given = dict(params or {})
    unknown = sorted(set(given) - set(defaults))
    if unknown:
        raise CatalogError(f"{name}: unknown parameter(s) {unknown}")
    merged = {**defaults, **given}

    if name == "Zn":
        _positive_int(name, "n", merged["n"], 1)
    elif name == "Free":
        _positive_int(name, "rank", merged["rank"], 1)
    elif name == "BS1m":
        _positive_int(name, "m", merged["m"], 2)
    elif name == "ZsdZ2":
        try:
            merged["A"] = [list(row) for row in as_matrix(merged["A"])]
        except (TypeError, ValueError) as e:
            raise CatalogError(f"ZsdZ2: parameter A must be an integer matrix ({e})") from e
    return GroupDescriptor(name=name, params=merged)


def make_group(descriptor: GroupDescriptor) -> Group:
    descriptor = resolve_descriptor(descriptor.name, descriptor.params)
    cls, _ = _REGISTRY[descriptor.name]
    return cls(descriptor)


def catalog(name: str, params: Optional[Mapping[str, Any]] = None) -> MarkedGroup:
    """MarkedGroup com o conjunto gerador padrão do catálogo."""
    group = make_group(resolve_descriptor(name, params))
    marked = default_marking(group)
    logger.debug("catalog %s -> S=%s", group.label, list(marked.labels))
    return marked


# --------------------- extensões ---------------------
@dataclass(frozen=True, eq=False)
class CatalogExtension:
    """
    1 → N → G → Q → 1 como o catálogo define.
    ``coordinates`` maps members of ⟨S_N⟩ to integer coordinates in which the
    intrinsic word length is the ℓ¹ norm; ``None`` when no closed form exists.
    """
    name: str
    G: MarkedGroup
    Q: MarkedGroup
    pi: GroupHom
    subgroup_generators: Tuple[GroupElement, ...]
    subgroup_labels: Tuple[str, ...]
    coordinates: Optional[Callable[[GroupElement], Optional[Tuple[int, ...]]]] = None

    def member(self, x: GroupElement) -> bool:
        return self.Q.group.is_identity(self.pi(x))


def quotient_marking(G: MarkedGroup, Qgroup: Group, formula: Callable[[GroupElement], GroupElement]) -> Tuple[MarkedGroup, GroupHom]:
    """Q marcado pelas imagens distintas e não triviais de S (na ordem de S)."""
    images = tuple(formula(s) for s in G.generators)
    default_labels = {Qgroup.element(f): lbl for lbl, f in Qgroup.default_generators()}
    q_gens, q_labels = [], []
    for s_label, img in zip(G.labels, images):
        if Qgroup.is_identity(img) or img in q_gens:
            continue
        q_gens.append(img)
        q_labels.append(default_labels.get(img, f"pi({s_label})"))
    Q = marking_by(Qgroup, q_gens, q_labels)
    return Q, GroupHom(source=G, target=Q, generator_images=images, formula=formula)


def _heisenberg_extension(G: MarkedGroup) -> CatalogExtension:
    h = G.group
    Zq = make_group(resolve_descriptor("Zn", {"n": 2}))
    Q, pi = quotient_marking(G, Zq, lambda x: Zq.element(x.form[:2]))

    def coords(x: GroupElement) -> Optional[Tuple[int, ...]]:
        a, b, c = x.form
        return (c,) if a == 0 and b == 0 else None

    return CatalogExtension(
        name="Heisenberg/center",
        G=G, Q=Q, pi=pi,
        subgroup_generators=(h.element((0, 0, 1)), h.element((0, 0, -1))),
        subgroup_labels=("z", "z^-1"),
        coordinates=coords,
    )


def _bs_extension(G: MarkedGroup) -> CatalogExtension:
    g = G.group
    Zq = make_group(resolve_descriptor("Zn", {"n": 1}))
    Q, pi = quotient_marking(G, Zq, lambda x: Zq.element((x.form[2],)))

    def coords(x: GroupElement) -> Optional[Tuple[int, ...]]:
        p, k, e = x.form
        return (p,) if k == 0 and e == 0 else None

    return CatalogExtension(
        name="BS1m/b-exponent",
        G=G, Q=Q, pi=pi,
        subgroup_generators=(g.element((1, 0, 0)), g.element((-1, 0, 0))),
        subgroup_labels=("a", "a^-1"),
        coordinates=coords,
    )


def _torus_extension(G: MarkedGroup) -> CatalogExtension:
    g = G.group
    Zq = make_group(resolve_descriptor("Zn", {"n": 1}))
    Q, pi = quotient_marking(G, Zq, lambda x: Zq.element((x.form[2],)))

    def coords(x: GroupElement) -> Optional[Tuple[int, ...]]:
        v1, v2, k = x.form
        return (v1, v2) if k == 0 else None

    gens = tuple(g.element(f) for f in ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)))
    return CatalogExtension(
        name="ZsdZ2/Z2-factor",
        G=G, Q=Q, pi=pi,
        subgroup_generators=gens,
        subgroup_labels=("e1", "e1^-1", "e2", "e2^-1"),
        coordinates=coords,
    )


_EXTENSIONS: Dict[str, Callable[[MarkedGroup], CatalogExtension]] = {
    "Heisenberg": _heisenberg_extension,
    "BS1m": _bs_extension,
    "ZsdZ2": _torus_extension,
}


def has_extension(name: str) -> bool:
    return name in _EXTENSIONS


def amenable_exponential(name: str) -> bool:
    return name in AMENABLE_EXPONENTIAL


def catalog_extension(G: MarkedGroup) -> CatalogExtension:
    name = G.descriptor.name
    builder = _EXTENSIONS.get(name)
    if builder is None:
        raise CatalogError(f"{name} has no catalog extension (known: {', '.join(_EXTENSIONS)})")
    if not G.standard:
        raise UsageError(f"catalog extension of {name} needs the default marking")
    return builder(G)


def trivial_extension(G: MarkedGroup) -> CatalogExtension:
    """N = G, Q = {1}; S_N = S."""
    triv = make_group(resolve_descriptor("Trivial"))
    Q, pi = quotient_marking(G, triv, lambda x: triv.identity())
    return CatalogExtension(
        name=f"{G.label}/trivial",
        G=G, Q=Q, pi=pi,
        subgroup_generators=G.generators,
        subgroup_labels=G.labels,
        coordinates=None,
    )


# --------------------- automorfismos ---------------------
def _hom_from(marked: MarkedGroup, fn: Callable[[GroupElement], GroupElement]) -> GroupHom:
    return GroupHom(
        source=marked,
        target=marked,
        generator_images=tuple(fn(s) for s in marked.generators),
        formula=fn,
    )


def inner_automorphism(marked: MarkedGroup, a: GroupElement) -> GroupAutomorphism:
    """x ↦ a x a⁻¹"""
    g = marked.group
    a_inv = g.inv(a)
    return GroupAutomorphism(
        forward=_hom_from(marked, lambda x: g.conjugate(a, x)),
        backward=_hom_from(marked, lambda x: g.conjugate(a_inv, x)),
        modular_factor=1.0,
        conjugator=a,
    )


def matrix_automorphism(marked: MarkedGroup, rows: Sequence[Sequence[int]]) -> GroupAutomorphism:
    """v ↦ A v em ℤⁿ (A unimodular)."""
    if marked.descriptor.name != "Zn":
        raise UsageError(f"matrix automorphisms act on Zn, not {marked.label}")
    A = as_matrix(rows)
    g = marked.group
    if len(A) != g.rank:
        raise UsageError(f"matrix size {len(A)} does not match Z^{g.rank}")
    A_inv = unimodular_inverse(A)
    return GroupAutomorphism(
        forward=_hom_from(marked, lambda x: g.element(mat_vec(A, x.form))),
        backward=_hom_from(marked, lambda x: g.element(mat_vec(A_inv, x.form))),
        modular_factor=1.0,
    )


def identity_automorphism(marked: MarkedGroup) -> GroupAutomorphism:
    ident = _hom_from(marked, lambda x: x)
    return GroupAutomorphism(forward=ident, backward=ident)
