# lib/distortion.py
"""
Distorção de subgrupos, crescimento relativo e crescimento de comprimento
sob automorfismos (caso discreto, Δ ≡ 1).
"""
from __future__ import annotations

import logging
from typing import Iterable, List, Optional

from pydantic import BaseModel, Field

from groups.base import GroupAutomorphism, GroupElement
from lib.cayley import BallTable, build_ball, geodesic_word, word_length
from lib.extension import ExtensionContext
from lib.fitting import Classification, classify_growth
from lib.reports import form_text, parse_form

logger = logging.getLogger(__name__)

__all__ = [
    "DistortionRow",
    "DistortionProfile",
    "distortion_profile",
    "verify_witnesses",
    "AutGrowthProfile",
    "aut_growth_profile",
]


class DistortionRow(BaseModel):
    n: int
    distortion: int
    witness: Optional[str] = None
    witness_word: str = ""
    relative_growth: int
    partial: bool = False
    domination_ok: bool = True


class DistortionProfile(BaseModel):
    """D(n) = max{ℓ_N(x) : x ∈ N, ℓ_G(x) ≤ n}, com testemunhas."""
    extension: str
    radius: int
    rows: List[DistortionRow]
    classification: Classification
    generator_bound: int
    domination_ok: bool = True

    @property
    def values(self) -> List[int]:
        return [r.distortion for r in self.rows]

    @property
    def relative_growth(self) -> List[int]:
        return [r.relative_growth for r in self.rows]

    @property
    def partial_radii(self) -> List[int]:
        return [r.n for r in self.rows if r.partial]


def distortion_profile(
    ctx: ExtensionContext,
    R: int,
    ratio: float = 0.5,
    min_radius: int = 6,
) -> DistortionProfile:
    """
    Varre os N-membros de cada esfera de G (predicado de pertinência).
    A radius whose members include an unresolved ℓ_N is flagged partial.
    """
    ball = build_ball(ctx.G, R)
    metric = ctx.subgroup
    bound = metric.max_generator_length(ball)
    best, witness = 0, ctx.G.identity()
    count = 0
    all_dominated = True
    rows: List[DistortionRow] = []
    for n in range(R + 1):
        partial = False
        dominated = True
        for x in ball.sphere(n):
            if not ctx.member(x):
                continue
            count += 1
            ln = metric.length(x)
            if ln is None:
                partial = True
                continue
            # substituição de palavras: ℓ_G(x) ≤ ℓ_N(x)·max ℓ_G(S_N)
            if n > ln * bound:
                dominated = False
            if ln > best:
                best, witness = ln, x
        all_dominated = all_dominated and dominated
        rows.append(
            DistortionRow(
                n=n,
                distortion=best,
                witness=form_text(witness.form),
                witness_word=ctx.G.word_label(geodesic_word(ball, witness)),
                relative_growth=count,
                partial=partial,
                domination_ok=dominated,
            )
        )
        if partial:
            logger.warning("distortion %s: radius %d partial (unresolved N-length)", ctx.ext.name, n)
    cls = classify_growth([r.distortion for r in rows], ratio=ratio, min_x=min_radius)
    logger.info("distortion %s R=%d: %s", ctx.ext.name, R, cls.summary())
    return DistortionProfile(
        extension=ctx.ext.name,
        radius=R,
        rows=rows,
        classification=cls,
        generator_bound=bound,
        domination_ok=all_dominated,
    )


def verify_witnesses(ctx: ExtensionContext, profile: DistortionProfile) -> bool:
    """Reavalia cada testemunha: pertinência, ℓ_G ≤ n e ℓ_N = D(n)."""
    ball = build_ball(ctx.G, profile.radius)
    G = ctx.G
    for row in profile.rows:
        x = G.group.element(parse_form(row.witness))
        if not ctx.member(x):
            return False
        if ball.length_of(x) > row.n or ctx.subgroup.length(x) != row.distortion:
            return False
    return True


# --------------------- automorfismos ---------------------
class AutGrowthProfile(BaseModel):
    """λ(k) = max{ℓ(α^{-k}(u)) : u ∈ U}, |k| ≤ K; None = comprimento desconhecido."""
    ks: List[int]
    lengths: List[Optional[int]]
    base_length: int
    forward: Classification
    backward: Classification
    inner_bound_ok: Optional[bool] = None
    conjugator_length: Optional[int] = None
    modular_factor: float = 1.0
    inequality_ok: bool = True
    unresolved: List[int] = Field(default_factory=list)

    def value(self, k: int) -> Optional[int]:
        return self.lengths[self.ks.index(k)]


def aut_growth_profile(
    alpha: GroupAutomorphism,
    U: Iterable[GroupElement],
    t: BallTable,
    K: int,
    D: float = 1.0,
    s: float = 1.0,
    ratio: float = 0.5,
    min_radius: int = 6,
) -> AutGrowthProfile:
    """
    Perfil λ(k) e, para automorfismos internos, λ(k) ≤ ℓ(U) + 2|k|ℓ(a).
    Also asserts Δ^k ≤ D(1+λ(k))^{2s} literally (Δ = modular_factor).
    """
    U = list(U)
    ks = list(range(-K, K + 1))
    lengths: List[Optional[int]] = []
    unresolved: List[int] = []
    # α^{-k} iterado a partir de k = 0 nas duas direções
    table = {}
    for direction in (1, -1):
        current = {u: u for u in U}
        for k in range(0, K + 1):
            if k:
                current = {u: alpha.iterate(x, -direction) for u, x in current.items()}
            table[direction * k] = list(current.values())
    for k in ks:
        values = [word_length(t, x) for x in table[k]]
        if any(v is None for v in values):
            unresolved.append(k)
            lengths.append(None)
        else:
            lengths.append(max(values, default=0))
    base = lengths[ks.index(0)] or 0

    inner_ok = None
    a_len = None
    if alpha.conjugator is not None:
        a_len = word_length(t, alpha.conjugator)
        if a_len is not None:
            inner_ok = all(v is None or v <= base + 2 * abs(k) * a_len for k, v in zip(ks, lengths))

    delta = alpha.modular_factor
    inequality_ok = all(
        v is None or delta ** k <= D * (1 + v) ** (2 * s) + 1e-12 for k, v in zip(ks, lengths)
    )
    fwd = [lengths[ks.index(k)] or 0 for k in range(0, K + 1)]
    bwd = [lengths[ks.index(-k)] or 0 for k in range(0, K + 1)]
    if unresolved:
        logger.warning("aut growth: lengths unresolved for k in %s", unresolved)
    return AutGrowthProfile(
        ks=ks,
        lengths=lengths,
        base_length=base,
        forward=classify_growth(fwd, ratio=ratio, min_x=min_radius),
        backward=classify_growth(bwd, ratio=ratio, min_x=min_radius),
        inner_bound_ok=inner_ok,
        conjugator_length=a_len,
        modular_factor=delta,
        inequality_ok=inequality_ok,
        unresolved=unresolved,
    )
