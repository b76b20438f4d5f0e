# lib/extension.py
"""
Sequências exatas 1 → N → G → Q → 1: seção transversal geodésica, cociclos
β e θ, coordenadas (n, q) ↔ nσ(q), lei de multiplicação nas coordenadas,
decomposição da convolução por fatias de Q e a desigualdade de fator 3.

All identities are checked exactly; N-lengths come from a ``SubgroupMetric``
(closed-form coordinates or a BFS table of ⟨S_N⟩ plus meet-in-the-middle).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field
from tqdm import tqdm

from config import Config
from groups.base import GroupAutomorphism, GroupElement, MarkedGroup, Word, require_member
from groups.catalog import CatalogExtension, inner_automorphism
from lib.cayley import BallTable, build_ball, geodesic_word, resolve_length, word_length
from lib.convolution import FinSuppFunction, convolve, random_integer_function
from lib.errors import CheckFailedError, NotInSubgroupError, OutOfTableError, UsageError
from lib.fitting import Classification, classify_growth, fit_polynomial, fit_window
from lib.reports import CheckReport, form_text

logger = logging.getLogger(__name__)

Coords = Tuple[GroupElement, GroupElement]


# --------------------- métrica intrínseca de N ---------------------
class SubgroupMetric:
    """
    ℓ_N para N = ⟨S_N⟩.
    ``length`` returns None for members outside ⟨S_N⟩ or beyond 2R of the table.
    """

    def __init__(self, ext: CatalogExtension, radius: int = 8):
        self.ext = ext
        self.radius = radius
        self._table: Optional[BallTable] = None
        G = ext.G
        if tuple(ext.subgroup_generators) == tuple(G.generators):
            self.marked = G
        else:
            self.marked = MarkedGroup(
                group=G.group,
                generators=tuple(ext.subgroup_generators),
                labels=tuple(ext.subgroup_labels),
                standard=False,
            )

    @property
    def table(self) -> BallTable:
        if self._table is None:
            self._table = build_ball(self.marked, self.radius)
        return self._table

    def length(self, n: GroupElement) -> Optional[int]:
        if not self.ext.member(n):
            raise NotInSubgroupError(f"{n!r} is not an element of N")
        if self.ext.coordinates is not None:
            c = self.ext.coordinates(n)
            return None if c is None else sum(abs(v) for v in c)
        exact = self.marked.exact_length(n)
        if exact is not None:
            return exact
        return word_length(self.table, n)

    def max_generator_length(self, ball_G: BallTable) -> int:
        """max ℓ_G(s), s ∈ S_N"""
        return max((resolve_length(ball_G, s) for s in self.ext.subgroup_generators), default=0)


# --------------------- seção transversal ---------------------
@dataclass(eq=False)
class CrossSectionTable:
    """σ: Q → G até o raio Q ``radius``; ``words`` são palavras em S_G."""
    radius: int
    method: str
    sigma: Dict[GroupElement, GroupElement]
    words: Dict[GroupElement, Word]
    order: List[GroupElement] = field(default_factory=list)

    def __call__(self, q: GroupElement) -> GroupElement:
        x = self.sigma.get(q)
        if x is None:
            raise OutOfTableError(f"section undefined at {q!r} (Q-radius {self.radius})")
        return x

    def __contains__(self, q: GroupElement) -> bool:
        return q in self.sigma

    def __len__(self) -> int:
        return len(self.sigma)


@dataclass(eq=False)
class ExtensionContext:
    ext: CatalogExtension
    ball_G: BallTable
    ball_Q: BallTable
    section: CrossSectionTable
    subgroup: SubgroupMetric
    _sigma_inv: Dict[GroupElement, GroupElement] = field(default_factory=dict, repr=False)

    @property
    def G(self) -> MarkedGroup:
        return self.ext.G

    @property
    def Q(self) -> MarkedGroup:
        return self.ext.Q

    def pi(self, x: GroupElement) -> GroupElement:
        return self.ext.pi(x)

    def member(self, x: GroupElement) -> bool:
        return self.ext.member(x)

    def ell_G(self, x: GroupElement) -> int:
        return resolve_length(self.ball_G, x)

    def ell_Q(self, q: GroupElement) -> int:
        return resolve_length(self.ball_Q, q)

    def sigma(self, q: GroupElement) -> GroupElement:
        return self.section(q)

    def sigma_inv(self, q: GroupElement) -> GroupElement:
        hit = self._sigma_inv.get(q)
        if hit is None:
            hit = self.G.inv(self.section(q))
            self._sigma_inv[q] = hit
        return hit


def _check_section(ctx_ext: CatalogExtension, section: CrossSectionTable, ball_G: Optional[BallTable], ball_Q: BallTable) -> CheckReport:
    report = CheckReport(name=f"geodesic section ({section.method})")
    G = ctx_ext.G
    for q, x in section.sigma.items():
        lq = resolve_length(ball_Q, q)
        lg = len(section.words[q])
        good = ctx_ext.pi(x) == q and G.evaluate(section.words[q]) == x and lg == lq
        if ball_G is not None and good:
            measured = word_length(ball_G, x)
            good = measured == lq
        report.record(good, witness={"q": repr(q), "sigma": repr(x), "l_Q": lq, "word_length": lg})
    identity_ok = section.sigma.get(ctx_ext.Q.identity()) == G.identity()
    report.record(identity_ok, witness={"sigma(1)": repr(section.sigma.get(ctx_ext.Q.identity()))})
    return report


def build_geodesic_section(ext: CatalogExtension, ball_G: BallTable, ball_Q: BallTable, R: int) -> CrossSectionTable:
    """
    Primeiro elemento de G (ordem BFS) em cada classe lateral π(g) com
    ℓ_Q ≤ R. Needs ball_G.radius ≥ R; missing cosets raise OutOfTableError.
    """
    if ball_G.radius < R or ball_Q.radius < R:
        raise UsageError(f"section radius {R} needs G- and Q-balls of radius >= {R}")
    wanted = set(ball_Q.ball(R))
    sigma: Dict[GroupElement, GroupElement] = {}
    order: List[GroupElement] = []
    for x in ball_G.ball(R):
        q = ext.pi(x)
        if q in wanted and q not in sigma:
            sigma[q] = x
            order.append(q)
            if len(sigma) == len(wanted):
                break
    missing = [q for q in ball_Q.ball(R) if q not in sigma]
    if missing:
        raise OutOfTableError(f"section incomplete at radius {R}; missing cosets: {missing[:8]!r}")
    words = {q: geodesic_word(ball_G, x) for q, x in sigma.items()}
    section = CrossSectionTable(radius=R, method="bfs", sigma=sigma, words=words, order=order)
    _check_section(ext, section, ball_G, ball_Q).raise_for_status()
    logger.info("section %s: %d cosets up to Q-radius %d", ext.name, len(sigma), R)
    return section


def lift_section(ext: CatalogExtension, ball_Q: BallTable, R: int) -> CrossSectionTable:
    """
    σ(q) levantando palavras geodésicas de Q letra a letra por pré-imagens
    fixas de π(S); geodesic because ℓ_Q(π(g)) ≤ ℓ_G(g). Needs no G-ball.
    """
    if ball_Q.radius < R:
        raise UsageError(f"lifted section radius {R} needs a Q-ball of radius >= {R}")
    G, Q = ext.G, ext.Q
    lifts: List[int] = []
    for s in Q.generators:
        j = next(i for i, img in enumerate(ext.pi.generator_images) if img == s)
        lifts.append(j)
    sigma: Dict[GroupElement, GroupElement] = {}
    words: Dict[GroupElement, Word] = {}
    order: List[GroupElement] = []
    elements = ball_Q.ball(R)
    for i, q in enumerate(elements):
        if i == 0:
            sigma[q], words[q] = G.identity(), ()
        else:
            parent = elements[int(ball_Q.parent[i])]
            j = lifts[int(ball_Q.parent_gen[i])]
            sigma[q] = G.mul(sigma[parent], G.generators[j])
            words[q] = words[parent] + (j,)
        order.append(q)
    section = CrossSectionTable(radius=R, method="lift", sigma=sigma, words=words, order=order)
    _check_section(ext, section, None, ball_Q).raise_for_status()
    return section


def build_context(
    ext: CatalogExtension,
    section_radius: int,
    method: str = "bfs",
    ball_radius: Optional[int] = None,
    subgroup_radius: int = 8,
) -> ExtensionContext:
    """Tabelas G, Q e σ; BFS section by default, ``lift`` for large Q-radii."""
    if method not in ("bfs", "lift"):
        raise UsageError(f"unknown section method {method!r}")
    RG = max(section_radius if method == "bfs" else 0, ball_radius or 0)
    ball_G = build_ball(ext.G, RG)
    ball_Q = build_ball(ext.Q, section_radius)
    if method == "bfs":
        section = build_geodesic_section(ext, ball_G, ball_Q, section_radius)
    else:
        section = lift_section(ext, ball_Q, section_radius)
    return ExtensionContext(
        ext=ext,
        ball_G=ball_G,
        ball_Q=ball_Q,
        section=section,
        subgroup=SubgroupMetric(ext, subgroup_radius),
    )


# --------------------- cociclos e coordenadas ---------------------
def _require_member(ctx: ExtensionContext, n: GroupElement) -> None:
    require_member(ctx.member, n)


def beta(ctx: ExtensionContext, p: GroupElement, q: GroupElement) -> GroupElement:
    """β(p,q) = σ(p)σ(q)σ(pq)⁻¹ ∈ N"""
    G = ctx.G
    pq = ctx.Q.mul(p, q)
    value = G.mul(G.mul(ctx.sigma(p), ctx.sigma(q)), ctx.sigma_inv(pq))
    if not ctx.member(value):
        raise CheckFailedError(f"beta({p!r}, {q!r}) = {value!r} is not in N")
    return value


def theta(ctx: ExtensionContext, q: GroupElement, n: GroupElement) -> GroupElement:
    """θ(q)(n) = σ(q) n σ(q)⁻¹"""
    _require_member(ctx, n)
    G = ctx.G
    return G.mul(G.mul(ctx.sigma(q), n), ctx.sigma_inv(q))


def theta_inverse(ctx: ExtensionContext, q: GroupElement, n: GroupElement) -> GroupElement:
    """θ(q)⁻¹(n) = σ(q)⁻¹ n σ(q)"""
    _require_member(ctx, n)
    G = ctx.G
    return G.mul(G.mul(ctx.sigma_inv(q), n), ctx.sigma(q))


def theta_automorphism(ctx: ExtensionContext, q: GroupElement) -> GroupAutomorphism:
    """θ(q) como automorfismo de G (conjugação por σ(q))."""
    return inner_automorphism(ctx.G, ctx.sigma(q))


def coords(ctx: ExtensionContext, g: GroupElement) -> Coords:
    """g ↦ (gσ(π g)⁻¹, π g)"""
    q = ctx.pi(g)
    return ctx.G.mul(g, ctx.sigma_inv(q)), q


def assemble(ctx: ExtensionContext, n: GroupElement, q: GroupElement) -> GroupElement:
    _require_member(ctx, n)
    return ctx.G.mul(n, ctx.sigma(q))


def mult_in_coords(ctx: ExtensionContext, a: Coords, b: Coords) -> Coords:
    """(m,p)(n,q) = (m·θ(p)(n)·β(p,q), pq)"""
    (m, p), (n, q) = a, b
    G = ctx.G
    return G.mul(G.mul(m, theta(ctx, p, n)), beta(ctx, p, q)), ctx.Q.mul(p, q)


def inverse_in_coords(ctx: ExtensionContext, a: Coords) -> Coords:
    """(m,p)⁻¹ = (θ(p)⁻¹(m⁻¹β(p,p⁻¹)⁻¹), p⁻¹)"""
    m, p = a
    G = ctx.G
    p_inv = ctx.Q.inv(p)
    inner = G.mul(G.inv(m), G.inv(beta(ctx, p, p_inv)))
    return theta_inverse(ctx, p, inner), p_inv


def check_multiplication(ctx: ExtensionContext, R: int) -> CheckReport:
    """mult_in_coords ≡ multiplicação direta, exaustivo em B_R × B_R."""
    ball = build_ball(ctx.G, R).elements
    report = CheckReport(name=f"mult_in_coords {ctx.ext.name} B_{R}xB_{R}")
    G = ctx.G
    cs = {x: coords(ctx, x) for x in ball}
    for x in tqdm(ball, desc="mult_in_coords", disable=not Config.PROGRESS, leave=False):
        cx = cs[x]
        report.record(inverse_in_coords(ctx, cx) == coords(ctx, G.inv(x)), witness={"inverse": repr(x)})
        for y in ball:
            got = mult_in_coords(ctx, cx, cs[y])
            report.record(got == coords(ctx, G.mul(x, y)), witness={"x": repr(x), "y": repr(y)})
    logger.info(report.summary_line())
    return report


def check_coordinates(ctx: ExtensionContext, elements: Iterable[GroupElement]) -> CheckReport:
    """assemble(coords(g)) = g e coords(assemble(n, q)) = (n, q)."""
    report = CheckReport(name="coordinates round trip")
    for g in elements:
        n, q = coords(ctx, g)
        report.record(ctx.member(n) and assemble(ctx, n, q) == g and coords(ctx, assemble(ctx, n, q)) == (n, q),
                      witness=repr(g))
    return report


# --------------------- decomposição da convolução ---------------------
def _q_slices(ctx: ExtensionContext, f: FinSuppFunction) -> Dict[GroupElement, Dict[GroupElement, int]]:
    """q ↦ {n: f(n, q)}"""
    out: Dict[GroupElement, Dict[GroupElement, int]] = {}
    for x, c in f.items():
        n, q = coords(ctx, x)
        out.setdefault(q, {})[n] = c
    return out


@dataclass(eq=False)
class Decomposition:
    """Peças f_p e g_{p,q} (funções em N, suportes como elementos de G)."""
    f_pieces: Dict[GroupElement, FinSuppFunction]
    g_pieces: Dict[Tuple[GroupElement, GroupElement], FinSuppFunction]
    products: Dict[Tuple[GroupElement, GroupElement], FinSuppFunction]
    total: FinSuppFunction


def decomposition_pieces(ctx: ExtensionContext, f: FinSuppFunction, g: FinSuppFunction) -> Decomposition:
    """
    f_p(m) = f(m, p⁻¹) e g_{p,q}(m) = g(β(p,p⁻¹)⁻¹θ(p)(m)β(p,q), pq); total é
    Σ_p f_p*g_{p,q} remontado em G.
    """
    G, Q = ctx.G, ctx.Q
    f_slices = _q_slices(ctx, f)
    g_slices = _q_slices(ctx, g)

    f_pieces: Dict[GroupElement, FinSuppFunction] = {}
    for q_f, piece in f_slices.items():
        f_pieces[Q.inv(q_f)] = FinSuppFunction(G, piece)

    g_pieces: Dict[Tuple[GroupElement, GroupElement], FinSuppFunction] = {}
    products: Dict[Tuple[GroupElement, GroupElement], FinSuppFunction] = {}
    total: Dict[GroupElement, int] = {}
    for p, fp in f_pieces.items():
        beta_pp = beta(ctx, p, Q.inv(p))
        for r, g_slice in g_slices.items():
            q = Q.mul(Q.inv(p), r)  # pq = r
            b_pq = beta(ctx, p, q)
            b_pq_inv = G.inv(b_pq)
            # g_{p,q}(m) = g(n'', r) com m = θ(p)⁻¹(β(p,p⁻¹) n'' β(p,q)⁻¹)
            piece = {
                theta_inverse(ctx, p, G.mul(G.mul(beta_pp, n2), b_pq_inv)): c
                for n2, c in g_slice.items()
            }
            gpq = FinSuppFunction(G, piece)
            g_pieces[(p, q)] = gpq
            prod = convolve(fp, gpq)
            products[(p, q)] = prod
            for n, c in prod.items():
                x = assemble(ctx, n, q)
                total[x] = total.get(x, 0) + c
    return Decomposition(f_pieces=f_pieces, g_pieces=g_pieces, products=products,
                         total=FinSuppFunction(G, total))


def slice_decompose(ctx: ExtensionContext, f: FinSuppFunction, g: FinSuppFunction) -> FinSuppFunction:
    """Σ_p f_p * g_{p,q} sobre todos os q; igual a convolve(f, g) (caso discreto)."""
    return decomposition_pieces(ctx, f, g).total


class PhiPsiReport(CheckReport):
    max_slice_gap: float = 0.0
    min_slice_margin: float = 0.0
    global_margin: float = 0.0
    decomposition_exact: bool = True


def phi_psi_check(ctx: ExtensionContext, f: FinSuppFunction, g: FinSuppFunction) -> PhiPsiReport:
    """
    ‖g_{p,q}‖₂ = ψ(pq) exato; Σ_p ‖f_p‖₂‖g_{p,q}‖₂ = (φ*ψ)(q) com φ(p) = ‖f_{p⁻¹}‖₂;
    ‖(f*g)(·,q)‖₂ ≤ Σ_p ‖f_p*g_{p,q}‖₂ e a versão global em ℓ²(Q).
    """
    Q = ctx.Q
    dec = decomposition_pieces(ctx, f, g)
    report = PhiPsiReport(name="phi/psi slices")

    psi_sq: Dict[GroupElement, int] = {}
    for r, piece in _q_slices(ctx, g).items():
        psi_sq[r] = sum(c * c for c in piece.values())
    phi_sq: Dict[GroupElement, int] = {}
    for q_f, piece in _q_slices(ctx, f).items():
        phi_sq[q_f] = sum(c * c for c in piece.values())

    for (p, q), gpq in dec.g_pieces.items():
        pq = Q.mul(p, q)
        report.record(gpq.l2_squared() == psi_sq.get(pq, 0), witness={"p": repr(p), "q": repr(q)})

    # Σ_p ‖f_p‖‖g_{p,q}‖ contra (φ*ψ)(q) pela convolução genérica em Q
    phi = FinSuppFunction(Q, {p: math.sqrt(v) for p, v in phi_sq.items()})
    psi = FinSuppFunction(Q, {r: math.sqrt(v) for r, v in psi_sq.items()})
    phi_psi = convolve(phi, psi)
    sums: Dict[GroupElement, float] = {}
    slice_sums: Dict[GroupElement, float] = {}
    for (p, q), gpq in dec.g_pieces.items():
        sums[q] = sums.get(q, 0.0) + dec.f_pieces[p].l2() * gpq.l2()
        slice_sums[q] = slice_sums.get(q, 0.0) + dec.products[(p, q)].l2()
    gap = 0.0
    for q in set(sums) | set(phi_psi):
        a, b = sums.get(q, 0.0), phi_psi(q)
        gap = max(gap, abs(a - b))
        report.record(math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9), witness={"phi*psi": repr(q)})
    report.max_slice_gap = gap

    conv = convolve(f, g)
    report.decomposition_exact = conv == dec.total
    report.record(report.decomposition_exact, witness={"decomposition": "f*g != sum of pieces"})

    conv_slices = _q_slices(ctx, conv)
    margin = math.inf
    for q, piece in conv_slices.items():
        lhs = math.sqrt(sum(c * c for c in piece.values()))
        m = slice_sums.get(q, 0.0) - lhs
        margin = min(margin, m)
        report.record(m >= -1e-9 * max(1.0, lhs), witness={"slice": repr(q)})
    report.min_slice_margin = 0.0 if margin is math.inf else margin
    glob_rhs = math.sqrt(sum(v * v for v in slice_sums.values()))
    report.global_margin = glob_rhs - conv.l2()
    report.record(report.global_margin >= -1e-9 * max(1.0, glob_rhs), witness={"global": report.global_margin})
    return report


def random_pair(ctx: ExtensionContext, R: int, rng: np.random.Generator) -> Tuple[FinSuppFunction, FinSuppFunction]:
    ball = ctx.ball_G.ball(R) if ctx.ball_G.radius >= R else build_ball(ctx.G, R).elements
    return random_integer_function(ctx.G, ball, rng), random_integer_function(ctx.G, ball, rng)


def check_decomposition(ctx: ExtensionContext, pairs: int, R: int, seed: int) -> PhiPsiReport:
    """``pairs`` pares aleatórios inteiros em B_R: decomposição exata + fatias."""
    rng = np.random.default_rng(seed)
    report = PhiPsiReport(name=f"decompose-check {ctx.ext.name}")
    for i in tqdm(range(pairs), desc="decompose", disable=not Config.PROGRESS, leave=False):
        f, g = random_pair(ctx, R, rng)
        sub = phi_psi_check(ctx, f, g)
        report.checked += sub.checked
        report.mismatches += sub.mismatches
        if not sub.ok:
            report.ok = False
            report.witness = report.witness or {"pair": i, "detail": sub.witness}
        report.decomposition_exact = report.decomposition_exact and sub.decomposition_exact
        report.max_slice_gap = max(report.max_slice_gap, sub.max_slice_gap)
        report.min_slice_margin = min(report.min_slice_margin, sub.min_slice_margin) if i else sub.min_slice_margin
    report.details["pairs"] = pairs
    logger.info(report.summary_line())
    return report


# --------------------- desigualdades de comprimento ---------------------
class LengthInequalityReport(BaseModel):
    radius: int
    max_ratio: float
    witness: Optional[str] = None
    checked: int = 0
    ok: bool = True
    per_radius: List[float] = Field(default_factory=list)


def length_inequality_check(ctx: ExtensionContext, R: int) -> LengthInequalityReport:
    """
    max (ℓ_G(n) + ℓ_Q(q)) / ℓ_G(nσ(q)) sobre B_R \\ {1}; deve ser ≤ 3.
    ℓ_G(n) ≤ 2R always, so meet-in-the-middle on B_R resolves it exactly.
    """
    ball = build_ball(ctx.G, R)
    best, witness, count = 0.0, None, 0
    per_radius = [0.0] * (R + 1)
    for i in range(1, ball.size):
        x = ball.elements[i]
        lx = int(ball.lengths[i])
        n, q = coords(ctx, x)
        ratio = (resolve_length(ball, n) + ctx.ell_Q(q)) / lx
        count += 1
        per_radius[lx] = max(per_radius[lx], ratio)
        if ratio > best:
            best, witness = ratio, repr(x)
    report = LengthInequalityReport(radius=R, max_ratio=best, witness=witness, checked=count,
                                    ok=best <= 3.0, per_radius=per_radius)
    logger.info("length inequality %s R=%d: max ratio %.4f", ctx.ext.name, R, best)
    return report


class IntrinsicInequality(BaseModel):
    """ℓ_N(n) + ℓ_Q(q) ≤ D·ℓ_G(n,q)^r ajustado sobre a bola."""
    exponent: float
    constant: float
    radius: int
    skipped: int = 0


def intrinsic_length_inequality(ctx: ExtensionContext, R: int, min_radius: int = 6) -> IntrinsicInequality:
    ball = build_ball(ctx.G, R)
    maxima: Dict[int, int] = {}
    points: List[Tuple[int, int]] = []
    skipped = 0
    for i in range(1, ball.size):
        x = ball.elements[i]
        n, q = coords(ctx, x)
        ln = ctx.subgroup.length(n)
        if ln is None:
            skipped += 1
            continue
        lx = int(ball.lengths[i])
        v = ln + ctx.ell_Q(q)
        points.append((lx, v))
        maxima[lx] = max(maxima.get(lx, 0), v)
    radii = sorted(maxima)
    idx = fit_window(radii, min_radius)
    fit = fit_polynomial([radii[i] for i in idx], [maxima[radii[i]] for i in idx])
    r = max(fit.slope, 0.0)
    D = max((v / lx ** r for lx, v in points), default=0.0)
    return IntrinsicInequality(exponent=r, constant=D, radius=R, skipped=skipped)


# --------------------- coleta de cociclos ---------------------
class TraceStep(BaseModel):
    kind: str  # "beta" | "theta"
    position: str  # prefixo P em Q
    letter: str
    value: str


class CollectedCocycle(BaseModel):
    element: str
    direct: str
    ok: bool
    trace: List[TraceStep] = Field(default_factory=list)


@dataclass(eq=False)
class CollectAlphabet:
    """S_G = S_N ∪ σ(S_Q): letras N primeiro, depois as de Q."""
    letters: List[GroupElement]
    labels: List[str]
    n_count: int
    q_letters: List[GroupElement]
    inverse: List[int]


def collect_alphabet(ctx: ExtensionContext) -> CollectAlphabet:
    ext = ctx.ext
    letters = list(ext.subgroup_generators)
    labels = list(ext.subgroup_labels)
    q_letters = list(ctx.Q.generators)
    for s, lbl in zip(ctx.Q.generators, ctx.Q.labels):
        letters.append(ctx.sigma(s))
        labels.append(f"sigma({lbl})")
    index = {x: i for i, x in enumerate(letters)}
    inverse = [index.get(ctx.G.inv(x), -1) for x in letters]
    return CollectAlphabet(letters=letters, labels=labels, n_count=len(ext.subgroup_generators),
                           q_letters=q_letters, inverse=inverse)


def cocycle_collect(ctx: ExtensionContext, word: Sequence[int], alphabet: Optional[CollectAlphabet] = None) -> Tuple[GroupElement, CollectedCocycle]:
    """
    Reescreve uma palavra em S_N ∪ σ(S_Q) de imagem trivial como produto
    de valores β(P, s) e conjugados θ(P)(t), P o prefixo em Q.
    """
    alphabet = alphabet or collect_alphabet(ctx)
    G, Q = ctx.G, ctx.Q
    P = Q.identity()
    acc = G.identity()
    trace: List[TraceStep] = []
    for i in word:
        if i < alphabet.n_count:
            t = alphabet.letters[i]
            value = theta(ctx, P, t)
            trace.append(TraceStep(kind="theta", position=form_text(P.form), letter=alphabet.labels[i], value=form_text(value.form)))
        else:
            s = alphabet.q_letters[i - alphabet.n_count]
            value = beta(ctx, P, s)
            trace.append(TraceStep(kind="beta", position=form_text(P.form), letter=alphabet.labels[i], value=form_text(value.form)))
            P = Q.mul(P, s)
        acc = G.mul(acc, value)
    if not Q.group.is_identity(P):
        raise NotInSubgroupError(f"word has nontrivial image {P!r} in Q")
    direct = G.identity()
    for i in word:
        direct = G.mul(direct, alphabet.letters[i])
    return acc, CollectedCocycle(element=form_text(acc.form), direct=form_text(direct.form),
                                 ok=acc == direct, trace=trace)


def random_kernel_words(ctx: ExtensionContext, count: int, max_length: int, rng: np.random.Generator,
                        alphabet: Optional[CollectAlphabet] = None) -> List[Word]:
    """Palavras aleatórias de comprimento ≤ max_length com imagem trivial em Q."""
    alphabet = alphabet or collect_alphabet(ctx)
    k_n, k_q = alphabet.n_count, len(alphabet.q_letters)
    q_inverse = ctx.Q.inverse_index
    words: List[Word] = []
    for _ in range(count):
        half = int(rng.integers(0, max_length // 2 + 1))
        head: List[int] = []
        for _ in range(half):
            if k_n and (not k_q or rng.random() < 0.5):
                head.append(int(rng.integers(0, k_n)))
            else:
                head.append(k_n + int(rng.integers(0, k_q)))
        tail: List[int] = []
        q_part = [i - k_n for i in head if i >= k_n]
        spare = max_length - len(head) - len(q_part)
        for j in reversed(q_part):
            if k_n and spare > 0 and rng.random() < 0.3:
                tail.append(int(rng.integers(0, k_n)))
                spare -= 1
            tail.append(k_n + q_inverse[j])
        words.append(tuple(head + tail))
    return words


# --------------------- perfis de cociclos ---------------------
class CocycleProfiles(BaseModel):
    radius: int
    amplitude_table: List[List[int]]
    amplitude: List[int]
    theta_growth: List[int]
    amplitude_class: Classification
    theta_class: Classification
    unresolved: int = 0
    ambient_ok: bool = True
    ambient_checked: int = 0
    ambient_witness: Optional[str] = None


def cocycle_profiles(
    ctx: ExtensionContext,
    R: int,
    theta_radius: Optional[int] = None,
    ratio: float = 0.5,
    min_radius: int = 6,
    ambient: bool = True,
) -> CocycleProfiles:
    """
    max ℓ_N(β(p,q)) por (ℓ_Q(p), ℓ_Q(q)) e por raio combinado; max ℓ_N(θ(q)(s))
    por ℓ_Q(q); classificação de 1 + valor. With ``ambient`` also checks
    ℓ_G(β(p,q)) ≤ 2ℓ_Q(p)+2ℓ_Q(q) and ℓ_G(θ(q)(s)) ≤ 2ℓ_Q(q)+ℓ_G(s) where resolvable.
    """
    TR = R if theta_radius is None else theta_radius
    if ctx.section.radius < max(2 * R, TR):
        raise OutOfTableError(f"cocycle profiles need section radius >= {max(2 * R, TR)} (have {ctx.section.radius})")
    Qball = ctx.ball_Q
    metric = ctx.subgroup
    amp = [[0] * (R + 1) for _ in range(R + 1)]
    unresolved = 0
    amb_ok, amb_checked, amb_witness = True, 0, None

    qs = Qball.ball(R)
    lq = {q: ctx.ell_Q(q) for q in qs}
    for p in qs:
        for q in qs:
            b = beta(ctx, p, q)
            ln = metric.length(b)
            if ln is None:
                unresolved += 1
                continue
            i, j = lq[p], lq[q]
            amp[i][j] = max(amp[i][j], ln)
            if ambient:
                lg = word_length(ctx.ball_G, b)
                if lg is not None:
                    amb_checked += 1
                    if lg > 2 * i + 2 * j:
                        amb_ok, amb_witness = False, amb_witness or f"beta({p!r},{q!r})"
    combined = [0] * (2 * R + 1)
    for i in range(R + 1):
        for j in range(R + 1):
            combined[i + j] = max(combined[i + j], amp[i][j])

    growth = [0] * (TR + 1)
    for q in Qball.ball(TR):
        r = ctx.ell_Q(q)
        for s in ctx.ext.subgroup_generators:
            v = theta(ctx, q, s)
            ln = metric.length(v)
            if ln is None:
                unresolved += 1
                continue
            growth[r] = max(growth[r], ln)
            if ambient:
                lg, ls = word_length(ctx.ball_G, v), word_length(ctx.ball_G, s)
                if lg is not None and ls is not None:
                    amb_checked += 1
                    if lg > 2 * r + ls:
                        amb_ok, amb_witness = False, amb_witness or f"theta({q!r})({s!r})"

    amp_class = classify_growth([1 + v for v in combined], ratio=ratio, min_x=min_radius)
    theta_class = classify_growth([1 + v for v in growth], ratio=ratio, min_x=min_radius)
    logger.info("cocycles %s: amplitude %s, theta %s", ctx.ext.name, amp_class.kind, theta_class.kind)
    return CocycleProfiles(
        radius=R,
        amplitude_table=amp,
        amplitude=combined,
        theta_growth=growth,
        amplitude_class=amp_class,
        theta_class=theta_class,
        unresolved=unresolved,
        ambient_ok=amb_ok,
        ambient_checked=amb_checked,
        ambient_witness=amb_witness,
    )
