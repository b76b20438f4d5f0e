# lib/convolution.py
"""
Álgebra de convolução de funções finitamente suportadas e estimativas por
baixo da norma de operador de T_f (iteração de potência em T_fᵀT_f).

Coefficients stay Python ints when the inputs are ints, so exact identities
(decomposition, automorphism invariance) are checked by plain equality.
"""
from __future__ import annotations

import logging
import math
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy.sparse import csc_array

from groups.base import GroupAutomorphism, GroupElement, MarkedGroup
from lib.cayley import BallTable, build_ball, word_length
from lib.errors import UnknownLengthError, UsageError
from lib.fitting import FitResult, fit_exponential, fit_polynomial, fit_window
from lib.reports import CheckReport

logger = logging.getLogger(__name__)

Scalar = Union[int, float]


class FinSuppFunction(Mapping[GroupElement, Scalar]):
    """Função de suporte finito; zeros nunca são armazenados."""

    __slots__ = ("group", "_coef")

    def __init__(self, group: MarkedGroup, coefficients: Union[Mapping[GroupElement, Scalar], Iterable[Tuple[GroupElement, Scalar]]] = ()):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        coef: Dict[GroupElement, Scalar] = {}
        for x, c in items:
            if x.family != group.label:
                raise UsageError(f"{x!r} is not an element of {group.label}")
            if c != 0:
                coef[x] = c
        self.group = group
        self._coef = coef

    # ---- Mapping ----
    def __getitem__(self, x: GroupElement) -> Scalar:
        return self._coef[x]

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self._coef)

    def __len__(self) -> int:
        return len(self._coef)

    def __call__(self, x: GroupElement) -> Scalar:
        return self._coef.get(x, 0)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FinSuppFunction):
            return NotImplemented
        return self.group.label == other.group.label and self._coef == other._coef

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"<FinSuppFunction on {self.group.label} |supp|={len(self._coef)}>"

    # ---- álgebra ----
    def __add__(self, other: "FinSuppFunction") -> "FinSuppFunction":
        _same_group(self, other)
        out = dict(self._coef)
        for x, c in other.items():
            out[x] = out.get(x, 0) + c
        return FinSuppFunction(self.group, out)

    def __sub__(self, other: "FinSuppFunction") -> "FinSuppFunction":
        return self + other.scale(-1)

    def scale(self, c: Scalar) -> "FinSuppFunction":
        return FinSuppFunction(self.group, {x: c * v for x, v in self._coef.items()})

    def support(self) -> List[GroupElement]:
        return list(self._coef)

    def l1(self) -> float:
        return float(sum(abs(c) for c in self._coef.values()))

    def l2_squared(self) -> Scalar:
        """Exato para coeficientes inteiros."""
        return sum(c * c for c in self._coef.values())

    def l2(self) -> float:
        return math.sqrt(self.l2_squared())

    def involution(self) -> "FinSuppFunction":
        """f̃(x) = f(x⁻¹) (coeficientes reais)."""
        inv = self.group.inv
        return FinSuppFunction(self.group, {inv(x): c for x, c in self._coef.items()})

    def compose(self, alpha: GroupAutomorphism) -> "FinSuppFunction":
        """(f∘α)(x) = f(α(x)); supp(f∘α) = α⁻¹(supp f)."""
        return FinSuppFunction(self.group, {alpha.backward(x): c for x, c in self._coef.items()})

    def rows(self) -> List[Tuple[GroupElement, Scalar]]:
        return sorted(self._coef.items(), key=lambda kv: kv[0].form)


def _same_group(f: FinSuppFunction, g: FinSuppFunction) -> None:
    if f.group.label != g.group.label:
        raise UsageError(f"functions on different groups: {f.group.label} vs {g.group.label}")


# --------------------- construtores ---------------------
def delta(group: MarkedGroup, x: GroupElement, c: Scalar = 1) -> FinSuppFunction:
    return FinSuppFunction(group, {x: c})


def indicator(group: MarkedGroup, elements: Iterable[GroupElement]) -> FinSuppFunction:
    return FinSuppFunction(group, {x: 1 for x in elements})


def ball_indicator(t: BallTable, n: int) -> FinSuppFunction:
    """χ_{B_n}"""
    return indicator(t.group, t.ball(n))


def sphere_indicator(t: BallTable, n: int) -> FinSuppFunction:
    """χ_{S_n}"""
    return indicator(t.group, t.sphere(n))


def random_integer_function(
    group: MarkedGroup,
    elements: Sequence[GroupElement],
    rng: np.random.Generator,
    values: Sequence[int] = (-1, 0, 1),
) -> FinSuppFunction:
    """Coeficientes sorteados em ``values`` (inteiros -> identidades exatas)."""
    picks = rng.integers(0, len(values), size=len(elements))
    return FinSuppFunction(group, {x: int(values[int(i)]) for x, i in zip(elements, picks)})


# --------------------- convolução ---------------------
def convolve(f: FinSuppFunction, g: FinSuppFunction) -> FinSuppFunction:
    """(f*g)(x) = Σ_y f(y⁻¹) g(yx) = Σ_{uv=x} f(u) g(v)."""
    _same_group(f, g)
    mul = f.group.group.mul
    out: Dict[GroupElement, Scalar] = {}
    for u, a in f.items():
        for v, b in g.items():
            x = mul(u, v)
            out[x] = out.get(x, 0) + a * b
    return FinSuppFunction(f.group, out)


def ell_of(f: FinSuppFunction, t: BallTable) -> int:
    """ℓ(f) = max ℓ(x) sobre o suporte (0 para f = 0)."""
    best = 0
    for x in f:
        value = word_length(t, x)
        if value is None:
            raise UnknownLengthError(x, 2 * t.radius)
        best = max(best, value)
    return best


def support_radius(f: FinSuppFunction, start: int = 2, max_radius: int = 256) -> int:
    """ℓ(f) sem tabela dada: forma fechada, senão bolas de raio crescente."""
    g = f.group
    exact = [g.exact_length(x) for x in f]
    if all(v is not None for v in exact):
        return max(exact, default=0)
    R = start
    while True:
        t = build_ball(g, R)
        try:
            return ell_of(f, t)
        except UnknownLengthError:
            if R >= max_radius:
                raise
            R = min(2 * R, max_radius)


# --------------------- norma de operador ---------------------
class HistoryPoint(BaseModel):
    m: int
    value: float
    iterations: int
    converged: bool


class OpNormEstimate(BaseModel):
    """Cota inferior certificada de ‖T_f‖ (valor de Rayleigh em ℓ²(B_m))."""
    truncation_radius: int
    iterations: int
    value: float
    converged: bool
    l1_ceiling: float
    history: List[HistoryPoint] = Field(default_factory=list)

    def values(self) -> List[float]:
        return [h.value for h in self.history]


def default_history_radii(m: int) -> List[int]:
    """0, 1, 2, 4, ..., m"""
    radii = [0]
    r = 1
    while r < m:
        radii.append(r)
        r *= 2
    if m > 0:
        radii.append(m)
    return radii


def convolution_matrix(f: FinSuppFunction, t: BallTable, m: int) -> csc_array:
    """
    Matriz de T_f: ℓ²(B_m) → ℓ²(B_{m+ℓ(f)}), A[yz, z] += f(y).
    Rows index the table, columns the prefix B_m; needs t.radius ≥ m + ℓ(f).
    """
    n_cols = t.ball_size(m)
    rows: List[np.ndarray] = []
    data: List[np.ndarray] = []
    for y, c in f.items():
        start = t.index.get(y)
        if start is None:
            raise UsageError(f"support element {y!r} outside the ball of radius {t.radius}")
        X = np.empty(n_cols, dtype=np.int64)
        X[0] = start
        for j in range(1, m + 1):
            sl = t.sphere_slice(j)
            X[sl] = t.step[X[t.parent[sl]], t.parent_gen[sl]]
        if (X < 0).any():
            raise UsageError(f"ball of radius {t.radius} too small for m={m} and support {y!r}")
        rows.append(X)
        data.append(np.full(n_cols, float(c)))
    if not rows:
        return csc_array((t.size, n_cols), dtype=float)
    cols = np.tile(np.arange(n_cols, dtype=np.int64), len(rows))
    return csc_array((np.concatenate(data), (np.concatenate(rows), cols)), shape=(t.size, n_cols))


def _start_vector(t: BallTable, n_cols: int) -> np.ndarray:
    h = np.zeros(n_cols)
    h[0] = 1.0
    b1 = min(t.ball_size(1), n_cols)
    if b1 > 1:
        # perturbação determinística em B_1
        h[1:b1] = 1e-3 * (1.0 + np.arange(b1 - 1) / b1)
    return h / np.linalg.norm(h)


def _power_iterate(A: csc_array, h: np.ndarray, tol: float, max_iter: int) -> Tuple[float, np.ndarray, int, bool]:
    value_old = 0.0
    value = 0.0
    for it in range(1, max_iter + 1):
        v = A @ h
        value = float(np.linalg.norm(v))  # ‖h‖ = 1
        if value == 0.0:
            return 0.0, h, it, True
        if abs(value - value_old) <= tol * value:
            return value, h, it, True
        value_old = value
        w = A.T @ v
        h = w / np.linalg.norm(w)
    return value, h, max_iter, False


def opnorm_lower(
    f: FinSuppFunction,
    m: int,
    tol: float = 1e-9,
    max_iter: int = 10_000,
    table: Optional[BallTable] = None,
    history_radii: Optional[Sequence[int]] = None,
) -> OpNormEstimate:
    """
    Maior valor singular de T_f restrito a ℓ²(B_m), por iteração de potência
    com partida quente entre os raios do histórico.
    Always a lower bound for ‖T_f‖; ``converged`` is False when max_iter hit.
    """
    if m < 0:
        raise UsageError(f"truncation radius must be >= 0 (got {m})")
    ceiling = f.l1()
    if len(f) == 0:
        return OpNormEstimate(truncation_radius=m, iterations=0, value=0.0, converged=True, l1_ceiling=0.0)
    L = ell_of(f, table) if table is not None else support_radius(f)
    if table is None or table.radius < m + L:
        table = build_ball(f.group, m + L)
    A_full = convolution_matrix(f, table, m)

    radii = sorted(set(r for r in (history_radii or default_history_radii(m)) if 0 <= r <= m) | {m})
    history: List[HistoryPoint] = []
    h: Optional[np.ndarray] = None
    for r in radii:
        n_cols = table.ball_size(r)
        A = A_full[:, :n_cols]
        if h is None:
            h = _start_vector(table, n_cols)
        else:
            h = np.concatenate([h, np.zeros(n_cols - len(h))])
        value, h, its, converged = _power_iterate(A, h, tol, max_iter)
        if not converged:
            logger.warning("opnorm: no convergence at m=%d after %d iterations (value %.12g)", r, its, value)
        history.append(HistoryPoint(m=r, value=value, iterations=its, converged=converged))
        logger.debug("opnorm m=%d value=%.12g iterations=%d", r, value, its)

    last = history[-1]
    if last.value > ceiling * (1 + 1e-12):
        raise AssertionError(f"opnorm estimate {last.value} exceeds the l1 ceiling {ceiling}")
    return OpNormEstimate(
        truncation_radius=m,
        iterations=last.iterations,
        value=last.value,
        converged=last.converged,
        l1_ceiling=ceiling,
        history=history,
    )


# --------------------- perfis RD ---------------------
class RdRow(BaseModel):
    n: int
    ball_size: int
    l2: float
    m: int
    opnorm_lower: float
    ratio: float
    converged: bool


class RdProfile(BaseModel):
    radii: List[int]
    ratios: List[float]
    rows: List[RdRow]
    fitted_exponent: float
    fit_residual: float
    fit_window: List[float]
    exponential: FitResult
    polynomial: FitResult

    def superpolynomial(self) -> bool:
        """log r_n linear em n com resíduo menor que o do ajuste log-log."""
        return self.exponential.slope > 0 and self.exponential.residual < self.polynomial.residual


def rd_profile(
    g: MarkedGroup,
    R: int,
    m: int,
    tol: float = 1e-9,
    max_iter: int = 10_000,
    adaptive: bool = False,
    min_radius: int = 6,
) -> RdProfile:
    """
    r_n = ‖χ_{B_n}‖_op (cota inferior) / ‖χ_{B_n}‖₂ para n = 1..R; expoente
    ajustado de log r_n contra log(1+n) na metade superior dos raios.
    With ``adaptive`` the truncation radius is max(m, n).
    """
    if R < 1:
        raise UsageError(f"rd_profile needs R >= 1 (got {R})")
    top_m = max(m, R) if adaptive else m
    table = build_ball(g, top_m + R)
    rows: List[RdRow] = []
    for n in range(1, R + 1):
        f = ball_indicator(table, n)
        mn = max(m, n) if adaptive else m
        est = opnorm_lower(f, mn, tol=tol, max_iter=max_iter, table=table)
        l2 = f.l2()
        rows.append(RdRow(n=n, ball_size=len(f), l2=l2, m=mn, opnorm_lower=est.value,
                          ratio=est.value / l2, converged=est.converged))
        logger.info("rd %s n=%d ratio=%.6g", g.label, n, est.value / l2)

    radii = [r.n for r in rows]
    ratios = [r.ratio for r in rows]
    idx = fit_window(radii, min_radius)
    wx = [radii[i] for i in idx]
    wy = [ratios[i] for i in idx]
    poly = fit_polynomial(wx, wy, shift=1.0)
    expo = fit_exponential(wx, wy)
    return RdProfile(
        radii=radii,
        ratios=ratios,
        rows=rows,
        fitted_exponent=poly.slope,
        fit_residual=poly.residual,
        fit_window=[float(x) for x in wx],
        exponential=expo,
        polynomial=poly,
    )


class RdCheck(BaseModel):
    """‖f‖_op ≥ estimativa; violação reportada é violação verdadeira."""
    ok: bool
    margin: float
    lhs_lower: float
    rhs: float
    length: int
    certified_violation: bool


def check_rd_inequality(f: FinSuppFunction, C: float, s: float, t: BallTable, m: int,
                        tol: float = 1e-9, max_iter: int = 10_000) -> RdCheck:
    """Avalia ‖f‖_op ≤ C(1+ℓ(f))^s‖f‖₂ com a cota inferior no lugar de ‖f‖_op."""
    L = ell_of(f, t)
    est = opnorm_lower(f, m, tol=tol, max_iter=max_iter, table=t if t.radius >= m + L else None)
    rhs = C * (1.0 + L) ** s * f.l2()
    margin = rhs - est.value
    violated = margin < -1e-12 * max(1.0, rhs)
    return RdCheck(ok=not violated, margin=margin, lhs_lower=est.value, rhs=rhs,
                   length=L, certified_violation=violated)


def rd_violation_sweep(g: MarkedGroup, C: float, s: float, radii: Sequence[int], m: int,
                       tol: float = 1e-9, max_iter: int = 10_000) -> Optional[int]:
    """Primeiro n com violação certificada para χ_{B_n}, ou None."""
    table = build_ball(g, m + max(radii))
    for n in radii:
        if not check_rd_inequality(ball_indicator(table, n), C, s, table, m, tol, max_iter).ok:
            return n
    return None


# --------------------- identidades com automorfismos ---------------------
def check_automorphism_identities(
    alpha: GroupAutomorphism,
    pairs: Iterable[Tuple[FinSuppFunction, FinSuppFunction]],
) -> CheckReport:
    """
    Caso discreto (Δ = 1): (f∘α)*(g∘α) = (f*g)∘α e ‖f∘α‖₂ = ‖f‖₂, exatos.
    """
    report = CheckReport(name="automorphism convolution identity")
    norms = 0
    for f, g in pairs:
        lhs = convolve(f.compose(alpha), g.compose(alpha))
        rhs = convolve(f, g).compose(alpha)
        report.record(lhs == rhs, witness={"support_f": [repr(x) for x in f.support()[:4]]})
        good_norm = f.compose(alpha).l2_squared() == f.l2_squared() * alpha.modular_factor
        norms += 0 if good_norm else 1
        report.record(good_norm, witness={"norm": repr(f)})
    report.details["modular_factor"] = alpha.modular_factor
    report.details["norm_mismatches"] = norms
    return report
