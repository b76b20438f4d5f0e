# lib/fitting.py
"""
Ajustes log-log / log-linear e a classificação polinomial vs exponencial.

Fits use the top half of the available points, further restricted to
x ≥ min_x when at least three points survive; residual = RMS of the
least-squares residuals.
"""
from __future__ import annotations

import math
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

FLAT_TOL = 1e-12
# sequências mais curtas não classificam
MIN_POINTS = 8


class FitResult(BaseModel):
    model: Literal["polynomial", "exponential"]
    slope: float
    intercept: float
    residual: float
    window: List[float] = Field(default_factory=list)


class Classification(BaseModel):
    kind: Literal["polynomial", "exponential", "inconclusive"]
    degree: Optional[float] = None
    rate: Optional[float] = None
    polynomial: Optional[FitResult] = None
    exponential: Optional[FitResult] = None
    window: List[float] = Field(default_factory=list)

    def summary(self) -> str:
        if self.kind == "polynomial":
            return f"polynomial(degree={self.degree:.3f}, residual={self.polynomial.residual:.3g})"
        if self.kind == "exponential":
            return f"exponential(rate={self.rate:.3f}, residual={self.exponential.residual:.3g})"
        return "inconclusive"


def fit_window(xs: Sequence[float], min_x: float = 6) -> List[int]:
    """Índices da metade superior, restritos a x ≥ min_x se sobrarem ≥ 3."""
    n = len(xs)
    idx = list(range(n // 2, n)) if n >= 2 else list(range(n))
    kept = [i for i in idx if xs[i] >= min_x]
    return kept if len(kept) >= 3 else idx


def _linear(u: np.ndarray, v: np.ndarray) -> tuple:
    if len(u) < 2 or np.ptp(u) == 0:
        return 0.0, float(v.mean()) if len(v) else 0.0, 0.0
    slope, intercept = np.polyfit(u, v, 1)
    res = v - (slope * u + intercept)
    return float(slope), float(intercept), float(math.sqrt(float(np.mean(res ** 2))))


def fit_polynomial(xs: Sequence[float], ys: Sequence[float], shift: float = 0.0) -> FitResult:
    """log y contra log(x + shift)."""
    x = np.asarray(xs, dtype=float) + shift
    y = np.asarray(ys, dtype=float)
    ok = (x > 0) & (y > 0)
    slope, intercept, residual = _linear(np.log(x[ok]), np.log(y[ok]))
    return FitResult(model="polynomial", slope=slope, intercept=intercept, residual=residual,
                     window=[float(v) for v in np.asarray(xs, dtype=float)[ok]])


def fit_exponential(xs: Sequence[float], ys: Sequence[float]) -> FitResult:
    """log y contra x."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    ok = y > 0
    slope, intercept, residual = _linear(x[ok], np.log(y[ok]))
    return FitResult(model="exponential", slope=slope, intercept=intercept, residual=residual,
                     window=[float(v) for v in x[ok]])


def classify_growth(
    seq: Sequence[float],
    xs: Optional[Sequence[float]] = None,
    ratio: float = 0.5,
    min_x: float = 6,
) -> Classification:
    """
    Polinomial, exponencial ou inconclusivo.
    ``xs`` defaults to 0, 1, 2, ...; the lower-residual model wins only when
    its residual is below ``ratio`` times the other one. Fewer than
    MIN_POINTS values are always inconclusive.
    """
    if len(seq) < MIN_POINTS:
        return Classification(kind="inconclusive")
    xs = list(range(len(seq))) if xs is None else list(xs)
    idx = [i for i in fit_window(xs, min_x) if seq[i] > 0 and xs[i] > 0]
    if len(idx) < 3:
        return Classification(kind="inconclusive", window=[float(xs[i]) for i in idx])
    wx = [float(xs[i]) for i in idx]
    wy = [float(seq[i]) for i in idx]
    poly = fit_polynomial(wx, wy)
    expo = fit_exponential(wx, wy)

    if max(wy) - min(wy) <= FLAT_TOL * max(wy):
        return Classification(kind="polynomial", degree=0.0, polynomial=poly, exponential=expo, window=wx)
    if poly.residual < ratio * expo.residual:
        return Classification(kind="polynomial", degree=poly.slope, polynomial=poly, exponential=expo, window=wx)
    if expo.residual < ratio * poly.residual:
        return Classification(kind="exponential", rate=expo.slope, polynomial=poly, exponential=expo, window=wx)
    return Classification(kind="inconclusive", polynomial=poly, exponential=expo, window=wx)
