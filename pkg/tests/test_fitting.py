from __future__ import annotations

import math

import pytest

from lib.cayley import build_ball, growth
from lib.fitting import classify_growth, fit_exponential, fit_polynomial, fit_window


def test_fit_window_prefers_large_radii():
    assert fit_window(list(range(10))) == [6, 7, 8, 9]
    # poucos pontos acima de min_x: fica a metade superior
    assert fit_window(list(range(6))) == [3, 4, 5]


def test_linear_growth_is_polynomial():
    seq = [2 * n + 1 for n in range(21)]
    c = classify_growth(seq)
    assert c.kind == "polynomial"
    assert c.degree == pytest.approx(1.0, abs=0.1)


def test_exponential_growth():
    seq = [3 ** n for n in range(13)]
    c = classify_growth(seq)
    assert c.kind == "exponential"
    assert c.rate == pytest.approx(math.log(3), abs=1e-9)


def test_flat_sequence_has_degree_zero():
    c = classify_growth([5.0] * 10)
    assert c.kind == "polynomial"
    assert c.degree == 0.0


def test_classification_is_scale_invariant():
    seq = [n ** 3 + 1 for n in range(15)]
    a = classify_growth(seq)
    b = classify_growth([1000 * v for v in seq])
    assert a.kind == b.kind == "polynomial"
    assert a.degree == pytest.approx(b.degree, abs=1e-9)


def test_too_few_points_is_inconclusive():
    assert classify_growth([1, 2]).kind == "inconclusive"
    assert classify_growth([]).kind == "inconclusive"
    # sete pontos não bastam, nem para 3^n
    assert classify_growth([3 ** n for n in range(7)]).kind == "inconclusive"
    assert classify_growth([3 ** n for n in range(8)]).kind == "exponential"


def test_raw_fits():
    poly = fit_polynomial([1, 2, 4, 8], [3, 12, 48, 192])
    assert poly.slope == pytest.approx(2.0)
    assert poly.residual == pytest.approx(0.0, abs=1e-12)
    shifted = fit_polynomial([0, 1, 3, 7], [1, 4, 16, 64], shift=1.0)
    assert shifted.slope == pytest.approx(2.0)
    expo = fit_exponential([0, 1, 2, 3], [1, 2, 4, 8])
    assert expo.slope == pytest.approx(math.log(2))


def test_heisenberg_growth_is_polynomial(heisenberg):
    sizes = growth(build_ball(heisenberg, 8)).sizes
    c = classify_growth(sizes)
    assert c.kind == "polynomial"
    # grau assintótico 4; em raio 8 o ajuste ainda fica abaixo
    assert 2.0 <= c.degree <= 4.5


def test_free_group_growth_is_exponential(f2):
    sizes = growth(build_ball(f2, 8)).sizes
    c = classify_growth(sizes)
    assert c.kind == "exponential"
    assert c.rate == pytest.approx(math.log(3), abs=0.05)
