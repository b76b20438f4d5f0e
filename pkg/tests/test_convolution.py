from __future__ import annotations

import math

import numpy as np
import pytest

from groups.catalog import inner_automorphism, matrix_automorphism
from lib.cayley import build_ball
from lib.convolution import (
    FinSuppFunction,
    ball_indicator,
    check_automorphism_identities,
    check_rd_inequality,
    convolve,
    default_history_radii,
    delta,
    ell_of,
    indicator,
    opnorm_lower,
    random_integer_function,
    rd_profile,
    rd_violation_sweep,
    sphere_indicator,
)
from lib.errors import UsageError


def _random_pair(g, R, seed):
    rng = np.random.default_rng(seed)
    ball = build_ball(g, R).elements
    return random_integer_function(g, ball, rng), random_integer_function(g, ball, rng)


def test_zero_coefficients_are_dropped(z1):
    g = z1.group
    f = FinSuppFunction(z1, {g.element((0,)): 0, g.element((1,)): 2})
    assert len(f) == 1
    assert f(g.element((0,))) == 0
    assert f(g.element((1,))) == 2


def test_foreign_elements_rejected(z1, f2):
    with pytest.raises(UsageError):
        FinSuppFunction(z1, {f2.generators[0]: 1})
    with pytest.raises(UsageError):
        convolve(delta(z1, z1.identity()), delta(f2, f2.identity()))


def test_delta_convolution(f2):
    a, _, b, _ = f2.generators
    out = convolve(delta(f2, a, 2), delta(f2, b, 3))
    assert out == delta(f2, f2.mul(a, b), 6)


def test_convolution_is_associative(heisenberg):
    f, g = _random_pair(heisenberg, 2, seed=1)
    h, _ = _random_pair(heisenberg, 1, seed=2)
    assert convolve(convolve(f, g), h) == convolve(f, convolve(g, h))


def test_involution_reverses_products(bs12):
    f, g = _random_pair(bs12, 2, seed=3)
    assert convolve(f, g).involution() == convolve(g.involution(), f.involution())
    assert f.involution().involution() == f


def test_norms(z2):
    t = build_ball(z2, 2)
    f = ball_indicator(t, 2)
    assert f.l1() == 13.0
    assert f.l2_squared() == 13
    assert ell_of(f, t) == 2
    assert len(sphere_indicator(t, 2)) == 8


def test_history_radii():
    assert default_history_radii(0) == [0]
    assert default_history_radii(5) == [0, 1, 2, 4, 5]
    assert default_history_radii(8) == [0, 1, 2, 4, 8]


def test_opnorm_of_integers_ball_one(z1):
    f = ball_indicator(build_ball(z1, 1), 1)
    est = opnorm_lower(f, 200)
    assert 3.0 - 1e-3 <= est.value <= 3.0
    assert est.l1_ceiling == 3.0
    values = est.values()
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
    assert est.history[0].m == 0
    assert values[0] == pytest.approx(math.sqrt(3), rel=1e-3)


def test_opnorm_of_delta_is_one(heisenberg):
    x = heisenberg.generators[0]
    est = opnorm_lower(delta(heisenberg, x), 3)
    assert est.value == pytest.approx(1.0)


def test_opnorm_zero_function(z1):
    est = opnorm_lower(FinSuppFunction(z1), 5)
    assert est.value == 0.0
    with pytest.raises(UsageError):
        opnorm_lower(FinSuppFunction(z1), -1)


def test_free_group_sphere_lower_bound(f2):
    f = sphere_indicator(build_ball(f2, 1), 1)
    est = opnorm_lower(f, 8)
    # ‖χ_{S_1}‖ = 2√3 em F₂; em m = 8 a cota fica em 3.3436
    assert est.value == pytest.approx(3.3436, abs=5e-4)
    assert est.value <= 2 * math.sqrt(3) + 1e-9


def test_rd_profile_integers(z1):
    profile = rd_profile(z1, 10, 60)
    assert profile.radii == list(range(1, 11))
    assert profile.fitted_exponent == pytest.approx(0.5, abs=0.1)
    assert profile.ratios[-1] <= math.sqrt(21) + 1e-9


def test_rd_profile_free_group(f2):
    profile = rd_profile(f2, 7, 3)
    assert all(row.m == 3 for row in profile.rows)
    assert profile.fitted_exponent <= 1.2
    for row in profile.rows:
        assert row.ratio >= 1.0 - 1e-9


def test_rd_ratios_stay_between_trivial_bounds(bs12):
    profile = rd_profile(bs12, 6, 3)
    for row in profile.rows:
        assert 1.0 - 1e-9 <= row.ratio <= math.sqrt(row.ball_size) + 1e-9


def test_bs_rd_profile_is_superpolynomial(bs12):
    profile = rd_profile(bs12, 8, 1, adaptive=True, min_radius=3)
    assert [row.m for row in profile.rows] == list(range(1, 9))
    assert profile.exponential.slope > 0
    assert profile.exponential.residual < profile.polynomial.residual
    assert profile.superpolynomial()


def test_rd_inequality_on_integers(z1):
    t = build_ball(z1, 40)
    f = ball_indicator(t, 9)
    good = check_rd_inequality(f, C=1.0, s=1.0, t=t, m=30)
    assert good.ok and good.margin > 0
    assert good.length == 9
    bad = check_rd_inequality(f, C=1.0, s=0.5, t=t, m=30)
    assert bad.certified_violation
    assert bad.lhs_lower > bad.rhs


def test_rd_violation_sweep(z1):
    assert rd_violation_sweep(z1, 1.0, 1.0, [1, 3, 5, 9], m=30) is None
    assert rd_violation_sweep(z1, 1.0, 0.5, [1, 3, 5, 9], m=30) == 1


def test_automorphism_identities_matrix(z2):
    alpha = matrix_automorphism(z2, [[2, 1], [1, 1]])
    pairs = [_random_pair(z2, 2, seed=s) for s in range(50)]
    report = check_automorphism_identities(alpha, pairs)
    assert report.ok
    assert report.details["modular_factor"] == 1.0


def test_automorphism_identities_inner(heisenberg):
    alpha = inner_automorphism(heisenberg, heisenberg.generators[0])
    pairs = [_random_pair(heisenberg, 2, seed=s) for s in range(50)]
    assert check_automorphism_identities(alpha, pairs).ok


def test_compose_moves_support(z2):
    alpha = matrix_automorphism(z2, [[2, 1], [1, 1]])
    e1 = z2.generators[0]
    f = indicator(z2, [e1])
    moved = f.compose(alpha)
    (x,) = moved.support()
    assert alpha(x) == e1


def test_ell_of_power_of_a_in_bs(bs12):
    a = bs12.generators[0]
    a4 = bs12.group.element((4, 0, 0))
    t = build_ball(bs12, 3)
    f = FinSuppFunction(bs12, {a: 1, a4: 1})
    # a⁴ = aaaa; b a² b⁻¹ também tem 4 letras
    assert ell_of(f, t) == 4
