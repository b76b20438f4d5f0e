from __future__ import annotations

import math

import numpy as np
import pytest

from groups.catalog import catalog_extension, trivial_extension
from lib.cayley import build_ball
from lib.errors import NotInSubgroupError, OutOfTableError, UsageError
from lib.extension import (
    assemble,
    beta,
    build_context,
    build_geodesic_section,
    check_coordinates,
    check_decomposition,
    check_multiplication,
    cocycle_collect,
    cocycle_profiles,
    collect_alphabet,
    coords,
    decomposition_pieces,
    intrinsic_length_inequality,
    inverse_in_coords,
    length_inequality_check,
    mult_in_coords,
    phi_psi_check,
    random_kernel_words,
    random_pair,
    slice_decompose,
    theta,
    theta_automorphism,
)
from lib.convolution import convolve

CONTEXTS = ["heisenberg_ctx", "bs_ctx", "torus_ctx"]


@pytest.fixture(params=CONTEXTS)
def ctx(request):
    return request.getfixturevalue(request.param)


def test_geodesic_section_heisenberg(heisenberg_ctx):
    ctx = heisenberg_ctx
    Zq = ctx.Q.group
    assert ctx.sigma(Zq.element((1, 0))).form == (1, 0, 0)
    assert ctx.sigma(Zq.element((0, 1))).form == (0, 1, 0)
    assert ctx.sigma(ctx.Q.identity()) == ctx.G.identity()
    for q, x in ctx.section.sigma.items():
        assert ctx.pi(x) == q
        assert ctx.ell_G(x) == ctx.ell_Q(q)
    assert len(ctx.section) == 2 * 8 * 8 + 2 * 8 + 1


def test_geodesic_section_bs(bs_ctx):
    Zq = bs_ctx.Q.group
    for k in range(-8, 9):
        assert bs_ctx.sigma(Zq.element((k,))).form == (0, 0, k)


def test_section_outside_radius(heisenberg_ctx):
    far = heisenberg_ctx.Q.group.element((9, 0))
    assert far not in heisenberg_ctx.section
    with pytest.raises(OutOfTableError):
        heisenberg_ctx.sigma(far)


def test_section_needs_large_enough_balls(heisenberg):
    ext = catalog_extension(heisenberg)
    with pytest.raises(UsageError):
        build_geodesic_section(ext, build_ball(ext.G, 2), build_ball(ext.Q, 3), 3)
    with pytest.raises(UsageError):
        build_context(ext, 2, method="random")


def test_lifted_section_is_geodesic(bs12):
    ctx = build_context(catalog_extension(bs12), 10, method="lift")
    for q in ctx.ball_Q.elements:
        assert len(ctx.section.words[q]) == ctx.ell_Q(q)
        assert ctx.G.evaluate(ctx.section.words[q]) == ctx.sigma(q)
    assert ctx.ball_G.radius == 0


def test_multiplication_law(ctx):
    report = check_multiplication(ctx, 3)
    assert report.ok, report.witness
    assert report.mismatches == 0
    assert report.checked > 0


def test_coordinates_round_trip(ctx):
    report = check_coordinates(ctx, build_ball(ctx.G, 4).elements)
    assert report.ok, report.witness


def test_beta_is_a_normalized_cocycle(heisenberg_ctx):
    ctx = heisenberg_ctx
    one = ctx.Q.identity()
    qs = ctx.ball_Q.ball(2)
    for p in qs:
        assert beta(ctx, one, p) == ctx.G.identity()
        assert beta(ctx, p, one) == ctx.G.identity()
        for q in qs:
            assert ctx.member(beta(ctx, p, q))
            # central em Heisenberg
            assert beta(ctx, p, q).form[:2] == (0, 0)


def test_beta_commutator_is_the_center_generator(heisenberg_ctx):
    ctx = heisenberg_ctx
    G, Zq = ctx.G, ctx.Q.group
    e1, e2 = Zq.element((1, 0)), Zq.element((0, 1))
    c = G.mul(beta(ctx, e1, e2), G.inv(beta(ctx, e2, e1)))
    # σ(e₁)σ(e₂)σ(e₁)⁻¹σ(e₂)⁻¹ = xyx⁻¹y⁻¹ = z
    assert c.form == (0, 0, 1)


def test_theta_fixes_the_center(heisenberg_ctx):
    ctx = heisenberg_ctx
    z = ctx.ext.subgroup_generators[0]
    for q in ctx.ball_Q.ball(4):
        assert theta(ctx, q, z) == z


def test_theta_on_bs_doubles(bs_ctx):
    ctx = bs_ctx
    a = ctx.ext.subgroup_generators[0]
    for k in range(0, 6):
        q = ctx.Q.group.element((k,))
        assert theta(ctx, q, a).form == (2 ** k, 0, 0)


def test_theta_automorphism_round_trip(heisenberg_ctx):
    ctx = heisenberg_ctx
    q = ctx.Q.group.element((1, 1))
    alpha = theta_automorphism(ctx, q)
    ball = build_ball(ctx.G, 2).elements
    assert alpha.check_round_trip(ball).ok
    n = ctx.ext.subgroup_generators[0]
    assert alpha(n) == theta(ctx, q, n)


def test_non_members_are_rejected(heisenberg_ctx):
    ctx = heisenberg_ctx
    x = ctx.G.generators[0]
    with pytest.raises(NotInSubgroupError):
        theta(ctx, ctx.Q.identity(), x)
    with pytest.raises(NotInSubgroupError):
        assemble(ctx, x, ctx.Q.identity())
    with pytest.raises(NotInSubgroupError):
        ctx.subgroup.length(x)


def test_inverse_in_coords(bs_ctx):
    ctx = bs_ctx
    for x in build_ball(ctx.G, 3).elements:
        assert inverse_in_coords(ctx, coords(ctx, x)) == coords(ctx, ctx.G.inv(x))
        assert mult_in_coords(ctx, coords(ctx, x), inverse_in_coords(ctx, coords(ctx, x))) == (
            ctx.G.identity(),
            ctx.Q.identity(),
        )


def test_trivial_extension_coordinates(z2):
    ctx = build_context(trivial_extension(z2), 0)
    for x in build_ball(z2, 3).elements:
        n, q = coords(ctx, x)
        assert n == x
        assert ctx.Q.group.is_identity(q)
    assert check_multiplication(ctx, 2).ok


def test_decomposition_exact(ctx):
    report = check_decomposition(ctx, pairs=100, R=2, seed=0)
    assert report.ok, report.witness
    assert report.decomposition_exact
    assert report.max_slice_gap <= 1e-9
    assert report.summary_line().endswith("mismatches: 0")


def test_decomposition_pieces(heisenberg_ctx):
    ctx = heisenberg_ctx
    f, g = random_pair(ctx, 2, np.random.default_rng(7))
    dec = decomposition_pieces(ctx, f, g)
    assert dec.total == convolve(f, g)
    assert slice_decompose(ctx, f, g) == convolve(f, g)
    # suportes das peças ficam em N
    for piece in list(dec.f_pieces.values()) + list(dec.g_pieces.values()):
        assert all(ctx.member(n) for n in piece)


def test_phi_psi_margins(torus_ctx):
    f, g = random_pair(torus_ctx, 2, np.random.default_rng(3))
    report = phi_psi_check(torus_ctx, f, g)
    assert report.ok, report.witness
    assert report.min_slice_margin >= -1e-9
    assert report.global_margin >= -1e-9


@pytest.mark.parametrize(
    "fixture,R,attained",
    [("heisenberg_ctx", 8, 3.0), ("bs_ctx", 8, 2.75), ("torus_ctx", 5, None)],
)
def test_length_inequality_factor_three(request, fixture, R, attained):
    ctx = request.getfixturevalue(fixture)
    report = length_inequality_check(ctx, R)
    assert report.ok
    assert 1.0 <= report.max_ratio <= 3.0
    if attained is not None:
        # máximo atingido em B_8; Heisenberg encosta na cota
        assert report.max_ratio == pytest.approx(attained, abs=1e-12)
    assert report.checked == build_ball(ctx.G, R).size - 1
    assert len(report.per_radius) == R + 1


def test_intrinsic_inequality_heisenberg(heisenberg_ctx):
    result = intrinsic_length_inequality(heisenberg_ctx, 6)
    assert result.skipped == 0
    assert 0.8 <= result.exponent <= 3.0
    assert result.constant >= 1.0


def test_collection_of_commutator(heisenberg_ctx):
    ctx = heisenberg_ctx
    alphabet = collect_alphabet(ctx)
    assert alphabet.n_count == 2
    assert [x.form for x in alphabet.letters[2:]] == [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)]
    acc, collected = cocycle_collect(ctx, (2, 4, 3, 5), alphabet)
    assert acc.form == (0, 0, 1)
    assert collected.ok
    assert collected.element == "0,0,1"
    assert [s.kind for s in collected.trace] == ["beta"] * 4


def test_collection_of_random_words(ctx):
    alphabet = collect_alphabet(ctx)
    words = random_kernel_words(ctx, 200, 10, np.random.default_rng(0), alphabet)
    assert len(words) == 200
    for w in words:
        assert len(w) <= 10
        acc, collected = cocycle_collect(ctx, w, alphabet)
        assert collected.ok, w
        assert ctx.member(acc)


def test_collection_rejects_nontrivial_image(heisenberg_ctx):
    with pytest.raises(NotInSubgroupError):
        cocycle_collect(heisenberg_ctx, (2,))


def test_heisenberg_cocycle_profiles(heisenberg):
    ctx = build_context(catalog_extension(heisenberg), 12, method="lift", ball_radius=6)
    prof = cocycle_profiles(ctx, 6, theta_radius=12)
    assert prof.theta_growth == [1] * 13
    assert prof.theta_class.kind == "polynomial"
    assert prof.theta_class.degree == 0.0
    # retângulo ⌊r/2⌋ x ⌈r/2⌉
    assert prof.amplitude == [r * r // 4 for r in range(13)]
    assert all(v <= n * n for n, v in enumerate(prof.amplitude))
    assert prof.amplitude_class.kind == "polynomial"
    assert 1.6 <= prof.amplitude_class.degree <= 2.2
    assert prof.unresolved == 0
    assert prof.ambient_ok


def test_bs_theta_growth_is_exponential(bs12):
    ctx = build_context(catalog_extension(bs12), 20, method="lift", ball_radius=3)
    prof = cocycle_profiles(ctx, 3, theta_radius=20, ambient=False)
    assert prof.theta_growth == [2 ** k for k in range(21)]
    assert prof.theta_class.kind == "exponential"
    assert prof.theta_class.rate == pytest.approx(math.log(2), abs=0.01)
    assert prof.amplitude == [0] * 7
    # θ(-k)(a) = a^(2^-k) sai de ⟨a⟩
    assert prof.unresolved > 0


def test_cocycle_profiles_need_section_radius(heisenberg_ctx):
    with pytest.raises(OutOfTableError):
        cocycle_profiles(heisenberg_ctx, 6)
