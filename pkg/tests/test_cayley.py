from __future__ import annotations

import pytest
from sqlalchemy import update
from sqlalchemy.orm import Session

import db
from groups.base import marking_by
from lib.cayley import (
    build_ball,
    check_metric,
    clear_memo,
    domination_profile,
    geodesic_word,
    growth,
    resolve_length,
    word_length,
)
from lib.errors import BudgetExceededError, OutOfTableError, UnknownLengthError, UsageError


def test_sizes_free_abelian(z1, z2):
    t1 = build_ball(z1, 6)
    assert growth(t1).sizes == [2 * n + 1 for n in range(7)]
    t2 = build_ball(z2, 6)
    assert growth(t2).sizes == [2 * n * n + 2 * n + 1 for n in range(7)]


def test_sizes_free_group(f2):
    seq = growth(build_ball(f2, 5))
    assert seq.sphere_sizes == [1] + [4 * 3 ** (n - 1) for n in range(1, 6)]
    assert seq.sizes[3] == 53


@pytest.mark.parametrize(
    "fixture,expected",
    [
        ("heisenberg", [1, 4, 12, 36]),
        ("bs12", [1, 4, 12]),
        ("lamplighter", [1, 3, 6]),
    ],
)
def test_small_sphere_sizes(request, fixture, expected):
    g = request.getfixturevalue(fixture)
    seq = growth(build_ball(g, len(expected) - 1))
    assert seq.sphere_sizes == expected


def test_growth_rows(z1):
    rows = list(growth(build_ball(z1, 2)).rows())
    assert rows == [(0, 1, 1), (1, 3, 2), (2, 5, 2)]


def test_bfs_order_is_deterministic(heisenberg):
    clear_memo()
    first = build_ball(heisenberg, 4)
    clear_memo()
    second = build_ball(heisenberg, 4)
    assert [x.form for x in first.elements] == [x.form for x in second.elements]
    assert (first.step == second.step).all()


def test_step_table_is_right_multiplication(bs12):
    t = build_ball(bs12, 4)
    g = bs12.group
    for i, x in enumerate(t.ball(3)):
        for j, s in enumerate(bs12.generators):
            assert t.elements[t.step[i, j]] == g.mul(x, s)
    outer = t.step[t.sphere_slice(4)]
    assert (outer == -1).any()
    assert (t.step[: t.ball_size(3)] >= 0).all()


def test_truncate_matches_direct_build(f2):
    big = build_ball(f2, 5, cache=False)
    small = big.truncate(3)
    direct = build_ball(f2, 3, cache=False)
    assert [x.form for x in small.elements] == [x.form for x in direct.elements]
    assert (small.step == direct.step).all()
    assert small.radius == 3


def test_geodesic_words(heisenberg):
    t = build_ball(heisenberg, 4)
    for x in t.elements:
        w = geodesic_word(t, x)
        assert len(w) == t.length_of(x)
        assert heisenberg.evaluate(w) == x
    with pytest.raises(OutOfTableError):
        geodesic_word(t, heisenberg.group.central(100))


def test_heisenberg_center_lengths(heisenberg):
    x, x_inv, y, y_inv = heisenberg.generators
    z = heisenberg.mul(heisenberg.mul(x, y), heisenberg.mul(x_inv, y_inv))
    assert z == heisenberg.group.central(1)
    t = build_ball(heisenberg, 4)
    assert t.length_of(z) == 4
    assert word_length(build_ball(heisenberg, 2), z) == 4
    # ℓ(zᵏ) = 2⌈2√k⌉
    assert [word_length(t, heisenberg.group.central(k)) for k in (2, 3, 4)] == [6, 8, 8]


def test_meet_in_the_middle_lengths(heisenberg):
    big = build_ball(heisenberg, 6)
    small = build_ball(heisenberg, 3)
    for x in big.elements[small.size:]:
        assert word_length(small, x) == big.length_of(x)


def test_unknown_length_beyond_twice_radius(heisenberg):
    t = build_ball(heisenberg, 2)
    far = heisenberg.group.central(100)
    assert word_length(t, far) is None
    with pytest.raises(UnknownLengthError):
        resolve_length(t, far)


def test_exact_length_used_outside_table(f2):
    t = build_ball(f2, 2)
    far = f2.group.element((1, 2, 1, 2, 1, 2, 1))
    assert word_length(t, far) == 7


def test_negative_radius(z1):
    with pytest.raises(UsageError):
        build_ball(z1, -1)


def test_budget_reports_completed_radius(f2):
    with pytest.raises(BudgetExceededError) as info:
        build_ball(f2, 10, max_elements=100, cache=False)
    assert info.value.completed_radius == 3
    partial = info.value.partial
    assert partial.radius == 3
    assert partial.size == 53


def test_metric_properties(bs12):
    check = check_metric(build_ball(bs12, 6))
    assert check.symmetric and check.triangle
    assert check.pairs_checked > 0


def test_disk_cache_round_trip(tmp_path, heisenberg):
    clear_memo()
    built = build_ball(heisenberg, 4, cache_dir=tmp_path)
    assert (tmp_path / db.CACHE_FILENAME).exists()
    clear_memo()
    loaded = build_ball(heisenberg, 4, cache_dir=tmp_path)
    assert loaded is not built
    assert [x.form for x in loaded.elements] == [x.form for x in built.elements]
    assert (loaded.step == built.step).all()
    assert (loaded.parent == built.parent).all()
    clear_memo()


def test_corrupt_cache_is_rebuilt(tmp_path, lamplighter):
    clear_memo()
    built = build_ball(lamplighter, 3, cache_dir=tmp_path)
    with Session(db.get_engine(tmp_path)) as session, session.begin():
        session.execute(update(db.BallRecord).values(steps=b"garbage"))
    clear_memo()
    rebuilt = build_ball(lamplighter, 3, cache_dir=tmp_path)
    assert [x.form for x in rebuilt.elements] == [x.form for x in built.elements]
    assert (rebuilt.step == built.step).all()
    clear_memo()


def test_domination_of_equivalent_markings(z1):
    g = z1.group
    two = marking_by(
        g,
        [g.element((1,)), g.element((-1,)), g.element((2,)), g.element((-2,))],
        ["a", "A", "b", "B"],
    )
    profile = domination_profile(build_ball(z1, 20), build_ball(two, 20), min_radius=4)
    assert profile.equivalent
    assert profile.radius == 20
    assert 0.9 <= profile.exponent <= 1.25


def test_domination_rejects_different_groups(z1, f2):
    with pytest.raises(UsageError):
        domination_profile(build_ball(z1, 2), build_ball(f2, 2))
