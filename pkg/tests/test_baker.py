import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ibt import IbtMap, NearCutError, SquarePoint, build_factor, iterate, jacobian_det, make_beta_icf, step


@pytest.fixture(scope="module")
def m11():
    return IbtMap(build_factor(make_beta_icf(1.0, 1.0)))


@pytest.fixture(scope="module")
def m22():
    return IbtMap(build_factor(make_beta_icf(2.0, 2.0)))


def test_unit_jacobian(m11, m22):
    rng = np.random.default_rng(11)
    for m in (m11, m22):
        xs = rng.uniform(0.0, 1.0, 10000)
        ys = rng.uniform(0.0, 1.0, 10000)
        dets = np.array([jacobian_det(m, SquarePoint(x, y)) for x, y in zip(xs, ys)])
        assert np.max(np.abs(dets - 1.0)) < 1e-10


def test_fiber_map_is_affine_in_y(m11):
    # for fixed x the fiber map y -> g_x(y) is affine with slope phi or 1-phi
    x = 0.3
    ys = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    imgs = np.array([step(m11, SquarePoint(x, y)).y for y in ys])
    slopes = np.diff(imgs) / np.diff(ys)
    assert np.max(np.abs(slopes - slopes[0])) < 1e-12


def test_two_fibers_tile_the_square(m11):
    # left-half and right-half fibers over the same image x' partition [0,1]
    fm = m11.fm
    s = 0.42
    xl, xr = float(fm.w0_eval(s)), float(fm.w1_eval(s))
    top_left = step(m11, SquarePoint(xl, 1.0)).y
    bot_right = step(m11, SquarePoint(xr, 0.0)).y
    assert top_left == pytest.approx(bot_right, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(x=st.floats(1e-3, 1 - 1e-3), y=st.floats(0.0, 1.0))
def test_step_stays_in_square(m22, x, y):
    try:
        pt = step(m22, SquarePoint(x, y))
    except NearCutError:
        return
    assert 0.0 <= pt.x <= 1.0
    assert 0.0 <= pt.y <= 1.0


def test_iterate_length_and_continuity(m11):
    traj = iterate(m11, SquarePoint(0.3721, 0.44), 200)
    assert len(traj) == 201
    for k in range(200):
        nxt = step(m11, traj[k])
        assert nxt.x == traj[k + 1].x
        assert nxt.y == traj[k + 1].y


def test_near_cut_error_carries_index(m11):
    # (0.375, .) maps onto the cut abscissa exactly for this family
    with pytest.raises(NearCutError) as exc:
        iterate(m11, SquarePoint(0.375, 0.5), 10)
    assert exc.value.index is not None
