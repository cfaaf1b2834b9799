import numpy as np
import pytest

from ibt import InvalidParameterError, SquarePoint, iterate, make_beta_icf
from ibt import kernels


def test_family_codes(sys11, sys22, syshh, sys21):
    assert kernels.family_code(sys11.fm.cf) == kernels.FAM_BETA_1_1
    assert kernels.family_code(sys22.fm.cf) == kernels.FAM_BETA_2_2
    assert kernels.family_code(syshh.fm.cf) == kernels.FAM_BETA_H_H
    with pytest.raises(InvalidParameterError):
        kernels.family_code(sys21.fm.cf)


def test_factor_step_matches_object_layer(sys11, sys22, syshh):
    rng = np.random.default_rng(13)
    for s in (sys11, sys22, syshh):
        fam = kernels.family_code(s.fm.cf)
        xs = rng.uniform(1e-4, 1.0 - 1e-4, 500)
        for x in xs:
            if abs(x - 0.5) < 1e-9:
                continue
            fx, ph = kernels.factor_step(fam, float(x))
            assert fx == pytest.approx(float(s.fm.f(x)), abs=2e-9)
            assert ph == pytest.approx(float(s.fm.cf.phi(fx)), abs=2e-9)


def test_factor_step_exact_endpoints_and_symmetry(sys11):
    fam = kernels.FAM_BETA_1_1
    assert kernels.factor_step(fam, 0.0) == (0.0, 1.0)
    assert kernels.factor_step(fam, 1.0) == (1.0, 0.0)
    # symmetric family: f(1-x) = 1 - f(x) holds exactly by reflection
    for x in (0.6, 0.73, 0.9999):
        fl, _ = kernels.factor_step(fam, 1.0 - x)
        fr, _ = kernels.factor_step(fam, x)
        assert fr == 1.0 - fl


def test_trajectory_matches_object_layer_short(sys22):
    # chaotic divergence limits comparison to short horizons
    fam = kernels.family_code(sys22.fm.cf)
    x0, y0 = 0.3721, 0.44
    xs, ys, hit = kernels.trajectory(fam, x0, y0, 20)
    assert hit == -1
    traj = iterate(sys22.m, SquarePoint(x0, y0), 20)
    for k in range(21):
        assert xs[k] == pytest.approx(traj[k].x, abs=1e-7)
        assert ys[k] == pytest.approx(traj[k].y, abs=1e-7)


def test_return_times_match_table(sys11):
    from ibt import return_time
    fam = kernels.FAM_BETA_1_1
    p, q = sys11.orbit.p, sys11.orbit.q
    rng = np.random.default_rng(19)
    xs = rng.uniform(p, q, 2000)
    rr = kernels.return_times(fam, xs, p, q, sys11.r_max)
    for x, r in zip(xs, rr):
        assert r == return_time(sys11, float(x))


def test_induced_images_land_in_base(sys22):
    fam = kernels.FAM_BETA_2_2
    p, q = sys22.orbit.p, sys22.orbit.q
    rng = np.random.default_rng(29)
    xs = rng.uniform(p, q, 5000)
    ys = rng.uniform(0.0, 1.0, 5000)
    xr, yr, rr = kernels.induced_images(fam, xs, ys, p, q, sys22.r_max)
    ok = rr > 0
    assert ok.mean() > 0.999
    assert np.all((xr[ok] >= p) & (xr[ok] <= q))
    assert np.all((yr[ok] >= 0.0) & (yr[ok] <= 1.0))


def test_birkhoff_sums_deterministic(sys11):
    fam = kernels.FAM_BETA_1_1
    rng1 = np.random.default_rng(3)
    x0 = rng1.uniform(0, 1, 100)
    y0 = rng1.uniform(0, 1, 100)
    sx = rng1.uniform(0, 1, 100)
    sy = rng1.uniform(0, 1, 100)
    out1 = kernels.birkhoff_sums(fam, x0, y0, 500, kernels.OBS_X_CENTERED, 0.0, sx, sy)
    out2 = kernels.birkhoff_sums(fam, x0.copy(), y0.copy(), 500,
                                 kernels.OBS_X_CENTERED, 0.0, sx.copy(), sy.copy())
    assert np.array_equal(out1[0], out2[0])
    assert out1[1] == out2[1] and out1[2] == out2[2]


def test_excursion_samples_return_flags(sys22):
    fam = kernels.FAM_BETA_2_2
    p, q = sys22.orbit.p, sys22.orbit.q
    rng = np.random.default_rng(41)
    xs = rng.uniform(p, q, 10000)
    ys = rng.uniform(0.0, 1.0, 10000)
    xiv, rv, xret, yret = kernels.excursion_samples(
        fam, xs, ys, p, q, kernels.OBS_X_CENTERED, 0.0, sys22.r_max)
    ok = rv > 0
    assert ok.mean() > 0.999
    assert np.all((xret[ok] >= p) & (xret[ok] <= q))
    # excursion sums of 1/2 - x are bounded by r/2 in absolute value
    assert np.all(np.abs(xiv[ok]) <= 0.5 * rv[ok] + 1e-12)
