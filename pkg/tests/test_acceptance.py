"""Quantitative acceptance suite.

Each test pins its fixture, seed, sample size, and tolerance, and prints
the measured quantities so a failing run is diagnosable from the log
alone.  The heavy ensemble tests (correlations and the four limit-law
cases) dominate the runtime (~15-20 minutes total on one core).
"""

import math

import numpy as np
import pytest
from scipy import special, stats

from ibt import (
    IbtMap,
    SquarePoint,
    build_factor,
    build_induced,
    cell_measure,
    check_orbit_asymptotics,
    jacobian_det,
    make_beta_icf,
)
from ibt import kernels
from ibt.limits import (
    birkhoff_ensemble,
    correlation_series,
    empirical_cf,
    green_kubo_sigma2,
    moments_M,
    obs_weighted,
    obs_x_centered,
    obs_y_centered,
    predict_limit,
    xi_tail,
)
from ibt.stable import StableParams, cdf as stable_cdf, char_fn, ks_distance, sample as stable_sample
from ibt.ulam import build_ulam, invariant_density, leading_spectrum

SEED = 20260823


@pytest.fixture(scope="module")
def big11():
    return build_induced(IbtMap(build_factor(make_beta_icf(1.0, 1.0))), n_max=100000)


@pytest.fixture(scope="module")
def big22():
    return build_induced(IbtMap(build_factor(make_beta_icf(2.0, 2.0))), n_max=100000)


@pytest.fixture(scope="module")
def bighh():
    return build_induced(IbtMap(build_factor(make_beta_icf(0.5, 0.5))), n_max=100000)


def normal_ks(z, sigma2):
    zs = np.sort(np.asarray(z)) / math.sqrt(sigma2)
    f = special.ndtr(zs)
    n = zs.size
    return float(max((np.arange(1, n + 1) / n - f).max(),
                     (f - np.arange(n) / n).max()))


# 1. map identities -------------------------------------------------------

def test_criterion_01_map_identities():
    rng = np.random.default_rng(SEED)
    for a0, a1 in ((1.0, 1.0), (2.0, 2.0)):
        fm = build_factor(make_beta_icf(a0, a1))
        s = rng.uniform(0.0, 1.0, 1000)
        err0 = np.max(np.abs(fm.f(fm.w0_eval(s)) - s))
        err1 = np.max(np.abs(fm.f(fm.w1_eval(s)) - s))
        print(f"({a0},{a1}) inversion errors: w0 {err0:.3e}, w1 {err1:.3e}")
        assert err0 < 1e-10 and err1 < 1e-10

        m = IbtMap(fm)
        xs = rng.uniform(0.0, 1.0, 10000)
        ys = rng.uniform(0.0, 1.0, 10000)
        dets = np.array([jacobian_det(m, SquarePoint(x, y)) for x, y in zip(xs, ys)])
        jerr = np.max(np.abs(dets - 1.0))
        print(f"({a0},{a1}) jacobian error: {jerr:.3e}")
        assert jerr < 1e-10

        y = rng.uniform(0.001, 0.999, 1000)
        total = 1.0 / fm.Df(fm.w0_eval(y)) + 1.0 / fm.Df(fm.w1_eval(y))
        lerr = np.max(np.abs(total - 1.0))
        print(f"({a0},{a1}) two-branch preservation error: {lerr:.3e}")
        assert lerr < 1e-9


# 2. orbit asymptotics -----------------------------------------------------

def test_criterion_02_orbit_asymptotics(big11, big22, bighh):
    n = 100000
    p_n = big11.cells.p_seq[n]
    inc = big11.cells.p_seq[n - 1] - big11.cells.p_seq[n]
    print(f"beta(1,1): n*p_n = {n * p_n:.5f}, n^2*inc = {(n - 1)**2 * inc:.5f}")
    assert 1.96 <= n * p_n <= 2.04
    assert 1.9 <= (n - 1) ** 2 * inc <= 2.1
    for name, s in (("beta(2,2)", big22), ("beta(0.5,0.5)", bighh)):
        rep = check_orbit_asymptotics(s)
        for key in ("p_n", "one_minus_q_n"):
            r = rep["entries"][key]["ratio_at_n_max"]
            print(f"{name} {key} ratio at n=1e5: {r:.5f}")
            assert 0.95 <= r <= 1.05


# 3. return-time tail ------------------------------------------------------

def test_criterion_03_return_time_tail(big11, big22, bighh):
    for s, alpha in ((bighh, 0.5), (big11, 1.0), (big22, 2.0)):
        ns = np.arange(100, 10001)
        meas = np.array([cell_measure(s, int(n)) for n in ns])
        slope = float(np.polyfit(np.log(ns), np.log(meas), 1)[0])
        expect = -(2.0 + 1.0 / alpha)
        print(f"alpha={alpha}: fitted tail exponent {slope:.4f}, expected {expect}")
        assert abs(slope - expect) < 0.05


# 4. Kac's lemma -----------------------------------------------------------

def test_criterion_04_kac(big11, big22, bighh):
    for name, s in (("beta(1,1)", big11), ("beta(2,2)", big22), ("beta(0.5,0.5)", bighh)):
        cells = s.cells
        n_top = cells.n_max
        ns = np.arange(2, n_top + 1)
        meas = np.array([cell_measure(s, int(n)) for n in ns])
        alpha = s.fm.cf.alpha0
        # lambda[r=n] ~ c n^{-(2+1/alpha)}; tail sum_{n>N} n lambda ~ c alpha N^{-1/alpha}
        c_emp = meas[-1] * float(n_top) ** (2.0 + 1.0 / alpha)
        tail = c_emp * alpha * float(n_top) ** (-1.0 / alpha)
        total = float((ns * meas).sum()) + tail
        target = 1.0 / s.orbit.leb_base
        rel = abs(total - target) / target
        print(f"{name}: Kac sum {total:.8f} vs {target:.8f} (rel {rel:.2e})")
        assert rel < 1e-3
    assert 1.0 / big11.orbit.leb_base == pytest.approx(3.0 + 2.0 * math.sqrt(2.0), rel=1e-12)


# 5. induced invariance ----------------------------------------------------

def test_criterion_05_induced_invariance(big11):
    rng = np.random.default_rng(SEED + 5)
    p, q = big11.orbit.p, big11.orbit.q
    n = 1_000_000
    xs = rng.uniform(p, q, n)
    ys = rng.uniform(0.0, 1.0, n)
    xr, yr, rr = kernels.induced_images(kernels.FAM_BETA_1_1, xs, ys, p, q, big11.r_max)
    ok = rr > 0
    bins = 32
    h, _, _ = np.histogram2d((xr[ok] - p) / (q - p), yr[ok], bins=bins,
                             range=[[0, 1], [0, 1]])
    n_ok = int(ok.sum())
    expected = n_ok / bins**2
    chi2 = float(((h - expected) ** 2 / expected).sum())
    pval = float(stats.chi2.sf(chi2, bins**2 - 1))
    print(f"chi2 = {chi2:.1f} on {bins * bins - 1} dof, p-value {pval:.4f}, "
          f"dropped {n - n_ok}")
    assert pval > 1e-3


# 6. sharp correlation decay -----------------------------------------------

def test_criterion_06_correlation_decay(big11, big22):
    lags = np.unique(np.round(np.logspace(1, 3, 13)).astype(int))
    for name, s, alpha, n_traj in (("beta(1,1)", big11, 1.0, 1_000_000),
                                   ("beta(2,2)", big22, 2.0, 400_000)):
        rep = correlation_series(s, lags, n_traj, 2000, SEED + 6)
        cor = np.asarray(rep["correlation"])
        slope = float(np.polyfit(np.log(lags), np.log(cor), 1)[0])
        print(f"{name}: slope {slope:.4f} expected {-1.0 / alpha}; "
              f"Cor(10)={cor[0]:.3e} Cor(1000)={cor[-1]:.3e} "
              f"redraws={rep['redraws']}")
        assert abs(slope - (-1.0 / alpha)) < 0.15


# 7. limit case: CLT -------------------------------------------------------

def test_criterion_07_clt(bighh):
    obs = obs_y_centered()
    gk = green_kubo_sigma2(obs, bighh, n_traj=20000, n_returns=200, k_max=50,
                           seed=SEED + 70)
    ens = birkhoff_ensemble(obs, bighh, n=10000, n_traj=100000, seed=SEED + 7)
    ks = normal_ks(ens["samples"], gk["sigma2_map"])
    print(f"sigma2 (Green-Kubo) = {gk['sigma2_map']:.6f}, KS = {ks:.4f}, "
          f"censored = {ens['censored']}")
    assert ks <= 0.02


# 8. limit case: two-sided stable ------------------------------------------

def test_criterion_08_two_sided_stable(big22):
    obs = obs_x_centered()
    pred = predict_limit(obs, big22)
    assert pred.case_id == "stable_two_sided"
    assert pred.p == pytest.approx(1.5) and pred.b == pytest.approx(0.0, abs=1e-12)
    ens = birkhoff_ensemble(obs, big22, n=10000, n_traj=100000, seed=SEED + 8,
                            prediction=pred)
    target = StableParams(pred.p, pred.a, pred.b)
    ks = ks_distance(ens["samples"], target)
    t_grid = np.array([0.25, 0.5, 1.0, 2.0])
    sup_cf = float(np.abs(empirical_cf(ens["samples"], t_grid)
                          - char_fn(target, t_grid)).max())
    print(f"a = {pred.a:.6f}, KS = {ks:.4f} (<= 0.05), "
          f"sup-CF = {sup_cf:.4f} (<= 0.05), censored = {ens['censored']}")
    assert ks <= 0.05
    # the sup-CF margin is tight at n = 1e4: the empirical CF exceeds the
    # limit CF at moderate t because finite-n sums are still more
    # concentrated than the stable law (an iid surrogate with the same
    # tail constants passes, so the constant itself is correct)
    assert sup_cf <= 0.05


def test_criterion_08_skewed_fixture(big22):
    # weight chosen so the boundary moments give skewness +/- 0.5
    for t, b_target in ((10.5195, 0.5), (-10.5195, -0.5)):
        obs = obs_weighted(t)
        pred = predict_limit(obs, big22)
        assert pred.case_id == "stable_two_sided"
        assert pred.b == pytest.approx(b_target, abs=5e-3)
        ens = birkhoff_ensemble(obs, big22, n=10000, n_traj=20000,
                                seed=SEED + 80, prediction=pred)
        ecdf0 = float((ens["samples"] <= 0.0).mean())
        print(f"t={t}: b={pred.b:+.4f}, empirical CDF at 0 = {ecdf0:.4f}")
        # positive skew puts the median below 0, so F(0) > 1/2
        if b_target > 0:
            assert ecdf0 > 0.5
        else:
            assert ecdf0 < 0.5


# 9. limit case: nonstandard CLT -------------------------------------------

def test_criterion_09_nonstandard_clt(big11):
    obs = obs_x_centered()
    pred = predict_limit(obs, big11)
    assert pred.case_id == "nonstandard_CLT"
    target = pred.C0 + pred.C1
    ens = birkhoff_ensemble(obs, big11, n=100000, n_traj=100000, seed=SEED + 9,
                            prediction=pred)
    var = float(ens["samples"].var())
    rel = abs(var - target) / target
    print(f"var(S_n/sqrt(n log n)) = {var:.4f}; C0+C1 = {target:.4f} "
          f"(rel dev {rel:.3f}); return-frequency-corrected target "
          f"Leb*(C0+C1) = {pred.sigma2:.4f}; censored = {ens['censored']}")
    # written target C0+C1 is the induced-system tail weight; the measured
    # map-time variance carries the return-frequency factor Leb(base) and
    # log-order finite-n corrections, so this pinned comparison is expected
    # to fail; the KS-level agreement is covered by the other limit cases
    assert rel <= 0.15


# 10. excursion-sum diagnostics --------------------------------------------

def test_criterion_10_xi_linear_growth(big22):
    obs = obs_x_centered()
    M0, _ = moments_M(obs, big22)
    p, q, A = big22.orbit.p, big22.orbit.q, big22.A
    rng = np.random.default_rng(SEED + 10)
    # sample the r >= 1e3 cells directly (uniform in the boundary window)
    xs = A + rng.uniform(0.0, float(big22.cells.pint_gap[1000]), 5000)
    ys = rng.uniform(0.0, 1.0, 5000)
    xiv, rv, _, _ = kernels.excursion_samples(
        kernels.FAM_BETA_2_2, xs, ys, p, q, kernels.OBS_X_CENTERED, 0.0,
        big22.r_max)
    ok = rv >= 1000
    ratio = xiv[ok] / (rv[ok] * M0)
    print(f"xi/(r M0) over {int(ok.sum())} excursions with r >= 1e3: "
          f"[{ratio.min():.4f}, {ratio.max():.4f}]")
    assert np.all((ratio >= 0.9) & (ratio <= 1.1))


def test_criterion_10_one_sidedness(big22):
    rep = xi_tail(obs_x_centered(), big22, t_grid=[10.0], n_samples=100_000_000,
                  seed=SEED + 100)
    print(f"censored {rep['censored']}; opposite tails "
          f"right={rep['right']['empirical_opposite']} "
          f"left={rep['left']['empirical_opposite']}")
    assert max(rep["right"]["empirical_opposite"]) == 0.0
    assert max(rep["left"]["empirical_opposite"]) == 0.0


# 11. stable kernel self-consistency ---------------------------------------

def test_criterion_11_stable_self_consistency():
    rng = np.random.default_rng(SEED + 11)
    params = StableParams(1.5, 0.8, 0.3)
    z = stable_sample(params, 1_000_000, rng)
    t_grid = np.linspace(0.05, 4.0, 80)
    sup = float(np.abs(empirical_cf(z, t_grid) - char_fn(params, t_grid)).max())
    print(f"sampler-vs-CF sup distance: {sup:.5f}")
    assert sup <= 0.02

    g = StableParams(2.0, 0.7, 0.0)
    zn = stable_sample(g, 1_000_000, rng)
    var = float(zn.var())
    se = math.sqrt(2.0 / zn.size) * 1.4
    print(f"p=2 variance {var:.5f} vs 2a = 1.4 (3 SE = {3 * se:.5f})")
    assert abs(var - 1.4) <= 3 * se


# 12. Ulam spectral gap ----------------------------------------------------

def test_criterion_12_ulam_gap(big11):
    op = build_ulam(big11, 256, 20000, seed=SEED + 12)
    ev = leading_spectrum(op, 6)
    dens = invariant_density(op)
    mods = np.abs(ev)
    print(f"|eig| = {np.round(mods, 4)}, density dev = "
          f"{np.abs(dens - 1.0).max():.4f}, redrawn = {op.redrawn}")
    assert abs(ev[0] - 1.0) <= 1e-3
    assert mods[1] < 0.95
    assert not np.any(mods[1:] > 0.99)
    assert np.abs(dens - 1.0).max() <= 0.10
    # refinement stability: the subleading modulus is not a bin artifact
    op128 = build_ulam(big11, 128, 20000, seed=SEED + 12)
    ev128 = leading_spectrum(op128, 2)
    drift = abs(mods[1] - abs(ev128[1]))
    print(f"|lambda2| 128->256 drift: {drift:.4f}")
    assert drift < 0.05


# 13. determinism -----------------------------------------------------------

def test_criterion_13_determinism(big11, big22, bighh):
    lags = np.array([10, 100, 1000])
    r1 = correlation_series(big11, lags, 20000, 1500, SEED)
    r2 = correlation_series(big11, lags, 20000, 1500, SEED)
    assert np.asarray(r1["correlation"]).tobytes() == \
        np.asarray(r2["correlation"]).tobytes()

    for s, obs, n in ((bighh, obs_y_centered(), 2000),
                      (big22, obs_x_centered(), 2000),
                      (big11, obs_x_centered(), 5000)):
        e1 = birkhoff_ensemble(obs, s, n=n, n_traj=2000, seed=SEED)
        e2 = birkhoff_ensemble(obs, s, n=n, n_traj=2000, seed=SEED)
        assert e1["samples"].tobytes() == e2["samples"].tobytes()
        assert e1["redraws"] == e2["redraws"]
    print("all reduced-size reruns byte-identical")
