"""Observables, the induced excursion sum xi, limit-law constants, and
ensemble experiments for the distributional limit theorems.

For a mean-zero observable X on the square, the excursion sum over one
return to the base is

    xi(x, y) = sum_{k=0}^{r(x)-1} X(B^k(x, y)).

Its conditional tails under the normalized base measure are power laws
with index 1 + 1/alpha_j, tail weights C_j built from the endpoint
averages

    M_0 = int_0^1 X(0, y^{1+1/alpha_0}) dy,
    M_1 = int_0^1 X(1, y^{1+1/alpha_1}) dy.

Limit-law targets for Birkhoff sums of B carry the return-frequency
(Kac) factor Leb(base): n steps of B contain about n*Leb(base) returns,
so the induced-system tail constants enter the stable scale and the
nonstandard-CLT variance multiplied by Leb(base).  This conversion was
validated against an iid heavy-tail surrogate and against direct
ensemble simulation; see the acceptance tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, special

from . import kernels
from .baker import SquarePoint, step
from .errors import DomainError, InvalidParameterError, NearCutError, TailOverflowError
from .induced import InducedSystem, return_time

__all__ = [
    "Observable",
    "LimitPrediction",
    "obs_y_centered",
    "obs_x_centered",
    "obs_weighted",
    "moments_M",
    "constants_C",
    "xi",
    "xi_tail",
    "correlation",
    "correlation_series",
    "predict_limit",
    "birkhoff_ensemble",
    "green_kubo_sigma2",
    "empirical_cf",
]


@dataclass(frozen=True)
class Observable:
    """A Holder observable X(x, y) on the unit square.

    ``eval`` must be vectorized; ``gamma`` is the declared Holder
    exponent.  ``kernel_code`` (with weight ``kernel_t``) marks the
    observable as one of the compiled-kernel forms; ensemble operations
    require it, pointwise ones do not.
    """

    eval: Callable[[np.ndarray, np.ndarray], np.ndarray]
    gamma: float = 1.0
    mean_zero: bool = True
    kernel_code: Optional[int] = None
    kernel_t: float = 0.0
    name: str = "custom"

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise InvalidParameterError(f"gamma must lie in (0,1], got {self.gamma!r}")
        if self.mean_zero:
            total, err = integrate.dblquad(
                lambda y, x: float(np.asarray(self.eval(x, y))),
                0.0, 1.0, 0.0, 1.0, epsabs=1e-9
            )
            if abs(total) > 1e-6:
                raise InvalidParameterError(
                    f"observable declared mean-zero but integrates to {total:g}"
                )


def obs_y_centered() -> Observable:
    return Observable(eval=lambda x, y: np.asarray(y) - 0.5,
                      kernel_code=kernels.OBS_Y_CENTERED, name="y_centered")


def obs_x_centered() -> Observable:
    return Observable(eval=lambda x, y: 0.5 - np.asarray(x),
                      kernel_code=kernels.OBS_X_CENTERED, name="x_centered")


def obs_weighted(t: float) -> Observable:
    """x-centered plus a centered quadratic y-weight.

    A linear y-weight is antisymmetric under (x,y) -> (1-x,1-y) on
    symmetric cut functions, forcing equal tail weights on both boundary
    lines; the quadratic weight breaks that symmetry so the skewness of
    the stable limit can be tuned through t.
    """
    return Observable(
        eval=lambda x, y: (0.5 - np.asarray(x))
        + t * ((np.asarray(y) - 0.5) ** 2 - 1.0 / 12.0),
        kernel_code=kernels.OBS_WEIGHTED, kernel_t=float(t),
        name=f"weighted[{t}]")


@dataclass(frozen=True)
class LimitPrediction:
    case_id: str          # CLT | stable_one_sided | stable_two_sided | nonstandard_CLT | out_of_scope
    norming: str          # sqrt(n) | n^{alpha/(alpha+1)} | sqrt(n log n) | none
    p: Optional[float] = None
    a: Optional[float] = None        # stable scale for Birkhoff sums of B
    b: Optional[float] = None
    sigma2: Optional[float] = None   # normal variance for Birkhoff sums of B
    M0: float = 0.0
    M1: float = 0.0
    C0: float = 0.0
    C1: float = 0.0
    notes: str = ""

    def norm_factor(self, n: int) -> float:
        if self.norming == "sqrt(n)":
            return math.sqrt(n)
        if self.norming == "sqrt(n log n)":
            return math.sqrt(n * math.log(n))
        if self.norming.startswith("n^"):
            alpha = 1.0 / (self.p - 1.0)  # p = 1 + 1/alpha
            return float(n) ** (alpha / (alpha + 1.0))
        raise DomainError(f"no norming defined for case {self.case_id}")


def moments_M(obs: Observable, sys: InducedSystem):
    """Boundary-line excursion averages (M0, M1) by adaptive quadrature.

    Along an excursion of length n near x = 0 the fiber coordinate
    follows y_k ~ (1 - k/n)^(1 + 1/alpha0) (it enters at y ~ 1 and
    contracts toward the invariant line y = 0), so the time average of X
    is M0 = int_0^1 X(0, y^(1+1/alpha0)) dy.  Near x = 1 the fiber
    contracts toward y = 1 instead, entering at y ~ 0, so the profile is
    the complement: M1 = int_0^1 X(1, 1 - y^(1+1/alpha1)) dy.
    """
    cf = sys.fm.cf
    e0 = 1.0 + 1.0 / cf.alpha0
    e1 = 1.0 + 1.0 / cf.alpha1
    m0, err0 = integrate.quad(
        lambda y: float(np.asarray(obs.eval(0.0, y**e0))), 0.0, 1.0,
        epsabs=1e-12, epsrel=1e-12, limit=200)
    m1, err1 = integrate.quad(
        lambda y: float(np.asarray(obs.eval(1.0, 1.0 - y**e1))), 0.0, 1.0,
        epsabs=1e-12, epsrel=1e-12, limit=200)
    if max(err0, err1) > 1e-10:
        raise DomainError(f"moment quadrature error too large: {err0:g}, {err1:g}")
    return m0, m1


def constants_C(M0: float, M1: float, sys: InducedSystem):
    """Tail weights of xi under the normalized base measure.

    C_j = |M_j| / (alpha_j Leb(base)) * (|M_j| (alpha_j+1)/(c_j alpha_j))^(1/alpha_j),
    zero when the corresponding M vanishes.
    """
    cf = sys.fm.cf
    leb = sys.orbit.leb_base

    def one(mj, aj, cj):
        if mj == 0.0:
            return 0.0
        m = abs(mj)
        return m / (aj * leb) * (m * (aj + 1.0) / (cj * aj)) ** (1.0 / aj)

    return one(M0, cf.alpha0, cf.c0), one(M1, cf.alpha1, cf.c1)


def xi(obs: Observable, sys: InducedSystem, pt: SquarePoint) -> float:
    """Excursion sum of the observable from a base point to first return."""
    r = return_time(sys, pt.x)
    cur = SquarePoint(*pt)
    total = 0.0
    for k in range(r):
        total += float(np.asarray(obs.eval(cur.x, cur.y)))
        try:
            cur = step(sys.m, cur)
        except NearCutError as exc:
            raise NearCutError(exc.x, index=k) from None
    return total


def _require_kernel(obs: Observable) -> int:
    if obs.kernel_code is None:
        raise InvalidParameterError(
            f"observable {obs.name!r} has no compiled form; ensemble operations "
            "need one of the kernel observables"
        )
    return obs.kernel_code


def xi_tail(obs: Observable, sys: InducedSystem, t_grid, n_samples: int,
            seed: int, chunk: int = 1_000_000) -> dict:
    """Empirical conditional tails of xi per side versus the predicted
    power laws.  Counts lambda[xi > t, side] and lambda[xi < -t, side]
    for each t, streamed in chunks of base-uniform samples.
    """
    fam = kernels.family_code(sys.fm.cf)
    code = _require_kernel(obs)
    t_grid = np.asarray(t_grid, dtype=float)
    M0, M1 = moments_M(obs, sys)
    C0, C1 = constants_C(M0, M1, sys)
    p, q = sys.orbit.p, sys.orbit.q
    A = sys.A
    rng = np.random.default_rng(seed)
    counts = {  # [side][sign] -> per-t counts
        "right": {"pos": np.zeros_like(t_grid, dtype=np.int64),
                  "neg": np.zeros_like(t_grid, dtype=np.int64), "n": 0},
        "left": {"pos": np.zeros_like(t_grid, dtype=np.int64),
                 "neg": np.zeros_like(t_grid, dtype=np.int64), "n": 0},
    }
    censored = 0
    done = 0
    while done < n_samples:
        m = min(chunk, n_samples - done)
        xs = rng.uniform(p, q, m)
        ys = rng.uniform(0.0, 1.0, m)
        xiv, rv, _, _ = kernels.excursion_samples(
            fam, xs, ys, p, q, code, obs.kernel_t, sys.r_max)
        ok = rv > 0
        censored += int(m - ok.sum())
        for side, mask in (("right", xs > A), ("left", xs < A)):
            sel = xiv[ok & mask]
            counts[side]["n"] += sel.size
            for i, t in enumerate(t_grid):
                counts[side]["pos"][i] += int((sel > t).sum())
                counts[side]["neg"][i] += int((sel < -t).sum())
        done += m

    def tail_report(side, cj, mj, aj):
        c = counts[side]
        n_side = max(c["n"], 1)
        # conditional-on-side fractions converted to base-measure fractions
        frac_side = c["n"] / max(done - censored, 1)
        pos = c["pos"] / n_side * frac_side
        neg = c["neg"] / n_side * frac_side
        expo = 1.0 + 1.0 / aj
        pred = cj * t_grid ** (-expo)
        main = pos if mj > 0 else neg
        opp = neg if mj > 0 else pos
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(pred > 0, main / pred, np.nan)
        return {
            "empirical_main": main.tolist(),
            "empirical_opposite": opp.tolist(),
            "predicted": pred.tolist(),
            "ratio": ratio.tolist(),
            "tail_exponent": expo,
        }

    cf = sys.fm.cf
    return {
        "t_grid": t_grid.tolist(),
        "n_samples": n_samples,
        "censored": censored,
        "M0": M0, "M1": M1, "C0": C0, "C1": C1,
        "right": tail_report("right", C0, M0, cf.alpha0),
        "left": tail_report("left", C1, M1, cf.alpha1),
    }


def correlation(psi: Observable, eta: Observable, fm, k: int,
                n_samples: int, seed: int) -> dict:
    """Monte Carlo Cor(k; psi, eta, B) = |E[psi(B^k) eta] - E psi E eta|.

    Object-layer path for arbitrary cut functions: vectorized iteration
    of the factor map plus fiber recursion.  Returns value and standard
    error.  Points entering the cut window are dropped and counted.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    from .factor import CUT_EPS

    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, n_samples)
    y = rng.uniform(0.0, 1.0, n_samples)
    eta_v = np.asarray(eta.eval(x, y), dtype=float)
    alive = np.ones(n_samples, dtype=bool)
    for _ in range(k):
        hit = np.abs(x - fm.A) < CUT_EPS
        alive &= ~hit
        xa = np.where(alive, x, 0.25)  # placeholder for dead slots
        fx = np.asarray(fm.f(xa))
        ph = np.asarray(fm.cf.phi(fx), dtype=float)
        left = xa < fm.A
        y = np.where(left, ph * y, (1.0 - ph) * y + ph)
        x = fx
    psi_v = np.asarray(psi.eval(x, y), dtype=float)
    w = alive
    n_eff = int(w.sum())
    prod = psi_v[w] * eta_v[w]
    cov = prod.mean() - psi_v[w].mean() * eta_v[w].mean()
    se = prod.std(ddof=1) / math.sqrt(n_eff)
    return {"k": k, "value": abs(float(cov)), "stderr": float(se),
            "n_effective": n_eff, "dropped": n_samples - n_eff}


def correlation_series(sys: InducedSystem, lags, n_traj: int, length: int,
                       seed: int, width: float = 0.05) -> dict:
    """Autocorrelation of the mollified base indicator at the given lags.

    psi is the distance ramp of the base interval [p,q] (Lipschitz, slope
    1/width), a nonzero-mean observable, so the decay rate is the sharp
    one.  Uses the compiled kernel; exact integral of psi is q - p + width.
    """
    fam = kernels.family_code(sys.fm.cf)
    lags = np.asarray(lags, dtype=np.int64)
    if lags.max() > length:
        raise DomainError("length must cover the largest lag")
    p, q = sys.orbit.p, sys.orbit.q
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, 1.0, n_traj)
    spares = rng.uniform(0.0, 1.0, max(1000, n_traj // 100))
    sums, cnts, psum, pcnt, redraws = kernels.correlation_accumulate(
        fam, x0, length, lags, p, q, 1.0 / width, spares)
    mean_exact = q - p + width
    cor = np.abs(sums / cnts - mean_exact**2)
    return {
        "lags": lags.tolist(),
        "correlation": cor.tolist(),
        "psi_mean_exact": mean_exact,
        "psi_mean_empirical": psum / max(pcnt, 1),
        "redraws": int(redraws),
    }


def _finite_variance_side(alpha_j: float, M_j: float, gamma: float) -> bool:
    if alpha_j < 1.0:
        return True
    if M_j == 0.0 and alpha_j == 1.0:
        return True
    if M_j == 0.0 and 1.0 < alpha_j < 3.0 and gamma > 0.5 * (alpha_j - 1.0):
        return True
    return False


def predict_limit(obs: Observable, sys: InducedSystem) -> LimitPrediction:
    """Select the limit-theorem case and its target law for sums over B.

    Case hypotheses follow the main limit theorem; stable scales and the
    nonstandard-CLT variance include the return-frequency factor
    Leb(base) converting induced-system tail constants to map time (see
    the module docstring).  Side-swapped variants of the one-sided case
    are inferred by the reflection symmetry and flagged in notes.
    """
    if not obs.mean_zero:
        raise InvalidParameterError("predict_limit needs a mean-zero observable")
    cf = sys.fm.cf
    a0, a1 = cf.alpha0, cf.alpha1
    M0, M1 = moments_M(obs, sys)
    C0, C1 = constants_C(M0, M1, sys)
    leb = sys.orbit.leb_base
    base = dict(M0=M0, M1=M1, C0=C0, C1=C1)

    if _finite_variance_side(a0, M0, obs.gamma) and _finite_variance_side(a1, M1, obs.gamma):
        return LimitPrediction(case_id="CLT", norming="sqrt(n)", **base,
                               notes="sigma2 estimated separately (Green-Kubo)")

    if a0 == a1 == 1.0 and M0 != 0.0 and M1 != 0.0:
        return LimitPrediction(
            case_id="nonstandard_CLT", norming="sqrt(n log n)",
            sigma2=leb * (C0 + C1), **base)

    def stable_scale(c_total, p):
        a = leb * c_total * special.gamma(1.0 - p) * math.cos(0.5 * math.pi * p)
        if a <= 0:
            raise DomainError(f"stable scale came out nonpositive: {a!r}")
        return a

    if a0 == a1 and a0 > 1.0 and M0 != 0.0 and M1 != 0.0 and np.sign(M0) != np.sign(M1):
        p = 1.0 + 1.0 / a0
        b = (np.sign(M0) * C0 + np.sign(M1) * C1) / (C0 + C1)
        note = "" if M0 > 0 else "mirrored hypothesis (M0<0, M1>0) by X -> -X symmetry"
        return LimitPrediction(
            case_id="stable_two_sided", norming=f"n^{{{a0}/{a0 + 1}}}",
            p=p, a=stable_scale(C0 + C1, p), b=float(b), **base, notes=note)

    dominant = 0 if a0 > a1 else 1
    ad, Md, Cd = (a0, M0, C0) if dominant == 0 else (a1, M1, C1)
    if ad > 1.0 and ad > (a1 if dominant == 0 else a0) and Md != 0.0:
        p = 1.0 + 1.0 / ad
        note = "" if (dominant == 0 and Md > 0) else (
            "inferred by symmetry from the stated one-sided hypothesis")
        return LimitPrediction(
            case_id="stable_one_sided", norming=f"n^{{{ad}/{ad + 1}}}",
            p=p, a=stable_scale(Cd, p), b=float(np.sign(Md)), **base, notes=note)

    return LimitPrediction(case_id="out_of_scope", norming="none", **base,
                           notes="hypotheses match none of the theorem cases")


def birkhoff_ensemble(obs: Observable, sys: InducedSystem, n: int, n_traj: int,
                      seed: int, prediction: Optional[LimitPrediction] = None) -> dict:
    """n_traj normalized sums S_n/A_n from Lebesgue-uniform starts."""
    fam = kernels.family_code(sys.fm.cf)
    code = _require_kernel(obs)
    if prediction is None:
        prediction = predict_limit(obs, sys)
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(0.0, 1.0, n_traj)
    y0 = rng.uniform(0.0, 1.0, n_traj)
    sx = rng.uniform(0.0, 1.0, max(100, n_traj // 100))
    sy = rng.uniform(0.0, 1.0, sx.size)
    sums, redraws, censored = kernels.birkhoff_sums(
        fam, x0, y0, n, code, obs.kernel_t, sx, sy)
    an = prediction.norm_factor(n)
    return {
        "samples": sums / an,
        "raw_sums": sums,
        "norming": an,
        "n": n,
        "n_traj": n_traj,
        "redraws": int(redraws),
        "censored": int(censored),
        "prediction": prediction,
    }


def green_kubo_sigma2(obs: Observable, sys: InducedSystem, n_traj: int,
                      n_returns: int, k_max: int, seed: int) -> dict:
    """CLT variance by Green-Kubo over the induced system.

    sigma2_induced = Var_lambda(xi) + 2 sum_{k<=k_max} Cov(xi, xi o T^k),
    estimated from n_traj independent induced orbits of n_returns
    excursions; sigma2_map = Leb(base) * sigma2_induced is the variance
    for sqrt(n)-normalized sums over B.
    """
    fam = kernels.family_code(sys.fm.cf)
    code = _require_kernel(obs)
    p, q = sys.orbit.p, sys.orbit.q
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(p, q, n_traj)
    y0 = rng.uniform(0.0, 1.0, n_traj)
    sums = np.zeros(k_max + 1)
    counts = np.zeros(k_max + 1, dtype=np.int64)
    tot = 0.0
    tot2 = 0.0
    n_tot = 0
    truncated = 0
    for j in range(n_traj):
        xiv, rv, n_done = kernels.xi_series(
            fam, float(x0[j]), float(y0[j]), n_returns, p, q,
            code, obs.kernel_t, sys.r_max)
        if n_done < n_returns:
            truncated += 1
        v = xiv[:n_done]
        if v.size == 0:
            continue
        tot += v.sum()
        tot2 += (v * v).sum()
        n_tot += v.size
        for k in range(min(k_max, v.size - 1) + 1):
            prod = v[: v.size - k] * v[k:]
            sums[k] += prod.sum()
            counts[k] += prod.size
    if n_tot == 0 or counts[0] == 0:
        raise DomainError("no completed excursions")
    mean = tot / n_tot
    cov = sums / np.maximum(counts, 1) - mean * mean
    sigma2_ind = cov[0] + 2.0 * cov[1:].sum()
    partial = cov[0] + 2.0 * np.cumsum(cov[1:])
    leb = sys.orbit.leb_base
    return {
        "xi_mean": mean,
        "cov": cov.tolist(),
        "partial_sums": partial.tolist(),
        "sigma2_induced": float(sigma2_ind),
        "sigma2_map": float(leb * sigma2_ind),
        "n_excursions": int(n_tot),
        "truncated_orbits": int(truncated),
    }


def empirical_cf(samples, t_grid) -> np.ndarray:
    """Empirical characteristic function of a sample at the given t values."""
    samples = np.asarray(samples, dtype=float)
    t_grid = np.asarray(t_grid, dtype=float)
    return np.exp(1j * np.outer(t_grid, samples)).mean(axis=1)
