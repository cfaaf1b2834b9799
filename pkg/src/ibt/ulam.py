"""Ulam discretization of the induced factor map u(x) = f^{r(x)}(x).

u acts on the base interval [p, q], preserves normalized Lebesgue
measure there, and inherits the spectral gap of the induced system; the
Ulam matrix is a Monte Carlo finite-rank proxy whose leading eigenvalue
should be 1 (simple) with the rest of the spectrum inside a disk of
radius < 1.  Monte Carlo assembly is used because u has countably many
branches accumulating at the cut abscissa, making exact interval images
impractical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InvalidParameterError, NumericError
from .induced import InducedSystem, return_time

__all__ = ["UlamOperator", "build_ulam", "leading_spectrum", "invariant_density"]

_DENSE_LIMIT = 512


@dataclass(frozen=True)
class UlamOperator:
    bins: int
    matrix: np.ndarray       # row-stochastic, (bins, bins)
    bin_edges: np.ndarray    # len bins+1, partition of [p, q]
    samples_per_bin: int
    redrawn: int             # tail-overflow / cut-window samples replaced


def _u_images_kernel(sys: InducedSystem, xs: np.ndarray):
    fam = kernels.family_code(sys.fm.cf)
    p, q = sys.orbit.p, sys.orbit.q
    ys = np.full(xs.shape, 0.5)
    xr, _, rr = kernels.induced_images(fam, xs, ys, p, q, sys.r_max)
    return xr, rr


def _u_images_object(sys: InducedSystem, xs: np.ndarray):
    xr = np.empty_like(xs)
    rr = np.empty(xs.shape, dtype=np.int64)
    p, q = sys.orbit.p, sys.orbit.q
    for j, x in enumerate(xs):
        try:
            r = return_time(sys, float(x))
        except Exception:
            rr[j] = -1
            xr[j] = np.nan
            continue
        cur = float(x)
        for _ in range(r):
            cur = float(sys.fm.f(cur))
        if not (p <= cur <= q):
            rr[j] = -1
            xr[j] = np.nan
            continue
        rr[j] = r
        xr[j] = cur
    return xr, rr


def build_ulam(sys: InducedSystem, bins: int, samples_per_bin: int, seed: int) -> UlamOperator:
    """Row-stochastic bin-to-bin transition matrix of u on [p, q].

    Entry (i, j) is the fraction of uniform samples in bin i whose
    u-image lands in bin j.  Samples hitting the cut window or exceeding
    r_max are redrawn (reported), so every row sums to exactly 1.
    """
    if bins < 16:
        raise InvalidParameterError(f"bins must be >= 16, got {bins}")
    if samples_per_bin < 1:
        raise InvalidParameterError("samples_per_bin must be >= 1")
    p, q = sys.orbit.p, sys.orbit.q
    edges = np.linspace(p, q, bins + 1)
    rng = np.random.default_rng(seed)
    try:
        kernels.family_code(sys.fm.cf)
        images = lambda xs: _u_images_kernel(sys, xs)
    except InvalidParameterError:
        images = lambda xs: _u_images_object(sys, xs)

    mat = np.zeros((bins, bins))
    redrawn = 0
    for i in range(bins):
        lo, hi = edges[i], edges[i + 1]
        need = samples_per_bin
        counts = np.zeros(bins)
        attempts = 0
        while need > 0:
            attempts += 1
            if attempts > 50:
                raise NumericError(f"bin {i}: could not complete samples after redraws")
            xs = rng.uniform(lo, hi, need)
            xr, rr = images(xs)
            good = rr > 0
            redrawn += int(need - good.sum())
            if np.any(good):
                idx = np.minimum(
                    np.searchsorted(edges, xr[good], side="right") - 1, bins - 1)
                idx = np.maximum(idx, 0)
                counts += np.bincount(idx, minlength=bins)
            need = int(need - good.sum())
        mat[i] = counts / samples_per_bin
    return UlamOperator(bins=bins, matrix=mat, bin_edges=edges,
                        samples_per_bin=samples_per_bin, redrawn=redrawn)


def leading_spectrum(op: UlamOperator, k: int) -> np.ndarray:
    """k largest-modulus eigenvalues, sorted by modulus descending.

    Dense solve up to 512 bins; beyond that, power iteration with
    Hotelling deflation on the row-stochastic matrix.
    """
    if k > op.bins:
        raise InvalidParameterError(f"k={k} exceeds bins={op.bins}")
    if op.bins <= _DENSE_LIMIT:
        vals = np.linalg.eigvals(op.matrix)
        order = np.argsort(-np.abs(vals))
        return vals[order][:k]

    m = op.matrix.astype(float).copy()
    found = []
    for _ in range(k):
        v = np.ones(op.bins) / np.sqrt(op.bins)
        lam = 0.0
        for it in range(20000):
            w = m @ v
            nw = np.linalg.norm(w)
            if nw == 0:
                lam = 0.0
                break
            w /= nw
            lam_new = float(w @ (m @ w))
            if it > 10 and abs(lam_new - lam) < 1e-12:
                lam = lam_new
                v = w
                break
            lam = lam_new
            v = w
        else:
            raise NumericError("power iteration did not converge")
        found.append(lam)
        m = m - lam * np.outer(v, v)  # Hotelling deflation (real dominant modes)
    return np.array(found, dtype=complex)


def invariant_density(op: UlamOperator) -> np.ndarray:
    """Normalized left eigenvector for the leading eigenvalue.

    This is the Ulam estimate of the u-invariant density on [p, q];
    entries are scaled so a uniform density is identically 1.
    """
    vals, vecs = np.linalg.eig(op.matrix.T)
    i = int(np.argmax(np.abs(vals)))
    v = np.real(vecs[:, i])
    if v.sum() < 0:
        v = -v
    v = np.clip(v, 0.0, None)
    total = v.sum()
    if total <= 0:
        raise NumericError("degenerate leading eigenvector")
    return v / total * op.bins
