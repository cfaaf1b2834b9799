"""First-return system on the base Lambda = [p,q] x [0,1].

{p, q} is the unique period-2 orbit of the factor map (f(p)=q, f(q)=p,
p < A < q).  Points of Lambda leave under B, crawl along one of the two
indifferent lines, and return; the return time r is independent of y and
its cells are delimited by the preimage sequences

    p_n = w0^n(p),  q_n = w1^n(q),
    p*_{n+1} = w1(p_n)  (interior, right of A),
    q*_{n+1} = w0(q_n)  (interior, left of A),

with  [r = n+2] = ((q*_{n+1}, q*_{n+2}] u [p*_{n+2}, p*_{n+1})) x [0,1].

All sequences are stored in complementary coordinates (p_n, 1-q_n,
p*_n - A, A - q*_n) so that the polynomially small gaps keep full
relative precision out to n ~ 1e5 and beyond.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .baker import IbtMap, SquarePoint, step
from .errors import DomainError, NearCutError, NumericError, TailOverflowError
from .factor import CUT_EPS, FactorMap

__all__ = [
    "PeriodTwoOrbit",
    "ReturnCells",
    "InducedSystem",
    "find_period_two",
    "build_cells",
    "build_induced",
    "return_time",
    "return_time_oracle",
    "induced_step",
    "cell_measure",
    "check_orbit_asymptotics",
]


@dataclass(frozen=True)
class PeriodTwoOrbit:
    p: float
    q: float

    @property
    def leb_base(self) -> float:
        """Length of the base interval, Leb([p,q])."""
        return self.q - self.p


@dataclass(frozen=True)
class ReturnCells:
    """Preimage sequences in complementary coordinates, 1-indexed.

    Index n of each array holds the subscript-n quantity; entry 0 is the
    subscript-0 seed where meaningful (p_0 = p, 1-q_0) and NaN for the
    interior sequences (p*_0, q*_0 are undefined).
    """

    p_seq: np.ndarray          # p_n
    qc_seq: np.ndarray         # 1 - q_n
    pint_gap: np.ndarray       # p*_n - A      (n >= 1; entry 0 is NaN)
    qint_gap: np.ndarray       # A - q*_n      (n >= 1; entry 0 is NaN)
    n_max: int                 # last valid subscript
    requested_n_max: int


@dataclass(frozen=True)
class InducedSystem:
    m: IbtMap
    orbit: PeriodTwoOrbit
    cells: ReturnCells
    r_max: int = 10**6

    @property
    def fm(self) -> FactorMap:
        return self.m.fm

    @property
    def A(self) -> float:
        return self.m.A


def find_period_two(fm: FactorMap) -> PeriodTwoOrbit:
    """Locate the period-2 orbit: p solves p = w0(w1(p)) on (0, A)."""

    def g(x):
        return float(fm.w0_eval(fm.w1_eval(x))) - x

    try:
        p = optimize.brentq(g, 1e-15, fm.A - 1e-15, xtol=1e-15, rtol=8.9e-16)
    except ValueError as exc:  # pragma: no cover - contraction guarantees a bracket
        raise NumericError(f"period-2 bracket failure: {exc}") from exc
    q = float(fm.w1_eval(p))
    res_p = abs(float(fm.f(p)) - q)
    res_q = abs(float(fm.f(q)) - p)
    if res_p > 1e-10 or res_q > 1e-10:
        raise NumericError(
            f"period-2 residuals too large: |f(p)-q|={res_p:g}, |f(q)-p|={res_q:g}"
        )
    return PeriodTwoOrbit(p=p, q=q)


def _swapped_slip(fm: FactorMap):
    """(slip0, slip1) callables; quadrature fallback for custom cut functions."""
    cf = fm.cf
    if cf.slip0 is not None and cf.slip1 is not None:
        return cf.slip0, cf.slip1

    def slip0(x):
        return np.asarray(x, dtype=float) - (fm.w0_eval(x) - fm.w0_eval(0.0))

    def slip1(x):
        # integral_0^x phi(1-t) dt = A - w0(1-x)
        return fm.A - np.asarray(fm.w0_eval(1.0 - np.asarray(x, dtype=float)))

    return slip0, slip1


def build_cells(fm: FactorMap, orbit: PeriodTwoOrbit, n_max: int) -> ReturnCells:
    """Forward recursion of the four preimage sequences.

    Recursions in complementary coordinates:

        p_{n+1}      = p_n - slip0(p_n)
        (1-q_{n+1})  = (1-q_n) - slip1(1-q_n)
        p*_{n+1} - A = slip0(p_n)
        A - q*_{n+1} = slip1(1-q_n)

    On loss of strict monotonicity (floating-point underflow near the
    fixed lines) the sequences are truncated at the last valid n.
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    slip0, slip1 = _swapped_slip(fm)

    p_seq = np.empty(n_max + 1)
    qc_seq = np.empty(n_max + 1)
    pint_gap = np.full(n_max + 1, np.nan)
    qint_gap = np.full(n_max + 1, np.nan)
    p_seq[0] = orbit.p
    qc_seq[0] = 1.0 - orbit.q
    eff = n_max
    for n in range(n_max):
        s0 = float(slip0(p_seq[n]))
        s1 = float(slip1(qc_seq[n]))
        p_next = p_seq[n] - s0
        qc_next = qc_seq[n] - s1
        if not (0.0 < p_next < p_seq[n] and 0.0 < qc_next < qc_seq[n] and s0 > 0.0 and s1 > 0.0):
            eff = n
            break
        p_seq[n + 1] = p_next
        qc_seq[n + 1] = qc_next
        pint_gap[n + 1] = s0
        qint_gap[n + 1] = s1
    return ReturnCells(
        p_seq=p_seq[: eff + 1],
        qc_seq=qc_seq[: eff + 1],
        pint_gap=pint_gap[: eff + 1],
        qint_gap=qint_gap[: eff + 1],
        n_max=eff,
        requested_n_max=n_max,
    )


def build_induced(m: IbtMap, n_max: int = 4096, r_max: int = 10**6) -> InducedSystem:
    orbit = find_period_two(m.fm)
    cells = build_cells(m.fm, orbit, n_max)
    return InducedSystem(m=m, orbit=orbit, cells=cells, r_max=r_max)


def return_time(sys: InducedSystem, x: float) -> int:
    """First n >= 1 with f^n(x) in [p,q], for x in [p,q].

    Interior points are located by binary search over the tabulated cell
    boundaries (p*-cells closed on the left, q*-cells open on the left);
    beyond the table the direct iteration fallback applies, capped at
    r_max (TailOverflowError = censored observation).
    """
    p, q, A = sys.orbit.p, sys.orbit.q, sys.A
    if not (p <= x <= q):
        raise DomainError(f"x={x!r} outside the base [{p}, {q}]")
    if abs(x - A) < CUT_EPS:
        raise NearCutError(x)
    if x == p or x == q:
        return 1  # f(p)=q and f(q)=p land in the base immediately
    cells = sys.cells
    if x > A:
        # p*-cells: r = m where pint_gap[m] <= x-A < pint_gap[m-1] (closed
        # at the inner boundary, array decreasing in m).
        gap = x - A
        tab = cells.pint_gap[1:]  # subscripts 1..n_max
        if gap < tab[-1]:
            return _return_time_iterate(sys, x)
        j = int(np.searchsorted(tab[::-1], gap, side="right"))  # rev[j-1] <= gap
        return len(tab) - j + 1
    # q*-cells (q*_{m-1}, q*_m]: in gap coordinates A-x this is again
    # qint_gap[m] <= gap < qint_gap[m-1], the tie x == q*_m giving cell m.
    gap = A - x
    tab = cells.qint_gap[1:]
    if gap < tab[-1]:
        return _return_time_iterate(sys, x)
    j = int(np.searchsorted(tab[::-1], gap, side="right"))
    return len(tab) - j + 1


def _return_time_iterate(sys: InducedSystem, x: float) -> int:
    p, q = sys.orbit.p, sys.orbit.q
    cur = x
    for n in range(1, sys.r_max + 1):
        if abs(cur - sys.A) < CUT_EPS and n > 1:
            raise NearCutError(cur, index=n - 1)
        cur = float(sys.fm.f(cur))
        if p <= cur <= q:
            return n
    raise TailOverflowError(x, sys.r_max)


def return_time_oracle(sys: InducedSystem, x: float) -> int:
    """Brute-force return time by direct iteration of f (test oracle)."""
    return _return_time_iterate(sys, x)


def induced_step(sys: InducedSystem, pt: SquarePoint):
    """(T(pt), r): iterate B until the first return to Lambda."""
    r = return_time(sys, pt.x)
    cur = SquarePoint(*pt)
    for k in range(r):
        try:
            cur = step(sys.m, cur)
        except NearCutError as exc:
            raise NearCutError(exc.x, index=k) from None
    return cur, r


def cell_measure(sys: InducedSystem, n: int) -> float:
    """lambda[r=n] = (p*_{n-1} - p*_n + q*_n - q*_{n-1}) / Leb([p,q]), n >= 2."""
    cells = sys.cells
    if n < 2 or n > cells.n_max:
        raise DomainError(f"n={n} outside the tabulated range [2, {cells.n_max}]")
    dp = cells.pint_gap[n - 1] - cells.pint_gap[n]
    dq = cells.qint_gap[n - 1] - cells.qint_gap[n]
    return float((dp + dq) / sys.orbit.leb_base)


def _asym_constants(fm: FactorMap):
    cf = fm.cf
    k0 = ((cf.alpha0 + 1.0) / (cf.c0 * cf.alpha0)) ** (1.0 / cf.alpha0)
    k1 = ((cf.alpha1 + 1.0) / (cf.c1 * cf.alpha1)) ** (1.0 / cf.alpha1)
    return k0, k1


def check_orbit_asymptotics(sys: InducedSystem, n_max: int | None = None) -> dict:
    """Measured/predicted ratios for the eight preimage asymptotics.

    Each entry reports the predicted leading constant and exponent, the
    ratio at the largest tabulated n, the measured constant there, and a
    short convergence trace.  For the two interior-gap asymptotics the
    prediction uses the side-consistent contact data (alpha0, c0 for the
    p-side; alpha1, c1 for the q-side).
    """
    cells = sys.cells
    n_top = cells.n_max if n_max is None else min(n_max, cells.n_max)
    if n_top < 10**3:
        raise DomainError("need n_max >= 1e3 for meaningful asymptotics")
    cf = sys.fm.cf
    k0, k1 = _asym_constants(sys.fm)
    a0, a1 = cf.alpha0, cf.alpha1

    n = np.arange(0, n_top + 1, dtype=float)
    quantities = {
        "p_n": (cells.p_seq[: n_top + 1], k0, 1.0 / a0, n),
        "one_minus_q_n": (cells.qc_seq[: n_top + 1], k1, 1.0 / a1, n),
        "p_n_minus_p_n1": (
            -np.diff(cells.p_seq[: n_top + 1]), k0 / a0, 1.0 + 1.0 / a0, n[:-1]),
        "q_n1_minus_q_n": (
            -np.diff(cells.qc_seq[: n_top + 1]), k1 / a1, 1.0 + 1.0 / a1, n[:-1]),
        "pint_minus_A": (cells.pint_gap[: n_top + 1], k0 / a0, 1.0 + 1.0 / a0, n),
        "A_minus_qint": (cells.qint_gap[: n_top + 1], k1 / a1, 1.0 + 1.0 / a1, n),
        "pint_n_minus_pint_n1": (
            -np.diff(cells.pint_gap[: n_top + 1]),
            (k0 / a0) * (1.0 + 1.0 / a0), 2.0 + 1.0 / a0, n[:-1]),
        "qint_n1_minus_qint_n": (
            -np.diff(cells.qint_gap[: n_top + 1]),
            (k1 / a1) * (1.0 + 1.0 / a1), 2.0 + 1.0 / a1, n[:-1]),
    }
    trace_ns = [10**k for k in range(3, 20) if 10**k <= n_top]
    report = {"n_max": n_top, "entries": {}}
    for name, (vals, const, expo, ns) in quantities.items():
        with np.errstate(invalid="ignore", divide="ignore"):
            pred = const * ns ** (-expo)
            ratio = vals / pred
        n_last = int(ns[-1])
        report["entries"][name] = {
            "predicted_constant": const,
            "exponent": -expo,
            "ratio_at_n_max": float(ratio[-1]),
            "measured_constant": float(vals[-1] * ns[-1] ** expo),
            "trace": {int(nn): float(ratio[int(nn)]) for nn in trace_ns if nn < len(ratio)},
        }
    return report
