"""The intermittent baker's transformation B(x,y) = (f(x), g_x(y)).

The fiber maps are affine contractions toward y=0 on the left branch and
toward y=1 on the right branch:

    g_x(y) = phi(f(x)) * y                         x in [0, A)
    g_x(y) = (1 - phi(f(x))) * y + phi(f(x))       x in (A, 1]

Equivalently g_x(y) = y / Df(x) on the left and 1 - (1-y)/Df(x) on the
right, so the Jacobian determinant of B is identically 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple

import numpy as np

from .errors import NearCutError
from .factor import CUT_EPS, FactorMap

__all__ = ["SquarePoint", "IbtMap", "step", "iterate", "jacobian_det"]


class SquarePoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class IbtMap:
    fm: FactorMap

    @property
    def A(self) -> float:
        return self.fm.A


def _fiber_factor(m: IbtMap, x: float):
    """(f(x), phi(f(x))) with the near-cut guard."""
    if abs(x - m.A) < CUT_EPS:
        raise NearCutError(x)
    fx = float(m.fm.f(x))
    ph = float(m.fm.cf.phi(fx))
    if x == 0.0:
        fx, ph = 0.0, 1.0
    elif x == 1.0:
        fx, ph = 1.0, 0.0
    return fx, ph


def step(m: IbtMap, pt: SquarePoint) -> SquarePoint:
    """One application of B."""
    x, y = pt
    fx, ph = _fiber_factor(m, x)
    if x < m.A:
        return SquarePoint(fx, ph * y)
    return SquarePoint(fx, (1.0 - ph) * y + ph)


def iterate(m: IbtMap, pt: SquarePoint, n: int) -> List[SquarePoint]:
    """Trajectory [pt, B(pt), ..., B^n(pt)].

    Raises NearCutError carrying the iterate index if the orbit lands in
    the exclusion window of the cut.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    traj = [SquarePoint(*pt)]
    cur = traj[0]
    for k in range(n):
        try:
            cur = step(m, cur)
        except NearCutError as exc:
            raise NearCutError(exc.x, index=k) from None
        traj.append(cur)
    return traj


def jacobian_det(m: IbtMap, pt: SquarePoint) -> float:
    """Df(x) * d(g_x)/dy, computed through two independent code paths.

    Df comes from the factor module; the fiber slope from the fiber-map
    formula.  The product must equal 1.
    """
    x, _ = pt
    dfx = float(m.fm.Df(x))
    _, ph = _fiber_factor(m, x)
    fiber_slope = ph if x < m.A else 1.0 - ph
    return dfx * fiber_slope
