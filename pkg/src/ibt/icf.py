"""Intermittent cut functions.

A cut function phi: [0,1] -> [0,1] is smooth, strictly decreasing, with
prescribed power-law contact at both endpoints:

    1 - phi(x)   = c0 * x**alpha0 * (1 + o(1))   as x -> 0+
    phi(1 - x)   = c1 * x**alpha1 * (1 + o(1))   as x -> 0+

The canonical parametric family is the complement of the regularized
incomplete beta function, phi(x) = 1 - I_x(alpha0, alpha1), which realizes
every admissible (alpha0, alpha1) with closed-form contact coefficients
and a closed-form antiderivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DomainError, InvalidParameterError

__all__ = ["CutFunction", "make_beta_icf", "eval_phi", "verify_contact"]


@dataclass(frozen=True)
class CutFunction:
    """A cut function together with its contact data.

    ``phi`` and ``dphi`` must accept scalars or numpy arrays.  The two
    optional ``slip`` callables are running integrals that let the factor
    map be built with full relative accuracy near the endpoints:

        slip0(x) = integral_0^x (1 - phi(t)) dt     ~ c0 x^(alpha0+1)/(alpha0+1)
        slip1(x) = integral_0^x phi(1 - t) dt       ~ c1 x^(alpha1+1)/(alpha1+1)

    When absent the factor module falls back to adaptive quadrature.

    Instances are immutable; all evaluations are pure.
    """

    alpha0: float
    alpha1: float
    c0: float
    c1: float
    phi: Callable[[np.ndarray], np.ndarray]
    dphi: Callable[[np.ndarray], np.ndarray]
    slip0: Optional[Callable[[np.ndarray], np.ndarray]] = None
    slip1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    # (alpha0, alpha1) when this is the canonical beta family, else None.
    beta_params: Optional[tuple] = field(default=None)

    def __post_init__(self):
        for name in ("alpha0", "alpha1", "c0", "c1"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{name} must be finite and positive, got {v!r}")


def _betainc_running_integral(a: float, b: float, x):
    """integral_0^x I_t(a, b) dt in closed form.

    Uses d/dx [x I_x(a,b)] = I_x(a,b) + (a/(a+b)) * pdf_{a+1,b}(x), i.e.

        integral_0^x I_t(a,b) dt = x I_x(a,b) - a/(a+b) * I_x(a+1, b).
    """
    x = np.asarray(x, dtype=float)
    return x * special.betainc(a, b, x) - (a / (a + b)) * special.betainc(a + 1.0, b, x)


def make_beta_icf(alpha0: float, alpha1: float) -> CutFunction:
    """Canonical cut function phi(x) = 1 - I_x(alpha0, alpha1).

    Contact data is closed form: c_j = 1 / (alpha_j * Beta(alpha0, alpha1)),
    and Dphi(x) = -x^(alpha0-1) (1-x)^(alpha1-1) / Beta(alpha0, alpha1).
    """
    for name, v in (("alpha0", alpha0), ("alpha1", alpha1)):
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            raise InvalidParameterError(f"{name} must be finite and positive, got {v!r}")
    a0 = float(alpha0)
    a1 = float(alpha1)
    lnB = special.betaln(a0, a1)
    B = math.exp(lnB)

    def phi(x):
        return 1.0 - special.betainc(a0, a1, np.asarray(x, dtype=float))

    def dphi(x):
        x = np.asarray(x, dtype=float)
        # -exp((a0-1) ln x + (a1-1) ln(1-x) - ln B); endpoint limits handled
        # by numpy (0 * inf never arises for x in (0,1)).
        return -np.exp((a0 - 1.0) * np.log(x) + (a1 - 1.0) * np.log1p(-x) - lnB)

    def slip0(x):
        return _betainc_running_integral(a0, a1, x)

    def slip1(x):
        return _betainc_running_integral(a1, a0, x)

    return CutFunction(
        alpha0=a0,
        alpha1=a1,
        c0=1.0 / (a0 * B),
        c1=1.0 / (a1 * B),
        phi=phi,
        dphi=dphi,
        slip0=slip0,
        slip1=slip1,
        beta_params=(a0, a1),
    )


def eval_phi(cf: CutFunction, x) -> float:
    """Evaluate phi at x in [0,1]; endpoints are exact."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0.0) or np.any(xa > 1.0):
        raise DomainError(f"x={x!r} outside [0,1]")
    out = np.asarray(cf.phi(xa), dtype=float)
    # Pin the endpoints so phi(0)=1 and phi(1)=0 hold exactly.
    out = np.where(xa == 0.0, 1.0, out)
    out = np.where(xa == 1.0, 0.0, out)
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def verify_contact(cf: CutFunction, probe: float) -> dict:
    """Audit the declared contact coefficients from phi itself.

    Estimates c0 from (1 - phi(probe)) / probe^alpha0 and c1 from
    phi(1 - probe) / probe^alpha1 and reports relative errors against the
    stored values.  Intended for auditing user-supplied cut functions.
    """
    if not (0.0 < probe <= 1e-3):
        raise InvalidParameterError(f"probe must lie in (0, 1e-3], got {probe!r}")
    c0_est = float((1.0 - cf.phi(probe)) / probe**cf.alpha0)
    c1_est = float(cf.phi(1.0 - probe) / probe**cf.alpha1)
    return {
        "probe": probe,
        "c0_est": c0_est,
        "c1_est": c1_est,
        "rel_err0": abs(c0_est - cf.c0) / cf.c0,
        "rel_err1": abs(c1_est - cf.c1) / cf.c1,
    }
