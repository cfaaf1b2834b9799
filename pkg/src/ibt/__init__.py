"""Intermittent baker's transformations: construction, induced first-return
systems, and numerical verification of polynomial mixing rates and stable
limit laws."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    IbtError,
    InvalidParameterError,
    NearCutError,
    NumericError,
    TailOverflowError,
)
from .icf import CutFunction, eval_phi, make_beta_icf, verify_contact
from .factor import CUT_EPS, FactorMap, build_factor
from .baker import IbtMap, SquarePoint, iterate, jacobian_det, step
from .induced import (
    InducedSystem,
    PeriodTwoOrbit,
    ReturnCells,
    build_cells,
    build_induced,
    cell_measure,
    check_orbit_asymptotics,
    find_period_two,
    induced_step,
    return_time,
    return_time_oracle,
)

__all__ = [
    "__version__",
    "IbtError",
    "InvalidParameterError",
    "DomainError",
    "NumericError",
    "NearCutError",
    "TailOverflowError",
    "CutFunction",
    "make_beta_icf",
    "eval_phi",
    "verify_contact",
    "CUT_EPS",
    "FactorMap",
    "build_factor",
    "SquarePoint",
    "IbtMap",
    "step",
    "iterate",
    "jacobian_det",
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
