"""NV-centre intersystem-crossing rates, mixing and parameter inference."""

from ._nvisc import (
    EmptyResultError,
    InputError,
    NumericalError,
    Session,
    alpha_const,
    commands,
    gamma_mix,
    ghz_to_mev,
    lifetime_ns,
    run,
    thermal_overlap,
)

__all__ = [
    "EmptyResultError",
    "InputError",
    "NumericalError",
    "Session",
    "alpha_const",
    "commands",
    "gamma_mix",
    "ghz_to_mev",
    "lifetime_ns",
    "run",
    "thermal_overlap",
]
