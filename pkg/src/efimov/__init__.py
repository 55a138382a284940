"""Efimov trimers with three-body losses: closed-form spectrum and numerical checks."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    ChannelExponent,
    ModelParams,
    TrimerState,
    UnitSystem,
    channel_exponent,
    critical_eta,
    decay_rate,
    kappa_of_energy,
    lossless_energy,
    lossy_energy,
    solve_channel_exponent,
)
from .errors import AccuracyError, BranchError, DomainError, EfimovError, FitError, SolverError  # noqa: E402

__all__ = [
    "ChannelExponent",
    "ModelParams",
    "TrimerState",
    "UnitSystem",
    "channel_exponent",
    "critical_eta",
    "decay_rate",
    "kappa_of_energy",
    "lossless_energy",
    "lossy_energy",
    "solve_channel_exponent",
    "AccuracyError",
    "BranchError",
    "DomainError",
    "EfimovError",
    "FitError",
    "SolverError",
]
