"""Equation-of-state contract, derived quantities and concrete models."""

from .core import (
    DimensionlessQuantities,
    EosSpec,
    ReferenceScales,
    StabilityReport,
    ThermoState,
    check_thermo_stability,
    dimensionless_quantities,
    entropy_derivatives,
    pressure,
    pressure_from_ev,
    sound_speed,
    temperature,
)
from .models import (
    PolytropicEos,
    PolytropicParams,
    TaitEos,
    TaitParams,
    generic_entropy_from_ev,
    polytropic_F,
    polytropic_entropy_from_ev,
    tait_F,
    tait_entropy_from_ev,
)

__all__ = [
    "DimensionlessQuantities",
    "EosSpec",
    "ReferenceScales",
    "StabilityReport",
    "ThermoState",
    "check_thermo_stability",
    "dimensionless_quantities",
    "entropy_derivatives",
    "pressure",
    "pressure_from_ev",
    "sound_speed",
    "temperature",
    "PolytropicEos",
    "PolytropicParams",
    "TaitEos",
    "TaitParams",
    "generic_entropy_from_ev",
    "polytropic_F",
    "polytropic_entropy_from_ev",
    "tait_F",
    "tait_entropy_from_ev",
]
