"""Localized chiral electromagnetic pulses: fields, diagnostics, particle dynamics and qutrit states."""
from __future__ import annotations

from .chiral import (
    ALL_MODES,
    ChiralMode,
    ConfigurationError,
    EMFieldSample,
    Family,
    Pulse,
    SuperpositionSpec,
    field_tensor,
    maxwell_residuals,
    potential_A,
)
from .scalar import PulseParams, SpacetimePoint, scalar_alpha, scalar_alpha_jet

__version__ = "0.1.0"

__all__ = [
    "ALL_MODES",
    "ChiralMode",
    "ConfigurationError",
    "EMFieldSample",
    "Family",
    "Pulse",
    "PulseParams",
    "SpacetimePoint",
    "SuperpositionSpec",
    "field_tensor",
    "maxwell_residuals",
    "potential_A",
    "scalar_alpha",
    "scalar_alpha_jet",
    "__version__",
]
