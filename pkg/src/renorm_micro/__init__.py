"""Microscopic renormalized energy of vortices pinned by a circular impurity.

Modules: ``core`` (domain types), ``disk_energy`` (closed forms), ``fourier``
(boundary phases), ``minimize`` (minimizers and regimes), ``oracle`` (grid
solver) and ``scenarios``/``cli`` (batch runner).
"""

from .core import DomainSpec, Impurity, OutsideField, PinningWeight, RegimeLabel, VortexConfig, validate_config
from .disk_energy import (EnergyExpansion, k_min, lr_renormalized_energy, w_micro_closed,
                          w_micro_gradient, w_micro_series)
from .minimize import classify_regime, minimize_numeric, n2_positive_minimizer, unboundedness_witness

__version__ = "0.1.0"

__all__ = [
    "DomainSpec",
    "Impurity",
    "OutsideField",
    "PinningWeight",
    "RegimeLabel",
    "VortexConfig",
    "validate_config",
    "EnergyExpansion",
    "k_min",
    "lr_renormalized_energy",
    "w_micro_closed",
    "w_micro_gradient",
    "w_micro_series",
    "classify_regime",
    "minimize_numeric",
    "n2_positive_minimizer",
    "unboundedness_witness",
]
