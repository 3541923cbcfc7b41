"""Coupled-mode theory for 2-D exterior Helmholtz scattering.

Interior fields on a fictitious disk are expanded in mixed Neumann and
Dirichlet normal modes and coupled to cylindrical waves outside the disk.
"""

from .errors import CapabilityError, DomainError, ModeSetFormatError, SolverError
from .model import FictitiousDisk, IncidentField, Layer, MediumSpec, plane_wave_coefficients
from .radial_modes import ModeSet, RadialMode, solve_modes
from .coupling import CouplingData, build_coupling
from .cmt_solver import ScatteringResult, scattering_matrix, solve_scattering
from .interior_expansion import BesselTarget, MixedExpansion, fit_expansion, linf_rel_error
from .waveguide import WaveguideSystem, solve_waveguide_cme, stub_reflection_oracle

__all__ = [
    "BesselTarget",
    "CapabilityError",
    "CouplingData",
    "DomainError",
    "FictitiousDisk",
    "IncidentField",
    "Layer",
    "MediumSpec",
    "MixedExpansion",
    "ModeSet",
    "ModeSetFormatError",
    "RadialMode",
    "ScatteringResult",
    "SolverError",
    "WaveguideSystem",
    "build_coupling",
    "fit_expansion",
    "linf_rel_error",
    "plane_wave_coefficients",
    "scattering_matrix",
    "solve_modes",
    "solve_scattering",
    "solve_waveguide_cme",
    "stub_reflection_oracle",
]

__version__ = "0.1.0"
