"""Closed-form scattering matrices of concentric disks."""

import numpy as np

from .errors import DomainError, SolverError
from .model import MediumSpec
from .specfun import cyl_deriv, cyl_eval

__all__ = [
    "background_S",
    "exact_S",
    "exact_S_matrix",
    "exact_sound_hard_S",
    "exact_transmission_S",
    "exact_transmission_S_printed",
]


def _layer(medium):
    if len(medium.layers) != 1 or medium.core_radius:
        raise DomainError("exact transmission solution needs exactly one layer and no core")
    layer = medium.layers[0]
    beta = np.sqrt(layer.rho * layer.kappa / (medium.rho0 * medium.kappa0))
    return layer.outer_radius, np.sqrt(layer.rho / layer.kappa), beta


def exact_transmission_S(medium: MediumSpec, n, omega):
    """Diagonal entry ``S_nn`` for a penetrable disk in the background.

    The interior field is the regular ``A J_n(k_in r)``; continuity of ``u``
    and ``(1/rho) du/dr`` at ``r = a`` gives

        S_nn = -(beta J_n(k_in a) H2_n'(k a) - J_n'(k_in a) H2_n(k a))
               / (beta J_n(k_in a) H1_n'(k a) - J_n'(k_in a) H1_n(k a)).
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    a, slowness, beta = _layer(medium)
    ka = medium.wavenumber(omega) * a
    kia = omega * slowness * a
    j, jp = cyl_eval("J", n, kia), cyl_deriv("J", n, kia)
    num = beta * j * cyl_deriv("H2", n, ka) - jp * cyl_eval("H2", n, ka)
    den = beta * j * cyl_deriv("H1", n, ka) - jp * cyl_eval("H1", n, ka)
    if abs(den) < 1e-300:
        raise SolverError(f"vanishing denominator at omega = {omega}")
    return complex(-num / den)


def exact_transmission_S_printed(medium: MediumSpec, n, omega):
    """Variant with ``H2_n(k_in a)`` as the interior radial kernel.

    Kept for comparison only: the kernel is singular at the origin and does
    not reduce to ``S = 1`` without contrast.
    """
    a, slowness, beta = _layer(medium)
    ka = medium.wavenumber(omega) * a
    kia = omega * slowness * a
    h, hp = cyl_eval("H2", n, kia), cyl_deriv("H2", n, kia)
    num = beta * h * cyl_deriv("H2", n, ka) - cyl_eval("H2", n, ka) * hp
    den = beta * h * cyl_deriv("H1", n, ka) - cyl_eval("H1", n, ka) * hp
    return complex(-num / den)


def exact_sound_hard_S(a, n, omega, rho0=1.0, kappa0=1.0):
    """``S_nn = -H2_n'(ka) / H1_n'(ka)`` for a rigid disk of radius ``a``."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    ka = omega * np.sqrt(rho0 / kappa0) * a
    return complex(-cyl_deriv("H2", n, ka) / cyl_deriv("H1", n, ka))


def background_S(R, omega, l, rho0=1.0, kappa0=1.0):
    """``-H2_l(kR) / H1_l(kR)``; also the exact entry for a sound-soft disk of radius ``R``."""
    if not omega > 0:
        raise DomainError("omega must be positive")
    kR = omega * np.sqrt(rho0 / kappa0) * R
    return complex(-cyl_eval("H2", l, kR) / cyl_eval("H1", l, kR))


def exact_S(medium: MediumSpec, n, omega):
    """Dispatch on the medium: homogeneous, sound-hard disk or one penetrable layer."""
    if medium.is_homogeneous:
        return 1.0 + 0.0j
    if not medium.layers:
        return exact_sound_hard_S(medium.core_radius, n, omega, medium.rho0, medium.kappa0)
    return exact_transmission_S(medium, n, omega)


def exact_S_matrix(medium: MediumSpec, omega, orders):
    return np.diag([exact_S(medium, int(l), omega) for l in orders])
