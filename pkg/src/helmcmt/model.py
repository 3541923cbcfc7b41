"""Problem description: media, fictitious disk, incident fields."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = [
    "AIR_BUBBLE_RHO",
    "AIR_BUBBLE_KAPPA",
    "FictitiousDisk",
    "IncidentField",
    "Layer",
    "MediumSpec",
    "Region",
    "plane_wave_coefficients",
    "polar_angle",
]

# air in water, relative to the background density and bulk modulus
AIR_BUBBLE_RHO = 1.20e-3
AIR_BUBBLE_KAPPA = 6.36e-5


@dataclass(frozen=True)
class Layer:
    outer_radius: float
    rho: float
    kappa: float


@dataclass(frozen=True)
class Region:
    """Annulus ``r_in < r < r_out`` of constant material inside the disk."""

    r_in: float
    r_out: float
    rho: float
    kappa: float
    rho0: float
    kappa0: float

    @property
    def slowness(self):
        """Wavenumber per unit angular frequency, ``sqrt(rho / kappa)``."""
        return np.sqrt(self.rho / self.kappa)

    @property
    def inv_impedance(self):
        """``1 / beta`` with ``beta = sqrt(rho kappa / (rho0 kappa0))``.

        Scales the radial flux ``(1/rho) du/dr`` of a Bessel term ``Z_n(k r)``
        to the background normalisation, independent of frequency.
        """
        return np.sqrt(self.rho0 * self.kappa0 / (self.rho * self.kappa))

    def wavenumber(self, omega):
        return omega * self.slowness


@dataclass(frozen=True)
class MediumSpec:
    """Concentric piecewise-constant medium inside the fictitious disk.

    ``layers`` are listed from the centre outwards; the background fills
    everything beyond the last layer. ``core_radius > 0`` inserts a sound-hard
    (Neumann) core occupying ``r < core_radius``.
    """

    layers: tuple[Layer, ...] = ()
    rho0: float = 1.0
    kappa0: float = 1.0
    core_radius: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(Layer(*l) if not isinstance(l, Layer) else l
                                                 for l in self.layers))
        if self.rho0 <= 0 or self.kappa0 <= 0:
            raise DomainError("background rho0 and kappa0 must be positive")
        radii = [l.outer_radius for l in self.layers]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainError("layer radii must be strictly increasing")
        for l in self.layers:
            if l.rho <= 0 or l.kappa <= 0:
                raise DomainError("layer rho and kappa must be positive")
        if self.core_radius < 0:
            raise DomainError("core radius must be non-negative")
        if self.layers and self.core_radius >= radii[0]:
            raise DomainError("sound-hard core must lie inside the first layer")

    @classmethod
    def homogeneous(cls, rho0=1.0, kappa0=1.0):
        return cls((), rho0, kappa0)

    @classmethod
    def air_bubble(cls, a=1.0, rho0=1.0, kappa0=1.0):
        return cls((Layer(a, AIR_BUBBLE_RHO * rho0, AIR_BUBBLE_KAPPA * kappa0),), rho0, kappa0)

    @classmethod
    def sound_hard(cls, a=1.0, rho0=1.0, kappa0=1.0):
        return cls((), rho0, kappa0, core_radius=a)

    @property
    def c0(self):
        return np.sqrt(self.kappa0 / self.rho0)

    @property
    def outer_radius(self):
        """Radius enclosing every inhomogeneity (0 for a homogeneous medium)."""
        if self.layers:
            return self.layers[-1].outer_radius
        return self.core_radius

    @property
    def is_homogeneous(self):
        return not self.layers and self.core_radius == 0

    def wavenumber(self, omega):
        """Background wavenumber ``k = omega sqrt(rho0 / kappa0)``."""
        return omega * np.sqrt(self.rho0 / self.kappa0)

    def check_disk(self, R):
        if R <= 0:
            raise DomainError("disk radius must be positive")
        if self.outer_radius >= R:
            raise DomainError(f"medium extends to r = {self.outer_radius}, beyond disk radius {R}")

    def regions(self, R):
        """Material annuli covering ``core_radius <= r <= R``, innermost first."""
        self.check_disk(R)
        out = []
        r_in = self.core_radius
        for l in self.layers:
            out.append(Region(r_in, l.outer_radius, l.rho, l.kappa, self.rho0, self.kappa0))
            r_in = l.outer_radius
        out.append(Region(r_in, R, self.rho0, self.kappa0, self.rho0, self.kappa0))
        return tuple(out)


@dataclass(frozen=True)
class FictitiousDisk:
    R: float = 1.0

    def __post_init__(self):
        if self.R <= 0:
            raise DomainError("disk radius must be positive")


def polar_angle(x):
    """Polar angle of points ``x[..., 0], x[..., 1]`` via the two-argument arctangent."""
    x = np.asarray(x, dtype=float)
    return np.arctan2(x[..., 1], x[..., 0])


def _unit(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (2,) or abs(np.hypot(*p) - 1.0) > 1e-12:
        raise DomainError(f"plane-wave direction must be a unit 2-vector, got {p!r}")
    return p


def plane_wave_coefficients(p, lmax):
    """Cylindrical-wave coefficients of ``exp(i k p.x)`` for ``l = -lmax..lmax``.

    The same coefficient ``(p2 + i p1)**l / 2`` multiplies both the incoming
    ``H2_l`` and the outgoing ``H1_l`` wave of order ``l``.
    """
    p = _unit(p)
    l = np.arange(-lmax, lmax + 1)
    base = complex(p[1], p[0])
    return 0.5 * base ** l.astype(float)


@dataclass(frozen=True)
class IncidentField:
    """Incident wave given either as a plane-wave direction or as raw coefficients.

    ``coefficients`` maps ``l`` to the incoming coefficient. For raw
    coefficients, ``outgoing`` optionally holds the matching incident outgoing
    part; it defaults to the incoming one, as for a regular incident field.
    """

    direction: tuple[float, float] | None = None
    coefficients: dict[int, complex] = field(default_factory=dict)
    outgoing: dict[int, complex] | None = None

    def __post_init__(self):
        if self.direction is None and not self.coefficients:
            raise DomainError("incident field needs a direction or coefficients")
        if self.direction is not None:
            _unit(self.direction)
        for v in self.coefficients.values():
            if not np.isfinite(complex(v)):
                raise DomainError("incident coefficients must be finite")

    @classmethod
    def plane_wave(cls, direction):
        return cls(direction=tuple(float(x) for x in direction))

    def incoming(self, orders):
        """Incoming coefficients ``alpha^-_l`` on the given ``l`` values."""
        orders = np.asarray(orders)
        if self.direction is not None:
            p = np.asarray(self.direction)
            return 0.5 * complex(p[1], p[0]) ** orders.astype(float)
        return np.array([complex(self.coefficients.get(int(l), 0.0)) for l in orders])

    def incident_outgoing(self, orders):
        """Outgoing part of the incident field itself, ``alpha^{+,in}_l``."""
        if self.direction is not None or self.outgoing is None:
            return self.incoming(orders)
        return np.array([complex(self.outgoing.get(int(l), 0.0)) for l in orders])
