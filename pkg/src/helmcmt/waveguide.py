"""Coupled-mode theory for a semi-infinite duct closed by a rectangular stub.

The duct occupies ``x1 > 0, |x2| < L_w / 2`` and the stub
``-W < x1 < 0`` with the same width, so the cavity is the closed
continuation of the duct. Cavity modes and guided modes are known in closed
form, and the single-mode reflection coefficient has an exact mode-matching
value to compare against.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SolverError

__all__ = [
    "CavityMode",
    "CavityModeSet",
    "WaveguideSolution",
    "WaveguideSystem",
    "axial_wavenumber",
    "cavity_modes",
    "effective_hamiltonian",
    "guided_orders",
    "solve_waveguide_cme",
    "stub_reflection_oracle",
    "transverse_shape",
    "waveguide_gamma",
]

# evanescent guided orders are kept while |K_l| L_w stays below this
EVANESCENT_CAP = 40.0


@dataclass(frozen=True)
class WaveguideSystem:
    """Duct of width ``width`` (``L_w``) attached to a closed stub of depth ``depth`` (``W``)."""

    width: float
    depth: float
    rho0: float = 1.0
    kappa0: float = 1.0

    def __post_init__(self):
        if not (self.width > 0 and self.depth > 0):
            raise DomainError("duct width and stub depth must be positive")
        if not (self.rho0 > 0 and self.kappa0 > 0):
            raise DomainError("rho0 and kappa0 must be positive")

    @property
    def c0(self):
        return np.sqrt(self.kappa0 / self.rho0)

    def wavenumber(self, omega):
        return omega * np.sqrt(self.rho0 / self.kappa0)

    def cutoff(self, l):
        """Angular frequency above which guided order ``l`` propagates."""
        return np.pi * l * self.c0 / self.width


def transverse_shape(l, x2, width):
    """``chi_l(x2) = sqrt((2 - delta_l0) / L_w) cos(pi l (x2 / L_w + 1/2))``."""
    if l < 0:
        raise DomainError("guided order must be non-negative")
    x2 = np.asarray(x2, dtype=float)
    norm = np.sqrt((1.0 if l == 0 else 2.0) / width)
    return norm * np.cos(np.pi * l * (x2 / width + 0.5))


def axial_wavenumber(l, omega, system: WaveguideSystem):
    """``K_l = sqrt(k^2 - (pi l / L_w)^2)`` on the branch with ``Im K_l >= 0``."""
    k = system.wavenumber(omega)
    K = np.sqrt(complex(k * k - (np.pi * l / system.width) ** 2))
    return -K if K.imag < 0 else K


def guided_orders(system: WaveguideSystem, omega, cap=EVANESCENT_CAP):
    """Propagating orders plus evanescent ones with ``|K_l| L_w <= cap``."""
    out = []
    l = 0
    while True:
        K = axial_wavenumber(l, omega, system)
        if K.imag > 0 and abs(K) * system.width > cap:
            break
        out.append(l)
        l += 1
    return np.array(out)


@dataclass(frozen=True)
class CavityMode:
    """``A cos(p pi (x1 + W) / W) cos(q pi (x2 / L_w + 1/2))`` with ``int (1/kappa0) u^2 = 1``."""

    p: int
    q: int
    omega: float
    amplitude: float
    depth: float
    width: float

    def __call__(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        return (self.amplitude * np.cos(self.p * np.pi * (x1 + self.depth) / self.depth)
                * np.cos(self.q * np.pi * (x2 / self.width + 0.5)))


@dataclass(frozen=True)
class CavityModeSet:
    system: WaveguideSystem
    modes: tuple[CavityMode, ...]

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, i):
        return self.modes[i]

    @property
    def omegas(self):
        return np.array([m.omega for m in self.modes])


def cavity_modes(system: WaveguideSystem, count) -> CavityModeSet:
    """The ``count`` lowest stub modes, ordered by ``(omega, q, p)``."""
    if count < 1:
        raise DomainError("count must be >= 1")
    W, Lw, c = system.depth, system.width, system.c0
    # every (p, q) with p < count and q < count covers the lowest count modes
    cands = []
    for p in range(count):
        for q in range(count):
            w = c * np.pi * np.hypot(p / W, q / Lw)
            cands.append((w, q, p))
    cands.sort()
    modes = []
    for w, q, p in cands[:count]:
        amp = np.sqrt(system.kappa0 * (1.0 if p == 0 else 2.0) * (1.0 if q == 0 else 2.0)
                      / (W * Lw))
        modes.append(CavityMode(p, q, float(w), float(amp), W, Lw))
    return CavityModeSet(system, tuple(modes))


def waveguide_gamma(modeset: CavityModeSet, orders):
    """``gamma_ml = int_{Gamma_in} u_m chi_l dx2`` on the stub mouth ``x1 = 0``.

    Transverse orthogonality leaves ``(-1)^p sqrt(kappa0 (2 - delta_p0) / W)``
    when ``q = l`` and zero otherwise.
    """
    system = modeset.system
    orders = np.asarray(orders, dtype=int)
    g = np.zeros((len(modeset), orders.size))
    col = {int(l): j for j, l in enumerate(orders)}
    for i, m in enumerate(modeset.modes):
        j = col.get(m.q)
        if j is not None:
            g[i, j] = (-1) ** m.p * np.sqrt(system.kappa0 * (1.0 if m.p == 0 else 2.0)
                                            / system.depth)
    return g


@dataclass(frozen=True)
class WaveguideSolution:
    omega: float
    orders: np.ndarray
    xi: np.ndarray
    alpha_minus: np.ndarray
    alpha_plus: np.ndarray
    matrix: np.ndarray
    residual: float

    @property
    def reflection(self):
        """``alpha^+_0 / alpha^-_0``."""
        return complex(self.alpha_plus[0] / self.alpha_minus[0])


def effective_hamiltonian(system, modeset, omega, orders=None):
    """``Lambda - gamma G(omega) gamma^H`` with ``G_ll = (i / rho0) K_l``."""
    if orders is None:
        orders = guided_orders(system, omega)
    g = waveguide_gamma(modeset, orders)
    G = np.array([1j * axial_wavenumber(l, omega, system) / system.rho0 for l in orders])
    H = np.diag(modeset.omegas ** 2).astype(complex) - (g * G[None, :]) @ g.T
    return H, g, G


def solve_waveguide_cme(system: WaveguideSystem, omega, alpha_minus, n_cavity=80):
    """Cavity coefficients and outgoing guided amplitudes.

    Solves ``(Lambda - omega^2 - gamma G gamma^H) xi = -2 gamma G alpha^-`` and
    returns ``alpha^+ = gamma^H xi - alpha^-``. ``alpha_minus`` lists incoming
    amplitudes from order 0 upwards; missing orders are zero.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    modes = cavity_modes(system, n_cavity)
    orders = guided_orders(system, omega)
    a = np.zeros(orders.size, dtype=complex)
    given = np.atleast_1d(np.asarray(alpha_minus, dtype=complex))
    if given.size > orders.size:
        raise DomainError(f"{given.size} incoming amplitudes for {orders.size} guided orders")
    a[:given.size] = given
    H, g, G = effective_hamiltonian(system, modes, omega, orders)
    M = H - omega ** 2 * np.eye(len(modes))
    rhs = -2.0 * (g * G[None, :]) @ a
    try:
        xi = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"singular waveguide coupled-mode matrix at omega = {omega}") from exc
    scale = np.linalg.norm(rhs)
    res = float(np.linalg.norm(M @ xi - rhs) / scale) if scale else 0.0
    if res > 1e-10:
        raise SolverError(f"waveguide solve residual {res:.3g} at omega = {omega}")
    alpha_plus = g.T @ xi - a
    return WaveguideSolution(float(omega), orders, xi, a, alpha_plus, M, res)


def stub_reflection_oracle(system: WaveguideSystem, omega):
    """Mode-matching reflection ``(1 + i tan K_0 W) / (1 - i tan K_0 W)``.

    Valid while only the plane guided mode propagates; at ``K_0 W = pi/2 mod pi``
    the limit ``-1`` is returned.
    """
    if not omega > 0:
        raise DomainError("omega must be positive")
    if omega >= system.cutoff(1):
        raise DomainError("more than one guided mode propagates")
    kw = axial_wavenumber(0, omega, system).real * system.depth
    if abs(np.cos(kw)) < 1e-15:
        return -1.0 + 0.0j
    t = np.tan(kw)
    return complex((1 + 1j * t) / (1 - 1j * t))
