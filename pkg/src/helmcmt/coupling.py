"""Frequency-independent coupling data of the mixed Neumann/Dirichlet basis.

``H`` is the (1/kappa)-weighted overlap of Neumann with Dirichlet modes,
``L`` the boundary flux of Dirichlet modes tested against Neumann traces,
and ``gamma`` the angular Fourier coefficients of Neumann traces on the disk
boundary. Matrices are stored per angular block; the solver works on the
assembled dense versions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from .errors import DomainError, SolverError
from .model import FictitiousDisk, MediumSpec
from .radial_modes import DIRICHLET, NEUMANN, RadialMode, overlap_matrix, solve_modes
from .specfun import cyl_eval

__all__ = [
    "CouplingBlock",
    "CouplingData",
    "angular_overlap",
    "boundary_L",
    "build_coupling",
    "exp_overlap",
    "gamma_matrix",
    "gram_H",
    "rokhlin_lmax",
    "threshold_omega",
]


def angular_overlap(a: RadialMode, b: RadialMode):
    """``int_0^{2 pi}`` of the product of the two angular factors."""
    if a.order != b.order or a.parity != b.parity:
        return 0.0
    return 2.0 * np.pi if a.order == 0 else np.pi


def exp_overlap(mode: RadialMode, l):
    """``int_0^{2 pi} angular(theta) exp(i l theta) d theta``."""
    n = mode.order
    if abs(l) != n:
        return 0.0
    if n == 0:
        return 2.0 * np.pi
    if mode.parity == "cos":
        return np.pi
    return 1j * np.pi * np.sign(l)


def gamma_matrix(neumann_modes, l_values, R=None):
    """``gamma_ml = (1/R) int_{dB_R} u_m exp(i l theta) dGamma`` from boundary traces."""
    l_values = np.asarray(l_values, dtype=int)
    if l_values.size == 0:
        raise DomainError("empty set of angular orders")
    g = np.zeros((len(neumann_modes), l_values.size), dtype=complex)
    for i, m in enumerate(neumann_modes):
        if m.kind != NEUMANN:
            raise DomainError("gamma is defined for Neumann modes only")
        trace = m.boundary_value
        for j, l in enumerate(l_values):
            g[i, j] = trace * exp_overlap(m, l)
    return g


def _profiles(modes, region_index, r):
    """Radial profiles of ``modes`` (same order) in one region at scalar ``r``."""
    out = np.empty(len(modes))
    for j, m in enumerate(modes):
        g = m.regions[region_index]
        k = g.wavenumber(m.omega)
        cj, cy = m.coeffs[region_index]
        if k == 0.0:
            out[j] = cj if m.order == 0 else 0.0
            continue
        val = cj * cyl_eval("J", m.order, k * r)
        if cy != 0.0:
            val += cy * cyl_eval("Y", m.order, k * r)
        out[j] = val
    return out


def _radial_gram(modes_a, modes_b, method="analytic", epsabs=1e-13):
    """``sum_regions int (1/kappa) f_a f_b r dr`` for modes sharing one order.

    ``method="analytic"`` uses closed-form Bessel-product integrals;
    ``method="quad"`` integrates adaptively region by region.
    """
    if method == "analytic":
        return overlap_matrix(list(modes_a), list(modes_b))
    if method != "quad":
        raise ValueError(f"unknown overlap method {method!r}")
    regions = modes_a[0].regions
    total = np.zeros((len(modes_a), len(modes_b)))
    for i, g in enumerate(regions):
        def integrand(r, i=i, g=g):
            return np.outer(_profiles(modes_a, i, r), _profiles(modes_b, i, r)) * (r / g.kappa)

        val, err = quad_vec(integrand, g.r_in, g.r_out, epsabs=epsabs, epsrel=1e-12,
                            norm="max", limit=20000)
        if not err <= 100 * epsabs:
            raise SolverError(f"overlap quadrature did not converge on [{g.r_in}, {g.r_out}] "
                              f"(error estimate {err:.3g})")
        total += val
    return total


def _group(modes):
    groups = {}
    for j, m in enumerate(modes):
        groups.setdefault((m.order, m.parity), []).append(j)
    return groups


def gram_H(modes_a, modes_b, method="analytic"):
    """Weighted overlaps ``int_{B_R} (1/kappa) u_a u_b dOmega``.

    With Neumann rows and Dirichlet columns this is the matrix ``H``; with the
    same set on both sides it is the identity for normalised modes.
    """
    out = np.zeros((len(modes_a), len(modes_b)))
    ga, gb = _group(modes_a), _group(modes_b)
    for key, ia in ga.items():
        ib = gb.get(key)
        if not ib:
            continue
        sub = _radial_gram([modes_a[i] for i in ia], [modes_b[j] for j in ib], method)
        out[np.ix_(ia, ib)] = sub * angular_overlap(modes_a[ia[0]], modes_b[ib[0]])
    return out


def boundary_L(neumann_modes, dirichlet_modes, rho0=1.0):
    """``L_mm' = int_{dB_R} (1/rho0) (d u^D_m'/dn) u^N_m dGamma`` from traces."""
    out = np.zeros((len(neumann_modes), len(dirichlet_modes)))
    values = [a.boundary_value for a in neumann_modes]
    derivs = [b.boundary_derivative for b in dirichlet_modes]
    for i, a in enumerate(neumann_modes):
        for j, b in enumerate(dirichlet_modes):
            ang = angular_overlap(a, b)
            if ang:
                out[i, j] = ang * a.R * values[i] * derivs[j] / rho0
    return out


@dataclass(frozen=True)
class CouplingBlock:
    """Coupling matrices of one angular block.

    ``order`` is the angular order of a concentric block, or ``None`` for a
    block of externally computed modes without a single order.
    """

    order: int | None
    omega_n: np.ndarray
    omega_d: np.ndarray
    l_values: np.ndarray
    gamma: np.ndarray
    H: np.ndarray
    L: np.ndarray

    def __post_init__(self):
        nn, nd, nl = len(self.omega_n), len(self.omega_d), len(self.l_values)
        if self.gamma.shape != (nn, nl):
            raise DomainError(f"gamma block has shape {self.gamma.shape}, expected {(nn, nl)}")
        for name in ("H", "L"):
            if getattr(self, name).shape != (nn, nd):
                raise DomainError(f"{name} block has shape {getattr(self, name).shape}, "
                                  f"expected {(nn, nd)}")


@dataclass(frozen=True)
class CouplingData:
    """Everything the coupled-mode equation needs apart from the frequency."""

    blocks: tuple[CouplingBlock, ...]
    R: float
    rho0: float = 1.0
    kappa0: float = 1.0
    provenance: str = "analytic"
    neumann_modes: tuple = field(default=(), compare=False, repr=False)
    dirichlet_modes: tuple = field(default=(), compare=False, repr=False)

    @property
    def lmax(self):
        return int(max((np.abs(b.l_values).max() for b in self.blocks if len(b.l_values)), default=0))

    @property
    def orders(self):
        """Retained cylindrical-wave orders ``-lmax..lmax``."""
        return np.arange(-self.lmax, self.lmax + 1)

    @property
    def c0(self):
        return np.sqrt(self.kappa0 / self.rho0)

    @property
    def n_neumann(self):
        return sum(len(b.omega_n) for b in self.blocks)

    @property
    def n_dirichlet(self):
        return sum(len(b.omega_d) for b in self.blocks)

    @property
    def lambda_n(self):
        return np.concatenate([b.omega_n for b in self.blocks]) ** 2

    @property
    def lambda_d(self):
        return np.concatenate([b.omega_d for b in self.blocks]) ** 2

    def _block_diag(self, name):
        out = np.zeros((self.n_neumann, self.n_dirichlet))
        i = j = 0
        for b in self.blocks:
            m = getattr(b, name)
            out[i:i + m.shape[0], j:j + m.shape[1]] = m
            i += m.shape[0]
            j += m.shape[1]
        return out

    @property
    def H(self):
        return self._block_diag("H")

    @property
    def L(self):
        return self._block_diag("L")

    @property
    def gamma(self):
        orders = self.orders
        col = {int(l): j for j, l in enumerate(orders)}
        out = np.zeros((self.n_neumann, orders.size), dtype=complex)
        i = 0
        for b in self.blocks:
            for j, l in enumerate(b.l_values):
                out[i:i + len(b.omega_n), col[int(l)]] = b.gamma[:, j]
            i += len(b.omega_n)
        return out

    @property
    def max_eigenfrequency(self):
        return float(max(np.sqrt(self.lambda_n).max(initial=0.0),
                         np.sqrt(self.lambda_d).max(initial=0.0)))

    def restrict(self, lmax):
        """Drop blocks of angular order above ``lmax`` (concentric data only)."""
        keep = tuple(b for b in self.blocks if b.order is not None and b.order <= lmax)
        return CouplingData(keep, self.R, self.rho0, self.kappa0, self.provenance)


def threshold_omega(C, R, c0=1.0):
    """Frequency above which the truncation rule stops adding modes:
    ``omega R / (2 pi c) > 2 C``."""
    if C <= 0:
        raise DomainError("truncation constant C must be positive")
    return 4.0 * np.pi * C * c0 / R


def rokhlin_lmax(kR):
    """Number of retained cylindrical orders, ``ceil(kR + 5 (kR)^(1/3) + 4)``."""
    if kR < 0:
        raise DomainError("kR must be non-negative")
    return int(np.ceil(kR + 5.0 * np.cbrt(kR) + 4.0))


def _block_from_modes(order, neu, dirichlet, rho0):
    l_values = np.array([0] if order == 0 else [-order, order])
    return CouplingBlock(
        order=order,
        omega_n=np.array([m.omega for m in neu]),
        omega_d=np.array([m.omega for m in dirichlet]),
        l_values=l_values,
        gamma=gamma_matrix(neu, l_values),
        H=gram_H(neu, dirichlet),
        L=boundary_L(neu, dirichlet, rho0),
    )


def build_coupling(medium: MediumSpec, disk: FictitiousDisk, lmax=0, C=None, counts=None):
    """Analytic coupling data for a concentric medium.

    Angular orders ``0..lmax`` are kept. Per order and kind the modes are
    either the first ``counts = (N_N, N_D)`` radial modes or, given ``C``, all
    modes up to ``omega R / (2 pi c) = 2 C`` plus the first one above it.
    Orders ``n > 0`` contribute adjacent cos/sin pairs.
    """
    R = disk.R
    medium.check_disk(R)
    if (C is None) == (counts is None):
        raise ValueError("give exactly one of C and counts")
    blocks, all_n, all_d = [], [], []
    for n in range(lmax + 1):
        if C is not None:
            w = threshold_omega(C, R, medium.c0)
            sn = solve_modes(NEUMANN, medium, R, n, omega_max=w)
            sd = solve_modes(DIRICHLET, medium, R, n, omega_max=w)
        else:
            sn = solve_modes(NEUMANN, medium, R, n, count=counts[0])
            sd = solve_modes(DIRICHLET, medium, R, n, count=counts[1])
        neu, dirichlet = sn.with_parities(), sd.with_parities()
        blocks.append(_block_from_modes(n, neu, dirichlet, medium.rho0))
        all_n.extend(neu)
        all_d.extend(dirichlet)
    return CouplingData(tuple(blocks), float(R), medium.rho0, medium.kappa0, "analytic",
                        tuple(all_n), tuple(all_d))

