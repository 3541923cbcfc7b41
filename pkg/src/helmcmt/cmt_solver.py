"""Coupled-mode equation, scattering matrix and far-field quantities."""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgWarning, lu_factor, lu_solve

from .coupling import CouplingData, rokhlin_lmax, threshold_omega
from .errors import DomainError, SolverError
from .model import FictitiousDisk, IncidentField, MediumSpec
from .radial_modes import DIRICHLET, NEUMANN, eigenfrequencies
from .specfun import cyl_deriv, cyl_eval

__all__ = [
    "CmeBlocks",
    "ScatteringResult",
    "Truncation",
    "assemble_blocks",
    "cross_section",
    "far_field",
    "nudge_off_spectrum",
    "optical_theorem_residual",
    "scattered_coefficients",
    "scattering_matrix",
    "solve_cme",
    "solve_scattering",
    "sweep",
    "truncation_counts",
    "unitarity_residual",
]

RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class CmeBlocks:
    """Frequency-dependent pieces of the coupled-mode equation at one ``omega``.

    ``matrix`` is the full block system acting on ``(xi_N, xi_D)``; ``G`` and
    ``S_bg`` are the diagonals of the exterior admittance and the background
    scattering matrix over ``orders``.
    """

    omega: float
    k: float
    orders: np.ndarray
    G: np.ndarray
    B: np.ndarray
    S_bg: np.ndarray
    A: np.ndarray
    matrix: np.ndarray
    n_neumann: int

    def rhs(self, alpha_minus):
        alpha_minus = np.asarray(alpha_minus, dtype=complex)
        out = np.zeros(self.matrix.shape[0], dtype=complex)
        out[:self.n_neumann] = self.B @ alpha_minus
        return out


def assemble_blocks(coupling: CouplingData, omega):
    if not omega > 0:
        raise DomainError("omega must be positive")
    rho0 = coupling.rho0
    k = omega * np.sqrt(rho0 / coupling.kappa0)
    kR = k * coupling.R
    orders = coupling.orders
    h1 = np.array([complex(cyl_eval("H1", l, kR)) for l in orders])
    h2 = np.array([complex(cyl_eval("H2", l, kR)) for l in orders])
    h1p = np.array([complex(cyl_deriv("H1", l, kR)) for l in orders])

    gamma = coupling.gamma
    G = kR * h1p / (2.0 * np.pi * rho0 * h1)
    B = -4j * gamma / (np.pi * rho0 * h1[None, :])
    S_bg = -h2 / h1
    A = gamma.conj().T / (2.0 * np.pi * h1[:, None])

    w2 = omega ** 2
    dn = coupling.lambda_n - w2
    dd = coupling.lambda_d - w2
    H, L = coupling.H, coupling.L
    nn, nd = dn.size, dd.size
    M = np.empty((nn + nd, nn + nd), dtype=complex)
    M[:nn, :nn] = np.diag(dn) - (gamma * G[None, :]) @ gamma.conj().T
    M[:nn, nn:] = H * dd[None, :] + L
    M[nn:, :nn] = H.T * dn[None, :]
    M[nn:, nn:] = np.diag(dd)
    return CmeBlocks(float(omega), float(k), orders, G, B, S_bg, A, M, nn)


def _solve(blocks: CmeBlocks, rhs):
    """Dense LU solve with up to two steps of iterative refinement.

    Fails when the normwise backward error stays above ``RESIDUAL_TOL``.
    """
    M = blocks.matrix
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            lu = lu_factor(M)
        except (np.linalg.LinAlgError, ValueError, LinAlgWarning) as exc:
            raise SolverError(f"coupled-mode matrix singular at omega = {blocks.omega:.12g}") from exc
    x = lu_solve(lu, rhs)
    scale = np.linalg.norm(rhs)
    if scale == 0:
        return x
    for _ in range(2):
        r = rhs - M @ x
        if np.linalg.norm(r) <= RESIDUAL_TOL * scale:
            return x
        x = x + lu_solve(lu, r)
    r = np.linalg.norm(rhs - M @ x)
    backward = r / (np.linalg.norm(M) * np.linalg.norm(x) + scale)
    if not backward <= RESIDUAL_TOL:
        raise SolverError(f"coupled-mode solve at omega = {blocks.omega:.12g} left backward "
                          f"error {backward:.3g}")
    return x


def solve_cme(blocks: CmeBlocks, alpha_minus):
    """Interior coefficients ``(xi_N, xi_D)`` for incoming coefficients ``alpha_minus``."""
    x = _solve(blocks, blocks.rhs(alpha_minus))
    return x[:blocks.n_neumann], x[blocks.n_neumann:]


def _scattering_from_blocks(blocks):
    nl = blocks.orders.size
    rhs = np.zeros((blocks.matrix.shape[0], nl), dtype=complex)
    rhs[:blocks.n_neumann] = blocks.B
    x = _solve(blocks, rhs)
    return np.diag(blocks.S_bg) + blocks.A @ x[:blocks.n_neumann]


def scattering_matrix(coupling: CouplingData, omega):
    """``S(omega)`` over ``coupling.orders``, mapping incoming to outgoing coefficients."""
    return _scattering_from_blocks(assemble_blocks(coupling, omega))


def scattered_coefficients(S, alpha_minus, alpha_plus_in=None):
    """``F = S alpha^- - alpha^{+,in}``; the incident outgoing part defaults to ``alpha^-``."""
    alpha_minus = np.asarray(alpha_minus, dtype=complex)
    if alpha_plus_in is None:
        alpha_plus_in = alpha_minus
    return S @ alpha_minus - np.asarray(alpha_plus_in, dtype=complex)


def far_field(F, orders, k, theta):
    """Far-field pattern ``i sqrt(2/(pi k)) sum_l F_l exp(i l (theta - pi/2))``."""
    if not k > 0:
        raise DomainError("k must be positive")
    theta = np.asarray(theta, dtype=float)
    phase = np.exp(1j * np.multiply.outer(theta - np.pi / 2, np.asarray(orders)))
    return 1j * np.sqrt(2.0 / (np.pi * k)) * (phase @ np.asarray(F, dtype=complex))


def cross_section(F, k):
    """Scattering cross section ``(4/k) sum |F_l|^2``."""
    if not k > 0:
        raise DomainError("k must be positive")
    return 4.0 / k * float(np.sum(np.abs(np.asarray(F)) ** 2))


def optical_theorem_residual(F, orders, k, p):
    """Relative mismatch between ``sigma`` and ``Im[-sqrt(8 pi / k) A_inf(p)]``."""
    sigma = cross_section(F, k)
    theta = np.arctan2(p[1], p[0])
    forward = np.imag(-np.sqrt(8.0 * np.pi / k) * far_field(F, orders, k, theta))
    return float(abs(sigma - forward) / max(sigma, np.finfo(float).tiny))


def unitarity_residual(S):
    """``||S^H S - I||_F``."""
    S = np.asarray(S)
    return float(np.linalg.norm(S.conj().T @ S - np.eye(S.shape[0])))


@dataclass(frozen=True)
class ScatteringResult:
    omega: float
    k: float
    orders: np.ndarray
    S: np.ndarray
    xi_n: np.ndarray
    xi_d: np.ndarray
    F: np.ndarray
    sigma: float
    unitarity: float
    optical_residual: float | None


def solve_scattering(coupling: CouplingData, omega, incident: IncidentField):
    blocks = assemble_blocks(coupling, omega)
    orders = blocks.orders
    alpha_minus = incident.incoming(orders)
    S = _scattering_from_blocks(blocks)
    xi_n, xi_d = solve_cme(blocks, alpha_minus)
    F = scattered_coefficients(S, alpha_minus, incident.incident_outgoing(orders))
    optical = None
    if incident.direction is not None:
        optical = optical_theorem_residual(F, orders, blocks.k, incident.direction)
    return ScatteringResult(blocks.omega, blocks.k, orders, S, xi_n, xi_d, F,
                            cross_section(F, blocks.k), unitarity_residual(S), optical)


def nudge_off_spectrum(omega, coupling: CouplingData, rel=1e-9):
    """Shift ``omega`` by ``rel`` if it coincides with a retained eigenfrequency."""
    eig = np.sqrt(np.concatenate([coupling.lambda_n, coupling.lambda_d]))
    if np.any(np.abs(eig - omega) <= rel * omega * 1e-3):
        return omega * (1.0 + rel)
    return omega


def sweep(coupling: CouplingData, omegas, incident: IncidentField, max_workers=None):
    """Scattering results over a frequency grid, returned in grid order.

    A failed solve yields ``None`` in its slot instead of aborting the sweep.
    """
    def one(w):
        try:
            return solve_scattering(coupling, nudge_off_spectrum(float(w), coupling), incident)
        except SolverError:
            return None

    if max_workers == 1:
        return [one(w) for w in omegas]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(one, omegas))


@dataclass(frozen=True)
class Truncation:
    """Mode and order counts chosen by the truncation rule."""

    n_neumann: int
    n_dirichlet: int
    lmax: int
    per_order: dict


def truncation_counts(C, disk: FictitiousDisk, medium: MediumSpec, omega_max, lmax=None):
    """Counts from the rule ``omega_m R / (2 pi c) > 2 C`` and the order count.

    Per angular order and kind the count is the smallest ``m`` whose
    eigenfrequency exceeds the threshold. ``lmax`` defaults to
    :func:`rokhlin_lmax` at the largest swept wavenumber. Totals count each
    cos/sin pair twice.
    """
    w = threshold_omega(C, disk.R, medium.c0)
    if lmax is None:
        lmax = rokhlin_lmax(medium.wavenumber(omega_max) * disk.R)
    per_order = {}
    total_n = total_d = 0
    for n in range(lmax + 1):
        nn = len(eigenfrequencies(NEUMANN, medium, disk.R, n, omega_max=w))
        nd = len(eigenfrequencies(DIRICHLET, medium, disk.R, n, omega_max=w))
        per_order[n] = (nn, nd)
        mult = 1 if n == 0 else 2
        total_n += mult * nn
        total_d += mult * nd
    return Truncation(total_n, total_d, lmax, per_order)
