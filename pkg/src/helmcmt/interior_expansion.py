"""Least-squares fits of radial fields by the mixed Neumann/Dirichlet basis.

The basis is not orthogonal: Neumann modes are orthonormal among
themselves, as are Dirichlet modes, but the two families overlap through
``H``. Normal equations use the block Gram matrix ``[[I, H], [H^T, I]]``
(with the diagonal blocks evaluated, so they equal ``I`` only up to
round-off) and are solved on the eigenvectors whose eigenvalues survive a relative
cutoff, which keeps the nearly dependent tail of the basis from blowing up.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad_vec
from scipy.special import roots_legendre

from .coupling import gram_H
from .errors import DomainError, SolverError
from .radial_modes import DIRICHLET, NEUMANN, angular_factor, bessel_product_integral
from .specfun import cyl_eval

__all__ = [
    "BesselTarget",
    "GRAM_CUTOFF",
    "ERROR_GRID",
    "IllConditionedBasisWarning",
    "MixedBasis",
    "MixedExpansion",
    "fit_expansion",
    "linf_rel_error",
]

# relative eigenvalue cutoff of the Gram matrix
GRAM_CUTOFF = 1e-15
ERROR_GRID = 2048


class IllConditionedBasisWarning(UserWarning):
    """Gram eigenvalues were discarded below the cutoff."""


def _as_modes(modes, kind):
    modes = tuple(modes)
    for m in modes:
        if m.kind != kind:
            raise DomainError(f"expected {kind}-modes, got a {m.kind}-mode")
    return modes


def _check_common(neumann, dirichlet):
    both = neumann + dirichlet
    if not both:
        raise DomainError("the combined basis is empty")
    keys = {(m.order, m.parity) for m in both}
    if len(keys) != 1:
        raise DomainError("all basis modes must share one angular order and parity")
    return both[0]


@dataclass(frozen=True)
class BesselTarget:
    """Radial profile ``J_n(k r)``, the restriction of a regular cylindrical wave."""

    k: float
    order: int = 0

    def __call__(self, r):
        return np.asarray(cyl_eval("J", self.order, self.k * np.asarray(r, dtype=float))).real


def _evaluate_target(target, r):
    return np.asarray(target(r), dtype=float)


def _project_bessel(target: BesselTarget, modes, regions, order):
    if target.order != order:
        raise DomainError("target and basis have different angular orders")
    proj = np.zeros(len(modes))
    tt = 0.0
    one = (1.0, 0.0)
    for i, g in enumerate(regions):
        for j, m in enumerate(modes):
            proj[j] += bessel_product_integral(order, target.k, one, g.wavenumber(m.omega),
                                               tuple(m.coeffs[i]), g.r_in, g.r_out) / g.kappa
        tt += bessel_product_integral(order, target.k, one, target.k, one,
                                      g.r_in, g.r_out) / g.kappa
    ang = angular_factor(order)
    return proj * ang, tt * ang


def _project(target, modes, regions, order):
    """``int (1/kappa) t u_m dOmega`` for every mode and ``int (1/kappa) t^2 dOmega``."""
    if isinstance(target, BesselTarget):
        return _project_bessel(target, modes, regions, order)
    proj = np.zeros(len(modes))
    tt = 0.0
    for i, g in enumerate(regions):
        def integrand(r, g=g):
            t = float(_evaluate_target(target, r))
            vals = np.array([m.radial(r) for m in modes] + [t], dtype=float)
            return vals * t * r / g.kappa

        val, err = quad_vec(integrand, g.r_in, g.r_out, epsabs=1e-14, epsrel=1e-12,
                            norm="max", limit=20000)
        if not err <= 1e-11:
            raise SolverError(f"projection quadrature did not converge on [{g.r_in}, {g.r_out}]")
        proj += val[:-1]
        tt += val[-1]
    ang = angular_factor(order)
    return proj * ang, tt * ang


@dataclass(frozen=True)
class MixedExpansion:
    """Coefficients of a field in the mixed basis.

    ``residual`` is the (1/kappa)-weighted L2 norm of the fit error and
    ``rank`` the number of Gram eigenvectors kept by the cutoff.
    """

    xi_n: np.ndarray
    xi_d: np.ndarray
    neumann: tuple
    dirichlet: tuple
    residual: float
    rank: int

    def __post_init__(self):
        if len(self.xi_n) != len(self.neumann) or len(self.xi_d) != len(self.dirichlet):
            raise DomainError("coefficient lengths do not match the mode sets")
        if not self.residual >= 0:
            raise DomainError("residual must be non-negative")

    @property
    def R(self):
        return (self.neumann + self.dirichlet)[0].R

    @property
    def r_min(self):
        return (self.neumann + self.dirichlet)[0].regions[0].r_in

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for c, m in zip(self.xi_n, self.neumann):
            out = out + c * m.radial(r)
        for c, m in zip(self.xi_d, self.dirichlet):
            out = out + c * m.radial(r)
        return out

    def __call__(self, r, theta=0.0):
        first = (self.neumann + self.dirichlet)[0]
        return self.radial(r) * first.angular(theta)


def _weighted_residual(expansion: MixedExpansion, target):
    """``||t - u||`` in the (1/kappa)-weighted norm by Gauss-Legendre per region.

    Evaluated directly; ``||t||^2 - x.b`` would cancel to ~1e-8.
    """
    modes = expansion.neumann + expansion.dirichlet
    first = modes[0]
    total = 0.0
    for g in first.regions:
        kmax = max(g.wavenumber(m.omega) for m in modes)
        kmax = max(kmax, getattr(target, "k", 0.0))
        nodes = int(max(64, 4 * kmax * (g.r_out - g.r_in)))
        x, w = roots_legendre(nodes)
        half = 0.5 * (g.r_out - g.r_in)
        r = g.r_in + half * (x + 1)
        diff = _evaluate_target(target, r) - expansion.radial(r)
        total += half * np.sum(w * diff ** 2 * r) / g.kappa
    return float(np.sqrt(angular_factor(first.order) * total))


def _solve_gram(gram, rhs, cutoff):
    w, v = np.linalg.eigh(gram)
    keep = w > cutoff * w.max()
    if not np.all(keep):
        warnings.warn(f"dropped {int(np.sum(~keep))} of {w.size} Gram eigenvalues below "
                      f"{cutoff:g} relative", IllConditionedBasisWarning, stacklevel=3)
    vk = v[:, keep]
    return vk @ ((vk.T @ rhs) / w[keep]), int(keep.sum())


class MixedBasis:
    """Gram data for a target and the largest basis of interest.

    Fits on leading subsets ``(n_n, n_d)`` then reuse the overlaps instead
    of integrating again.
    """

    def __init__(self, target, neumann, dirichlet, cutoff=GRAM_CUTOFF):
        self.neumann = _as_modes(neumann, NEUMANN)
        self.dirichlet = _as_modes(dirichlet, DIRICHLET)
        first = _check_common(self.neumann, self.dirichlet)
        self.target = target
        self.cutoff = cutoff
        modes = self.neumann + self.dirichlet
        self.b, self.target_norm_sq = _project(target, modes, first.regions, first.order)
        if self.target_norm_sq == 0.0:
            raise DomainError("target vanishes identically")
        # the diagonal blocks are computed, not assumed to be I: eigenfrequency
        # round-off leaves ~1e-13 overlaps that the cutoff would otherwise amplify
        self.G_nn = gram_H(self.neumann, self.neumann)
        self.G_dd = gram_H(self.dirichlet, self.dirichlet)
        if self.neumann and self.dirichlet:
            self.H = gram_H(self.neumann, self.dirichlet)
        else:
            self.H = np.zeros((len(self.neumann), len(self.dirichlet)))

    def fit(self, n_n=None, n_d=None) -> MixedExpansion:
        n_n = len(self.neumann) if n_n is None else n_n
        n_d = len(self.dirichlet) if n_d is None else n_d
        if not (0 <= n_n <= len(self.neumann) and 0 <= n_d <= len(self.dirichlet)):
            raise DomainError("requested basis exceeds the precomputed one")
        if n_n + n_d == 0:
            raise DomainError("the combined basis is empty")
        H = self.H[:n_n, :n_d]
        gram = np.block([[self.G_nn[:n_n, :n_n], H], [H.T, self.G_dd[:n_d, :n_d]]])
        nn = len(self.neumann)
        rhs = np.concatenate([self.b[:n_n], self.b[nn:nn + n_d]])
        x, rank = _solve_gram(gram, rhs, self.cutoff)
        out = MixedExpansion(x[:n_n], x[n_n:], self.neumann[:n_n], self.dirichlet[:n_d],
                             0.0, rank)
        return replace(out, residual=_weighted_residual(out, self.target))


def fit_expansion(target, neumann, dirichlet, medium=None, cutoff=GRAM_CUTOFF) -> MixedExpansion:
    """Weighted least-squares coefficients of ``target`` in the mixed basis.

    Parameters
    ----------
    target : callable
        Radial profile ``t(r)``; the field is ``t(r)`` times the angular
        factor shared by the basis modes. A :class:`BesselTarget` is
        projected in closed form, any other callable by quadrature.
    neumann, dirichlet : sequence of RadialMode
        Basis modes, all of one angular order and parity. Either may be empty.
    medium : MediumSpec, optional
        Accepted for symmetry with the mode solvers; the weights come from
        the regions stored on the modes.
    cutoff : float
        Gram eigenvalues below ``cutoff`` times the largest are discarded.
    """
    return MixedBasis(target, neumann, dirichlet, cutoff).fit()


def linf_rel_error(expansion: MixedExpansion, target, grid=ERROR_GRID):
    """``max |expansion - target| / max |target|`` on a uniform radial grid."""
    if grid < 256:
        raise DomainError("the error grid needs at least 256 samples")
    r = np.linspace(expansion.r_min, expansion.R, int(grid))
    t = _evaluate_target(target, r)
    scale = np.abs(t).max()
    if scale == 0.0:
        raise DomainError("target vanishes identically")
    return float(np.abs(expansion.radial(r) - t).max() / scale)
