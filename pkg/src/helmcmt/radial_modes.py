"""Neumann and Dirichlet normal modes of a disk filled with a concentric medium.

In each annulus the radial profile of an order-``n`` mode is
``c_J J_n(k_i r) + c_Y Y_n(k_i r)``; the innermost region keeps only the
regular ``J_n`` term unless a sound-hard core is present. Eigenfrequencies
are zeros of the determinant of the matching conditions.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import roots_legendre

from .errors import DomainError, SolverError
from .model import MediumSpec, Region
from .specfun import cyl_deriv, cyl_eval

__all__ = [
    "NEUMANN",
    "DIRICHLET",
    "ModeSet",
    "RadialMode",
    "angular_factor",
    "bessel_product_integral",
    "characteristic_determinant",
    "characteristic_matrix",
    "eigenfrequencies",
    "evaluate_mode",
    "mode_overlap",
    "overlap_matrix",
    "solve_modes",
]

NEUMANN = "N"
DIRICHLET = "D"

# scan step in accumulated phase sum_i k_i (r_out - r_in)
SCAN_PHASE_STEP = np.pi / 40
_LOW_PREFIX = 48
# determinant evaluations per vectorised batch of the scan
_SCAN_CHUNK = 32


def _kind(kind):
    k = str(kind).upper()[:1]
    if k not in (NEUMANN, DIRICHLET):
        raise ValueError(f"mode kind must be Neumann or Dirichlet, got {kind!r}")
    return k


def angular_factor(n):
    """``int_0^{2 pi} cos^2(n theta) d theta``: 2 pi for n = 0, pi otherwise."""
    return 2.0 * np.pi if n == 0 else np.pi


def _regular_inner(medium):
    return medium.core_radius == 0.0


def _columns(regions, regular_inner):
    """Unknown layout: list of (region index, 'J' or 'Y')."""
    cols = []
    for i, _ in enumerate(regions):
        cols.append((i, "J"))
        if i > 0 or not regular_inner:
            cols.append((i, "Y"))
    return cols


def characteristic_matrix(kind, medium: MediumSpec, R, n, omega):
    """Matching conditions for an order-``n`` mode at angular frequency ``omega``.

    Rows, in order: the sound-hard core wall (if any), continuity of ``u`` and
    of ``(1/rho) du/dr`` at every interface, and the outer Neumann or Dirichlet
    condition at ``r = R``. Flux rows carry the frequency-independent factor
    ``1/beta_i`` of each region, so a two-layer medium gives the familiar
    3 x 3 system. An array of frequencies gives a stack of matrices.
    """
    kind = _kind(kind)
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise DomainError("omega must be non-negative")
    scalar = omega.ndim == 0
    w = float(omega) if scalar else omega
    regions = medium.regions(R)
    regular = _regular_inner(medium)
    cols = _columns(regions, regular)
    index = {c: j for j, c in enumerate(cols)}
    rows = []

    def term(i, which, r, deriv=False):
        z = regions[i].wavenumber(w) * r
        return cyl_deriv(which, n, z) if deriv else cyl_eval(which, n, z)

    def empty():
        return np.zeros(omega.shape + (len(cols),))

    if not regular:
        row = empty()
        a = regions[0].r_in
        row[..., index[0, "J"]] = term(0, "J", a, True)
        row[..., index[0, "Y"]] = term(0, "Y", a, True)
        rows.append(row)
    for i in range(len(regions) - 1):
        r = regions[i].r_out
        value = empty()
        flux = empty()
        for j, sign in ((i, 1.0), (i + 1, -1.0)):
            scale = regions[j].inv_impedance
            for which in ("J", "Y"):
                if (j, which) in index:
                    value[..., index[j, which]] = sign * term(j, which, r)
                    flux[..., index[j, which]] = sign * scale * term(j, which, r, True)
        rows.append(value)
        rows.append(flux)
    last = len(regions) - 1
    row = empty()
    for which in ("J", "Y"):
        if (last, which) in index:
            row[..., index[last, which]] = term(last, which, R, kind == NEUMANN)
    rows.append(row)
    return np.stack(rows, axis=-2)


def _scaled(m):
    scale = np.abs(m).max(axis=-1, keepdims=True)
    scale[scale == 0] = 1.0
    return m / scale


def characteristic_determinant(kind, medium, R, n, omega):
    """Row-normalised determinant of :func:`characteristic_matrix`.

    Only its sign and zeros are meaningful. Non-finite entries give ``nan``.
    """
    with np.errstate(all="ignore"):
        m = characteristic_matrix(kind, medium, R, n, omega)
        finite = np.all(np.isfinite(m), axis=(-2, -1))
        m = np.where(finite[..., None, None], m, 0.0)
        d = np.where(finite, np.linalg.det(_scaled(m)), np.nan)
    return float(d) if d.ndim == 0 else d


def _phase_per_omega(medium, R):
    return sum(g.slowness * (g.r_out - g.r_in) for g in medium.regions(R))


def _has_zero_mode(kind, n):
    return kind == NEUMANN and n == 0


def eigenfrequencies(kind, medium, R, n, count=None, omega_max=None, step_factor=1.0):
    """Eigenfrequencies in ascending order.

    Either the first ``count`` values, or every value ``<= omega_max`` followed
    by the first one above it. The scan advances in steps of
    ``SCAN_PHASE_STEP * step_factor`` of accumulated phase and starts with a
    logarithmic sweep towards zero so that sub-wavelength (Minnaert-type)
    roots are not stepped over.
    """
    kind = _kind(kind)
    if (count is None) == (omega_max is None):
        raise ValueError("give exactly one of count and omega_max")
    if count is not None and count < 1:
        raise ValueError("count must be >= 1")
    d_omega = SCAN_PHASE_STEP * step_factor / _phase_per_omega(medium, R)
    found = [0.0] if _has_zero_mode(kind, n) else []

    def done():
        if count is not None:
            return len(found) >= count
        return bool(found) and found[-1] > omega_max

    if count is not None:
        budget = count + n + 20
    else:
        budget = omega_max * _phase_per_omega(medium, R) / np.pi + n + 20
    omega_stop = budget * np.pi / _phase_per_omega(medium, R)

    def f(w):
        return characteristic_determinant(kind, medium, R, n, w)

    def points():
        yield from np.geomspace(1e-6 * d_omega, d_omega, _LOW_PREFIX)
        step = 1
        while True:
            yield d_omega * (1 + step)
            step += 1

    def scanned():
        # the determinant is evaluated on chunks of the grid at once
        pts = points()
        while True:
            chunk = np.array([next(pts) for _ in range(_SCAN_CHUNK)])
            yield from zip(chunk, characteristic_determinant(kind, medium, R, n, chunk))

    scan = scanned()
    a, fa = next(scan)
    while not done():
        b, fb = next(scan)
        if b > omega_stop:
            raise SolverError(
                f"{kind}-mode scan for order {n} found {len(found)} roots; "
                f"no further root in [{a:.6g}, {omega_stop:.6g}]"
            )
        if np.isfinite(fa) and np.isfinite(fb) and np.sign(fa) != np.sign(fb):
            if fb == 0.0:
                found.append(b)
            elif fa != 0.0:
                try:
                    found.append(brentq(f, a, b, xtol=1e-300, rtol=1e-14, maxiter=500))
                except (ValueError, RuntimeError) as exc:
                    raise SolverError(f"root refinement failed in [{a:.12g}, {b:.12g}]: {exc}")
        a, fa = b, fb
    out = np.array(found)
    return out[:count] if count is not None else out


@dataclass(frozen=True)
class RadialMode:
    """One normalised normal mode ``f(r) cos(n theta)`` or ``f(r) sin(n theta)``.

    ``coeffs[i] = (c_J, c_Y)`` are the Bessel coefficients in region ``i`` of
    ``regions``; they already include the normalisation
    ``int (1/kappa) u^2 dOmega = 1``.
    """

    kind: str
    order: int
    index: int
    omega: float
    regions: tuple[Region, ...]
    coeffs: np.ndarray
    norm: float
    parity: str = "cos"

    @property
    def R(self):
        return self.regions[-1].r_out

    def _region_index(self, r):
        edges = np.array([g.r_out for g in self.regions[:-1]])
        return np.searchsorted(edges, r, side="left")

    def radial(self, r, derivative=False):
        """Radial profile ``f(r)`` (or ``f'(r)``) on ``core_radius <= r <= R``."""
        r = np.asarray(r, dtype=float)
        if np.any(r > self.R * (1 + 1e-14)) or np.any(r < self.regions[0].r_in):
            raise DomainError("radius outside the disk (or inside the sound-hard core)")
        out = np.zeros_like(r)
        idx = self._region_index(r)
        n = self.order
        for i, g in enumerate(self.regions):
            mask = idx == i
            if not np.any(mask):
                continue
            k = g.wavenumber(self.omega)
            cj, cy = self.coeffs[i]
            rr = r[mask]
            if k == 0.0:
                # zero mode: constant profile
                out[mask] = 0.0 if derivative else cj * float(cyl_eval("J", n, 0.0))
                continue
            if derivative:
                val = cj * k * cyl_deriv("J", n, k * rr)
                if cy != 0.0:
                    val = val + cy * k * cyl_deriv("Y", n, k * rr)
            else:
                val = cj * cyl_eval("J", n, k * rr)
                if cy != 0.0:
                    val = val + cy * cyl_eval("Y", n, k * rr)
            out[mask] = val
        return out

    def flux(self, r):
        """``(1/rho) f'(r)`` with the local density."""
        r = np.asarray(r, dtype=float)
        rho = np.array([g.rho for g in self.regions])[self._region_index(r)]
        return self.radial(r, derivative=True) / rho

    def angular(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.parity == "sin":
            return np.sin(self.order * theta)
        return np.cos(self.order * theta)

    def __call__(self, r, theta=0.0):
        return self.radial(r) * self.angular(theta)

    @property
    def boundary_value(self):
        """Radial profile at ``r = R``."""
        return float(self.radial(self.R))

    @property
    def boundary_derivative(self):
        """``d f / d r`` at ``r = R`` (outward normal derivative)."""
        return float(self.radial(self.R, derivative=True))

    def with_parity(self, parity):
        if parity not in ("cos", "sin"):
            raise ValueError("parity must be 'cos' or 'sin'")
        if parity == "sin" and self.order == 0:
            raise ValueError("order-0 modes have no sin partner")
        return replace(self, parity=parity)


def evaluate_mode(mode: RadialMode, r, theta):
    """Value of ``mode`` at polar coordinates ``(r, theta)``."""
    return mode(r, theta)


@dataclass(frozen=True)
class ModeSet:
    """Modes of one kind and angular order, ascending in frequency."""

    kind: str
    order: int
    modes: tuple[RadialMode, ...]
    medium: MediumSpec
    R: float

    def __len__(self):
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __getitem__(self, i):
        return self.modes[i]

    @property
    def omegas(self):
        return np.array([m.omega for m in self.modes])

    def with_parities(self):
        """Real angular modes: cos for n = 0, adjacent (cos, sin) pairs for n > 0."""
        out = []
        for m in self.modes:
            out.append(m)
            if self.order > 0:
                out.append(m.with_parity("sin"))
        return out

    def head(self, count):
        return replace(self, modes=self.modes[:count])


def weighted_norm_squared(profile, regions, n):
    """``int_{B_R} (1/kappa) u^2 dOmega`` of ``profile(r) * cos(n theta)`` by quadrature."""
    total = 0.0
    for g in regions:
        val, _ = quad(lambda r: profile(r) ** 2 * r / g.kappa, g.r_in, g.r_out,
                      epsabs=1e-14, epsrel=1e-13, limit=400)
        total += val
    return angular_factor(n) * total


def _profile_pair(n, k, cj, cy, r):
    """``P(r)`` and ``P'(r)`` for ``P = cj J_n(k r) + cy Y_n(k r)``."""
    if k == 0.0:
        return (cj if n == 0 else 0.0), 0.0
    z = k * r
    p = cj * float(cyl_eval("J", n, z))
    dp = cj * float(cyl_deriv("J", n, z))
    if cy != 0.0:
        p += cy * float(cyl_eval("Y", n, z))
        dp += cy * float(cyl_deriv("Y", n, z))
    return p, k * dp


def _profile(n, k, coeffs, r):
    cj, cy = coeffs
    out = cj * cyl_eval("J", n, k * r)
    if cy != 0.0:
        out = out + cy * cyl_eval("Y", n, k * r)
    return out


def bessel_product_integral(n, ka, pa, kb, pb, r0, r1):
    """``int_{r0}^{r1} P_a(r) P_b(r) r dr`` for two order-``n`` cylinder functions.

    ``P_a = pa[0] J_n(ka r) + pa[1] Y_n(ka r)`` and likewise for ``P_b``.
    Uses the Lommel antiderivatives; nearly equal but distinct wavenumbers
    fall back to adaptive quadrature, where the closed form cancels.
    """
    if ka != kb and abs(ka - kb) <= 1e-7 * max(ka, kb):
        # Gauss-Legendre resolves the ~k (r1 - r0) / pi oscillations with room to spare
        x, w = roots_legendre(int(2 * max(ka, kb) * (r1 - r0)) + 64)
        half = 0.5 * (r1 - r0)
        r = r0 + half * (x + 1)
        return half * float(np.sum(w * _profile(n, ka, pa, r) * _profile(n, kb, pb, r) * r))

    def antiderivative(r):
        p, dp = _profile_pair(n, ka, *pa, r)
        q, dq = _profile_pair(n, kb, *pb, r)
        if ka == kb:
            if ka == 0.0:
                return 0.5 * p * q * r * r
            return 0.5 * (r * r * dp * dq / ka ** 2 + (r * r - n * n / ka ** 2) * p * q)
        return r * (p * dq - dp * q) / (ka ** 2 - kb ** 2)

    return antiderivative(r1) - antiderivative(r0)


def mode_overlap(a: RadialMode, b: RadialMode):
    """``int (1/kappa) f_a f_b r dr`` over the disk for modes of one order (no angular factor)."""
    if a.order != b.order:
        raise DomainError("radial overlap needs modes of one angular order")
    total = 0.0
    for i, g in enumerate(a.regions):
        total += bessel_product_integral(
            a.order, g.wavenumber(a.omega), tuple(a.coeffs[i]),
            g.wavenumber(b.omega), tuple(b.coeffs[i]), g.r_in, g.r_out) / g.kappa
    return total


def _endpoint_values(modes, i, r):
    """Wavenumbers, ``P(r)`` and ``P'(r)`` of every mode in region ``i``."""
    g = modes[0].regions[i]
    k = np.array([g.wavenumber(m.omega) for m in modes])
    vals = np.array([_profile_pair(m.order, kk, *m.coeffs[i], r) for m, kk in zip(modes, k)])
    return k, vals[:, 0], vals[:, 1]


def overlap_matrix(modes_a, modes_b):
    """:func:`mode_overlap` for every pair, with Bessel values computed once per mode."""
    n = modes_a[0].order
    if any(m.order != n for m in modes_a + modes_b):
        raise DomainError("radial overlap needs modes of one angular order")
    total = np.zeros((len(modes_a), len(modes_b)))
    for i, g in enumerate(modes_a[0].regions):
        block = np.zeros_like(total)
        for sign, r in ((1.0, g.r_out), (-1.0, g.r_in)):
            ka, p, dp = _endpoint_values(modes_a, i, r)
            kb, q, dq = _endpoint_values(modes_b, i, r)
            A, B = np.meshgrid(ka, kb, indexing="ij")
            with np.errstate(divide="ignore", invalid="ignore"):
                cross = r * (np.outer(p, dq) - np.outer(dp, q)) / (A ** 2 - B ** 2)
                same = 0.5 * (r * r * np.outer(dp, dq) / A ** 2
                              + (r * r - n * n / A ** 2) * np.outer(p, q))
            same = np.where(A == 0.0, 0.5 * r * r * np.outer(p, q), same)
            block += sign * np.where(A == B, same, cross)
        # nearly equal wavenumbers cancel in the closed form
        near = (A != B) & (np.abs(A - B) <= 1e-7 * np.maximum(A, B))
        for a, b in zip(*np.nonzero(near)):
            block[a, b] = bessel_product_integral(n, A[a, b], tuple(modes_a[a].coeffs[i]),
                                                  B[a, b], tuple(modes_b[b].coeffs[i]),
                                                  g.r_in, g.r_out)
        total += block / g.kappa
    return total


def _null_vector(m):
    _, s, vh = np.linalg.svd(_scaled(m))
    return vh[-1]


def _build_mode(kind, medium, R, n, index, omega):
    regions = medium.regions(R)
    ncols = len(_columns(regions, _regular_inner(medium)))
    coeffs = np.zeros((len(regions), 2))
    if omega == 0.0:
        coeffs[:, 0] = 1.0
    else:
        vec = _null_vector(characteristic_matrix(kind, medium, R, n, omega))
        cols = _columns(regions, _regular_inner(medium))
        assert len(vec) == ncols
        for (i, which), v in zip(cols, vec):
            coeffs[i, 0 if which == "J" else 1] = v
    raw = RadialMode(kind, n, index, float(omega), regions, coeffs, 1.0)
    nsq = angular_factor(n) * mode_overlap(raw, raw)
    if not nsq > 0:
        raise SolverError(f"degenerate {kind}-mode at omega = {omega}")
    scale = 1.0 / np.sqrt(nsq)
    # sign: positive boundary value (Neumann) or boundary slope (Dirichlet)
    trace = raw.boundary_value if kind == NEUMANN else raw.boundary_derivative
    if trace < 0:
        scale = -scale
    return replace(raw, coeffs=coeffs * scale, norm=abs(scale))


def solve_modes(kind, medium: MediumSpec, R, n, count=None, omega_max=None, step_factor=1.0):
    """Normalised modes of one kind and order.

    ``count`` selects the first ``count`` modes; ``omega_max`` selects every
    mode up to ``omega_max`` plus the first one above it.
    """
    kind = _kind(kind)
    omegas = eigenfrequencies(kind, medium, R, n, count=count, omega_max=omega_max,
                              step_factor=step_factor)
    modes = tuple(_build_mode(kind, medium, R, n, m + 1, w) for m, w in enumerate(omegas))
    return ModeSet(kind, int(n), modes, medium, float(R))
