import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad

from helmcmt.errors import DomainError
from helmcmt.model import Layer, MediumSpec
from helmcmt.radial_modes import (DIRICHLET, NEUMANN, characteristic_determinant,
                                  characteristic_matrix, eigenfrequencies, evaluate_mode,
                                  solve_modes, weighted_norm_squared)
from helmcmt.specfun import cyl_eval

ZEROS_JP_OVER_2PI = [0.60983, 1.11657, 1.61916, 2.12053, 2.62138, 3.12196, 3.62238, 4.12270,
                     4.62295, 5.12315]
ZEROS_J_OVER_2PI = [0.38274, 0.87855, 1.37728, 1.87668, 2.37633, 2.87610, 3.37594, 3.87582,
                    4.37572, 4.87565]
BUBBLE_R12_N = [0.0, 0.14039, 0.25705, 0.37275, 0.48818, 0.60348, 0.71871, 0.83391, 0.94908,
                1.06422]
BUBBLE_R12_D = [0.00420, 0.14046, 0.25709, 0.37278, 0.48820, 0.60350, 0.71874, 0.83394, 0.94912,
                1.06429]

# roots of the bubble determinant (a = 1, R = 2, n = 0), mpmath at 30 digits
BUBBLE_D = [0.013543392803106577782, 0.88220882086897188861, 1.6151229561624881323,
            2.3420553407509063213]
BUBBLE_N = [0.0, 0.88198755203099793955, 1.3606350837104796763, 1.6154154966556737169]

HOMOG = MediumSpec.homogeneous()


def test_homogeneous_neumann_zeros():
    w = eigenfrequencies(NEUMANN, HOMOG, 1.0, 0, count=11)
    assert w[0] == 0.0
    assert np.all(np.abs(w[1:] / (2 * np.pi) - ZEROS_JP_OVER_2PI) <= 5e-6)


def test_homogeneous_dirichlet_zeros():
    modes = solve_modes(DIRICHLET, HOMOG, 1.0, 0, count=10)
    assert np.all(np.abs(modes.omegas / (2 * np.pi) - ZEROS_J_OVER_2PI) <= 5e-6)


def test_homogeneous_determinant_is_bessel():
    for w in np.linspace(0.3, 20, 25):
        for kind, f in ((NEUMANN, -cyl_eval("J", 1, w)), (DIRICHLET, cyl_eval("J", 0, w))):
            d = characteristic_determinant(kind, HOMOG, 1.0, 0, w)
            assert np.sign(d) == np.sign(f) or abs(f) < 1e-12


def test_bubble_roots_against_mpmath(bubble):
    assert np.allclose(eigenfrequencies(DIRICHLET, bubble, 2.0, 0, count=4), BUBBLE_D, rtol=1e-11)
    assert np.allclose(eigenfrequencies(NEUMANN, bubble, 2.0, 0, count=4), BUBBLE_N, rtol=1e-11)


def test_bubble_eigenvalues_with_disk_radius_1p2(bubble):
    # the eigenvalue table is reproduced by a disk of radius 1.2 a
    for kind, table in ((NEUMANN, BUBBLE_R12_N), (DIRICHLET, BUBBLE_R12_D)):
        w = eigenfrequencies(kind, bubble, 1.2, 0, count=10) / (2 * np.pi)
        assert np.all(np.abs(w - table) <= 5e-6)


def test_zero_mode_is_constant():
    m = solve_modes(NEUMANN, HOMOG, 1.0, 0, count=1)[0]
    assert m.omega == 0.0
    r = np.linspace(0, 1, 7)
    assert np.allclose(m.radial(r), np.sqrt(1.0 / np.pi), rtol=1e-14)
    assert evaluate_mode(m, 0.4, 1.3) == pytest.approx(np.sqrt(1 / np.pi))


def test_matched_layer_reproduces_homogeneous():
    layered = MediumSpec((Layer(0.6, 1.0, 1.0),))
    for kind in (NEUMANN, DIRICHLET):
        for n in (0, 2):
            a = solve_modes(kind, layered, 1.0, n, count=6)
            b = solve_modes(kind, HOMOG, 1.0, n, count=6)
            assert np.allclose(a.omegas, b.omegas, rtol=1e-9, atol=1e-12)
            r = np.linspace(0, 1, 50)
            for ma, mb in zip(a, b):
                assert np.allclose(ma.radial(r), mb.radial(r), atol=1e-9)


@pytest.mark.parametrize("kind", [NEUMANN, DIRICHLET])
@pytest.mark.parametrize("n", [0, 1, 3])
def test_orthonormality_by_quadrature(bubble, kind, n):
    modes = solve_modes(kind, bubble, 2.0, n, count=5)
    regions = modes[0].regions
    ang = 2 * np.pi if n == 0 else np.pi
    for i, a in enumerate(modes):
        for j, b in enumerate(modes):
            val = sum(quad(lambda r: a.radial(r) * b.radial(r) * r / g.kappa, g.r_in, g.r_out,
                           epsabs=1e-13, epsrel=1e-12, limit=400)[0] for g in regions)
            assert abs(ang * val - (i == j)) <= 1e-8


def test_boundary_conditions(bubble):
    for n in (0, 2):
        for m in solve_modes(DIRICHLET, bubble, 2.0, n, count=6):
            assert abs(m.boundary_value) <= 1e-10 * np.abs(m.radial(np.linspace(0, 2, 400))).max()
            assert m.boundary_derivative > 0
        for m in solve_modes(NEUMANN, bubble, 2.0, n, count=6):
            sup = np.abs(m.radial(np.linspace(0, 2, 400))).max()
            assert abs(m.boundary_derivative) <= 1e-10 * sup / 2.0
            assert m.boundary_value > 0


def test_interface_continuity(bubble):
    m = solve_modes(NEUMANN, bubble, 2.0, 0, count=3)[1]
    inner, outer = m.regions
    a = inner.r_out
    (cj0, _), (cj1, cy1) = m.coeffs
    k0, k1 = inner.wavenumber(m.omega), outer.wavenumber(m.omega)
    u_in = cj0 * mp.besselj(0, k0 * a)
    u_out = cj1 * mp.besselj(0, k1 * a) + cy1 * mp.bessely(0, k1 * a)
    f_in = cj0 * k0 * mp.besselj(0, k0 * a, 1) / inner.rho
    f_out = (cj1 * k1 * mp.besselj(0, k1 * a, 1)
             + cy1 * k1 * mp.diff(lambda t: mp.bessely(0, t), k1 * a)) / outer.rho
    assert abs(u_in - u_out) <= 1e-10 * abs(u_in)
    assert abs(f_in - f_out) <= 1e-10 * abs(f_in)


def test_evaluation_continuous_across_interface(bubble):
    for m in solve_modes(DIRICHLET, bubble, 2.0, 1, count=4):
        a = 1.0
        lo, hi = m.radial(a * (1 - 1e-13)), m.radial(a * (1 + 1e-13))
        assert abs(lo - hi) <= 1e-10 * max(abs(lo), 1.0)
        flo, fhi = m.flux(a * (1 - 1e-13)), m.flux(a * (1 + 1e-13))
        assert abs(flo - fhi) <= 1e-8 * max(abs(flo), 1.0)


def test_sound_hard_core_wall():
    medium = MediumSpec.sound_hard(0.5)
    for kind in (NEUMANN, DIRICHLET):
        for m in solve_modes(kind, medium, 1.0, 1, count=4):
            sup = np.abs(m.radial(np.linspace(0.5, 1.0, 200))).max()
            assert abs(m.radial(0.5, derivative=True)) <= 1e-9 * sup
    with pytest.raises(DomainError):
        solve_modes(NEUMANN, medium, 1.0, 0, count=2)[1].radial(0.2)


def test_step_halving_finds_same_roots(bubble):
    for kind in (NEUMANN, DIRICHLET):
        for n in (0, 1, 4):
            a = eigenfrequencies(kind, bubble, 2.0, n, omega_max=12.0)
            b = eigenfrequencies(kind, bubble, 2.0, n, omega_max=12.0, step_factor=0.5)
            assert a.size == b.size
            assert np.allclose(a, b, rtol=1e-11, atol=1e-14)


def test_count_nondecreasing(bubble):
    counts = [eigenfrequencies(DIRICHLET, bubble, 2.0, 0, omega_max=w).size
              for w in np.linspace(0.5, 10, 12)]
    assert counts == sorted(counts)


def test_radius_checks():
    m = solve_modes(NEUMANN, HOMOG, 1.0, 0, count=2)[1]
    with pytest.raises(DomainError):
        m.radial(1.1)
    with pytest.raises(DomainError):
        characteristic_matrix(NEUMANN, HOMOG, 1.0, 0, -1.0)


def test_quadrature_norm_helper_agrees():
    m = solve_modes(DIRICHLET, HOMOG, 1.0, 2, count=3)[2]
    assert weighted_norm_squared(m.radial, m.regions, 2) == pytest.approx(1.0, abs=1e-10)


def test_cos_sin_pairs_adjacent():
    modes = solve_modes(NEUMANN, HOMOG, 1.0, 2, count=3).with_parities()
    assert [m.parity for m in modes] == ["cos", "sin"] * 3
    assert modes[0].omega == modes[1].omega
    assert modes[1](0.5, np.pi / 4) == pytest.approx(modes[0].radial(0.5))
