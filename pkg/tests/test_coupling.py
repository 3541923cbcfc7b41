import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import roots_legendre

from helmcmt.coupling import (boundary_L, build_coupling, gamma_matrix, gram_H, rokhlin_lmax,
                              threshold_omega)
from helmcmt.errors import DomainError
from helmcmt.model import FictitiousDisk, MediumSpec
from helmcmt.radial_modes import DIRICHLET, NEUMANN, solve_modes

HOMOG = MediumSpec.homogeneous()
# closed forms with j = first zero of J_0, mpmath at 30 digits
H11 = -0.83166115463124746552548129174   # -2 / j
L11 = 4.80965111539154553724326375865    # 2 j


def theta_gamma(mode, l, R, n_theta=256):
    th = np.linspace(0, 2 * np.pi, n_theta, endpoint=False)
    trace = mode(R, th)
    return np.mean(trace * np.exp(1j * l * th)) * 2 * np.pi


def test_zero_mode_gamma():
    m = solve_modes(NEUMANN, HOMOG, 1.0, 0, count=1)
    g = gamma_matrix(m.modes, [-1, 0, 1])
    assert g[0, 1] == pytest.approx(2 * np.pi * np.sqrt(1 / np.pi), rel=1e-14)
    assert g[0, 0] == 0 and g[0, 2] == 0


def test_gamma_against_theta_quadrature(bubble):
    l_values = np.arange(-4, 5)
    for n in (0, 1, 3):
        modes = solve_modes(NEUMANN, bubble, 2.0, n, count=3).with_parities()
        g = gamma_matrix(modes, l_values)
        ref = np.array([[theta_gamma(m, l, 2.0) for l in l_values] for m in modes])
        assert np.abs(g - ref).max() <= 1e-10


def test_gamma_bubble_example(bubble):
    m = solve_modes(NEUMANN, bubble, 2.0, 0, count=2)[1]
    assert gamma_matrix([m], [0])[0, 0] == pytest.approx(2 * np.pi * m.boundary_value, rel=1e-14)


def test_gamma_rejects_bad_input():
    d = solve_modes(DIRICHLET, HOMOG, 1.0, 0, count=1)
    with pytest.raises(DomainError):
        gamma_matrix(d.modes, [0])
    with pytest.raises(DomainError):
        gamma_matrix(solve_modes(NEUMANN, HOMOG, 1.0, 0, count=1).modes, [])


def test_h11_closed_form_and_gauss():
    neu = solve_modes(NEUMANN, HOMOG, 1.0, 0, count=1).modes
    dir_ = solve_modes(DIRICHLET, HOMOG, 1.0, 0, count=1).modes
    h = gram_H(neu, dir_)[0, 0]
    assert h == pytest.approx(H11, rel=1e-13)
    x, w = roots_legendre(200)
    r, w = (x + 1) / 2, w / 2
    gauss = 2 * np.pi * np.sum(w * r * neu[0].radial(r) * dir_[0].radial(r))
    assert abs(h - gauss) <= 1e-10


def test_analytic_and_quadrature_overlaps_agree(bubble):
    for n in (0, 2):
        neu = solve_modes(NEUMANN, bubble, 2.0, n, count=5).with_parities()
        dir_ = solve_modes(DIRICHLET, bubble, 2.0, n, count=5).with_parities()
        a = gram_H(neu, dir_)
        q = gram_H(neu, dir_, method="quad")
        assert np.abs(a - q).max() <= 1e-10
        assert np.abs(a).max() <= 1 + 1e-8
        assert np.abs(gram_H(neu, neu) - np.eye(len(neu))).max() <= 1e-8


def test_different_orders_do_not_overlap():
    a = solve_modes(NEUMANN, HOMOG, 1.0, 0, count=3).modes
    b = solve_modes(DIRICHLET, HOMOG, 1.0, 1, count=3).with_parities()
    assert np.all(gram_H(a, b) == 0)
    assert np.all(boundary_L(a, b) == 0)


def test_l11_closed_form_and_sign():
    neu = solve_modes(NEUMANN, HOMOG, 1.0, 0, count=1).modes
    dir_ = solve_modes(DIRICHLET, HOMOG, 1.0, 0, count=1).modes
    L = boundary_L(neu, dir_)[0, 0]
    assert L == pytest.approx(L11, rel=1e-13)
    assert L > 0
    th = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    quad_theta = np.mean(neu[0](1.0, th) * dir_[0].radial(1.0, derivative=True)) * 2 * np.pi
    assert L == pytest.approx(quad_theta, rel=1e-12)


def gradient_integral(a, b):
    """int (1/rho) grad u_a . grad u_b over the disk, modes of one order and parity."""
    n = a.order
    ang = 2 * np.pi if n == 0 else np.pi
    total = 0.0
    for g in a.regions:
        def f(r):
            d = a.radial(r, derivative=True) * b.radial(r, derivative=True)
            return (d + n * n * a.radial(r) * b.radial(r) / r ** 2) * r / g.rho
        lo = max(g.r_in, 1e-12)
        total += quad(f, lo, g.r_out, epsabs=1e-12, epsrel=1e-11, limit=400)[0]
    return ang * total


@pytest.mark.parametrize("n", [0, 1])
def test_variational_identity(bubble, n):
    neu = solve_modes(NEUMANN, bubble, 2.0, n, count=3).modes
    dir_ = solve_modes(DIRICHLET, bubble, 2.0, n, count=3).modes
    H = gram_H(neu, dir_)
    L = boundary_L(neu, dir_)
    for i, a in enumerate(neu):
        for j, b in enumerate(dir_):
            lhs = gradient_integral(b, a) - H[i, j] * b.omega ** 2 - L[i, j]
            assert abs(lhs) <= 1e-6 * max(1.0, abs(L[i, j]))


def test_build_coupling_structure(bubble):
    c = build_coupling(bubble, FictitiousDisk(2.0), lmax=2, counts=(3, 2))
    assert c.n_neumann == 3 + 6 + 6 and c.n_dirichlet == 2 + 4 + 4
    assert np.all(np.diff(c.blocks[0].omega_n) >= 0)
    assert c.gamma.shape == (15, 5)
    assert np.array_equal(c.orders, np.arange(-2, 3))
    # rows of order-n modes live on l = +-n only
    g = c.gamma
    assert np.all(g[:3, [0, 1, 3, 4]] == 0)
    assert c.provenance == "analytic"
    r = c.restrict(1)
    assert r.lmax == 1 and r.n_neumann == 9


def test_truncation_threshold_and_rokhlin():
    assert threshold_omega(1.5, 1.0) == pytest.approx(2 * np.pi * 3.0)
    assert rokhlin_lmax(10.0) >= 10
    assert rokhlin_lmax(0.0) == 4
    with pytest.raises(DomainError):
        threshold_omega(0.0, 1.0)


def test_monopole_count_from_tabulated_zeros():
    c = build_coupling(HOMOG, FictitiousDisk(1.0), lmax=0, C=1.5)
    # 2.62138 < 3 < 3.12196 and the zero mode comes first
    assert len(c.blocks[0].omega_n) == 7
    assert c.blocks[0].omega_n[-1] / (2 * np.pi) == pytest.approx(3.12196, abs=5e-6)
