import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from helmcmt.errors import DomainError
from helmcmt.waveguide import (WaveguideSystem, axial_wavenumber, cavity_modes,
                               effective_hamiltonian, guided_orders, solve_waveguide_cme,
                               stub_reflection_oracle, transverse_shape, waveguide_gamma)

DUCT = WaveguideSystem(width=0.01, depth=1.0)


def test_transverse_shapes_orthonormal():
    w = 0.7
    for a in range(4):
        for b in range(4):
            val, _ = quad(lambda x: transverse_shape(a, x, w) * transverse_shape(b, x, w),
                          -w / 2, w / 2)
            assert val == pytest.approx(1.0 if a == b else 0.0, abs=1e-12)


def test_axial_wavenumber_branch():
    s = WaveguideSystem(1.0, 1.0)
    assert axial_wavenumber(0, 2.0, s) == pytest.approx(2.0)
    K = axial_wavenumber(2, 2.0, s)
    assert K.real == 0 and K.imag > 0


def test_guided_orders_stop_at_cap():
    s = WaveguideSystem(1.0, 1.0)
    orders = guided_orders(s, 4.0)
    assert orders[0] == 0 and np.all(np.diff(orders) == 1)
    K_last = axial_wavenumber(int(orders[-1]) + 1, 4.0, s)
    assert abs(K_last) * s.width > 40


def test_cavity_modes_sorted_and_normalised():
    s = WaveguideSystem(0.8, 1.0, rho0=1.3, kappa0=2.0)
    modes = cavity_modes(s, 12)
    keys = [(m.omega, m.q, m.p) for m in modes]
    assert keys == sorted(keys)
    x1 = np.linspace(-s.depth, 0, 201)
    x2 = np.linspace(-s.width / 2, s.width / 2, 201)
    X1, X2 = np.meshgrid(x1, x2, indexing="ij")
    # trapezoid is exact for these trigonometric products on a full period grid
    wts = np.outer(np.r_[0.5, np.ones(199), 0.5], np.r_[0.5, np.ones(199), 0.5])
    cell = (x1[1] - x1[0]) * (x2[1] - x2[0])
    for a in modes.modes[:6]:
        for b in modes.modes[:6]:
            g = np.sum(wts * a(X1, X2) * b(X1, X2)) * cell / s.kappa0
            assert g == pytest.approx(1.0 if a is b else 0.0, abs=1e-10)


def test_gamma_against_quadrature():
    s = WaveguideSystem(0.8, 1.0, kappa0=2.0)
    modes = cavity_modes(s, 10)
    g = waveguide_gamma(modes, [0, 1, 2])
    for i, m in enumerate(modes):
        for j, l in enumerate([0, 1, 2]):
            ref, _ = quad(lambda x: m(0.0, x) * transverse_shape(l, x, s.width),
                          -s.width / 2, s.width / 2)
            assert g[i, j] == pytest.approx(ref, abs=1e-12)


def test_zero_incoming_gives_zero():
    sol = solve_waveguide_cme(DUCT, 0.5, [0.0], n_cavity=20)
    assert not np.any(sol.xi) and not np.any(sol.alpha_plus)


def test_oracle_quarter_wave():
    assert stub_reflection_oracle(DUCT, np.pi / 4) == pytest.approx(1j, abs=1e-15)
    assert stub_reflection_oracle(DUCT, np.pi / 2) == -1


def test_oracle_low_frequency_limit():
    assert stub_reflection_oracle(DUCT, 1e-6) == pytest.approx(1.0, abs=1e-5)


def test_oracle_needs_single_mode():
    with pytest.raises(DomainError):
        stub_reflection_oracle(DUCT, 1.01 * DUCT.cutoff(1))


@settings(max_examples=25, deadline=None)
@given(kw=st.floats(0.05, 3.0))
def test_energy_is_conserved(kw):
    sol = solve_waveguide_cme(DUCT, kw, [1.0], n_cavity=20)
    assert abs(abs(sol.alpha_plus[0]) - 1) <= 1e-10


@pytest.mark.parametrize("kw", [0.3, 0.7, 1.2])
def test_reflection_converges_to_oracle(kw):
    r = stub_reflection_oracle(DUCT, kw)
    errs = [abs(solve_waveguide_cme(DUCT, kw, [1.0], n_cavity=n).reflection - r)
            for n in (20, 40, 80)]
    assert errs[0] > errs[1] > errs[2]
    # first-order convergence in the cavity count
    assert errs[0] / errs[2] == pytest.approx(4.0, rel=0.1)


def test_radiation_loss_sign():
    H, g, G = effective_hamiltonian(DUCT, cavity_modes(DUCT, 20), 0.7)
    anti = (H - H.conj().T) / 2j
    # -gamma Im(G) gamma^T is negative semidefinite
    assert np.linalg.eigvalsh(anti).max() <= 1e-12
    assert np.linalg.eigvalsh(anti).min() < 0


def test_too_many_incoming_amplitudes():
    with pytest.raises(DomainError):
        solve_waveguide_cme(DUCT, 0.5, [1.0] + [0.0] * 500)
