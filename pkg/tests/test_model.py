import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from helmcmt.errors import DomainError
from helmcmt.model import (AIR_BUBBLE_KAPPA, AIR_BUBBLE_RHO, FictitiousDisk, IncidentField, Layer,
                           MediumSpec, plane_wave_coefficients, polar_angle)
from helmcmt.specfun import cyl_eval


def jacobi_anger(p, x, k, lmax):
    c = plane_wave_coefficients(p, lmax)
    l = np.arange(-lmax, lmax + 1)
    r = np.hypot(*x)
    th = polar_angle(np.asarray(x))
    radial = np.array([cyl_eval("H1", m, k * r) + cyl_eval("H2", m, k * r) for m in l])
    return np.sum(c * radial * np.exp(1j * l * th))


def test_plane_wave_examples():
    assert np.allclose(plane_wave_coefficients((0.0, 1.0), 5), 0.5)
    l = np.arange(-4, 5)
    assert np.allclose(plane_wave_coefficients((1.0, 0.0), 4), 0.5 * 1j ** l)


def test_jacobi_anger_example():
    p = np.array([0.6, 0.8])
    x = np.array([0.3, 0.7])
    exact = np.exp(1j * 2 * p @ x)
    assert abs(jacobi_anger(p, x, 2.0, 25) - exact) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(phi=st.floats(0, 2 * np.pi), rad=st.floats(0.05, 5.0), ang=st.floats(-np.pi, np.pi),
       k=st.floats(0.5, 4.0))
def test_jacobi_anger_property(phi, rad, ang, k):
    p = np.array([np.cos(phi), np.sin(phi)])
    x = rad / k * np.array([np.cos(ang), np.sin(ang)])
    exact = np.exp(1j * k * p @ x)
    assert abs(jacobi_anger(p, x, k, 30) - exact) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(phi=st.floats(0, 2 * np.pi), lmax=st.integers(0, 40))
def test_coefficient_modulus(phi, lmax):
    c = plane_wave_coefficients((np.cos(phi), np.sin(phi)), lmax)
    assert np.allclose(np.abs(c), 0.5, atol=1e-12)


def test_non_unit_direction_rejected():
    with pytest.raises(DomainError):
        plane_wave_coefficients((1.0, 1.0), 3)
    with pytest.raises(DomainError):
        IncidentField.plane_wave((0.0, 2.0))


def test_polar_angle_quadrants():
    pts = np.array([[1, 0], [0, 1], [-1, 0], [0, -1], [-1, -1]], dtype=float)
    assert np.allclose(polar_angle(pts), [0, np.pi / 2, np.pi, -np.pi / 2, -3 * np.pi / 4])


def test_medium_validation():
    with pytest.raises(DomainError):
        MediumSpec((Layer(1.0, 1, 1), Layer(0.5, 1, 1)))
    with pytest.raises(DomainError):
        MediumSpec((Layer(1.0, -1, 1),))
    with pytest.raises(DomainError):
        MediumSpec((Layer(1.0, 1, 1),), core_radius=1.0)
    with pytest.raises(DomainError):
        MediumSpec(rho0=0.0)
    with pytest.raises(DomainError):
        MediumSpec.air_bubble(1.0).check_disk(1.0)
    with pytest.raises(DomainError):
        FictitiousDisk(0.0)


def test_regions_and_derived_quantities():
    m = MediumSpec.air_bubble(1.0, rho0=2.0, kappa0=8.0)
    regs = m.regions(2.0)
    assert [(g.r_in, g.r_out) for g in regs] == [(0.0, 1.0), (1.0, 2.0)]
    assert regs[0].rho == pytest.approx(AIR_BUBBLE_RHO * 2.0)
    assert regs[0].kappa == pytest.approx(AIR_BUBBLE_KAPPA * 8.0)
    assert m.c0 == pytest.approx(2.0)
    assert m.wavenumber(4.0) == pytest.approx(2.0)
    beta = np.sqrt(AIR_BUBBLE_RHO * AIR_BUBBLE_KAPPA)
    assert regs[0].inv_impedance == pytest.approx(1 / beta)
    assert regs[1].inv_impedance == pytest.approx(1.0)


def test_incident_coefficients():
    inc = IncidentField(coefficients={0: 1.0, 2: 0.5j})
    assert np.allclose(inc.incoming([-1, 0, 1, 2]), [0, 1, 0, 0.5j])
    assert np.allclose(inc.incident_outgoing([0, 2]), [1, 0.5j])
    with pytest.raises(DomainError):
        IncidentField()
    with pytest.raises(DomainError):
        IncidentField(coefficients={0: np.nan})
