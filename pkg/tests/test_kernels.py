import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from gsk_asymptotics.errors import AdmissibilityError, ConfigurationError, DomainError, PoleError
from gsk_asymptotics.kernels import (
    GskKernel,
    boson_kernel,
    check_derivative,
    e_pm,
    entire_test_kernel,
    kernel_value,
    xxz_kernel,
    xxz_phi,
)
from gsk_asymptotics.oracle import wiener_hopf_kernel


def test_boson_phi_formula(boson):
    lam = np.linspace(-5, 5, 41)
    direct = (np.exp(0.5) - 1) / (np.exp(lam**2 - 1) + 1)
    assert np.max(np.abs(boson.phi(lam) - direct)) < 1e-15


def test_boson_phi_no_overflow_far_out(boson):
    z = np.array([30.0 + 0.5j, -40.0 - 0.5j, 1e3])
    assert np.all(np.isfinite(boson.phi(z)))
    assert np.all(np.abs(boson.phi(z)) < 1e-300)


@pytest.mark.parametrize("factory", [lambda: boson_kernel(1, 1, 0.5), lambda: boson_kernel(0.3, 2.0, -0.4 + 0.2j),
                                     lambda: xxz_kernel(1.0), lambda: xxz_kernel(2.2), lambda: entire_test_kernel(0.5)])
def test_phi_prime_matches_finite_differences(factory):
    k = factory()
    assert check_derivative(k, 6.0, tol=1e-7) < 1e-7
    # also off the axis, inside the strip
    z = np.linspace(-3, 3, 13) + 0.3j
    h = 1e-6
    fd = (k.phi(z + h) - k.phi(z - h)) / (2 * h)
    assert np.max(np.abs(fd - k.phi_prime(z))) < 1e-7


def test_xxz_phi_near_origin_is_continuous():
    phi, dphi = xxz_phi(1.0)
    f0 = 1 - 2 / np.pi
    assert abs(phi(np.array([0.0]))[0] - f0) < 1e-15
    assert abs(phi(np.array([1e-9]))[0] - f0) < 1e-12
    small = np.array([-2e-3, -5e-4, 5e-4, 2e-3])
    h = 1e-6
    fd = (phi(small + h) - phi(small - h)) / (2 * h)
    assert np.max(np.abs(fd - dphi(small))) < 1e-8


@pytest.mark.parametrize("zeta", [0.6, 1.0, np.pi / 3, 2.4])
def test_xxz_phi_is_fourier_transform_of_k(zeta):
    # independent route: phi(l) = int K(t) e^{i l t} dt with the Wiener-Hopf kernel
    phi, _ = xxz_phi(zeta)
    for lam in (0.0, 0.7, 2.5):
        ref, _ = quad(lambda t: wiener_hopf_kernel(zeta, t) * np.cos(lam * t), -60, 60, limit=400, epsabs=1e-13)
        assert abs(phi(np.array([lam]))[0] - ref) < 1e-10


def test_xxz_root_series_omits_removable_points():
    k = xxz_kernel(np.pi / 3)
    plus, minus = k.closed_form_roots(4)
    for s in plus:
        assert np.all(np.abs(np.sinh(np.pi * s / 2)) > 1e-10)
        assert len(s) == 4
    assert np.allclose(np.abs(1 + k.phi(np.concatenate(plus))), 0, atol=1e-12)
    assert np.allclose(np.concatenate(minus), np.conj(np.concatenate(plus)))


def test_xxz_domain():
    for z in (0.0, np.pi, -1.0):
        with pytest.raises(DomainError):
            xxz_kernel(z)
    assert xxz_kernel(np.pi / 2).trivial


def test_boson_roots_residuals():
    k = boson_kernel(1.0, 1.0, 0.5)
    plus, minus = k.closed_form_roots(6)
    q = np.concatenate(plus + minus)
    assert np.max(np.abs(1 + k.phi(q))) < 1e-12


def test_boson_beta_zero_is_trivial_and_has_no_roots():
    k = boson_kernel(1.0, 1.0, 0.0)
    assert k.trivial
    with pytest.raises(ConfigurationError):
        k.closed_form_roots(1)


def test_admissibility():
    with pytest.raises(AdmissibilityError) as info:
        boson_kernel(1.0, 1.0, 2.0)
    assert info.value.lam == 0.0
    with pytest.raises(AdmissibilityError):
        entire_test_kernel(1.2)


def test_pole_validation():
    f = lambda l: np.zeros(np.shape(l), complex)
    with pytest.raises(ConfigurationError):
        GskKernel(phi=f, phi_prime=f, a=1.0, poles_plus=(0.5 - 0.1j,))
    with pytest.raises(ConfigurationError):
        GskKernel(phi=f, phi_prime=f, a=1.0, poles_plus=(2j,))
    with pytest.raises(ConfigurationError):
        GskKernel(phi=f, phi_prime=f, a=1.0, poles_plus=(0.5j, 0.5j))


def test_e_pm_outside_strip(boson):
    with pytest.raises(DomainError):
        e_pm(boson, 3.0, np.array([10j]), 1)


def test_kernel_at_a_pole():
    k = xxz_kernel(1.0)
    with pytest.raises(PoleError):
        kernel_value(k, 2.0, np.array([2j]), np.array([0.0]))


@given(st.floats(-4, 4), st.floats(-4, 4), st.floats(0.5, 20))
@settings(max_examples=50, deadline=None)
def test_kernel_symmetric(lam, mu, x):
    k = boson_kernel(1.0, 1.0, 0.5)
    assert abs(kernel_value(k, x, lam, mu) - kernel_value(k, x, mu, lam)) < 1e-14


def test_kernel_diagonal_is_the_limit(boson):
    for lam in (-1.2, 0.0, 2.3):
        on = kernel_value(boson, 7.0, lam, lam)
        near = kernel_value(boson, 7.0, lam, lam + 1e-7)
        assert abs(on - near) < 1e-6
        # sine-kernel form for g = 0
        assert abs(on - 7.0 * boson.phi(np.array([lam]))[0] / (2 * np.pi)) < 1e-15


def test_kernel_reduces_to_sine_kernel():
    k = entire_test_kernel(0.5, width=1e6)  # phi is 0.5 to 1e-12 on [-3, 3]
    lam, mu, x = 0.7, -1.1, 5.0
    expected = 0.5 * np.sin(x * (lam - mu) / 2) / (np.pi * (lam - mu))
    assert abs(kernel_value(k, x, lam, mu) - expected) < 1e-12
