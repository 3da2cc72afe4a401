import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from gsk_asymptotics.cauchy import (
    alpha1,
    alpha_at,
    alpha_pm,
    build_cauchy_data,
    dlog_alpha_pm,
    jump_residual,
    nu,
    unwrap_from_right,
)
from gsk_asymptotics.errors import CutoffTooSmallError, DomainError, LogSingularityError
from gsk_asymptotics.kernels import GskKernel, boson_kernel, entire_test_kernel, xxz_kernel
from gsk_asymptotics.quadrature import truncated_line_rule
from gsk_asymptotics.report import break_branch


def test_jump_relation_on_nodes_and_off_grid(boson_data, xxz1_data, entire_data):
    grid = np.linspace(-5.0, 5.0, 2001)
    for data in (boson_data, xxz1_data, entire_data):
        assert jump_residual(data) < 1e-12
        assert jump_residual(data, grid) < 1e-12


def test_jump_detects_broken_branch(boson_data):
    assert jump_residual(break_branch(boson_data)) > 1.0


def test_alpha_is_one_for_vanishing_phi():
    k = entire_test_kernel(0.0)
    data = build_cauchy_data(k, truncated_line_rule(6.0, 8, 10))
    assert alpha1(data) == 0
    assert np.allclose(alpha_at(data, np.array([1j, 2 - 3j])), 1)
    assert np.allclose(alpha_pm(data, np.array([0.3, -1.0]), 1), 1)


def test_alpha_at_matches_adaptive_quadrature(boson, boson_data):
    # scipy's adaptive rule on the Cauchy integral as an independent route
    for z in (0.4 + 0.8j, -1.5 - 0.3j, 2.0 + 2.0j):
        f = lambda m, part: getattr(nu(boson, m) / (m - z), part)
        re, _ = quad(f, -8, 8, args=("real",), limit=400, epsabs=1e-14)
        im, _ = quad(f, -8, 8, args=("imag",), limit=400, epsabs=1e-14)
        assert abs(alpha_at(boson_data, z) - np.exp(re + 1j * im)) < 1e-11


def test_boundary_values_are_limits_of_alpha(boson_data):
    lam = np.array([-1.1, 0.25, 1.9])
    eps = 1e-2
    for side in (1, -1):
        # alpha is analytic off the axis; compare with a Taylor-corrected limit
        near = alpha_at(boson_data, lam + side * 1j * eps)
        near2 = alpha_at(boson_data, lam + side * 2j * eps)
        limit = 2 * near - near2  # linear extrapolation to eps = 0
        assert np.max(np.abs(limit - alpha_pm(boson_data, lam, side))) < 1e-3


def test_alpha1_is_the_large_z_coefficient(boson_data):
    a1 = alpha1(boson_data)
    for R in (200.0, 400.0):
        z = R * 1j
        est = (alpha_at(boson_data, z) - 1) * z
        assert abs(est - a1) < 5 * abs(a1) / R + 1e-12


@given(st.floats(-4, 4), st.floats(0.2, 3))
@settings(max_examples=40, deadline=None)
def test_reflection_for_real_phi(re, im):
    # phi real on the axis => conj(nu) = -nu => alpha(conj z) = 1 / conj(alpha(z))
    data = _boson_data_cached()
    z = complex(re, im)
    lhs = alpha_at(data, np.conj(z))
    rhs = 1 / np.conj(alpha_at(data, z))
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


_CACHE = {}


def _boson_data_cached():
    if "b" not in _CACHE:
        _CACHE["b"] = build_cauchy_data(boson_kernel(1, 1, 0.5), truncated_line_rule(8.0, 32, 20))
    return _CACHE["b"]


def test_dlog_alpha_matches_finite_difference(boson_data):
    lam = np.array([-2.2, -0.3, 0.9, 2.6])
    h = 1e-5
    for side in (1, -1):
        fd = (np.log(alpha_pm(boson_data, lam + h, side)) - np.log(alpha_pm(boson_data, lam - h, side))) / (2 * h)
        assert np.max(np.abs(fd - dlog_alpha_pm(boson_data, lam, side))) < 1e-8


@pytest.mark.parametrize("zeta", [1.0, np.pi / 3, 2.3])
def test_xxz_alpha_minus_closed_form(zeta):
    k = xxz_kernel(zeta)
    data = build_cauchy_data(k, truncated_line_rule(40.0, 48, 20))
    lam = np.linspace(-4, 4, 25)
    assert np.max(np.abs(alpha_pm(data, lam, -1) / k.closed_form_alpha_minus(lam) - 1)) < 1e-10
    z = np.linspace(-3, 3, 10) - 0.6j
    assert np.max(np.abs(alpha_at(data, z) / k.closed_form_alpha_minus(z) - 1)) < 1e-10
    # the closed form at the origin: sqrt(2 (pi - zeta) / pi)
    assert abs(k.closed_form_alpha_minus(np.array([0.0]))[0] - np.sqrt(2 * (np.pi - zeta) / np.pi)) < 1e-14


def test_alpha_at_refuses_the_axis(boson_data):
    with pytest.raises(DomainError):
        alpha_at(boson_data, 0.5 + 1e-6j)


def test_cutoff_too_small():
    k = xxz_kernel(1.0)
    with pytest.raises(CutoffTooSmallError):
        build_cauchy_data(k, truncated_line_rule(8.0, 16, 20))


def test_log_singularity():
    f = lambda l: -np.ones(np.shape(l), complex)
    k = GskKernel(phi=f, phi_prime=lambda l: np.zeros(np.shape(l), complex), a=1.0)
    with pytest.raises(LogSingularityError):
        nu(k, np.array([0.0]))


def test_unwrap_keeps_right_end_on_principal_sheet():
    phase = np.linspace(3 * np.pi, 0.1, 50)
    wrapped = np.log(np.exp(1j * phase))
    out = unwrap_from_right(wrapped)
    assert np.allclose(out.imag, phase)


def test_winding_branch_is_continuous():
    # phi winding once around -1 would need a non-principal nu on part of the line
    gamma = 0.9 * np.exp(0.5j)
    k = entire_test_kernel(gamma)
    data = build_cauchy_data(k, truncated_line_rule(6.0, 24, 20))
    assert np.max(np.abs(np.diff(data.nu_samples))) < 0.05
    assert jump_residual(data) < 1e-12
