import numpy as np
import pytest
from hypothesis import given, strategies as st

from sinhg.corpus import random_smooth, random_tangent, vacuum
from sinhg.errors import DomainError
from sinhg.fields import GridFunction, TangentVector, quadrature
from sinhg.oracle import vacuum_monodromy, vacuum_phi
from sinhg.transfer import (det_residual, eigen_solutions, frame_identity_residuals, integrate_frame,
                            inverse2, monodromy, monodromy_lambda_derivative, monodromy_variation,
                            variation_by_quadrature)

lambdas = st.complex_numbers(min_magnitude=0.1, max_magnitude=10, allow_nan=False, allow_infinity=False)
VAC = vacuum(n=64)
RS = random_smooth(2, n=128)


def test_vacuum_monodromy_at_one_and_minus_one():
    M = monodromy(VAC, 1.0)
    assert np.allclose(M, [[np.cos(1), 1j * np.sin(1)], [1j * np.sin(1), np.cos(1)]], atol=1e-13)
    assert np.allclose(monodromy(VAC, -1.0), np.eye(2), atol=1e-14)


@given(lambdas)
def test_vacuum_matches_closed_form(lam):
    M = monodromy(VAC, lam)
    ref = vacuum_monodromy(lam)
    assert np.abs(M - ref).max() < 1e-11 * max(1, np.abs(ref).max())


def test_array_lambdas_agree_with_scalars():
    lams = np.array([[0.5, 2j], [-3.0, 1 + 1j]])
    batch = monodromy(RS, lams)
    assert batch.shape == (2, 2, 2, 2)
    for idx in np.ndindex(lams.shape):
        assert np.allclose(batch[idx], monodromy(RS, lams[idx]), rtol=0, atol=1e-14)


def test_zero_lambda_rejected():
    with pytest.raises(DomainError):
        monodromy(VAC, 0.0)
    with pytest.raises(DomainError):
        monodromy(VAC, np.array([1.0, 0.0]))


@given(lambdas)
def test_unimodular(lam):
    assert det_residual(monodromy(RS, lam)) < 1e-10


@pytest.mark.parametrize("lam", [0.7, 2.0, 0.6 + 0.8j, -3.0])
def test_lambda_derivative_by_central_differences(lam):
    h = 1e-5 * abs(lam)
    fd = (monodromy(RS, lam + h) - monodromy(RS, lam - h)) / (2 * h)
    exact = monodromy_lambda_derivative(RS, lam)
    assert np.abs(fd - exact).max() / np.abs(exact).max() < 1e-7


def test_vacuum_discriminant_is_critical_at_one():
    dM = monodromy_lambda_derivative(VAC, 1.0)
    assert abs(np.trace(dM)) < 1e-12


@pytest.mark.parametrize("lam", [0.8, 1.5 + 0.5j])
def test_variation_is_linear_response(lam):
    t = random_tangent(RS, 11)
    exact = monodromy_variation(RS, lam, t)
    errs = []
    for eps in (1e-3, 1e-4):
        fd = (monodromy(RS.perturbed(t, eps), lam) - monodromy(RS, lam)) / eps
        errs.append(np.abs(fd - exact).max())
    assert errs[1] < errs[0] / 5
    assert np.abs(variation_by_quadrature(RS, lam, t) - exact).max() < 1e-9


def test_vacuum_variation_at_minus_one():
    """At lambda = -1 the off-diagonal of dU is the only contribution."""
    x = np.arange(64) / 64
    t = TangentVector(GridFunction(1.0, np.cos(2 * np.pi * x) + 0.3),
                      GridFunction(1.0, np.sin(2 * np.pi * x) + 0.2))
    dM = monodromy_variation(VAC, -1.0, t)
    assert dM[0, 1] == pytest.approx(-1j * quadrature(t.du), abs=1e-12)
    assert dM[1, 1] == pytest.approx(0.5j * quadrature(t.du_y), abs=1e-12)


def test_frame_path_and_closed_form_phi():
    path = integrate_frame(VAC, 1.0)
    assert path.frames.shape == (65, 2, 2)
    assert np.allclose(path.monodromy, monodromy(VAC, 1.0), atol=1e-14)
    es = eigen_solutions(VAC, 1.0)
    ref = vacuum_phi(es.phi1.nodes, 1.0)
    assert np.abs(es.phi1.samples - ref[:, 0]).max() < 1e-12
    assert np.abs(es.phi2.samples - ref[:, 1]).max() < 1e-12


@given(lambdas)
def test_frame_identities(lam):
    res = frame_identity_residuals(RS, lam)
    assert max(res.values()) < 1e-9


def test_inverse2():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((5, 2, 2)) + 1j * rng.standard_normal((5, 2, 2))
    A /= np.sqrt(np.linalg.det(A))[:, None, None]
    assert np.allclose(inverse2(A) @ A, np.eye(2))
