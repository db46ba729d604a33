import numpy as np
import pytest
from hypothesis import given, strategies as st

from sinhg.corpus import random_smooth, random_tangent, vacuum
from sinhg.errors import DomainError
from sinhg.lax import (delta_u_matrix, dlambda_u_matrix, u_matrix, v_matrix, zero_curvature_residual)

lambdas = st.complex_numbers(min_magnitude=0.2, max_magnitude=5, allow_nan=False, allow_infinity=False)
positions = st.floats(0, 1)


def test_vacuum_examples():
    cd = vacuum(n=16)
    assert np.allclose(u_matrix(cd, 0.3, 1), [[0, 1j], [1j, 0]])
    assert np.allclose(u_matrix(cd, 0.3, -1), 0)
    assert np.allclose(v_matrix(cd, 0.3, 1), 0)
    assert np.allclose(v_matrix(cd, 0.3, 2), [[0, 0.25], [0.5, 0]])
    assert np.allclose(dlambda_u_matrix(cd, 0.1, 1), 0.5 * np.array([[0, -1j], [1j, 0]]))


def test_zero_lambda_rejected():
    cd = vacuum(n=16)
    for fn in (u_matrix, v_matrix, dlambda_u_matrix):
        with pytest.raises(DomainError):
            fn(cd, 0.0, 0)


@given(lambdas, positions, st.integers(0, 50))
def test_traceless(lam, x, seed):
    cd = random_smooth(seed, n=32, modes=4)
    for M in (u_matrix(cd, x, lam), v_matrix(cd, x, lam), dlambda_u_matrix(cd, x, lam)):
        assert abs(np.trace(M)) < 1e-12


def test_delta_u_examples():
    cd = vacuum(n=16)
    t = random_tangent(cd, 3)
    dU = delta_u_matrix(cd, 0.4, 1.0, t)
    assert abs(dU[0, 1]) < 1e-15 and abs(dU[1, 0]) < 1e-15
    zero = t * 0.0
    assert np.allclose(delta_u_matrix(cd, 0.4, 2.0, zero), 0)


@given(lambdas, positions)
def test_delta_u_is_the_derivative_of_u(lam, x):
    cd = random_smooth(4, n=32, modes=4)
    t = random_tangent(cd, 1)
    errs = []
    for eps in (1e-4, 1e-5):
        fd = (u_matrix(cd.perturbed(t, eps), x, lam) - u_matrix(cd, x, lam)) / eps
        errs.append(np.abs(fd - delta_u_matrix(cd, x, lam, t)).max())
    scale = 1 + abs(lam) + 1 / abs(lam)
    assert errs[1] < 1e-3 * scale and errs[1] < errs[0]


@given(lambdas, positions)
def test_dlambda_u_by_central_differences(lam, x):
    cd = random_smooth(5, n=32, modes=4)
    h = 1e-5 * abs(lam)
    fd = (u_matrix(cd, x, lam + h) - u_matrix(cd, x, lam - h)) / (2 * h)
    assert np.abs(fd - dlambda_u_matrix(cd, x, lam)).max() < 1e-6 * (1 + abs(lam) ** -3)
    m21 = [dlambda_u_matrix(cd, x, z)[1, 0] for z in (lam, 2 * lam)]
    assert m21[0] == pytest.approx(m21[1])


@given(lambdas, positions)
def test_zero_curvature_for_y_independent_vacuum(lam, x):
    assert np.abs(zero_curvature_residual(vacuum(n=16), x, lam)).max() < 1e-14
