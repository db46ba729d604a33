import numpy as np
import pytest
from hypothesis import given, strategies as st

from sinhg.corpus import vacuum
from sinhg.oracle import nu_squared, vacuum_discriminant, vacuum_divisor, vacuum_frame, vacuum_monodromy
from sinhg.transfer import monodromy

lambdas = st.complex_numbers(min_magnitude=0.05, max_magnitude=20, allow_nan=False, allow_infinity=False)


def test_nu_vanishes_at_minus_one():
    assert nu_squared(-1.0) == 0
    assert np.allclose(vacuum_frame(0.7, -1.0), np.eye(2))
    assert vacuum_discriminant(1.0) == pytest.approx(2 * np.cos(1))


@given(lambdas, st.floats(0, 2))
def test_frame_is_unimodular_and_a_group(lam, x):
    F = vacuum_frame(x, lam)
    assert abs(np.linalg.det(F) - 1) < 1e-9 * max(1, np.abs(F).max() ** 2)
    G = vacuum_frame(x / 2, lam)
    assert np.abs(G @ G - F).max() < 1e-9 * max(1, np.abs(F).max())


def test_divisor_roots_solve_b():
    pts = vacuum_divisor(0.001, 1000)
    assert len(pts) == 11
    for lam, mu in pts:
        M = vacuum_monodromy(lam)
        assert abs(M[0, 1]) < 1e-9 * max(1, np.abs(M).max())
        assert M[1, 1] == pytest.approx(mu, abs=1e-8)
    assert vacuum_divisor(2, 3) == []


def test_matches_integrator_at_other_period():
    cd = vacuum(period=2.5, n=64)
    for lam in (0.3, 1.7 - 0.4j):
        assert np.abs(monodromy(cd, lam) - vacuum_monodromy(lam, 2.5)).max() < 1e-11
