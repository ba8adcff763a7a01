import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heinzlab.errors import DomainError, ValidationError
from heinzlab.linalg import HermitianPD, make_rng, random_complex, random_pd
from heinzlab.matfun import (IDENTITY, LOG, Power, apply_spectral, commutator_identity_residual, dilate,
                             divided_difference_matrix, exprel, fprime_opnorm, frac_power, parse_monotone,
                             schur_product)

from conftest import orders, seeds

FNS = [Power(0.1), Power(0.5), Power(0.9), LOG, IDENTITY]


def test_divided_difference_sqrt_example():
    Y = divided_difference_matrix(Power(0.5), [1.0, 4.0])
    assert Y == pytest.approx(np.array([[0.5, 1 / 3], [1 / 3, 0.25]]), rel=1e-14)


def test_divided_difference_close_eigenvalues_uses_derivative():
    lam = [2.0, 2.0 + 1e-12]
    Y = divided_difference_matrix(LOG, lam)
    assert Y[0, 1] == pytest.approx(1 / (2.0 + 5e-13), rel=1e-12)
    assert np.all(np.isfinite(Y))


@pytest.mark.parametrize("f", FNS, ids=lambda f: f.name)
def test_divided_difference_psd_for_monotone(f):
    lam = np.geomspace(0.01, 100, 6)
    assert np.linalg.eigvalsh(divided_difference_matrix(f, lam)).min() >= -1e-12


@pytest.mark.parametrize("f", FNS, ids=lambda f: f.name)
@given(n=orders, seed=seeds)
def test_commutator_identity(f, n, seed):
    A = random_pd(n, seed, 1e3)
    X = random_complex((n, n), make_rng(seed + 1))
    assert commutator_identity_residual(f, A, X) <= 1e-9


@given(n=orders, seed=seeds)
def test_dilation_reduces_two_sided_commutator(n, seed):
    rng = make_rng(seed)
    A, B = random_pd(n, seed, 1e2), random_pd(n, seed + 7, 1e2)
    X = random_complex((n, n), rng)
    Ah, Xh = dilate(A, B, X)
    f = Power(0.5)
    big = apply_spectral(f, Ah) @ Xh - Xh @ apply_spectral(f, Ah)
    small = apply_spectral(f, A) @ X - X @ apply_spectral(f, B)
    assert np.allclose(big[:n, n:], small, atol=1e-10)
    assert np.allclose(big[n:, :n], 0.0, atol=1e-12)


@given(n=orders, seed=seeds, nu=st.floats(-1.5, 1.5))
def test_frac_power_group_law(n, seed, nu):
    A = random_pd(n, seed, 1e2)
    P = frac_power(A, nu).matrix @ frac_power(A, 1.0 - nu).matrix
    assert np.linalg.norm(P - A.matrix) <= 1e-10 * np.linalg.norm(A.matrix)


def test_apply_spectral_log_and_identity():
    A = HermitianPD(np.diag([1.0, math.e]))
    assert apply_spectral(LOG, A) == pytest.approx(np.diag([0.0, 1.0]), abs=1e-15)
    assert apply_spectral(IDENTITY, A) == pytest.approx(A.matrix)
    with pytest.raises(DomainError):
        apply_spectral(lambda t: np.log(t - 2.0), A)


def test_monotone_fn_domain_and_parsing():
    with pytest.raises(DomainError):
        LOG.eval(-1.0)
    with pytest.raises(ValidationError):
        Power(1.5)
    with pytest.raises(ValidationError):
        parse_monotone("sqrtish")
    assert parse_monotone("power:0.5") == Power(0.5)
    assert parse_monotone("LOG") is LOG


def test_fprime_opnorm():
    A = HermitianPD(np.diag([0.25, 4.0]))
    assert fprime_opnorm(Power(0.5), A) == pytest.approx(1.0)
    assert fprime_opnorm(LOG, A) == pytest.approx(4.0)
    assert fprime_opnorm(IDENTITY, A) == 1.0


def test_schur_product_shape_check():
    with pytest.raises(ValidationError):
        schur_product(np.eye(2), np.eye(3))
    assert schur_product(np.full((2, 2), 2.0), np.eye(2)) == pytest.approx(2 * np.eye(2))


def test_exprel():
    assert exprel(0.0) == 1.0
    assert exprel(1e-8) == pytest.approx(1 + 5e-9, rel=1e-15)
    assert exprel(1.0) == pytest.approx(math.e - 1, rel=1e-15)
    assert exprel(-50.0) == pytest.approx(1 / 50, rel=1e-12)
