import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heinzlab.errors import ValidationError
from heinzlab.linalg import HermitianPD, random_pd
from heinzlab.means import (DRISSI_INTERVAL, MeanPair, MeanParams, F_nu_scalar, Phi_m_scalar, bhatia_alpha,
                            f_x_scalar, fx_mean, geom_mean_w, heinz_op, heinz_scalar, heron_scalar, log_mean,
                            midpoint_nodes, pairwise_sum, phi_n_scalar, trapezoid_nodes)

from conftest import orders, seeds

# high-precision reference values (40-digit arithmetic)
L_4_1 = 2.16404256133344511104
F_QUARTER_4 = -1.02013944659678948175
HEINZ_8_1_03 = 3.07657991660939374441
HERON_8_1_03 = 3.32989898732233306832
FX_MEAN_4_03_05 = 2.02572283084228092537


def test_scalar_means_frozen():
    assert log_mean(4.0, 1.0) == pytest.approx(L_4_1, rel=1e-15)
    assert log_mean(4.0, 1.0) == pytest.approx(3 / math.log(4), rel=1e-15)
    assert heinz_scalar(8.0, 1.0, 0.3) == pytest.approx(HEINZ_8_1_03, rel=1e-15)
    assert heron_scalar(8.0, 1.0, 0.3) == pytest.approx(HERON_8_1_03, rel=1e-15)
    assert F_nu_scalar(4.0, 0.25) == pytest.approx(F_QUARTER_4, rel=1e-14)
    assert fx_mean(4.0, 0.3, 0.5) == pytest.approx(FX_MEAN_4_03_05, rel=1e-14)
    assert fx_mean(4.0, 0.0, 1.0) == pytest.approx(L_4_1, rel=1e-14)


def test_removable_singularities():
    assert log_mean(3.0, 3.0) == 3.0
    assert log_mean(3.0, 3.0 * (1 + 1e-12)) == pytest.approx(3.0, rel=1e-11)
    assert F_nu_scalar(1.0, 0.3) == pytest.approx(-0.4)
    assert fx_mean(1.0, 0.2, 0.7) == 1.0
    with pytest.raises(ValidationError):
        log_mean(-1.0, 2.0)


def test_drissi_interval():
    lo, hi = DRISSI_INTERVAL
    assert lo == pytest.approx(0.21132486540518711775, abs=1e-15)
    assert hi == pytest.approx(0.78867513459481288225, abs=1e-15)
    assert lo + hi == pytest.approx(1.0, abs=1e-15)


def test_bhatia_alpha_endpoints():
    assert bhatia_alpha(0.5) == 0.0 and bhatia_alpha(0.0) == 1.0 and bhatia_alpha(1.0) == 1.0


@given(a=st.floats(1e-3, 1e3), b=st.floats(1e-3, 1e3), nu=st.floats(0, 1))
def test_scalar_mean_ordering(a, b, nu):
    g, arith = math.sqrt(a * b), (a + b) / 2
    h = heinz_scalar(a, b, nu)
    assert g * (1 - 1e-12) <= h <= arith * (1 + 1e-12)
    assert g * (1 - 1e-12) <= log_mean(a, b) <= arith * (1 + 1e-12)
    assert heinz_scalar(a, b, nu) == pytest.approx(heinz_scalar(b, a, nu), rel=1e-13)


def test_ladder_nodes():
    assert midpoint_nodes(0.0, 1.0, 2).tolist() == [0.25, 0.75]
    nodes, w = trapezoid_nodes(0.0, 1.0, 3)
    assert nodes.tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert w.tolist() == [0.125, 0.25, 0.25, 0.25, 0.125]
    with pytest.raises(ValidationError):
        midpoint_nodes(0, 1, 0)


def test_scalar_ladder_small_depths_x4():
    f = lambda t: f_x_scalar(4.0, t)  # noqa: E731
    assert phi_n_scalar(f, 0, 1, 1) == pytest.approx(2.0)
    assert phi_n_scalar(f, 0, 1, 2) == pytest.approx((4 ** 0.25 + 4 ** 0.75) / 2)
    assert Phi_m_scalar(f, 0, 1, 1) == pytest.approx(2.5)
    assert Phi_m_scalar(f, 0, 1, 2) == pytest.approx(2.25)


def test_pairwise_sum():
    assert pairwise_sum([1, 2, 3, 4, 5]) == 15
    with pytest.raises(ValidationError):
        pairwise_sum([])


def test_mean_params():
    p = MeanParams(nu=0.3, extra={"x": 2.0})
    assert p.r0 == 0.3 and p.as_dict()["x"] == 2.0
    with pytest.raises(ValidationError):
        MeanParams(n=0)


@given(n=orders, seed=seeds, nu=st.floats(0, 1))
def test_operator_mean_identities(n, seed, nu):
    A, B = random_pd(n, seed, 1e3), random_pd(n, seed + 1, 1e3)
    P = MeanPair(A, B)
    tol = 1e-9 * max(A.max_eig, B.max_eig)
    assert np.allclose(P.sharp(0.0), A.matrix, atol=tol)
    assert np.allclose(P.sharp(1.0), B.matrix, atol=tol)
    G = P.sharp(0.5)
    # Riccati characterization of the geometric mean: G A^-1 G = B
    assert np.allclose(G @ np.linalg.solve(A.matrix, G), B.matrix, atol=1e-7 * B.max_eig)
    assert np.allclose(P.heinz(nu), P.heinz(1 - nu), atol=tol)
    assert np.allclose(P.heron(0.0), G, atol=tol) and np.allclose(P.heron(1.0), P.nabla(), atol=tol)
    # geometric mean is symmetric in (A, B)
    assert np.allclose(MeanPair(B, A).sharp(0.5), G, atol=1e-8 * max(A.max_eig, B.max_eig))


@given(n=orders, seed=seeds, nu=st.floats(0, 0.49), k=st.integers(1, 5))
def test_ladder_forms_agree(n, seed, nu, k):
    P = MeanPair(random_pd(n, seed, 1e3), random_pd(n, seed + 1, 1e3))
    scale = np.abs(P.nabla()).max()
    assert np.allclose(P.phi(nu, 0.5, k), P.phi_congruence(nu, 0.5, k), atol=1e-10 * scale)
    assert np.allclose(P.Phi(nu, 0.5, k), P.Phi_congruence(nu, 0.5, k), atol=1e-10 * scale)
    # the F-term of the refined chain is the average of f_C over [nu, 1/2]
    assert np.allclose(P.F(nu) / (2 * nu - 1), P.fx_mean(nu, 0.5), atol=1e-10 * scale)
    # phi_1 and Phi_2 collapse to explicit Heinz combinations
    q = (2 * nu + 1) / 4
    assert np.allclose(P.phi(nu, 0.5, 1), P.heinz(q), atol=1e-10 * scale)
    explicit = 0.25 * P.heinz(nu) + 0.5 * P.heinz(q) + 0.25 * P.sharp(0.5)
    assert np.allclose(P.Phi(nu, 0.5, 2), explicit, atol=1e-10 * scale)


def test_equal_pair_collapses():
    A = random_pd(3, 5, 1e2)
    P = MeanPair(A, A)
    for M in (P.sharp(0.3), P.heinz(0.2), P.heron(0.7), P.phi(0, 1, 3), P.Phi(0, 1, 3)):
        assert np.allclose(M, A.matrix, atol=1e-10 * A.max_eig)
    assert np.allclose(P.F(0.25), -0.5 * A.matrix, atol=1e-10 * A.max_eig)


def test_diagonal_pair_matches_scalars():
    a, b = np.array([0.5, 2.0, 30.0]), np.array([4.0, 2.0, 0.1])
    A, B = HermitianPD(np.diag(a)), HermitianPD(np.diag(b))
    assert np.diag(heinz_op(A, B, 0.3)).real == pytest.approx(heinz_scalar(a, b, 0.3), rel=1e-12)
    assert np.diag(geom_mean_w(A, B, 0.3).matrix).real == pytest.approx(a ** 0.7 * b ** 0.3, rel=1e-12)


def test_mismatched_orders():
    with pytest.raises(ValidationError):
        MeanPair(np.eye(2), np.eye(3))
