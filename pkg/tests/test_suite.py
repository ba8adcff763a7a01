import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from heinzlab.errors import HypothesisViolation, ValidationError
from heinzlab.linalg import HermitianPD
from heinzlab.means import DRISSI_INTERVAL, MeanParams
from heinzlab.norms import KyFan
from heinzlab.suite import (ASSERTED_IDS, REGISTRY, Instance, InequalityReport, InstanceSpec, derive_seed,
                            drissi_grid, get_check, iter_instances, loewner_leq, run_check, run_suite,
                            sample_params, scan_drissi, x_kind_for)

from conftest import seeds

ALL_IDS = [
    "INEQ-1.2", "INEQ-1.3", "INEQ-1.4", "CHAIN-1.5", "INEQ-1.7", "CHAIN-1.8", "CHAIN-1.9", "INEQ-2.0.0",
    "INEQ-2.0", "INEQ-2.1", "INEQ-2.2", "INEQ-2.2.0", "CHAIN-2.2.1", "CHAIN-2.10", "CHAIN-3.1", "INEQ-ZHAO",
    "CHAIN-3.7", "CHAIN-3.12", "CHAIN-3.13", "CHAIN-3.14", "CHAIN-3.15",
]


def scalar_instance(a, b, x=1.0):
    return Instance(np.array([[a]]), np.array([[b]]), np.array([[x]]))


def test_registry_contents():
    assert set(ALL_IDS) <= set(REGISTRY)
    assert set(ASSERTED_IDS) == set(ALL_IDS)
    assert not REGISTRY["CHAIN-3.2V"].asserted
    with pytest.raises(ValidationError):
        get_check("INEQ-9.9")


@pytest.mark.parametrize("cid", ALL_IDS)
@given(seed=seeds, n=st.integers(1, 4), kind=st.sampled_from(["general", "hermitian", "identity", "diagonal"]))
def test_every_check_holds_on_random_instances(cid, seed, n, kind):
    chain = run_check(cid, InstanceSpec(n, seed, 1e3, kind))
    assert chain.ok, [r for r in chain.reports if not r.passed]


BAD_PARAMS = [
    ("INEQ-1.3", MeanParams(nu=0.2, alpha=1.0)),
    ("INEQ-1.3", MeanParams(nu=0.5, alpha=0.4)),
    ("INEQ-1.4", MeanParams(extra={"t": -2.0})),
    ("INEQ-1.4", MeanParams(extra={"t": 2.5})),
    ("CHAIN-1.8", MeanParams(nu=0.5)),
    ("CHAIN-1.9", MeanParams(alpha=0.6, beta=0.6)),
    ("INEQ-2.0", MeanParams(extra={"r": 0.0})),
    ("INEQ-2.1", MeanParams(nu=1.5, alpha=1.5)),
    ("INEQ-2.1", MeanParams(nu=0.5, alpha=0.5)),
    ("INEQ-2.2", MeanParams(extra={"f": "power:2"})),
    ("INEQ-2.2.0", MeanParams(alpha=0.9)),
    ("CHAIN-2.2.1", MeanParams(alpha=0.7, beta=0.2)),
    ("CHAIN-3.1", MeanParams(nu=1.2)),
    ("CHAIN-3.12", MeanParams(nu=0.5, m=2)),
    ("CHAIN-3.12", MeanParams(nu=0.3, m=1)),
    ("CHAIN-3.14", MeanParams(nu=0.0, m=2)),
    ("CHAIN-3.14", MeanParams(nu=0.3, m=1)),
    ("CHAIN-3.15", MeanParams(nu=1.0, extra={"x": 2.0})),
    ("CHAIN-3.7", MeanParams(alpha=0.0, beta=1.0, extra={"x": -1.0})),
]


@pytest.mark.parametrize("cid,params", BAD_PARAMS, ids=[f"{c}-{i}" for i, (c, _) in enumerate(BAD_PARAMS)])
def test_hypotheses_are_enforced(cid, params):
    with pytest.raises(HypothesisViolation) as info:
        run_check(cid, InstanceSpec(2, 1), params)
    assert info.value.check_id == cid


def test_m_equal_one_breaks_refined_chain():
    # Phi_1(nu, 1/2) = H_nu/2 + A#B/2 sits above the Phi_2 expression, so m = 1 cannot be admitted
    inst = scalar_instance(1.0, 9.0)
    stages = REGISTRY["CHAIN-3.12"].stages(inst, MeanParams(nu=0.1, n=1, m=1))
    phi_m, phi_2_expr = stages[4].matrix[0, 0].real, stages[5].matrix[0, 0].real
    assert phi_m > phi_2_expr + 1e-3


def test_drissi_scan_examples():
    assert scan_drissi(0.5) is None
    assert scan_drissi(0.25) is None
    assert scan_drissi(0.2114) is None
    hit = scan_drissi(0.21)
    assert hit is not None and hit.heinz > hit.log_mean and hit.margin < 0
    assert scan_drissi(0.79) is not None
    with pytest.raises(ValidationError):
        scan_drissi(0.3, grid=[])
    assert drissi_grid().size == 41


def test_drissi_expected_violation_mode():
    chain = run_check("INEQ-1.2", InstanceSpec(1, 3), MeanParams(nu=0.21))
    (rec,) = chain.reports
    assert rec.expect == "violation" and not rec.passed and rec.ok
    inside = run_check("INEQ-1.2", InstanceSpec(1, 3), MeanParams(nu=DRISSI_INTERVAL[0], extra={"a": 1e3, "b": 1e-3}))
    assert inside.reports[0].expect == "hold" and inside.ok


def test_loewner_leq():
    ok, margin = loewner_leq(np.eye(2), 2 * np.eye(2))
    assert ok and margin == pytest.approx(1.0)
    ok, margin = loewner_leq(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert not ok and margin == pytest.approx(-1.0)
    with pytest.raises(ValidationError):
        loewner_leq(np.eye(2), np.eye(3))


def test_equal_pair_collapses_heinz_chain():
    A = HermitianPD(np.diag([2.0, 5.0]))
    chain = run_check("CHAIN-3.1", Instance(A, A, np.eye(2)), MeanParams(nu=0.3))
    for _, vals in chain.stages:
        assert vals["trace"] == pytest.approx(7.0)
    assert chain.ok


def test_identity_pair_hermite_hadamard_chain_is_flat():
    X = np.array([[1.0, 2.0j], [0.5, -1.0]])
    inst = Instance(np.eye(2), np.eye(2), X)
    chain = run_check("CHAIN-2.2.1", inst, MeanParams(alpha=0.1, beta=0.8, n=4, m=3))
    expect = 2 * np.linalg.svd(X, compute_uv=False)
    for _, vals in chain.stages:
        assert vals["kyfan:1"] == pytest.approx(expect[0], rel=1e-12)
        assert vals["kyfan:2"] == pytest.approx(expect.sum(), rel=1e-12)


@pytest.mark.parametrize("nu", [0.1, 0.3, 0.7, 0.95])
@pytest.mark.parametrize("ab", [(1.0, 9.0), (3.0, 0.02), (2.0, 2.0)])
def test_refined_loewner_chains_restrict_to_scalar_chains(nu, ab):
    a, b = ab
    x = b / a
    inst = scalar_instance(a, b)
    p = MeanParams(nu=nu, n=3, m=4, extra={"x": x})
    op = [v["trace"] for _, v in run_check("CHAIN-3.12", inst, p).stages]
    sc = [v["value"] for _, v in run_check("CHAIN-3.13", inst, p).stages]
    assert [op[i] / a for i in (1, 2, 3, 4, 6)] == pytest.approx(sc, rel=1e-10)
    op = [v["trace"] for _, v in run_check("CHAIN-3.14", inst, p).stages]
    sc = [v["value"] for _, v in run_check("CHAIN-3.15", inst, p).stages]
    assert [op[i] / a for i in (1, 2, 3, 4, 6)] == pytest.approx(sc, rel=1e-10)


def test_norm_checks_restrict_to_scalars():
    a, b, x, nu, alpha = 4.0, 0.25, 1.5, 0.3, 0.7
    inst = scalar_instance(a, b, x)
    vals = [v["kyfan:1"] for _, v in run_check("CHAIN-1.5", inst, MeanParams(nu=nu, alpha=alpha)).stages]
    heinz = 0.5 * x * (a ** nu * b ** (1 - nu) + a ** (1 - nu) * b ** nu)
    heron = (1 - alpha) * x * math.sqrt(a * b) + alpha * x * (a + b) / 2
    assert vals == pytest.approx([x * math.sqrt(a * b), heinz, heron], rel=1e-12)
    vals = [v["kyfan:1"] for _, v in run_check("INEQ-2.0.0", inst, MeanParams(nu=nu)).stages]
    diff = abs(x * (a ** nu * b ** (1 - nu) - a ** (1 - nu) * b ** nu))
    assert vals == pytest.approx([diff, abs(2 * nu - 1) * abs(x * (a - b))], rel=1e-12)


def test_arithmetic_quarter_term_breaks_refined_chain():
    # A = 1, B = 4, nu = 0: H_0/4 + H_(1/4)/2 + A nabla B/4 = 2.3107 exceeds H_0/2 + A#B/2 = 2.25
    chain = run_check("CHAIN-3.2V", scalar_instance(1.0, 4.0), MeanParams(nu=0.0))
    bad = [r for r in chain.reports if not r.passed]
    assert len(bad) == 1 and bad[0].expect == "unasserted" and bad[0].ok
    assert bad[0].lhs - bad[0].rhs == pytest.approx(0.25 * 2.5 + 0.5 * (4 ** 0.25 + 4 ** 0.75) / 2 + 0.25 * 2.5 - 2.25)
    assert run_check("CHAIN-3.12", scalar_instance(1.0, 4.0), MeanParams(nu=0.0, m=2)).ok


@given(seed=seeds)
def test_report_pass_flag_recomputable(seed):
    for cid in ("INEQ-1.3", "CHAIN-3.1", "CHAIN-3.7"):
        for r in run_check(cid, InstanceSpec(3, seed)).reports:
            assert r.passed == InequalityReport.decide(r.lhs, r.rhs, r.tol_used)
            assert r.margin == r.rhs - r.lhs
            assert InequalityReport.from_dict(r.as_dict()) == r


def test_custom_norms_and_kinds():
    chain = run_check("INEQ-1.3", InstanceSpec(3, 5), norms=[KyFan(2)])
    assert {r.norm for r in chain.reports} == {"kyfan:1", "kyfan:2", "kyfan:3"}


def test_instances_are_deterministic():
    spec = InstanceSpec(4, 99, 1e4, "hermitian")
    a, b = spec.build(), spec.build()
    assert np.array_equal(a.A.matrix, b.A.matrix) and np.array_equal(a.X, b.X)
    assert np.allclose(a.X, a.X.conj().T)
    d = InstanceSpec(3, 99, 1e4, "diagonal").build()
    for M in (d.A.matrix, d.B.matrix, d.X):
        assert np.count_nonzero(M - np.diag(np.diag(M))) == 0
    assert np.array_equal(InstanceSpec(2, 1, x_kind="identity").build().X, np.eye(2))
    with pytest.raises(ValidationError):
        InstanceSpec(0, 1)
    with pytest.raises(ValidationError):
        InstanceSpec(2, 1, x_kind="weird")


def test_runner_order_and_determinism():
    specs = list(iter_instances(["CHAIN-3.1", "INEQ-1.3"], [1, 2], 3, 7, 1e4))
    assert [(c, s.n) for c, s in specs][:4] == [("CHAIN-3.1", 1)] * 3 + [("CHAIN-3.1", 2)]
    assert [s.x_kind for _, s in specs[:3]] == ["hermitian", "identity", "diagonal"]
    assert x_kind_for(13) == "general"
    assert derive_seed(7, "CHAIN-3.1", 1, 0) != derive_seed(7, "CHAIN-3.1", 1, 1)
    one = [r.as_dict() for c in run_suite(["CHAIN-3.1"], [2], 3, 7) for r in c.reports]
    two = [r.as_dict() for c in run_suite(["CHAIN-3.1"], [2], 3, 7) for r in c.reports]
    assert one == two


def test_parallel_runner_matches_serial():
    serial = [r.as_dict() for c in run_suite(["INEQ-1.3"], [2, 3], 4, 11) for r in c.reports]
    par = [r.as_dict() for c in run_suite(["INEQ-1.3"], [2, 3], 4, 11, jobs=2) for r in c.reports]
    assert serial == par


def test_sampled_params_respect_hypotheses():
    for cid in ALL_IDS:
        for i in range(30):
            REGISTRY[cid].validate(sample_params(cid, InstanceSpec(2, 1000 + i)))


def test_dict_params_override_sampled_values():
    spec = InstanceSpec(n=3, seed=5)
    chain = run_check("CHAIN-3.12", spec, params={"nu": 0.3, "m": 4})
    assert chain.params["nu"] == 0.3 and chain.params["m"] == 4
    sampled = run_check("CHAIN-3.12", spec)
    assert chain.params["n"] == sampled.params["n"]
