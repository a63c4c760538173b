import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from voimetric.core import (
    ConditionalMatrix,
    Distribution,
    JointDistribution,
    conditional_entropy,
    conditional_from_joint,
    entropy,
    joint_from_conditional,
    make_distribution,
    mutual_information,
    point_entropy,
    reverse_conditional,
    total_variation,
    uniform,
)
from voimetric.errors import DimensionMismatch, DomainError, EmptyInput, NegativeComponent, NotNormalized

from conftest import distributions, expected, load_p


def stochastic(rng, n, m):
    P = rng.dirichlet(np.ones(m), size=n)
    P[rng.random((n, m)) < 0.2] = 0.0
    P[P.sum(axis=1) == 0, 0] = 1.0
    return P / P.sum(axis=1, keepdims=True)


class TestConstruction:
    def test_already_normalized(self):
        assert np.allclose(make_distribution([0.5, 0.5]).p, [0.5, 0.5])

    def test_small_drift_renormalized(self):
        d = make_distribution([0.3, 0.7000000001])
        assert abs(d.p.sum() - 1) < 1e-15
        assert d.p[0] == pytest.approx(0.3, abs=1e-9)

    def test_rejects_unnormalized(self):
        with pytest.raises(NotNormalized):
            make_distribution([0.3, 0.4])

    def test_rejects_negative(self):
        with pytest.raises(NegativeComponent):
            make_distribution([1.1, -0.1])

    def test_tiny_negative_clamped(self):
        d = make_distribution([1.0, -1e-14])
        assert d.p[1] == 0.0

    def test_rejects_empty(self):
        with pytest.raises(EmptyInput):
            make_distribution([])

    def test_frozen_arrays(self):
        d = Distribution([0.5, 0.5])
        with pytest.raises(ValueError):
            d.p[0] = 1.0

    def test_conditional_rows_checked(self):
        with pytest.raises(NotNormalized):
            ConditionalMatrix([[0.5, 0.4]])

    def test_joint_marginals(self):
        t = JointDistribution([[0.1, 0.2], [0.3, 0.4]])
        assert np.allclose(t.row_marginal().p, [0.3, 0.7])
        assert np.allclose(t.col_marginal().p, [0.4, 0.6])


class TestEntropy:
    def test_point_entropy(self):
        assert point_entropy(0) == 0.0
        assert point_entropy(1) == 0.0
        assert point_entropy(1 / math.e) == pytest.approx(1 / math.e, abs=1e-15)
        with pytest.raises(DomainError):
            point_entropy(1.5)

    def test_values(self):
        assert entropy([1, 0, 0]) == 0.0
        assert entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)
        assert entropy([0.5, 0.5], base="2") == pytest.approx(1.0, abs=1e-15)
        assert entropy(uniform(10)) == pytest.approx(math.log(10), abs=1e-12)

    def test_example2_phi(self):
        assert entropy(load_p("example2_phi.json")) == pytest.approx(expected()["example2"]["H_phi"], abs=2e-3)

    def test_bad_base(self):
        with pytest.raises(DomainError):
            entropy([0.5, 0.5], base=1.0)


class TestTotalVariation:
    def test_values(self):
        assert total_variation([0.3, 0.7], [0.8, 0.2]) == pytest.approx(0.5)
        assert total_variation([0.3, 0.7], [0.3, 0.7]) == 0.0

    def test_sorted_example3_vs_uniform(self):
        q = np.array(expected()["example3"]["sorted_psi_a"])
        q = q / q.sum()
        assert total_variation(q, uniform(10)) == pytest.approx(0.5 * np.abs(q - 0.1).sum(), abs=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            total_variation([1.0], [0.5, 0.5])

    @given(distributions(3, 3), distributions(3, 3), distributions(3, 3))
    def test_metric(self, a, b, c):
        assert total_variation(a, b) == total_variation(b, a)
        assert total_variation(a, c) <= total_variation(a, b) + total_variation(b, c) + 1e-12


class TestUniform:
    def test_values(self):
        assert np.allclose(uniform(2).p, [0.5, 0.5])
        assert np.allclose(uniform(1).p, [1.0])
        with pytest.raises(DomainError):
            uniform(0)


class TestConditionals:
    def test_identity(self):
        t = joint_from_conditional([0.5, 0.5], np.eye(2))
        assert np.allclose(t.theta, [[0.5, 0], [0, 0.5]])
        assert np.allclose(conditional_from_joint(t).rows, np.eye(2))

    def test_zero_mass_row(self):
        t = joint_from_conditional([1, 0], [[0.2, 0.8], [0.5, 0.5]])
        assert np.all(t.theta[1] == 0)
        P = conditional_from_joint(JointDistribution([[0, 0], [0.3, 0.7]]))
        assert np.allclose(P.rows, [[0.3, 0.7], [0.3, 0.7]])

    def test_example2_round3(self):
        e = expected()["example2"]
        phi3 = np.array(e["round3_phi"])
        P3 = np.array(e["round3_P"])
        t = joint_from_conditional(phi3, P3)
        assert np.allclose(t.theta.sum(axis=0), e["round3_psi"], atol=2e-3)
        Q = conditional_from_joint(t, "reverse")
        assert np.allclose(Q.rows, e["round3_Q"], atol=2e-3)
        mi = mutual_information(t)
        assert mi == pytest.approx(entropy(e["round3_psi"]) - 0.0290, abs=2e-3)

    def test_example1_costs(self):
        e = expected()["example1"]
        phi = load_p("example1_phi.json")
        # P splits the third component, P' the fifth
        P = np.array([[0, 1], [1, 0], [0.02 / 0.12, 0.10 / 0.12], [1, 0], [1, 0]])
        assert np.allclose(phi @ P, [0.4, 0.6])
        assert conditional_entropy(phi, P) == pytest.approx(e["J_P"], abs=1e-4)
        Pp = np.array([[0, 1], [1, 0], [1, 0], [1, 0], [0.040 / 0.069, 0.029 / 0.069]])
        Pp[[0, 3]] = [[0, 1], [0, 1]]
        assert np.allclose(phi @ Pp, [0.4, 0.6])
        assert conditional_entropy(phi, Pp) == pytest.approx(e["J_P_prime"], abs=1e-4)

    def test_unit_rows_zero(self):
        assert conditional_entropy([0.2, 0.8], [[0, 1], [1, 0]]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            conditional_entropy([0.5, 0.5], [[1.0]])


class TestMutualInformation:
    def test_product(self, rng):
        a, b = rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4))
        assert abs(mutual_information(np.outer(a, b))) < 1e-12

    def test_diagonal(self):
        a = np.array([0.2, 0.3, 0.5])
        assert mutual_information(np.diag(a)) == pytest.approx(entropy(a), abs=1e-12)


def _random_case(seed):
    rng = np.random.default_rng(seed)
    n, m = rng.integers(1, 7), rng.integers(1, 7)
    return rng.dirichlet(np.ones(n)), stochastic(rng, n, m)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_chain_rule(seed):
    phi, P = _random_case(seed)
    t = joint_from_conditional(phi, P)
    assert abs(entropy(t) - entropy(phi) - conditional_entropy(phi, P)) < 1e-10


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_reverse_conditional_consistency(seed):
    phi, P = _random_case(seed)
    psi = phi @ P
    Q = reverse_conditional(phi, P).rows
    assert np.allclose(phi[:, None] * P, Q.T * psi[None, :], atol=1e-12, rtol=0)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_reverse_cost_identity(seed):
    phi, P = _random_case(seed)
    psi = phi @ P
    Q = reverse_conditional(phi, P)
    lhs = conditional_entropy(psi, Q.rows)
    assert abs(lhs - (conditional_entropy(phi, P) + entropy(phi) - entropy(psi))) < 1e-10


@settings(max_examples=100)
@given(st.lists(st.floats(0.0, 10.0, allow_nan=False), min_size=1, max_size=8).filter(lambda v: sum(v) > 1e-3))
def test_normalizing_constant_identity(mu):
    mu = np.array(mu)
    c = mu.sum()
    lhs = sum(-x * math.log(x) for x in mu if x > 0)
    rhs = c * entropy(mu / c) + (-c * math.log(c))
    assert abs(lhs - rhs) < 1e-10 * max(1.0, c)


@settings(max_examples=100)
@given(st.integers(0, 2**32 - 1))
def test_mutual_information_nonnegative(seed):
    phi, P = _random_case(seed)
    assert mutual_information(joint_from_conditional(phi, P)) >= -1e-10
