import math

import numpy as np
import pytest

from wapeq.core import exp_bottom, gamma_one_plus_y, make_environment
from wapeq.errors import SingularOperator
from wapeq.grid_ops import (
    Grid,
    delta_h,
    field_vector,
    i_h,
    inner_0h,
    lambda_h_apply,
    lambda_h_system,
    norm_0h,
    norm_1h,
    norm_inf_h,
    omega,
    p_h_sample,
    partial_h,
    seminorm_1h,
    t_h_solve,
)

from .conftest import REFERENCE_Q, random_field

IDENTITY_J = (3, 4, 7, 8, 16, 17)


def test_grid_geometry():
    g = Grid(40, 40, 1.0)
    assert g.h * g.J == pytest.approx(1.0, abs=1e-15)
    assert g.k * g.N == pytest.approx(1.0, abs=1e-15)
    assert g.y[0] == 0.0 and g.y[-1] == 1.0
    assert g.r_mid(1) == pytest.approx(0.5 / 40)


def test_grid_from_step_rounds_up():
    g = Grid.from_step(4000, 3300.0, 0.83475)
    assert g.N == 3954
    assert g.k <= 0.83475
    assert g.k * g.N == pytest.approx(3300.0)
    assert Grid.from_step(10, 1.0, 0.1).N == 10


@pytest.mark.parametrize("J,N,R", [(2, 1, 1.0), (3, -1, 1.0), (3, 0, 1.0), (3.5, 1, 1.0)])
def test_grid_rejects_bad_sizes(J, N, R):
    with pytest.raises(ValueError):
        Grid(J, N, R)


def test_field_vector_membership():
    field_vector([0, 1, 2, 0])
    with pytest.raises(ValueError):
        field_vector([1, 1, 2, 0])
    with pytest.raises(ValueError):
        field_vector([0, 1, 2, 1e-300])


def test_delta_h_zero_and_quadratic():
    g = Grid(10, 1, 1.0)
    assert np.all(delta_h(np.zeros(11, complex)) == 0)
    y = g.y
    d = delta_h(y * (1 - y) + 0j)
    np.testing.assert_allclose(d[1:-1], -2.0, rtol=1e-12)
    assert d[0] == 0 and d[-1] == 0


@pytest.mark.parametrize("J", [4, 9, 32])
def test_delta_h_sine_eigenpair(J):
    y = np.arange(J + 1) / J
    v = np.sin(np.pi * y) + 0j
    v[0] = v[-1] = 0
    h = 1 / J
    expected = -(4 / h**2) * math.sin(math.pi * h / 2) ** 2 * v
    np.testing.assert_allclose(delta_h(v), expected, atol=1e-12 * J * J)


def test_partial_h_exact_on_quadratic():
    y = np.arange(13) / 12
    d = partial_h(y * (1 - y) + 0j)
    np.testing.assert_allclose(d[1:-1], (1 - 2 * y)[1:-1], atol=1e-13)
    assert d[0] == 0 and d[-1] == 0


def test_i_h_of_zero():
    assert np.all(i_h(np.zeros(6, complex)) == 0)


def test_norms_small_example():
    v = np.zeros(5, complex)
    v[2] = 1
    assert norm_0h(v) == pytest.approx(0.5, abs=1e-15)
    assert inner_0h(v, v) == pytest.approx(0.25)
    assert norm_inf_h(v) == 1.0
    # two unit jumps of size 1/h = 4 each, weight h = 1/4
    assert seminorm_1h(v) == pytest.approx(math.sqrt(0.25 * 2 * 16))


def test_inner_product_conjugates_second_argument(rng):
    v, w = random_field(rng, 8), random_field(rng, 8)
    assert inner_0h(v, w) == pytest.approx(np.conj(inner_0h(w, v)))
    assert inner_0h(1j * v, w) == pytest.approx(1j * inner_0h(v, w))
    assert inner_0h(v, v).real == pytest.approx(norm_0h(v) ** 2, rel=1e-14)
    assert abs(inner_0h(v, v).imag) < 1e-14


def test_omega_weights():
    w = omega(Grid(4, 1, 1.0))
    np.testing.assert_array_equal(w, [0, 0.25, 0.5, 0.75, 1.0])


@pytest.mark.parametrize("J", IDENTITY_J)
def test_summation_by_parts_identities(J, rng):
    w = omega(J)
    for _ in range(100):
        v = random_field(rng, J)
        lhs = inner_0h(delta_h(v), v)
        scale = seminorm_1h(v) ** 2
        assert abs(lhs + scale) <= 1e-13 * scale
        adv = inner_0h(w * partial_h(v), v).real
        avg = inner_0h(v, i_h(v))
        ref = max(abs(avg), norm_0h(v) ** 2)
        assert abs(avg.imag) <= 1e-13 * ref
        assert abs(adv + 0.5 * avg.real) <= 1e-13 * ref


@pytest.mark.parametrize("J", IDENTITY_J)
def test_discrete_inequalities(J, rng):
    h = 1 / J
    for _ in range(100):
        v = random_field(rng, J)
        slack = 1 + 1e-12
        assert norm_0h(v) <= math.sqrt(2) / 2 * seminorm_1h(v) * slack
        assert norm_0h(i_h(v)) <= norm_0h(v) * slack
        assert norm_inf_h(v) <= seminorm_1h(v) * slack
        assert norm_inf_h(v) <= h**-0.5 * norm_0h(v) * slack
        assert norm_inf_h(v) <= math.sqrt(2) * (norm_0h(v) + norm_0h(partial_h(v))) * slack


def test_p_h_sample():
    g = Grid(4, 1, 1.0)
    assert np.all(p_h_sample(lambda y: 0 * y, g) == 0)
    v = p_h_sample(lambda y: np.sin(2 * np.pi * y), g)
    np.testing.assert_allclose(v[1:-1], [1, 0, -1], atol=1e-15)
    clamped = p_h_sample(lambda y: y, g)
    assert clamped[-1] == 0 and clamped[3] == 0.75


def test_lambda_h_reduces_to_minus_laplacian(rng):
    q = 0.3 - 0.1j
    env = make_environment(2.0, q + 0.5, q, exp_bottom(), lambda r, y: -1 / q + 0 * y, 1.0)
    g = Grid(9, 1, 1.0)
    v = random_field(rng, 9)
    np.testing.assert_allclose(lambda_h_apply(env, g, 0.4, v), -delta_h(v), atol=1e-12)
    assert np.all(lambda_h_apply(env, g, 0.4, np.zeros(10, complex)) == 0)


def test_lambda_h_real_part_identity(reference_env, rng):
    g = Grid(16, 1, 1.0)
    q = reference_env.q
    for r in (0.0, 0.37, 1.0):
        s = math.exp(r)
        gamma = gamma_one_plus_y(r, g.y)
        for _ in range(20):
            v = random_field(rng, 16)
            lhs = inner_0h(lambda_h_apply(reference_env, g, r, v), v).real
            weights = q.real + abs(q) ** 2 * gamma.real
            rhs = seminorm_1h(v) ** 2 - s * s / (4.0 * abs(q) ** 2) * g.h * np.sum(
                (weights * np.abs(v) ** 2)[1:-1]
            )
            assert lhs == pytest.approx(rhs, rel=1e-12)


def test_lambda_h_system_matches_apply(reference_env, rng):
    g = Grid(11, 1, 1.0)
    v = random_field(rng, 11)
    dense = lambda_h_system(reference_env, g, 0.6).dense()
    np.testing.assert_allclose(dense @ v[1:-1], lambda_h_apply(reference_env, g, 0.6, v)[1:-1], rtol=1e-13)


def test_t_h_solve_quadratic():
    q = 0.25
    env = make_environment(2.0, 0.75, q, exp_bottom(), lambda r, y: -1 / q + 0 * y, 1.0)
    g = Grid(12, 1, 1.0)
    f = p_h_sample(lambda y: 2.0 + 0 * y, g)
    v = t_h_solve(env, g, 0.5, f)
    np.testing.assert_allclose(v, g.y * (1 - g.y), atol=1e-13)


def test_t_h_solve_matches_dense_oracle(reference_env, rng):
    for J in (4, 10, 51):
        g = Grid(J, 1, 1.0)
        for r in (0.0, 0.5, 1.0):
            f = random_field(rng, J)
            dense = lambda_h_system(reference_env, g, r).dense()
            expected = np.linalg.solve(dense, f[1:-1])
            v = t_h_solve(reference_env, g, r, f)
            assert v[0] == 0 and v[-1] == 0
            assert np.linalg.norm(v[1:-1] - expected) <= 1e-12 * np.linalg.norm(expected)
            res = norm_0h(lambda_h_apply(reference_env, g, r, v) - f)
            assert res <= 1e-12 * max(1.0, norm_0h(f))


def test_t_h_inverts_lambda_h(reference_env, rng):
    g = Grid(33, 1, 1.0)
    v = random_field(rng, 33)
    back = t_h_solve(reference_env, g, 0.8, lambda_h_apply(reference_env, g, 0.8, v))
    assert norm_0h(back - v) <= 1e-12 * norm_0h(v)


def test_t_h_singular_operator():
    # zeta equals the smallest discrete Dirichlet eigenvalue -> Lambda_h singular
    J = 4
    mu = 4 * J * J * math.sin(math.pi / (2 * J)) ** 2
    q = 1.0
    env = make_environment(1.0, 1.5, q, exp_bottom(), lambda r, y: (mu - 1.0) + 0 * y, 1.0)
    g = Grid(J, 1, 1.0)
    with pytest.raises(SingularOperator):
        t_h_solve(env, g, 0.0, random_field(np.random.default_rng(0), J))


def manufactured_pair(env, r):
    psi = lambda y: np.sin(np.pi * y) * np.exp(y)  # noqa: E731
    psi_yy = lambda y: np.exp(y) * (2 * np.pi * np.cos(np.pi * y) + (1 - np.pi**2) * np.sin(np.pi * y))  # noqa: E731
    phi = lambda y: -psi_yy(y) - env.zeta(r, y) * psi(y)  # noqa: E731
    return psi, phi


def elliptic_errors(env, r, J_list):
    psi, phi = manufactured_pair(env, r)
    errs = []
    for J in J_list:
        g = Grid(J, 1, 1.0)
        errs.append(norm_1h(t_h_solve(env, g, r, p_h_sample(phi, g)) - p_h_sample(psi, g)))
    return errs


def test_elliptic_consistency_second_order(reference_env):
    errs = elliptic_errors(reference_env, 0.7, [20, 40, 80, 160])
    rates = [math.log2(a / b) for a, b in zip(errs, errs[1:])]
    assert all(abs(rate - 2.0) <= 0.1 for rate in rates), rates


def test_environment_q_fixture_value(reference_env):
    assert reference_env.q == REFERENCE_Q
