import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlossless.entropy import (
    classical_renyi,
    entropy_of_order,
    escort,
    relative_entropy,
    renyi,
    renyi_divergence,
    von_neumann,
)
from qlossless.errors import AlphaIsOne, AlphaOutOfRange, DimensionMismatch
from qlossless.linalg import DensityOperator, validate_density
from qlossless.verify import product_spectrum, random_density, random_full_rank_density, random_unitary

diag = DensityOperator.diagonal
seeds = st.integers(min_value=0, max_value=2**32 - 1)

# Reference values below were evaluated by hand from the scalar formulas with math.log2.
RENYI_HALF_DYADIC = 1.5431066063272239  # 2 log2(1/sqrt2 + 1/2 + 1/2)
REL_ENT_EXAMPLE = 0.08496250072115619  # 0.5 log2 0.75 + 0.5 log2 1.5
DIV2_EXAMPLE = 0.16992500144231237  # log2(0.375 + 0.75)


def _slow_renyi(p, alpha, k):
    return math.log(sum(x**alpha for x in p if x > 1e-12)) / ((1 - alpha) * math.log(k))


@pytest.mark.parametrize("k", [2, 3, 5])
def test_von_neumann_pure_state(k):
    v = np.array([1, 1j, -1]) / math.sqrt(3)
    assert von_neumann(np.outer(v, v.conj()), k) == pytest.approx(0.0, abs=1e-12)


def test_von_neumann_examples():
    assert von_neumann(np.eye(2) / 2, 2) == pytest.approx(1.0, abs=1e-14)
    assert von_neumann(diag([0.5, 0.25, 0.25]), 2) == pytest.approx(1.5, abs=1e-14)


@pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 2.0, 4.0, math.inf])
def test_renyi_uniform(alpha):
    assert renyi(np.eye(2) / 2, alpha, 2) == pytest.approx(1.0, abs=1e-14)


def test_renyi_examples():
    assert renyi(diag([0.5, 0.25, 0.25]), 0.5, 2) == pytest.approx(RENYI_HALF_DYADIC, abs=1e-12)
    assert renyi(diag([0.9, 0.1, 0.0]), 0.0, 2) == pytest.approx(1.0, abs=1e-14)


def test_renyi_rejects_order_one():
    with pytest.raises(AlphaIsOne):
        renyi(np.eye(2) / 2, 1.0)


def test_relative_entropy_examples():
    rho = random_density(3, seed=0)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)
    assert relative_entropy(diag([0.5, 0.5]), diag([2 / 3, 1 / 3]), 2) == pytest.approx(REL_ENT_EXAMPLE, abs=1e-12)
    assert math.isinf(relative_entropy(diag([1.0, 0.0]), diag([0.0, 1.0])))


def test_relative_entropy_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


def test_renyi_divergence_examples():
    rho = random_density(4, seed=5)
    assert renyi_divergence(rho, rho, 2.0) == pytest.approx(0.0, abs=1e-10)
    assert renyi_divergence(diag([0.5, 0.5]), diag([2 / 3, 1 / 3]), 2.0, 2) == pytest.approx(DIV2_EXAMPLE, abs=1e-12)
    assert math.isinf(renyi_divergence(diag([0.5, 0.5]), diag([1.0, 0.0]), 2.0))


def test_renyi_divergence_order_range():
    with pytest.raises(AlphaOutOfRange):
        renyi_divergence(np.eye(2) / 2, np.eye(2) / 2, 0.5)


def test_renyi_divergence_limit_is_relative_entropy():
    rho, sigma = diag([0.6, 0.3, 0.1]), diag([0.2, 0.5, 0.3])
    assert renyi_divergence(rho, sigma, 1 + 1e-4) == pytest.approx(relative_entropy(rho, sigma), abs=1e-3)


def test_renyi_divergence_non_commuting_against_scipy():
    from scipy.linalg import fractional_matrix_power

    rho, sigma = random_density(3, seed=21), random_full_rank_density(3, seed=22)
    alpha = 2.5
    tr = np.trace(fractional_matrix_power(rho.matrix, alpha) @ fractional_matrix_power(sigma.matrix, 1 - alpha)).real
    assert renyi_divergence(rho, sigma, alpha, 2) == pytest.approx(math.log2(tr) / (alpha - 1), abs=1e-9)


def test_escort_examples():
    rho = random_density(4, seed=9)
    assert np.max(np.abs(escort(rho, 0).matrix - rho.matrix)) <= 1e-9
    np.testing.assert_allclose(escort(diag([0.64, 0.36]), 1).matrix, np.diag([4 / 7, 3 / 7]), atol=1e-12)
    np.testing.assert_allclose(
        np.diag(escort(diag([0.5, 0.25, 0.25]), 1).matrix).real, [0.41421, 0.29289, 0.29289], atol=1e-5
    )


def test_escort_infinite_t_is_uniform_on_support():
    np.testing.assert_allclose(np.diag(escort(diag([0.7, 0.3, 0.0]), math.inf).matrix).real, [0.5, 0.5, 0.0])


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 8), seed=seeds, k=st.sampled_from([2, 3]))
def test_renyi_matches_scalar_formula(d, seed, k):
    rho = random_density(d, seed)
    for alpha in (0.25, 0.5, 2.0):
        assert renyi(rho, alpha, k) == pytest.approx(_slow_renyi(rho.eigenvalues, alpha, k), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 8), seed=seeds)
def test_renyi_monotone_in_order(d, seed):
    rho = random_density(d, seed)
    grid = [0, 0.25, 0.5, 0.75, 1, 1.5, 2, 4]
    vals = [entropy_of_order(rho, a, 2) for a in grid]
    assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))
    assert all(0 <= v <= math.log2(d) + 1e-12 for v in vals)


@pytest.mark.parametrize("K", [1, 2, 3, 4])
@pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0])
def test_additivity_on_product_spectrum(K, alpha):
    p = random_density(3, seed=31).eigenvalues
    prod = product_spectrum(p, K)
    assert classical_renyi(prod, alpha, 2) == pytest.approx(K * entropy_of_order(diag(p), alpha, 2), abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(d=st.integers(2, 6), seed=seeds)
def test_basis_independence(d, seed):
    rho = random_density(d, seed)
    tau = random_full_rank_density(d, seed + 1)
    u = random_unitary(d, seed + 2)
    r2 = validate_density(u @ rho.matrix @ u.conj().T)
    t2 = validate_density(u @ tau.matrix @ u.conj().T)
    pairs = [
        (von_neumann(rho), von_neumann(r2)),
        (renyi(rho, 0.5), renyi(r2, 0.5)),
        (relative_entropy(rho, tau), relative_entropy(r2, t2)),
        (renyi_divergence(rho, tau, 1.5), renyi_divergence(r2, t2, 1.5)),
    ]
    for a, b in pairs:
        assert a == pytest.approx(b, abs=1e-8)


@settings(max_examples=25, deadline=None)
@given(d=st.integers(1, 8), seed=seeds, t=st.sampled_from([0.5, 1.0, 2.0, 8.0]))
def test_escort_commutes_with_source(d, seed, t):
    rho = random_density(d, seed)
    rt = escort(rho, t).matrix
    assert np.max(np.abs(rho.matrix @ rt - rt @ rho.matrix)) <= 1e-9
