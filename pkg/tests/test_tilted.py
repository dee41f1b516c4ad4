import math

import numpy as np
import pytest

from klcodes.core import CodeLengths, Distribution, kl_divergence, validate_distribution
from klcodes.tilted import (
    avg_redundancy,
    decomposition_terms,
    gg_utility,
    nu_circ,
    nu_infinity,
    tilted_root,
    xi,
)

SKEWED = validate_distribution([0.6, 0.3, 0.1])
L122 = CodeLengths((1, 2, 2), arity=2)


def ideal_lengths(mu: Distribution, arity: int = 2) -> CodeLengths:
    return CodeLengths(
        tuple(-math.log(p) / math.log(arity) for p in mu.probs),
        arity=arity,
        is_integer=False,
    )


def random_distribution(rng, m):
    return Distribution(tuple(rng.dirichlet(np.ones(m))))


def random_lengths(rng, m, arity=2):
    # random Kraft-feasible integer vector: deepen a sorted feasible profile
    base = sorted(rng.integers(1, m + 1) for _ in range(m))
    while sum(arity ** (max(base) - b) for b in base) > arity ** max(base):
        base[base.index(min(base))] += 1
    perm = rng.permutation(m)
    return CodeLengths(tuple(int(base[i]) for i in perm), arity=arity)


def test_nu_circ_fixed_point_at_ideal_lengths():
    for beta in (0.2, 1.0, 10.0, 500.0):
        point = nu_circ(SKEWED, ideal_lengths(SKEWED), beta)
        assert point.divergence_from_center == pytest.approx(0.0, abs=1e-12)
        assert point.distribution.probs == pytest.approx(SKEWED.probs, abs=1e-12)


def test_nu_circ_beta_one_frozen():
    point = nu_circ(SKEWED, L122, 1.0)
    expected = (0.72 / 1.12, 0.36 / 1.12, 0.04 / 1.12)
    assert point.distribution.probs == pytest.approx(expected, abs=1e-12)
    # log-domain recomputation
    ratios = np.array([0.6 / 0.5, 0.3 / 0.25, 0.1 / 0.25])
    raw = np.exp(np.log(ratios) + np.log([0.6, 0.3, 0.1]))
    assert point.distribution.probs == pytest.approx(tuple(raw / raw.sum()), abs=1e-12)


def test_nu_circ_large_beta_approaches_limit():
    point = nu_circ(SKEWED, L122, 1e3)
    limit = nu_infinity(SKEWED, L122)
    tv = 0.5 * sum(
        abs(a - b) for a, b in zip(point.distribution.probs, limit.distribution.probs)
    )
    assert tv <= 1e-6


def test_xi_uniform_stays_uniform():
    mu = validate_distribution([0.25] * 4)
    for beta in (0.3, 1.0, 7.0):
        assert xi(mu, beta).probs == pytest.approx((0.25,) * 4, abs=1e-14)


def test_xi_frozen_value():
    mu = validate_distribution([0.4, 0.3, 0.2, 0.1])
    got = xi(mu, 1.0)
    expected = (0.16 / 0.3, 0.09 / 0.3, 0.04 / 0.3, 0.01 / 0.3)
    assert got.probs == pytest.approx(expected, abs=1e-12)


def test_xi_small_beta_approaches_mu():
    mu = validate_distribution([0.4, 0.3, 0.2, 0.1])
    got = xi(mu, 1e-9)
    assert got.probs == pytest.approx(mu.probs, abs=1e-7)


def test_avg_redundancy_ideal_code_is_zero():
    mu = validate_distribution([0.5, 0.25, 0.25])
    assert avg_redundancy(L122, mu) == pytest.approx(0.0, abs=1e-12)


def test_avg_redundancy_half_half():
    nu = validate_distribution([0.5, 0.5])
    lengths = CodeLengths((1, 2), arity=2)
    assert avg_redundancy(lengths, nu) == pytest.approx(0.5, abs=1e-12)


def test_avg_redundancy_dual_forms_agree():
    # E_nu(l) - H(nu) must equal D(nu||theta)/log D
    rng = np.random.default_rng(5)
    for _ in range(100):
        m = int(rng.integers(2, 7))
        nu = random_distribution(rng, m)
        lengths = random_lengths(rng, m)
        theta = np.power(2.0, -lengths.as_array())
        p = nu.as_array()
        nz = p > 0
        divergence_form = float(np.sum(p[nz] * np.log(p[nz] / theta[nz]))) / math.log(2)
        assert avg_redundancy(lengths, nu) == pytest.approx(divergence_form, abs=1e-10)


def test_avg_redundancy_frozen_value():
    # both closed forms give 0.1045381557616780(2) for this instance
    value = avg_redundancy(L122, SKEWED)
    assert value == pytest.approx(0.104538155761678, abs=1e-12)


def test_gg_utility_exact_code_is_zero_everywhere():
    mu = validate_distribution([0.5, 0.25, 0.25])
    rng = np.random.default_rng(3)
    for _ in range(20):
        nu = random_distribution(rng, 3)
        assert gg_utility(L122, nu, mu) == pytest.approx(0.0, abs=1e-12)


def test_gg_utility_at_center_equals_avg_redundancy():
    assert gg_utility(L122, SKEWED, SKEWED) == pytest.approx(
        avg_redundancy(L122, SKEWED), abs=1e-12
    )


def test_gg_utility_dual_forms_agree():
    rng = np.random.default_rng(9)
    for _ in range(100):
        m = int(rng.integers(2, 7))
        nu = random_distribution(rng, m)
        mu = random_distribution(rng, m)
        lengths = random_lengths(rng, m)
        p = nu.as_array()
        q = mu.as_array()
        nz = p > 0
        expanded = (
            avg_redundancy(lengths, nu)
            - float(np.sum(p[nz] * np.log(p[nz] / q[nz]))) / math.log(2)
        )
        assert gg_utility(lengths, nu, mu) == pytest.approx(expanded, abs=1e-10)


def test_decomposition_trivial_configurations():
    mu = validate_distribution([0.5, 0.25, 0.25])
    t1, t2, t3 = decomposition_terms(L122, mu, mu, 2.0)
    assert (t1, t2, t3) == pytest.approx((0.0, 0.0, 0.0), abs=1e-12)

    t1, t2, t3 = decomposition_terms(L122, SKEWED, SKEWED, 2.0)
    assert t1 == pytest.approx(0.0, abs=1e-12)
    assert (t2 + t3) / math.log(2) == pytest.approx(avg_redundancy(L122, SKEWED), abs=1e-10)


def test_decomposition_identity_randomized():
    rng = np.random.default_rng(17)
    for _ in range(100):
        m = 4
        nu = random_distribution(rng, m)
        mu = random_distribution(rng, m)
        lengths = random_lengths(rng, m)
        beta = float(rng.uniform(0.05, 8.0))
        t1, t2, t3 = decomposition_terms(lengths, nu, mu, beta)
        assert (t1 + t2 + t3) / math.log(2) == pytest.approx(
            avg_redundancy(lengths, nu), abs=1e-10
        )


def test_nu_infinity_all_ratios_equal():
    mu = validate_distribution([0.5, 0.25, 0.25])
    limit = nu_infinity(mu, L122)
    assert limit.argmax_set == frozenset({0, 1, 2})
    assert limit.distribution.probs == pytest.approx(mu.probs, abs=1e-15)
    assert limit.divergence_from_center == pytest.approx(0.0, abs=1e-15)


def test_nu_infinity_frozen_example():
    limit = nu_infinity(SKEWED, L122)
    assert limit.argmax_set == frozenset({0, 1})
    assert limit.distribution.probs == pytest.approx((2 / 3, 1 / 3, 0.0), abs=1e-12)
    assert limit.divergence_from_center == pytest.approx(-math.log(0.9), abs=1e-12)
    # consistency with the divergence recomputed from the distribution
    assert kl_divergence(limit.distribution, SKEWED) == pytest.approx(
        limit.divergence_from_center, abs=1e-12
    )


def test_nu_infinity_unique_maximum():
    mu = validate_distribution([0.7, 0.2, 0.1])
    lengths = CodeLengths((2, 2, 1), arity=2)
    limit = nu_infinity(mu, lengths)
    assert limit.argmax_set == frozenset({0})
    assert limit.distribution.probs == (1.0, 0.0, 0.0)
    assert limit.divergence_from_center == pytest.approx(-math.log(0.7), abs=1e-15)


def test_divergence_monotone_in_beta():
    grid = np.concatenate([np.linspace(0.1, 5, 40), np.linspace(5, 50, 20)])
    values = [nu_circ(SKEWED, L122, float(b)).divergence_from_center for b in grid]
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))


def test_tilted_root_hits_radius():
    point = tilted_root(SKEWED, L122, 0.05)
    assert point is not None
    assert point.divergence_from_center == pytest.approx(0.05, abs=1e-11)


def test_tilted_root_none_beyond_limit():
    assert tilted_root(SKEWED, L122, 0.2) is None


def test_exact_avg_sup_dominates_sampling():
    # the face-enumeration supremum must beat every certified ball sample,
    # attain its witness, and agree with the rooted value when one exists
    from klcodes.core import DivergenceBall
    from klcodes.oracle import ball_sample
    from klcodes.tilted import exact_avg_sup

    rng = np.random.default_rng(97)
    for trial in range(25):
        m = int(rng.integers(2, 6))
        mu = Distribution(tuple(rng.dirichlet(np.ones(m))))
        lengths = random_lengths(rng, m)
        radius = float(10 ** rng.uniform(-2.5, 0.4))
        value, witness = exact_avg_sup(mu, lengths, radius)
        assert kl_divergence(witness, mu) <= radius + 1e-9
        assert avg_redundancy(lengths, witness) == pytest.approx(value, abs=1e-12)
        samples = ball_sample(DivergenceBall(mu, radius), n_interior=4000,
                              n_boundary=64, seed=trial, l_max=min(m + 1, 7))
        sampled = max(avg_redundancy(lengths, nu) for nu in samples)
        assert value >= sampled - 1e-8
        point = tilted_root(mu, lengths, radius)
        if point is not None:
            assert value == pytest.approx(
                avg_redundancy(lengths, point.distribution), abs=1e-8
            )


def test_exact_avg_sup_dyadic_level_set():
    # ideal code: every shell point attains the supremum R / log 2
    from klcodes.tilted import exact_avg_sup

    mu = Distribution((0.5, 0.25, 0.25))
    value, witness = exact_avg_sup(mu, L122, 0.1)
    assert value == pytest.approx(0.1 / math.log(2), abs=1e-9)
    assert kl_divergence(witness, mu) == pytest.approx(0.1, abs=1e-9)


def test_tilted_point_is_supremum_over_samples():
    # for any fixed code, the root-tilted point dominates every ball member
    from klcodes.core import DivergenceBall
    from klcodes.oracle import ball_sample

    rng = np.random.default_rng(29)
    for trial in range(10):
        m = int(rng.integers(2, 5))
        mu = Distribution(tuple(rng.dirichlet(np.ones(m)) * 0.9 + 0.1 / m))
        lengths = random_lengths(rng, m)
        limit = nu_infinity(mu, lengths)
        if limit.divergence_from_center < 1e-3:
            continue
        radius = 0.5 * limit.divergence_from_center
        point = tilted_root(mu, lengths, radius)
        assert point is not None
        top = avg_redundancy(lengths, point.distribution)
        for nu in ball_sample(DivergenceBall(mu, radius), n_interior=500,
                              n_boundary=8, seed=trial):
            assert avg_redundancy(lengths, nu) <= top + 1e-6
