import math

import numpy as np
import pytest

from klcodes.core import (
    CodeLengths,
    Distribution,
    PrefixCode,
    binary_divergence,
    ceil_log_inv,
    entropy,
    kl_divergence,
    kraft_sum,
    pinsker_upper,
    validate_distribution,
)
from klcodes.errors import (
    AbsoluteContinuityError,
    DimensionMismatchError,
    DomainError,
    KraftViolationError,
    NegativeProbabilityError,
    NotNormalizedError,
    TooFewSymbolsError,
    ZeroProbabilityError,
)
from klcodes.oracle import brute_binary_root


def test_validate_accepts_uniform():
    dist = validate_distribution([0.5, 0.5])
    assert dist.probs == (0.5, 0.5)


def test_validate_rejects_unnormalized():
    with pytest.raises(NotNormalizedError):
        validate_distribution([0.5, 0.4])


def test_validate_rejects_zero_by_default():
    with pytest.raises(ZeroProbabilityError):
        validate_distribution([0.6, 0.3, 0.1, 0.0])


def test_validate_allows_zero_when_asked():
    dist = validate_distribution([0.6, 0.3, 0.1, 0.0], allow_zero=True)
    assert dist.probs[-1] == 0.0


def test_validate_rejects_negative_and_short():
    with pytest.raises(NegativeProbabilityError):
        validate_distribution([1.2, -0.2])
    with pytest.raises(TooFewSymbolsError):
        validate_distribution([1.0])


def test_validate_renormalizes_within_tolerance():
    dist = validate_distribution([0.5 + 4e-10, 0.5])
    assert math.fsum(dist.probs) == pytest.approx(1.0, abs=1e-15)


def test_entropy_uniform_binary():
    assert entropy(validate_distribution([0.5, 0.5]), 2) == pytest.approx(1.0, abs=1e-15)


def test_entropy_deterministic():
    dist = validate_distribution([1.0, 0.0], allow_zero=True)
    assert entropy(dist, 2) == 0.0


def test_entropy_frozen_value():
    # direct summation: -sum p log2 p
    dist = validate_distribution([0.4, 0.3, 0.2, 0.1])
    direct = -sum(p * math.log2(p) for p in dist.probs)
    assert entropy(dist, 2) == pytest.approx(direct, abs=1e-12)
    assert entropy(dist, 2) == pytest.approx(1.8464393446710154, abs=1e-12)


def test_entropy_range_randomized():
    rng = np.random.default_rng(7)
    for _ in range(100):
        m = rng.integers(2, 9)
        dist = Distribution(tuple(rng.dirichlet(np.ones(m))))
        value = entropy(dist, 2)
        assert -1e-12 <= value <= math.log2(m) + 1e-12


def test_kl_identity_is_zero():
    dist = validate_distribution([0.3, 0.45, 0.25])
    assert kl_divergence(dist, dist) == 0.0


def test_kl_single_term_collapse():
    nu = validate_distribution([1.0, 0.0], allow_zero=True)
    mu = validate_distribution([0.5, 0.5])
    assert kl_divergence(nu, mu) == pytest.approx(math.log(2.0), abs=1e-15)


def test_kl_frozen_value():
    nu = validate_distribution([2 / 3, 1 / 3, 0.0], allow_zero=True)
    mu = validate_distribution([0.6, 0.3, 0.1])
    assert kl_divergence(nu, mu) == pytest.approx(-math.log(0.9), abs=1e-12)


def test_kl_errors():
    mu = validate_distribution([0.5, 0.5])
    with pytest.raises(DimensionMismatchError):
        kl_divergence(validate_distribution([0.2, 0.3, 0.5]), mu)
    ragged = validate_distribution([0.5, 0.5, 0.0], allow_zero=True)
    with pytest.raises(AbsoluteContinuityError):
        kl_divergence(validate_distribution([0.2, 0.3, 0.5]), ragged)


def test_kl_nonnegative_randomized():
    rng = np.random.default_rng(11)
    for _ in range(200):
        m = rng.integers(2, 7)
        nu = Distribution(tuple(rng.dirichlet(np.ones(m))))
        mu = Distribution(tuple(rng.dirichlet(np.ones(m))))
        assert kl_divergence(nu, mu) >= -1e-12


def test_binary_divergence_coincident():
    assert binary_divergence(0.37, 0.37) == 0.0


def test_binary_divergence_boundary():
    assert binary_divergence(1.0, 0.5) == pytest.approx(math.log(2.0), abs=1e-15)


def test_binary_divergence_at_bisection_root():
    # the larger root of d(p||0.5) = 0.05, found independently by bisection
    root = brute_binary_root(0.5, 0.05)
    assert root == pytest.approx(0.6567815983649687, abs=1e-12)
    assert binary_divergence(root, 0.5) == pytest.approx(0.05, abs=1e-12)


def test_binary_divergence_domain():
    with pytest.raises(DomainError):
        binary_divergence(0.5, 0.0)
    with pytest.raises(DomainError):
        binary_divergence(0.5, 1.0)


def test_binary_divergence_monotone_above_m():
    m = 0.3
    grid = np.linspace(m, 1.0, 200)
    values = [binary_divergence(p, m) for p in grid]
    assert values[0] == 0.0
    assert all(b > a for a, b in zip(values, values[1:]))


def test_kraft_sum_examples():
    assert kraft_sum(CodeLengths((1, 2, 2), arity=2)) == 1.0
    assert kraft_sum(CodeLengths((1, 2, 3), arity=2)) == 0.875
    assert kraft_sum(CodeLengths((1, 1, 1), arity=3)) == 1.0


def test_code_lengths_reject_kraft_violation():
    with pytest.raises(KraftViolationError):
        CodeLengths((1, 1, 2), arity=2)


def test_code_lengths_reject_nonpositive():
    with pytest.raises(DomainError):
        CodeLengths((0, 2, 2), arity=2)


def test_prefix_code_rejects_prefix_clash():
    lengths = CodeLengths((1, 2, 2), arity=2)
    with pytest.raises(DomainError):
        PrefixCode(("0", "01", "11"), lengths)


def test_pinsker_upper_examples():
    assert pinsker_upper(0.5, 0.0) == 0.5
    assert pinsker_upper(0.25, 0.02) == pytest.approx(0.35, abs=1e-15)
    assert pinsker_upper(0.9, 2.0) == 1.0


def test_root_in_pinsker_range_randomized():
    rng = np.random.default_rng(13)
    for _ in range(100):
        radius = float(rng.uniform(1e-4, 1.0))
        m = float(rng.uniform(1e-4, math.exp(-radius) * 0.999))
        root = brute_binary_root(m, radius)
        assert m < root <= pinsker_upper(m, radius) + 1e-12


def test_ceil_log_inv_exact_powers():
    assert ceil_log_inv(0.5, 2) == 1
    assert ceil_log_inv(0.25, 2) == 2
    assert ceil_log_inv(0.125, 2) == 3
    assert ceil_log_inv(0.9, 2) == 1
    assert ceil_log_inv(0.1, 2) == 4
    # exactly representable ternary boundary stays put
    assert ceil_log_inv(1.0 / 3.0, 3) == 2  # float(1/3) < 1/3 exactly
