"""Probability and code-length types plus the divergence primitives.

Everything here is a pure function of immutable inputs.  Divergences are
computed in nats; conversion to code symbols (base D) happens as a final
division by log D wherever a D-ary quantity is returned.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    AbsoluteContinuityError,
    DimensionMismatchError,
    DomainError,
    KraftViolationError,
    NegativeProbabilityError,
    NotNormalizedError,
    TooFewSymbolsError,
    ZeroProbabilityError,
)

NORMALIZATION_TOL = 1e-9
KRAFT_TOL = 1e-12


@dataclass(frozen=True)
class Distribution:
    """A finite probability mass function over at least two symbols.

    The input is renormalized exactly once at construction and treated as
    exact afterwards.  Zero entries are allowed at the type level; whether
    they are acceptable is the caller's policy (see validate_distribution).
    """

    probs: tuple[float, ...]
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) < 2:
            raise TooFewSymbolsError(f"need at least 2 symbols, got {len(probs)}")
        if any(p < 0.0 for p in probs):
            raise NegativeProbabilityError(f"negative entry in {probs}")
        total = math.fsum(probs)
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise NotNormalizedError(f"probabilities sum to {total!r}")
        if total != 1.0:
            probs = tuple(p / total for p in probs)
        object.__setattr__(self, "probs", probs)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(probs):
                raise DimensionMismatchError("labels and probs differ in length")
            object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.probs, dtype=float)


@dataclass(frozen=True)
class DivergenceBall:
    """All distributions within relative entropy `radius` (nats) of `center`."""

    center: Distribution
    radius: float

    def __post_init__(self):
        if not (self.radius >= 0.0):
            raise DomainError(f"radius must be >= 0, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))


@dataclass(frozen=True)
class CodeLengths:
    """Codeword length vector with arity D.

    Integer lengths describe realizable prefix codes; real lengths are the
    idealized relaxation (e.g. -log_D p).  Kraft feasibility is enforced at
    construction (exactly, in integer arithmetic, when is_integer).
    """

    lengths: tuple[float, ...]
    arity: int = 2
    is_integer: bool = True

    def __post_init__(self):
        if self.arity < 2:
            raise DomainError(f"arity must be >= 2, got {self.arity}")
        lengths = tuple(self.lengths)
        if not lengths:
            raise DomainError("empty length vector")
        if self.is_integer:
            if any(l != int(l) or l < 1 for l in lengths):
                raise DomainError(f"integer lengths must be positive, got {lengths}")
            lengths = tuple(int(l) for l in lengths)
            if not kraft_integer_ok(lengths, self.arity):
                raise KraftViolationError(f"Kraft sum exceeds 1 for {lengths}")
        else:
            lengths = tuple(float(l) for l in lengths)
            if any(not (l > 0.0) for l in lengths):
                raise DomainError(f"lengths must be positive, got {lengths}")
            if _kraft_sum_raw(lengths, self.arity) > 1.0 + KRAFT_TOL:
                raise KraftViolationError("Kraft sum exceeds 1")
        object.__setattr__(self, "lengths", lengths)

    @property
    def m(self) -> int:
        return len(self.lengths)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.lengths, dtype=float)


@dataclass(frozen=True)
class PrefixCode:
    """Explicit codewords over the digit alphabet {0, ..., D-1}."""

    codewords: tuple[str, ...]
    lengths: CodeLengths

    def __post_init__(self):
        codewords = tuple(self.codewords)
        if len(codewords) != self.lengths.m:
            raise DimensionMismatchError("codewords and lengths differ in length")
        if self.lengths.arity > 10:
            raise DomainError("codeword digits are single characters; arity must be <= 10")
        digits = set("0123456789"[: self.lengths.arity])
        for w, l in zip(codewords, self.lengths.lengths):
            if len(w) != int(l):
                raise DomainError(f"codeword {w!r} does not match length {l}")
            if not set(w) <= digits:
                raise DomainError(f"codeword {w!r} uses digits outside arity {self.lengths.arity}")
        sorted_words = sorted(codewords)
        for a, b in zip(sorted_words, sorted_words[1:]):
            if b.startswith(a):
                raise DomainError(f"codeword {a!r} is a prefix of {b!r}")
        object.__setattr__(self, "codewords", codewords)


def validate_distribution(
    probs: Sequence[float],
    allow_zero: bool = False,
    labels: Optional[Sequence[str]] = None,
) -> Distribution:
    """Check and normalize a probability vector.

    With allow_zero=False any zero entry is rejected: a zero-probability
    nominal symbol forces an infinite ideal length downstream.  Zero entries
    are kept (not dropped) when allow_zero=True, so vertex distributions and
    other boundary points remain representable.
    """
    probs = list(probs)
    if not probs:
        raise TooFewSymbolsError("empty probability vector")
    if not allow_zero and any(p == 0.0 for p in probs):
        raise ZeroProbabilityError(f"zero entry in {probs}")
    return Distribution(tuple(float(p) for p in probs),
                        tuple(labels) if labels is not None else None)


def drop_zero_symbols(
    probs: Sequence[float],
    labels: Optional[Sequence[str]] = None,
) -> tuple[list[float], Optional[list[str]]]:
    """Remove zero-probability symbols, warning when any are dropped.

    Ingestion helper for nominal distributions: the remainder is meant to be
    renormalized by Distribution construction.
    """
    probs = list(probs)
    kept = [(i, p) for i, p in enumerate(probs) if p != 0.0]
    if len(kept) < len(probs):
        warnings.warn(
            f"dropping {len(probs) - len(kept)} zero-probability symbol(s)",
            stacklevel=2,
        )
    idx = [i for i, _ in kept]
    out_probs = [p for _, p in kept]
    out_labels = [labels[i] for i in idx] if labels is not None else None
    return out_probs, out_labels


def entropy(nu: Distribution, arity: int = 2) -> float:
    """Entropy of nu in base-`arity` symbols, with 0 log 0 = 0."""
    if arity < 2:
        raise DomainError(f"arity must be >= 2, got {arity}")
    p = nu.as_array()
    nz = p > 0.0
    return float(-np.sum(p[nz] * np.log(p[nz])) / math.log(arity))


def kl_divergence(nu: Distribution, mu: Distribution) -> float:
    """Relative entropy D(nu || mu) in nats, with 0 log(0/q) = 0."""
    if nu.m != mu.m:
        raise DimensionMismatchError(f"dimension mismatch {nu.m} vs {mu.m}")
    p = nu.as_array()
    q = mu.as_array()
    nz = p > 0.0
    if np.any(q[nz] == 0.0):
        raise AbsoluteContinuityError("nu puts mass where mu is zero")
    return float(np.sum(p[nz] * np.log(p[nz] / q[nz])))


def binary_divergence(p: float, m: float) -> float:
    """Relative entropy between Bernoulli(p) and Bernoulli(m), in nats."""
    if not (0.0 < m < 1.0):
        raise DomainError(f"m must be in (0, 1), got {m}")
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"p must be in [0, 1], got {p}")
    total = 0.0
    if p > 0.0:
        total += p * math.log(p / m)
    if p < 1.0:
        total += (1.0 - p) * math.log((1.0 - p) / (1.0 - m))
    return total


def kraft_sum(lengths: CodeLengths) -> float:
    """Sum of D^(-l_i) over the length vector."""
    return _kraft_sum_raw(lengths.lengths, lengths.arity)


def _kraft_sum_raw(lengths: Iterable[float], arity: int) -> float:
    return float(sum(float(arity) ** (-float(l)) for l in lengths))


def kraft_integer_ok(lengths: Sequence[int], arity: int) -> bool:
    """Exact Kraft check for integer lengths: sum D^(L-l_i) <= D^L."""
    lmax = max(lengths)
    return sum(arity ** (lmax - l) for l in lengths) <= arity ** lmax


def pinsker_upper(m: float, radius: float) -> float:
    """Upper end of the admissible root interval, min(1, m + sqrt(R/2))."""
    if not (0.0 < m < 1.0):
        raise DomainError(f"m must be in (0, 1), got {m}")
    if radius < 0.0:
        raise DomainError(f"radius must be >= 0, got {radius}")
    return min(1.0, m + math.sqrt(radius / 2.0))


def ceil_log_inv(p: float, arity: int) -> int:
    """Smallest positive integer l with arity^(-l) <= p, exact over the float p.

    The comparison is done in integer arithmetic on the exact binary value of
    p, so boundary cases (p an exact power of the arity) never round the
    wrong way.
    """
    if not (0.0 < p <= 1.0):
        raise DomainError(f"probability must be in (0, 1], got {p}")
    frac = Fraction(p)
    guess = max(1, math.ceil(-math.log(p) / math.log(arity)))
    # arity^(-l) <= p  <=>  frac.denominator <= frac.numerator * arity^l
    while frac.denominator > frac.numerator * arity**guess:
        guess += 1
    while guess > 1 and frac.denominator <= frac.numerator * arity ** (guess - 1):
        guess -= 1
    return guess


def log_sum_exp(values: np.ndarray) -> float:
    """log(sum(exp(values))) with max subtraction; tolerates -inf entries."""
    values = np.asarray(values, dtype=float)
    hi = np.max(values)
    if hi == -np.inf:
        return -np.inf
    return float(hi + np.log(np.sum(np.exp(values - hi))))
