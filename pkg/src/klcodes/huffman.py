"""Code-construction kernels.

Three greedy tree builders share one heap loop and differ only in how a
merged node's weight is formed from its children:

  huffman             new = a_1 + ... + a_D          (minimizes sum w_k * l_k)
  exponential_huffman new = D^beta * (a_1 + ... + a_D)
                                          (minimizes sum w_k * D^(beta l_k))
  max_huffman         new = D * max(a_1, ..., a_D)
                                          (minimizes max_k  w_k * D^l_k)

Weights live in log-domain throughout: D^(beta*l) overflows for moderate
beta, and the limit checks push beta to 1e3.  Zero weights map to -inf and
behave correctly under both combining rules.

Ties are broken by (weight, creation order), original items before merged
nodes, so outputs are deterministic across runs and platforms.  For D > 2
the weight list is padded with zero-weight dummies until (M'-1) mod (D-1)
= 0; dummy leaves are dropped from the returned vector.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .core import CodeLengths, Distribution, PrefixCode, ceil_log_inv, kraft_integer_ok, log_sum_exp
from .errors import (
    AllZeroWeightsError,
    ArityTooSmallError,
    DomainError,
    KraftViolationError,
    NonFiniteWeightError,
    TooFewSymbolsError,
    ZeroProbabilityError,
)


@dataclass
class WeightedItem:
    """Heap entry while building a code tree.

    origin_index is the position in the caller's weight list, or -1 for a
    zero-weight padding dummy.  creation_order makes ties deterministic and
    keeps original items ahead of merged nodes of equal weight.
    """

    log_weight: float
    origin_index: int
    creation_order: int
    children: list["WeightedItem"] = field(default_factory=list)

    def __lt__(self, other: "WeightedItem") -> bool:
        return (self.log_weight, self.creation_order) < (other.log_weight, other.creation_order)


def _dummy_count(m: int, arity: int) -> int:
    if arity == 2:
        return 0
    return (-(m - 1)) % (arity - 1)


def _build_tree(log_weights, arity, combine) -> list[int]:
    """Run the greedy merge loop; returns the depth of every leaf, dummies last."""
    m = len(log_weights)
    pad = _dummy_count(m, arity)
    heap: list[WeightedItem] = [
        WeightedItem(lw, i, i) for i, lw in enumerate(log_weights)
    ]
    heap.extend(WeightedItem(-math.inf, -1, m + j) for j in range(pad))
    order = m + pad
    heapq.heapify(heap)
    while len(heap) > 1:
        children = [heapq.heappop(heap) for _ in range(arity)]
        merged = WeightedItem(combine([c.log_weight for c in children]), -1, order, children)
        order += 1
        heapq.heappush(heap, merged)

    depths = [0] * (m + pad)
    stack = [(heap[0], 0)]
    while stack:
        node, depth = stack.pop()
        if node.children:
            stack.extend((c, depth + 1) for c in node.children)
        else:
            # leaves: real items at origin_index, dummies at creation_order
            slot = node.origin_index if node.origin_index >= 0 else node.creation_order
            depths[slot] = depth
    return depths


def _check_weights(weights, arity) -> np.ndarray:
    if arity < 2:
        raise ArityTooSmallError(f"arity must be >= 2, got {arity}")
    w = np.asarray(list(weights), dtype=float)
    if w.size < 2:
        raise TooFewSymbolsError(f"need at least 2 weights, got {w.size}")
    if np.any(~np.isfinite(w)):
        raise NonFiniteWeightError(f"non-finite weight in {w}")
    if np.any(w < 0.0):
        raise DomainError(f"negative weight in {w}")
    return w


def _log_weights(w: np.ndarray) -> list[float]:
    with np.errstate(divide="ignore"):
        return [float(x) for x in np.log(w)]


def huffman(weights, arity: int = 2) -> CodeLengths:
    """Optimal integer lengths for expected length sum w_k * l_k."""
    w = _check_weights(weights, arity)
    depths = _build_tree(_log_weights(w), arity, log_sum_exp)
    return CodeLengths(tuple(depths[: w.size]), arity=arity)


def exponential_huffman(weights, beta: float, arity: int = 2) -> CodeLengths:
    """Optimal integer lengths for the exponential cost sum w_k * D^(beta l_k).

    Merges the D smallest weights into D^beta times their sum.  beta -> 0
    recovers plain Huffman; beta -> infinity approaches the minimax
    pointwise solution.
    """
    w = _check_weights(weights, arity)
    return exponential_huffman_log(_log_weights(w), beta, arity)


def exponential_huffman_log(log_weights, beta: float, arity: int = 2) -> CodeLengths:
    """Exponential Huffman on log-domain weights (need not be normalized).

    This is the entry to use when the weights themselves come out of an
    exponential tilt: converting them through linear domain underflows to
    exact zeros long before beta reaches the limit-test range, and the
    merge order then collapses onto tie-breaking noise.
    """
    if not (beta > 0.0):
        raise DomainError(f"beta must be positive, got {beta}")
    if arity < 2:
        raise ArityTooSmallError(f"arity must be >= 2, got {arity}")
    log_weights = [float(x) for x in log_weights]
    if len(log_weights) < 2:
        raise TooFewSymbolsError(f"need at least 2 weights, got {len(log_weights)}")
    if any(math.isnan(x) or x == math.inf for x in log_weights):
        raise NonFiniteWeightError(f"bad log-weight in {log_weights}")
    bump = beta * math.log(arity)

    def combine(children):
        return bump + log_sum_exp(np.asarray(children))

    depths = _build_tree(log_weights, arity, combine)
    return CodeLengths(tuple(depths[: len(log_weights)]), arity=arity)


def max_huffman(weights, arity: int = 2) -> CodeLengths:
    """Integer lengths minimizing the worst case max_k w_k * D^l_k.

    The beta -> infinity member of the exponential family: the D smallest
    weights merge into D times the largest child.
    """
    w = _check_weights(weights, arity)
    if not np.any(w > 0.0):
        raise AllZeroWeightsError("all weights are zero")
    bump = math.log(arity)

    def combine(children):
        return bump + max(children)

    depths = _build_tree(_log_weights(w), arity, combine)
    return CodeLengths(tuple(depths[: w.size]), arity=arity)


def shannon_lengths(mu: Distribution, arity: int = 2) -> CodeLengths:
    """Lengths ceil(-log_D mu_i); Kraft-feasible by construction."""
    if any(p == 0.0 for p in mu.probs):
        raise ZeroProbabilityError("Shannon lengths need strictly positive probabilities")
    return CodeLengths(tuple(ceil_log_inv(p, arity) for p in mu.probs), arity=arity)


def canonical_codewords(lengths: CodeLengths) -> PrefixCode:
    """Canonical prefix code for integer lengths with Kraft sum <= 1.

    Symbols are processed by (length, input position) and codewords assigned
    in counting order; the result is returned in input order.
    """
    if not lengths.is_integer:
        raise DomainError("canonical codewords need integer lengths")
    ls = [int(l) for l in lengths.lengths]
    arity = lengths.arity
    if arity > 10:
        raise DomainError("codeword digits are single characters; arity must be <= 10")
    if not kraft_integer_ok(ls, arity):
        raise KraftViolationError(f"Kraft sum exceeds 1 for {ls}")

    digits = "0123456789"[:arity]
    words: list[str] = [""] * len(ls)
    code = 0
    prev_len = None
    for pos in sorted(range(len(ls)), key=lambda i: (ls[i], i)):
        l = ls[pos]
        if prev_len is not None:
            code = (code + 1) * arity ** (l - prev_len)
        prev_len = l
        value = code
        word = []
        for _ in range(l):
            value, digit = divmod(value, arity)
            word.append(digits[digit])
        words[pos] = "".join(reversed(word))
    return PrefixCode(tuple(words), lengths)


def expected_cost(lengths: CodeLengths, weights) -> float:
    """Linear cost sum w_k * l_k."""
    w = np.asarray(list(weights), dtype=float)
    return float(np.dot(w, lengths.as_array()))


def exp_cost_log(lengths: CodeLengths, weights, beta: float) -> float:
    """log of the exponential cost sum w_k * D^(beta l_k)."""
    w = np.asarray(list(weights), dtype=float)
    with np.errstate(divide="ignore"):
        terms = np.log(w) + beta * math.log(lengths.arity) * lengths.as_array()
    return log_sum_exp(terms)


def max_cost_log(lengths: CodeLengths, weights) -> float:
    """log of the minimax cost max_k w_k * D^l_k."""
    w = np.asarray(list(weights), dtype=float)
    with np.errstate(divide="ignore"):
        terms = np.log(w) + math.log(lengths.arity) * lengths.as_array()
    return float(np.max(terms))
