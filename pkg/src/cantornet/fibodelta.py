"""
The Fibonacci word and the offset constant built from it.

Digits use ``w_i = 2 + floor((i+1)*phi) - floor((i+2)*phi)``. The floors are
evaluated in exact integer arithmetic: ``floor(m*phi) = (m + isqrt(5*m*m)) // 2``
holds for every m >= 0 because ``m*sqrt(5)`` is never an integer for m > 0.
There is therefore no index beyond which the digit function becomes inexact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError

PHI = (1.0 + math.sqrt(5.0)) / 2.0
DEFAULT_K = 64


def floor_phi_multiple(m: int) -> int:
    """Exact ``floor(m * phi)`` for a nonnegative integer m."""
    if m < 0:
        raise ParameterError("m must be nonnegative")
    return (m + math.isqrt(5 * m * m)) // 2


def fib_digit(i: int) -> int:
    if isinstance(i, bool) or int(i) != i:
        raise ParameterError(f"index must be an integer, got {i!r}")
    i = int(i)
    if i < 0:
        raise ParameterError(f"index must be nonnegative, got {i}")
    return 2 + floor_phi_multiple(i + 1) - floor_phi_multiple(i + 2)


def fib_word(length: int) -> np.ndarray:
    """First ``length`` digits from the floor formula, as a uint8 array."""
    if length < 0:
        raise ParameterError("length must be nonnegative")
    floors = np.fromiter(
        (floor_phi_multiple(m) for m in range(1, length + 2)), dtype=np.int64, count=length + 1
    )
    return (2 + floors[:-1] - floors[1:]).astype(np.uint8)


@dataclass(frozen=True)
class FibonacciPrefix:
    digits: np.ndarray

    @property
    def length(self) -> int:
        return len(self.digits)

    def __str__(self):
        return self.digits.tobytes().translate(bytes.maketrans(b"\x00\x01", b"01")).decode()


def fib_prefix_morphism(length: int) -> FibonacciPrefix:
    """Prefix of the fixed point of the substitution 0 -> 01, 1 -> 0.

    Independent of the floor formula; used to cross-check it.
    """
    if length < 1:
        raise ParameterError("length must be >= 1")
    # Concatenation form of the substitution: s_{k+1} = s_k + s_{k-1}.
    prev, cur = b"0", b"01"
    while len(cur) < length:
        prev, cur = cur, cur + prev
    word = cur[:length]
    digits = np.frombuffer(word, dtype=np.uint8) - ord("0")
    return FibonacciPrefix(digits.astype(np.uint8))


@dataclass(frozen=True)
class DeltaParams:
    """Offset ``delta``, discontinuity ``theta = 2(1 - delta)`` and truncation data.

    ``theta`` is derived from the stored ``delta``; in binary floating point
    ``1 - delta`` is exact for delta in [1/2, 1] and doubling is exact, so the
    identity holds bit for bit.
    """

    delta: float
    terms_used: int
    tail_bound: float

    @property
    def theta(self) -> float:
        return 2.0 * (1.0 - self.delta)

    def as_dict(self):
        return {
            "delta": self.delta,
            "theta": self.theta,
            "K": self.terms_used,
            "tail_bound": self.tail_bound,
        }


def compute_delta(K: int = DEFAULT_K) -> DeltaParams:
    """``delta = 1/2 + (1/4) * sum_{k<K} w_k / 2**k``, summed smallest terms first."""
    if K < 1:
        raise ParameterError("K must be >= 1")
    digits = fib_word(K)
    acc = 0.0
    for k in range(K - 1, -1, -1):
        if digits[k]:
            acc += math.ldexp(1.0, -k)
    delta = 0.5 + 0.25 * acc
    tail_bound = math.ldexp(0.25, -(K - 1))
    return DeltaParams(delta=delta, terms_used=K, tail_bound=tail_bound)
