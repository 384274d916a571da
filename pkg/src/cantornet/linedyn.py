"""
Dynamics on the invariant ray ``{t v : t >= 0}``.

On the ray the network acts as the scalar map

    g~(t) = t/2 + delta        t in [0, theta)
            t/2 + delta - 1    t in [theta, 1)
            delta - 1/2        t in [1, inf)

and ``g`` is its restriction to [0, 1]. As in the network, the first two
pieces are computed in offset form, ``1 - (theta - t)/2`` and
``(t - theta)/2``; on [theta, 1] the subtraction is exact, so the right
branch carries no rounding at all.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NotOnLineError, ParameterError
from .fibodelta import DeltaParams
from .netcore import NetworkParams, network_map

LINE_TOL = 1e-9


def g_tilde(t: float, dp: DeltaParams) -> float:
    if not t >= 0.0:
        raise DomainError(f"g~ is defined on [0, inf), got {t!r}")
    theta = dp.theta
    if t < theta:
        return 1.0 - (theta - t) / 2.0
    if t < 1.0:
        return (t - theta) / 2.0
    return dp.delta - 0.5


def g(t: float, dp: DeltaParams) -> float:
    """The one-discontinuity contraction on [0, 1]."""
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"g is defined on [0, 1], got {t!r}")
    theta = dp.theta
    if t < theta:
        return 1.0 - (theta - t) / 2.0
    return (t - theta) / 2.0


def g_tilde_array(t, dp: DeltaParams) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(~(t >= 0.0)):
        raise DomainError("g~ is defined on [0, inf)")
    theta = dp.theta
    return np.where(
        t < theta, 1.0 - (theta - t) / 2.0, np.where(t < 1.0, (t - theta) / 2.0, dp.delta - 0.5)
    )


def embed(t: float, params: NetworkParams) -> np.ndarray:
    """The point ``t v`` of the ray."""
    if not t >= 0.0:
        raise DomainError(f"line coordinate must be nonnegative, got {t!r}")
    return t * params.v


def off_ray(x, params: NetworkParams):
    """Least-squares coordinate of ``x`` along v and the sup-norm distance to that point."""
    v = params.v
    x = np.asarray(x, dtype=float)
    t = float(x @ v / (v @ v))
    return t, float(np.max(np.abs(x - t * v)))


def project(x, params: NetworkParams, tol: float = LINE_TOL) -> float:
    """Inverse of :func:`embed`; raises :class:`NotOnLineError` off the ray."""
    t, residual = off_ray(x, params)
    if residual > tol:
        raise NotOnLineError(f"state is {residual:.3e} away from the ray", residual)
    if t < 0.0:
        raise NotOnLineError("state lies on the negative half of the line", abs(t))
    return t


def diagram_residual(t: float, params: NetworkParams) -> float:
    """``max_i |F(t v)_i - g~(t) v_i|``: how far the network step is from the scalar step."""
    Fx = network_map(embed(t, params), params)
    return float(np.max(np.abs(Fx - g_tilde(t, params.delta_params) * params.v)))


@dataclass
class ScalarOrbit:
    """A g-orbit and its branch itinerary (1 = right branch, ``t >= theta``)."""

    t0: float
    values: np.ndarray
    itinerary: np.ndarray

    def itinerary_string(self) -> str:
        return self.itinerary.astype(np.uint8).tobytes().translate(
            bytes.maketrans(b"\x00\x01", b"01")
        ).decode()

    def to_csv(self) -> str:
        lines = ["k,t,branch"]
        lines.extend(
            f"{k},{format(float(t), '.17g')},{int(b)}"
            for k, (t, b) in enumerate(zip(self.values, self.itinerary))
        )
        return "\n".join(lines) + "\n"


def g_orbit(t0: float, N: int, dp: DeltaParams) -> ScalarOrbit:
    """``t0, g(t0), ..., g^N(t0)`` with the branch taken at each value."""
    if N < 0:
        raise ParameterError("N must be >= 0")
    if not (0.0 <= t0 <= 1.0):
        raise DomainError(f"g-orbits start in [0, 1], got {t0!r}")
    theta = dp.theta
    values = np.empty(N + 1)
    t = float(t0)
    values[0] = t
    for k in range(1, N + 1):
        t = 1.0 - (theta - t) / 2.0 if t < theta else (t - theta) / 2.0
        values[k] = t
    return ScalarOrbit(float(t0), values, values >= theta)
