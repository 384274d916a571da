"""
The network map and orbit simulation.

Each neuron i applies the three-piece activation

    f_i(y) = y/(2 rho) + delta v_i          y in [0, theta rho v_i)
             y/(2 rho) + (delta - 1) v_i    y in [theta rho v_i, rho v_i)
             (delta - 1/2) v_i              y in [rho v_i, inf)

to its weighted input ``y = sum_j w_ij x_j`` (bias is zero). The first two
pieces are evaluated in the algebraically equal offset forms
``v_i - (theta rho v_i - y)/(2 rho)`` and ``(y - theta rho v_i)/(2 rho)``,
which keep every output inside [0, v_i] under rounding.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, ParameterError
from .fibodelta import DEFAULT_K, DeltaParams, compute_delta
from .spectral import DEFAULT_MAX_ITER, DEFAULT_TOL, PerronPair, WeightMatrix, perron_eigenpair

# Above this size the weighted sums use exactly rounded summation.
COMPENSATED_ABOVE = 64
STATE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class NetworkParams:
    W: WeightMatrix
    perron: PerronPair
    delta_params: DeltaParams
    bias: np.ndarray = field(default=None)

    def __post_init__(self):
        n = self.W.n
        bias = np.zeros(n) if self.bias is None else np.asarray(self.bias, dtype=float)
        if bias.shape != (n,) or np.any(bias != 0.0):
            raise ParameterError("the network is defined with zero external bias")
        bias.setflags(write=False)
        object.__setattr__(self, "bias", bias)

        rho, v = self.perron.rho, self.perron.v
        theta = self.delta_params.theta
        if not (0.5 < theta < rho < 1.0):
            raise ParameterError(f"parameter chain 1/2 < theta < rho < 1 fails: theta={theta!r}, rho={rho!r}")
        lower = theta * rho * v
        upper = rho * v
        plateau = (self.delta_params.delta - 0.5) * v
        for arr in (lower, upper, plateau):
            arr.setflags(write=False)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "plateau", plateau)
        object.__setattr__(self, "two_rho", 2.0 * rho)

    @property
    def n(self) -> int:
        return self.W.n

    @property
    def rho(self) -> float:
        return self.perron.rho

    @property
    def v(self) -> np.ndarray:
        return self.perron.v

    @property
    def delta(self) -> float:
        return self.delta_params.delta

    @property
    def theta(self) -> float:
        return self.delta_params.theta

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(self.W.mode.encode())
        h.update(np.ascontiguousarray(self.W.entries).tobytes())
        h.update(np.float64(self.rho).tobytes())
        h.update(np.ascontiguousarray(self.v).tobytes())
        h.update(np.float64(self.delta).tobytes())
        h.update(str(self.delta_params.terms_used).encode())
        return h.hexdigest()[:16]

    def as_dict(self):
        return {
            "n": self.n,
            "mode": self.W.mode,
            "rho": self.rho,
            "v": [float(x) for x in self.v],
            "delta": self.delta,
            "theta": self.theta,
            "K": self.delta_params.terms_used,
            "perron_residual": self.perron.residual,
            "fingerprint": self.fingerprint(),
        }


def build_network(
    W: WeightMatrix,
    K: int = DEFAULT_K,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> NetworkParams:
    """Assemble the network for ``W``: Perron pair, delta/theta and zero bias."""
    if not isinstance(W, WeightMatrix):
        W = WeightMatrix(W, "row")
    return NetworkParams(W, perron_eigenpair(W, tol, max_iter), compute_delta(K))


def _activate(y, params: NetworkParams):
    """Vectorised activations; ``y`` has neurons along the last axis."""
    lower, upper, v = params.lower, params.upper, params.v
    left = v - (lower - y) / params.two_rho
    mid = (y - lower) / params.two_rho
    return np.where(y < lower, left, np.where(y < upper, mid, params.plateau))


def activation(i: int, x: float, params: NetworkParams) -> float:
    """Value of the i-th activation function at a nonnegative input."""
    if not (0 <= i < params.n):
        raise ParameterError(f"neuron index {i} out of range for n={params.n}")
    if not x >= 0.0:
        raise DomainError(f"activation input must be nonnegative, got {x!r}")
    lower, upper = params.lower[i], params.upper[i]
    if x < lower:
        return float(params.v[i] - (lower - x) / params.two_rho)
    if x < upper:
        return float((x - lower) / params.two_rho)
    return float(params.plateau[i])


def weighted_input(x, params: NetworkParams, bias=None):
    """``sum_j w_ij x_j - b_i`` for a single state or a batch of states (rows)."""
    A = params.W.entries
    x = np.asarray(x, dtype=float)
    if params.n > COMPENSATED_ABOVE:
        flat = x.reshape(-1, params.n)
        y = np.array([[math.fsum(row * xs) for row in A] for xs in flat]).reshape(x.shape)
    else:
        y = x @ A.T
    if bias is not None:
        y = y - np.asarray(bias, dtype=float)
    return y


def network_map(x, params: NetworkParams, bias=None):
    """The map on the nonnegative orthant, without state-space checks.

    ``bias`` defaults to the network's zero bias; passing an explicit vector
    evaluates the general weighted-sum-minus-bias form.
    """
    y = weighted_input(x, params, bias)
    if np.any(y < 0.0):
        raise DomainError("weighted input is negative; activations are defined on [0, inf)")
    return _activate(y, params)


def check_state(x, n: int) -> np.ndarray:
    """Validate a state vector in [0, 1]^n (no clamping; 1e-9 slack above 1)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DomainError(f"state must have shape ({n},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DomainError("state has non-finite coordinates")
    if np.any(x < 0.0):
        raise DomainError(f"state has negative coordinates (min {x.min()!r})")
    if np.any(x > 1.0 + STATE_TOL):
        raise DomainError(f"state leaves [0,1]^n (max {x.max()!r})")
    return x


def step(x, params: NetworkParams) -> np.ndarray:
    """One synchronous update of a state in [0, 1]^n."""
    return network_map(check_state(x, params.n), params)


@dataclass
class Orbit:
    """Recorded states of a simulation; ``steps[r]`` is the time of ``states[r]``."""

    steps: np.ndarray
    states: np.ndarray
    fingerprint: str
    N: int
    record_every: int

    @property
    def initial(self) -> np.ndarray:
        return self.states[0]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def to_csv(self) -> str:
        n = self.states.shape[1]
        lines = ["k," + ",".join(f"x_{i + 1}" for i in range(n))]
        for k, row in zip(self.steps, self.states):
            lines.append(str(int(k)) + "," + ",".join(format(float(x), ".17g") for x in row))
        return "\n".join(lines) + "\n"

    def metadata(self) -> dict:
        return {
            "fingerprint": self.fingerprint,
            "N": self.N,
            "record_every": self.record_every,
            "records": int(len(self.steps)),
        }

    def metadata_json(self) -> str:
        return json.dumps(self.metadata(), indent=1) + "\n"


def simulate(x0, N: int, params: NetworkParams, record_every: int = 1) -> Orbit:
    """Iterate the network N times from ``x0``.

    Records the initial state, every state whose time is a multiple of
    ``record_every``, and the final state.
    """
    if N < 0:
        raise ParameterError("N must be >= 0")
    if record_every < 1:
        raise ParameterError("record_every must be >= 1")
    x = check_state(x0, params.n).copy()

    ks = [0]
    rows = [x.copy()]
    for k in range(1, N + 1):
        x = _activate(weighted_input(x, params), params)
        if k % record_every == 0 or k == N:
            ks.append(k)
            rows.append(x)
    return Orbit(
        steps=np.array(ks, dtype=np.int64),
        states=np.array(rows),
        fingerprint=params.fingerprint(),
        N=N,
        record_every=record_every,
    )
