"""
Chaos diagnostics for the scalar map g and, through the ray embedding, for
the network: attractor estimation, omega-limit checks, box counts, rotation
comparison and sensitivity witnesses.

Attractor estimates are empirical. Orbits are started from arbitrary seeds
and run through a burn-in; agreement between seeds is measured and reported,
not assumed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import CaptureError, DomainError, ParameterError
from .fibodelta import DeltaParams
from .linedyn import ScalarOrbit, embed, g, g_tilde
from .netcore import NetworkParams, network_map

ALPHA = (3.0 - math.sqrt(5.0)) / 2.0
DEDUP_RESOLUTION = 1e-14
OMEGA_TOL = 1e-3
DEFAULT_MAX_K = 10**6


@dataclass(frozen=True)
class RotationMap:
    alpha: float = ALPHA


def rotation_step(t: float, rm: RotationMap = RotationMap()) -> float:
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"rotation is defined on [0, 1], got {t!r}")
    if t < 1.0 - rm.alpha:
        return t + rm.alpha
    return t + rm.alpha - 1.0


def rotation_orbit(t0: float, N: int, rm: RotationMap = RotationMap()) -> np.ndarray:
    if not (0.0 <= t0 <= 1.0):
        raise DomainError(f"rotation is defined on [0, 1], got {t0!r}")
    out = np.empty(N + 1)
    t = float(t0)
    out[0] = t
    cut = 1.0 - rm.alpha
    a = rm.alpha
    for k in range(1, N + 1):
        t = t + a if t < cut else t + a - 1.0
        out[k] = t
    return out


def itinerary_frequency(orbit) -> float:
    """Fraction of orbit values on the right branch (``t >= theta``).

    Accepts a :class:`ScalarOrbit` or a bare 0/1 itinerary.
    """
    itin = orbit.itinerary if isinstance(orbit, ScalarOrbit) else np.asarray(orbit)
    if len(itin) < 1:
        raise ParameterError("orbit must contain at least one value")
    return float(np.count_nonzero(itin)) / len(itin)


@dataclass
class AttractorApprox:
    points: np.ndarray
    burn_in: int
    sample_count: int
    seed_t: float
    resolution: float = DEDUP_RESOLUTION

    def __len__(self):
        return len(self.points)

    def largest_gap(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return float(np.max(np.diff(self.points)))

    def to_text(self) -> str:
        return "".join(format(float(p), ".17g") + "\n" for p in self.points)


def dedup_sorted(values, resolution: float = DEDUP_RESOLUTION) -> np.ndarray:
    """Sort and drop values within ``resolution`` of the previously kept one."""
    s = np.sort(np.asarray(values, dtype=float))
    if len(s) == 0:
        return s
    kept = [s[0]]
    last = s[0]
    for x in s[1:]:
        if x - last > resolution:
            kept.append(x)
            last = x
    return np.array(kept)


def attractor_estimate(
    t0: float,
    burn_in: int,
    samples: int,
    dp: DeltaParams,
    resolution: float = DEDUP_RESOLUTION,
) -> AttractorApprox:
    """Point cloud approximating the Cantor attractor of g.

    Iterates ``burn_in`` times from ``t0`` and then keeps the next
    ``samples`` values, the current one included.
    """
    if burn_in < 0 or samples < 1:
        raise ParameterError("need burn_in >= 0 and samples >= 1")
    if not (0.0 <= t0 <= 1.0):
        raise DomainError(f"seed must lie in [0, 1], got {t0!r}")
    theta = dp.theta
    t = float(t0)
    for _ in range(burn_in):
        t = 1.0 - (theta - t) / 2.0 if t < theta else (t - theta) / 2.0
    vals = np.empty(samples)
    for k in range(samples):
        vals[k] = t
        t = 1.0 - (theta - t) / 2.0 if t < theta else (t - theta) / 2.0
    return AttractorApprox(dedup_sorted(vals, resolution), burn_in, samples, float(t0), resolution)


def _directed(A: np.ndarray, B_sorted: np.ndarray) -> np.ndarray:
    """Distance from each point of A to the nearest point of sorted B."""
    idx = np.searchsorted(B_sorted, A)
    left = B_sorted[np.clip(idx - 1, 0, len(B_sorted) - 1)]
    right = B_sorted[np.clip(idx, 0, len(B_sorted) - 1)]
    return np.minimum(np.abs(A - left), np.abs(A - right))


def directed_distance(A, B) -> float:
    """``sup_{a in A} inf_{b in B} |a - b|``."""
    A = _as_points(A)
    B = _as_points(B)
    return float(np.max(_directed(A, np.sort(B))))


def _as_points(A) -> np.ndarray:
    if isinstance(A, AttractorApprox):
        A = A.points
    A = np.asarray(A, dtype=float).ravel()
    if A.size == 0:
        raise ParameterError("point sets must be nonempty")
    return A


def hausdorff_distance(A, B) -> float:
    return max(directed_distance(A, B), directed_distance(B, A))


def box_count(A, scale: float) -> int:
    """Number of boxes ``[k s, (k+1) s)`` that contain a point of A."""
    if not (0.0 < scale < 1.0):
        raise ParameterError("scale must lie in (0, 1)")
    pts = _as_points(A)
    return int(np.unique(np.floor(pts / scale)).size)


def forward_invariance_defect(A: AttractorApprox, dp: DeltaParams) -> float:
    """How far g(A) sticks out of A (0 for an exactly invariant set)."""
    image = np.array([g(float(p), dp) for p in A.points])
    return directed_distance(image, A.points)


# -- sensitivity ---------------------------------------------------------


@dataclass
class SensitivityReport:
    """Case-I divergence witness for the scalar map at ``t0``.

    ``preimage`` is the point of J that g^k sends to theta; the witness sits
    on the opposite side of it from ``t0``. ``t0_right`` records which branch
    g^k(t0) takes.
    """

    t0: float
    epsilon: float
    k_capture: int
    witness_s0: float
    separation: float
    eta_network: float
    preimage: float
    t0_right: bool

    def as_dict(self):
        return asdict(self)


def _mirror_witness(t0, eps, p, right):
    """Point of J = (t0-eps, t0+eps) at distance eps/2 from ``p`` on the side
    whose k-th iterate lands opposite to g^k(t0); halves the distance to the
    edge of J when eps/2 would leave it."""
    if right:
        s = p - eps / 2.0
        edge = t0 - eps
        if not s > edge:
            s = (p + edge) / 2.0
    else:
        s = p + eps / 2.0
        edge = t0 + eps
        if not s < edge:
            s = (p + edge) / 2.0
    return s


def sensitivity_probe(
    t0: float,
    epsilon: float,
    max_k: int = DEFAULT_MAX_K,
    dp: DeltaParams = None,
    params: Optional[NetworkParams] = None,
) -> SensitivityReport:
    """Find the least k with theta inside g^k(J) and a witness that splits there.

    J = (t0 - eps, t0 + eps) must lie in [0, 1]. While theta is outside J_k
    the whole interval uses one branch, so J_{k+1} = g(J_k) has half the
    length; J_k is tracked as its center g^k(t0) and half-width eps / 2^k.
    ``eta_network`` scales the separation by ``||v||_2`` of ``params``
    (a one-neuron network, ``||v|| = 1``, when omitted).
    """
    if dp is None:
        if params is None:
            raise ParameterError("need DeltaParams or NetworkParams")
        dp = params.delta_params
    if not (0.0 < t0 < 1.0):
        raise DomainError(f"t0 must lie in (0, 1), got {t0!r}")
    if not (epsilon > 0.0 and t0 - epsilon >= 0.0 and t0 + epsilon <= 1.0):
        raise ParameterError(f"J = ({t0!r} -/+ {epsilon!r}) must be a subinterval of [0, 1]")
    theta = dp.theta

    center = float(t0)
    half = float(epsilon)
    k = 0
    while not (center - half < theta < center + half):
        if k >= max_k:
            raise CaptureError(f"theta not captured within {max_k} steps from t0={t0!r}", steps=k)
        if center - half == center + half:
            raise CaptureError(
                f"interval around g^{k}(t0) shrank below floating resolution without "
                f"capturing theta (t0={t0!r} is probably off the attractor)",
                steps=k,
            )
        center = 1.0 - (theta - center) / 2.0 if center < theta else (center - theta) / 2.0
        half = half / 2.0
        k += 1

    # g^k is affine with slope 2^-k on J, so its inverse at theta is closed form.
    preimage = t0 + math.ldexp(theta - center, k)
    right = center >= theta
    s0 = _mirror_witness(t0, epsilon, preimage, right)

    s, t = s0, float(t0)
    for _ in range(k + 1):
        s = g(s, dp)
        t = g(t, dp)
    separation = abs(s - t)
    if separation < 0.5 - 1e-12:
        raise CaptureError(
            f"witness separation {separation!r} below 1/2 at t0={t0!r} (k={k})", steps=k
        )
    vnorm = 1.0 if params is None else float(np.linalg.norm(params.v))
    return SensitivityReport(
        t0=float(t0),
        epsilon=float(epsilon),
        k_capture=k,
        witness_s0=float(s0),
        separation=float(separation),
        eta_network=float(separation * vnorm),
        preimage=float(preimage),
        t0_right=bool(right),
    )


@dataclass
class NetworkWitness:
    """Two network orbits from ``t0 v`` and ``s0 v`` compared at step k+1."""

    t0: float
    s0: float
    steps: int
    start_distance: float
    final_distance: float
    eta: float

    @property
    def holds(self) -> bool:
        return self.final_distance >= self.eta

    def as_dict(self):
        d = asdict(self)
        d["holds"] = self.holds
        return d


def network_witness(report: SensitivityReport, params: NetworkParams) -> NetworkWitness:
    """Lift a scalar witness to the network.

    Both mirror points ``p -/+ eps/2`` are run through the network for k+1
    steps and the one ending farther from the orbit of ``t0 v`` is kept. When
    g^k(t0) sits on theta to within rounding, the network, not the scalar
    map, decides which branch its orbit takes; checking both sides keeps the
    witness valid in that case. Distances are Euclidean and ``eta`` is
    ``||v||_2 / 2``.
    """
    eps, p, t0 = report.epsilon, report.preimage, report.t0
    steps = report.k_capture + 1
    x = embed(t0, params)
    for _ in range(steps):
        x = network_map(x, params)

    best = None
    for right in (report.t0_right, not report.t0_right):
        s0 = _mirror_witness(t0, eps, p, right)
        y = embed(s0, params)
        for _ in range(steps):
            y = network_map(y, params)
        d = float(np.linalg.norm(y - x))
        if best is None or d > best[1]:
            best = (s0, d)
    s0, d = best
    vnorm = float(np.linalg.norm(params.v))
    start = float(np.linalg.norm(embed(s0, params) - embed(t0, params)))
    return NetworkWitness(t0, float(s0), steps, start, d, vnorm / 2.0)


def probe_points(A: AttractorApprox, count: int, epsilon: float, seed: int = 0) -> np.ndarray:
    """Draw ``count`` probe seeds from A, keeping points whose epsilon-interval fits in [0, 1].

    Draws with replacement when A has fewer eligible points than ``count``.
    """
    pts = A.points[(A.points - epsilon > 0.0) & (A.points + epsilon < 1.0)]
    if pts.size == 0:
        raise ParameterError("no attractor point admits an epsilon-interval inside [0, 1]")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(pts, size=count, replace=pts.size < count))


# -- omega limit ---------------------------------------------------------


@dataclass
class OmegaReport:
    t0: float
    tail_start: int
    tail_len: int
    tol: float
    tail_to_set: float
    set_to_tail: float
    seed_distance: float

    @property
    def passed(self) -> bool:
        return self.tail_to_set <= self.tol and self.set_to_tail <= self.tol

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


def omega_limit_check(
    t0: float,
    A,
    tail_start: int,
    tail_len: int,
    tol: float = OMEGA_TOL,
    dp: Optional[DeltaParams] = None,
    map_fn: Optional[Callable[[float], float]] = None,
) -> OmegaReport:
    """Compare the orbit tail ``t_{tail_start} .. t_{tail_start+tail_len-1}`` with A.

    Passes when the tail stays within ``tol`` of A and A is ``tol``-covered by
    the tail. ``map_fn`` replaces g~ (for synthetic checks); ``seed_distance``
    reports how far t0 itself is from A.
    """
    if tail_start < 0 or tail_len < 1:
        raise ParameterError("need tail_start >= 0 and tail_len >= 1")
    if map_fn is None:
        if dp is None:
            raise ParameterError("need DeltaParams or map_fn")
        map_fn = lambda t: g_tilde(t, dp)  # noqa: E731
    pts = np.sort(_as_points(A))

    t = float(t0)
    for _ in range(tail_start):
        t = map_fn(t)
    tail = np.empty(tail_len)
    for k in range(tail_len):
        tail[k] = t
        t = map_fn(t)
    tail_sorted = np.unique(tail)
    return OmegaReport(
        t0=float(t0),
        tail_start=tail_start,
        tail_len=tail_len,
        tol=tol,
        tail_to_set=float(np.max(_directed(tail_sorted, pts))),
        set_to_tail=float(np.max(_directed(pts, tail_sorted))),
        seed_distance=float(_directed(np.array([float(t0)]), pts)[0]),
    )


def sturmian_balance(itinerary, window: int) -> int:
    """Spread (max - min) of the number of 1s over all windows of a given length."""
    itin = np.asarray(itinerary, dtype=np.int64)
    if window < 1 or window > len(itin):
        raise ParameterError("window must lie in [1, len(itinerary)]")
    c = np.concatenate(([0], np.cumsum(itin)))
    counts = c[window:] - c[:-window]
    return int(counts.max() - counts.min())


def ks_uniform(samples) -> float:
    """Kolmogorov-Smirnov distance between the empirical law of samples and U[0, 1]."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = len(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))
