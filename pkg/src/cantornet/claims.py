"""
End-to-end verification of a weight matrix: parameter chain, state-space
invariance, ray invariance and scalar conjugacy, each with its worst residual.
"""

from __future__ import annotations

import numpy as np

from .errors import CantorNetError
from .fibodelta import DEFAULT_K
from .linedyn import g_tilde_array
from .netcore import build_network, network_map
from .spectral import DEFAULT_TOL, WeightMatrix, validate_weights

RESIDUAL_TOL = 1e-12


def state_space_sweep(params, count: int, seed: int = 0, batch: int = 10_000) -> float:
    """Largest excursion of F(x) outside prod_i [0, v_i] over random x in [0,1]^n.

    Returns 0.0 when every image lands inside the box.
    """
    rng = np.random.default_rng(seed)
    v = params.v
    worst = 0.0
    done = 0
    while done < count:
        m = min(batch, count - done)
        Fx = network_map(rng.random((m, params.n)), params)
        worst = max(worst, float(np.max(-Fx)), float(np.max(Fx - v)), 0.0)
        done += m
    return worst


def ray_sweep(params, count: int, seed: int = 0, t_max: float = 2.0):
    """Off-ray and conjugacy residuals of F(t v) for random t in [0, t_max].

    Returns ``(off_ray, diagram)``: the sup-norm distance of F(tv) from its
    own projection onto the ray, and ``max|F(tv) - g~(t) v|``.
    """
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.0, t_max, size=count)
    v = params.v
    Fx = network_map(t[:, None] * v[None, :], params)
    s = (Fx @ v) / (v @ v)
    off = float(np.max(np.abs(Fx - s[:, None] * v[None, :])))
    diag = float(np.max(np.abs(Fx - g_tilde_array(t, params.delta_params)[:, None] * v[None, :])))
    return off, diag


def verify_instance(
    W,
    mode: str = "row",
    K: int = DEFAULT_K,
    samples: int = 10_000,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
) -> dict:
    """Run the parameter-chain, invariance and conjugacy checks on one matrix.

    The returned dict has a top-level ``passed`` flag and one entry per
    check. A matrix failing validation produces only the validation entry.
    """
    entries = W.entries if isinstance(W, WeightMatrix) else W
    report = validate_weights(entries, mode)
    out = {"validation": report.as_dict()}
    if not report.passed:
        out["passed"] = False
        return out
    try:
        params = build_network(WeightMatrix(entries, mode), K=K, tol=tol)
    except CantorNetError as exc:
        out["construction_error"] = str(exc)
        out["passed"] = False
        return out

    rho, theta = params.rho, params.theta
    chain = {
        "passed": bool(0.5 < theta < rho < 1.0),
        "theta": theta,
        "rho": rho,
        "delta": params.delta,
        "perron_residual": params.perron.residual,
        "perron_iterations": params.perron.iterations,
    }
    box_excess = state_space_sweep(params, samples, seed)
    invariance = {"passed": box_excess == 0.0, "samples": samples, "max_excess": box_excess}
    off, diag = ray_sweep(params, samples, seed + 1)
    line = {"passed": off <= RESIDUAL_TOL, "samples": samples, "max_off_ray": off}
    conj = {"passed": diag <= RESIDUAL_TOL, "samples": samples, "max_residual": diag}

    out.update(
        {
            "network": params.as_dict(),
            "chain": chain,
            "state_space": invariance,
            "ray_invariance": line,
            "conjugacy": conj,
        }
    )
    out["passed"] = all(out[k]["passed"] for k in ("chain", "state_space", "ray_invariance", "conjugacy"))
    return out
