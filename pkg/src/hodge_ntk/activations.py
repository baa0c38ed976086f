"""Dual-activation covariance maps for linear and ReLU activations.

For jointly Gaussian (g_i, g_j) with variances v_i, v_j and covariance c,
the maps evaluated entrywise are

    phi_ij     = E[sigma(g_i) sigma(g_j)]
    phi_dot_ij = E[sigma'(g_i) sigma'(g_j)]

For ReLU these are the degree-1 arc-cosine forms: with s = sqrt(v_i v_j),
rho = c / s clamped to [-1, 1] and theta = arccos(rho),

    phi_ij     = s / (2 pi) * (sin(theta) + (pi - theta) cos(theta))
    phi_dot_ij = (pi - theta) / (2 pi)

Entries with s = 0 give phi = 0; phi_dot requires variances bounded away
from zero. Linear activations give phi = c and phi_dot = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import NegativeVariance, ZeroVarianceDerivative

NEGATIVE_VARIANCE_TOL = 1e-10
ZERO_VARIANCE_TOL = 1e-12


class ActivationKind(enum.Enum):
    LINEAR = "linear"
    RELU = "relu"


@dataclass(frozen=True)
class CovarianceView:
    """Cross-covariance block plus the two self-variance diagonals.

    cross has shape (..., m, n); diag_x and diag_y broadcast against its
    trailing axes as (..., m) and (..., n). Leading batch axes are allowed
    so whole stacks of covariance blocks can be mapped at once.
    """

    cross: np.ndarray
    diag_x: np.ndarray
    diag_y: np.ndarray


def _check_diagonals(v: CovarianceView) -> tuple[np.ndarray, np.ndarray]:
    dx = np.asarray(v.diag_x, dtype=np.float64)
    dy = np.asarray(v.diag_y, dtype=np.float64)
    for name, d in (("diag_x", dx), ("diag_y", dy)):
        if d.size and float(d.min()) < -NEGATIVE_VARIANCE_TOL:
            raise NegativeVariance(f"{name} has entry {d.min():.3e} < -{NEGATIVE_VARIANCE_TOL}")
    # tiny negative drift is treated as zero variance
    return np.maximum(dx, 0.0), np.maximum(dy, 0.0)


def _correlation(cross: np.ndarray, dx: np.ndarray, dy: np.ndarray):
    s = np.sqrt(dx[..., :, None] * dy[..., None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(s > 0.0, cross / np.where(s > 0.0, s, 1.0), 0.0)
    return s, np.clip(rho, -1.0, 1.0)


def phi(kind: ActivationKind, v: CovarianceView) -> np.ndarray:
    """Activation covariance map, evaluated entrywise on the view."""
    cross = np.asarray(v.cross, dtype=np.float64)
    if kind is ActivationKind.LINEAR:
        return cross
    dx, dy = _check_diagonals(v)
    s, rho = _correlation(cross, dx, dy)
    theta = np.arccos(rho)
    sin_theta = np.sqrt(np.maximum(1.0 - rho * rho, 0.0))
    out = s / (2.0 * np.pi) * (sin_theta + (np.pi - theta) * rho)
    return np.where(s > 0.0, out, 0.0)


def phi_dot(
    kind: ActivationKind, v: CovarianceView, zero_variance: str = "error"
) -> np.ndarray:
    """Derivative covariance map, evaluated entrywise on the view.

    For ReLU a zero self-variance makes the preactivation the constant 0,
    where the derivative covariance is only defined by convention. With
    ``zero_variance="error"`` (the contract for direct callers) such
    entries raise ZeroVarianceDerivative; with ``"limit"`` they evaluate
    to 0, the subgradient convention sigma'(0) = 0 that finite-width
    networks with a strict z > 0 gate realize exactly. The kernel
    recursion uses the limit so that knife-edge propagators (an edge with
    zero row sum) stay well defined.
    """
    cross = np.asarray(v.cross, dtype=np.float64)
    if kind is ActivationKind.LINEAR:
        return np.ones_like(cross)
    if zero_variance not in ("error", "limit"):
        raise ValueError(f"zero_variance must be 'error' or 'limit', got {zero_variance!r}")
    dx, dy = _check_diagonals(v)
    if zero_variance == "error":
        for name, d in (("diag_x", dx), ("diag_y", dy)):
            if d.size and float(d.min()) <= ZERO_VARIANCE_TOL:
                raise ZeroVarianceDerivative(
                    f"ReLU derivative map needs {name} > {ZERO_VARIANCE_TOL}, "
                    f"got min {d.min():.3e}"
                )
    _, rho = _correlation(cross, dx, dy)
    theta = np.arccos(rho)
    out = (np.pi - theta) / (2.0 * np.pi)
    if zero_variance == "limit":
        alive = (dx[..., :, None] > ZERO_VARIANCE_TOL) & (dy[..., None, :] > ZERO_VARIANCE_TOL)
        out = np.where(alive, out, 0.0)
    return out
