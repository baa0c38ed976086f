"""Kernel ridge regression, closed-form kernel gradient flow, and
Hodge-labeled eigen-diagnostics.

Training dynamics: for squared-loss kernel gradient flow started at zero,
predictions follow f_t = sum_j (1 - exp(-kappa_j t)) <y, u_j> u_j in the
kernel eigenbasis, so each mode is learned at the rate set by its
eigenvalue. Ridge regression enters only through solves; diagnostics use
the eigendecomposition of the kernel itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, SolveFailure
from .hodge import HodgeBasis

SOLVE_RESIDUAL_TOL = 1e-8
CLUSTER_GAP_TOL = 1e-10

HODGE_LABELS = ("exact", "harmonic", "coexact")


@dataclass(frozen=True)
class RidgeModel:
    gram: np.ndarray
    lam: float
    dual_coeffs: np.ndarray  # (n_train, n_outputs)
    single_output: bool


def _as_targets(y: np.ndarray) -> tuple[np.ndarray, bool]:
    y = np.asarray(y, dtype=np.float64)
    if y.ndim == 1:
        return y[:, None], True
    if y.ndim == 2:
        return y, False
    raise DimensionMismatch(f"targets must be 1-D or 2-D, got shape {y.shape}")


def krr_fit(gram: np.ndarray, y: np.ndarray, lam: float) -> RidgeModel:
    """Dual coefficients (K + lam I)^-1 y; columns of y are fit jointly."""
    if lam <= 0.0:
        raise ValueError(f"ridge parameter must be positive, got {lam}")
    gram = np.asarray(gram, dtype=np.float64)
    targets, single = _as_targets(y)
    if targets.shape[0] != gram.shape[0]:
        raise DimensionMismatch(
            f"targets have {targets.shape[0]} rows, gram is {gram.shape[0]} x {gram.shape[1]}"
        )
    system = gram + lam * np.eye(gram.shape[0])
    try:
        factor = scipy.linalg.cho_factor(system)
        coeffs = scipy.linalg.cho_solve(factor, targets)
    except scipy.linalg.LinAlgError:
        # pseudo-solve on the clipped spectrum for indefinite numerical noise
        w, u = np.linalg.eigh(gram)
        coeffs = u @ ((u.T @ targets) / (np.maximum(w, 0.0) + lam)[:, None])
    residual = np.linalg.norm(system @ coeffs - targets)
    scale = np.linalg.norm(targets)
    if residual > SOLVE_RESIDUAL_TOL * max(scale, 1e-300):
        min_eig = float(np.linalg.eigvalsh(gram)[0])
        raise SolveFailure(
            f"ridge solve residual {residual:.3e} exceeds tolerance; "
            f"min eigenvalue of gram is {min_eig:.3e}"
        )
    return RidgeModel(gram=gram, lam=float(lam), dual_coeffs=coeffs, single_output=single)


def krr_predict(model: RidgeModel, cross: np.ndarray) -> np.ndarray:
    """Predictions k_*' (K + lam I)^-1 y for cross-kernel rows k_*."""
    cross = np.asarray(cross, dtype=np.float64)
    if cross.ndim != 2 or cross.shape[1] != model.dual_coeffs.shape[0]:
        raise DimensionMismatch(
            f"cross kernel must be (*, {model.dual_coeffs.shape[0]}), got {cross.shape}"
        )
    out = cross @ model.dual_coeffs
    return out[:, 0] if model.single_output else out


def fitted_values(model: RidgeModel) -> np.ndarray:
    return krr_predict(model, model.gram)


def kernel_gradient_flow(k: np.ndarray, y: np.ndarray, t: float) -> np.ndarray:
    """Closed-form prediction of kernel gradient flow at time t, from f_0 = 0.

    Accepts a vector target or a matrix of target columns.
    """
    if t < 0.0:
        raise ValueError(f"time must be nonnegative, got {t}")
    k = np.asarray(k, dtype=np.float64)
    targets, single = _as_targets(y)
    w, u = np.linalg.eigh(k)
    decay = 1.0 - np.exp(-w * t)
    out = u @ (decay[:, None] * (u.T @ targets))
    return out[:, 0] if single else out


@dataclass(frozen=True)
class EigenDiagnostic:
    """Descending eigenpairs with per-mode Hodge energies and labels.

    hodge_energies[j] = (|Pi_E u_j|^2, |Pi_H u_j|^2, |Pi_C u_j|^2); the
    label is the argmax with ties resolved in the order exact > harmonic >
    coexact. cluster_ids groups modes whose eigenvalue gaps fall below
    CLUSTER_GAP_TOL * kappa_max, where individual eigenvectors are only
    defined up to rotation within the cluster.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    hodge_labels: tuple[str, ...]
    hodge_energies: np.ndarray
    cluster_ids: np.ndarray


def eigen_diagnostic(k: np.ndarray, basis: HodgeBasis) -> EigenDiagnostic:
    k = np.asarray(k, dtype=np.float64)
    if k.shape[0] != basis.n_edges:
        raise DimensionMismatch(
            f"kernel is {k.shape[0]} x {k.shape[1]}, basis has |E| = {basis.n_edges}"
        )
    w, u = np.linalg.eigh((k + k.T) / 2.0)
    order = np.argsort(w)[::-1]
    w, u = w[order], u[:, order]
    energies = np.zeros((w.size, 3))
    for col, ub in enumerate((basis.u_exact, basis.u_harmonic, basis.u_coexact)):
        if ub.shape[1]:
            energies[:, col] = np.sum((ub.T @ u) ** 2, axis=0)
    labels = tuple(HODGE_LABELS[int(np.argmax(e))] for e in energies)
    scale = max(abs(float(w[0])), 1e-300) if w.size else 1.0
    cluster_ids = np.zeros(w.size, dtype=np.int64)
    for j in range(1, w.size):
        gap = abs(float(w[j - 1] - w[j]))
        cluster_ids[j] = cluster_ids[j - 1] + (0 if gap < CLUSTER_GAP_TOL * scale else 1)
    return EigenDiagnostic(
        eigenvalues=w,
        eigenvectors=u,
        hodge_labels=labels,
        hodge_energies=energies,
        cluster_ids=cluster_ids,
    )


def diagnostic_rows(diag: EigenDiagnostic) -> list[dict]:
    """One dict per mode, ready for CSV export."""
    rows = []
    for j, (kappa, label) in enumerate(zip(diag.eigenvalues, diag.hodge_labels)):
        e_exact, e_harmonic, e_coexact = diag.hodge_energies[j]
        rows.append(
            {
                "index": j,
                "eigenvalue": float(kappa),
                "label": label,
                "e_exact": float(e_exact),
                "e_harmonic": float(e_harmonic),
                "e_coexact": float(e_coexact),
                "cluster": int(diag.cluster_ids[j]),
            }
        )
    return rows
