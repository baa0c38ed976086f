"""Hodge 1-Laplacians, the residual propagation operator, and the
exact / harmonic / coexact decomposition of edge signals.

For boundary matrices B1, B2 the lower and upper Laplacians are
L_down = B1' B1 and L_up = B2 B2'. Edge signals split orthogonally into
range(B1') (exact, gradient-like flows), ker(L_down + L_up) (harmonic,
global cycle flows) and range(B2) (coexact, circulations around filled
triangles).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .complexes import BoundaryMatrices
from .errors import DegenerateRank, DimensionMismatch

RANK_TOL = 1e-10
GAP_RATIO_MIN = 10.0


def laplacians(bm: BoundaryMatrices) -> tuple[np.ndarray, np.ndarray]:
    """(L_down, L_up) as dense float matrices of shape |E| x |E|."""
    b1 = bm.b1.astype(np.float64)
    b2 = bm.b2.astype(np.float64)
    return b1.T @ b1, b2 @ b2.T


def spectral_norm(m: np.ndarray) -> float:
    """Largest eigenvalue of a symmetric PSD matrix (0 for empty or zero input)."""
    if m.size == 0 or not m.any():
        return 0.0
    return float(np.linalg.eigvalsh(m)[-1])


def sym_operator_norm(m: np.ndarray) -> float:
    """Operator 2-norm of a symmetric matrix, max |eigenvalue|."""
    if m.size == 0 or not m.any():
        return 0.0
    w = np.linalg.eigvalsh(m)
    return float(max(abs(w[0]), abs(w[-1])))


@dataclass(frozen=True)
class HodgePropagator:
    """P = gamma*I + alpha*L_down + beta*L_up on edge signals.

    When ``normalized`` is set, l_down and l_up hold the Laplacians after
    division by their own spectral norms (zero operators are kept as zero),
    and p is assembled from those.
    """

    gamma: float
    alpha: float
    beta: float
    l_down: np.ndarray
    l_up: np.ndarray
    p: np.ndarray
    normalized: bool


def build_propagator(
    bm: BoundaryMatrices,
    gamma: float,
    alpha: float,
    beta: float,
    normalize: bool = True,
) -> HodgePropagator:
    l_down, l_up = laplacians(bm)
    if normalize:
        nd = spectral_norm(l_down)
        if nd > 0:
            l_down = l_down / nd
        nu = spectral_norm(l_up)
        if nu > 0:
            l_up = l_up / nu
    n = l_down.shape[0]
    p = gamma * np.eye(n) + alpha * l_down + beta * l_up
    return HodgePropagator(
        gamma=float(gamma),
        alpha=float(alpha),
        beta=float(beta),
        l_down=l_down,
        l_up=l_up,
        p=p,
        normalized=normalize,
    )


def build_propagator_opnorm(
    bm: BoundaryMatrices, gamma: float, alpha: float, beta: float
) -> HodgePropagator:
    """Propagator assembled from raw Laplacians, scaled to operator norm 1.

    The alternative normalization reading: instead of dividing each
    Laplacian by its own top eigenvalue, the assembled P is divided by its
    spectral norm. Stored coefficients and Laplacians keep the invariant
    P = gamma*I + alpha*L_down + beta*L_up, with the scale folded into the
    coefficients.
    """
    l_down, l_up = laplacians(bm)
    n = l_down.shape[0]
    p = gamma * np.eye(n) + alpha * l_down + beta * l_up
    norm = sym_operator_norm(p)
    scale = 1.0 / norm if norm > 0 else 1.0
    return HodgePropagator(
        gamma=float(gamma * scale),
        alpha=float(alpha * scale),
        beta=float(beta * scale),
        l_down=l_down,
        l_up=l_up,
        p=p * scale,
        normalized=False,
    )


@dataclass(frozen=True)
class HodgeBasis:
    """Orthonormal bases of the three edge-signal subspaces.

    dims = (dim_exact, dim_harmonic, dim_coexact) and always sums to |E|.
    """

    u_exact: np.ndarray
    u_harmonic: np.ndarray
    u_coexact: np.ndarray
    dims: tuple[int, int, int]

    @property
    def n_edges(self) -> int:
        return self.u_exact.shape[0]


def _range_basis(m: np.ndarray, what: str) -> np.ndarray:
    """Orthonormal basis of range(m) via a rank-revealing SVD.

    Keeps singular values above RANK_TOL * sigma_max and demands a clean
    gap (ratio >= GAP_RATIO_MIN) between kept and dropped values.
    """
    rows = m.shape[0]
    if m.size == 0:
        return np.zeros((rows, 0))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if s[0] <= 0.0:
        return np.zeros((rows, 0))
    rank = int(np.count_nonzero(s > RANK_TOL * s[0]))
    if rank < s.size and s[rank] > 0.0 and s[rank - 1] / s[rank] < GAP_RATIO_MIN:
        raise DegenerateRank(
            f"ambiguous rank for {what}: singular values "
            f"{s[rank - 1]:.3e} and {s[rank]:.3e} straddle the cutoff"
        )
    return u[:, :rank]


def hodge_basis(bm: BoundaryMatrices) -> HodgeBasis:
    """Orthonormal bases for exact, harmonic, and coexact edge signals."""
    u_exact = _range_basis(bm.b1.T.astype(np.float64), "range(B1')")
    u_coexact = _range_basis(bm.b2.astype(np.float64), "range(B2)")
    n_edges = bm.b1.shape[1]
    nonharmonic = np.hstack([u_exact, u_coexact])
    if nonharmonic.shape[1] == 0:
        u_harmonic = np.eye(n_edges)
    else:
        u_harmonic = scipy.linalg.null_space(nonharmonic.T)
    dims = (u_exact.shape[1], u_harmonic.shape[1], u_coexact.shape[1])
    if sum(dims) != n_edges:
        raise DegenerateRank(
            f"subspace dimensions {dims} do not sum to |E| = {n_edges}"
        )
    return HodgeBasis(u_exact=u_exact, u_harmonic=u_harmonic, u_coexact=u_coexact, dims=dims)


def project(basis: HodgeBasis, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split an edge signal into its exact, harmonic, and coexact parts."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (basis.n_edges,):
        raise DimensionMismatch(
            f"signal has shape {x.shape}, expected ({basis.n_edges},)"
        )
    parts = tuple(u @ (u.T @ x) for u in (basis.u_exact, basis.u_harmonic, basis.u_coexact))
    return parts


def projector(basis: HodgeBasis, which: str) -> np.ndarray:
    """Orthogonal projector onto one subspace ('exact'|'harmonic'|'coexact')."""
    u = {
        "exact": basis.u_exact,
        "harmonic": basis.u_harmonic,
        "coexact": basis.u_coexact,
    }[which]
    return u @ u.T
