"""Edge-level tangent-kernel recursions driven by Hodge propagation.

For complexes X, Y with propagators P_X, P_Y and edge features H_X, H_Y,
the covariance and tangent kernels follow

    Sigma^0(X,Y) = (1/d) H_X H_Y',          Theta^0 = Sigma^0,
    Sigma^(l+1)  = P_X Phi(Sigma^l) P_Y',
    Theta^(l+1)  = P_X [Theta^l . PhiDot(Sigma^l)] P_Y' + Sigma^(l+1),

where Phi / PhiDot are the dual-activation maps evaluated entrywise with
self-variance diagonals taken from the X,X and Y,Y streams, and "."
is the Hadamard product in the standard edge basis. The recursion always
carries the three streams (XX, XY, YY) jointly.

Kernel variants select which Laplacian channels enter the propagator:
lower uses gamma*I + alpha*L_down, upper uses gamma*I + beta*L_up, full
uses both. At edge level the graph variant coincides with lower, since a
graph-derived propagator sees only the 1-skeleton.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, replace

import numpy as np

from .activations import ActivationKind, CovarianceView, phi, phi_dot
from .complexes import SimplicialComplex, boundary_matrices
from .errors import DimensionMismatch, FeatureDimMismatch
from .hodge import HodgePropagator, build_propagator, build_propagator_opnorm
from .rng import substream


class KernelVariant(enum.Enum):
    GRAPH = "graph"
    LOWER = "lower"
    UPPER = "upper"
    FULL = "full"


@dataclass(frozen=True)
class KernelConfig:
    """Depth, propagator coefficients, activation, and normalization flags.

    trace_normalize applies to within-complex architecture operators only
    (mean diagonal scaled to 1); pool_normalize divides pooled kernels by
    sqrt(|E_X| |E_Y|).
    """

    depth: int = 2
    gamma: float = 0.5
    alpha: float = 1.0
    beta: float = 1.0
    activation: ActivationKind = ActivationKind.RELU
    normalize_laplacians: bool = True
    trace_normalize: bool = True
    pool_normalize: bool = True
    variant: KernelVariant = KernelVariant.FULL
    normalize_propagator: bool = False

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")

    def effective_coefficients(self) -> tuple[float, float]:
        """(alpha, beta) after applying the variant mask."""
        if self.variant in (KernelVariant.GRAPH, KernelVariant.LOWER):
            return self.alpha, 0.0
        if self.variant is KernelVariant.UPPER:
            return 0.0, self.beta
        return self.alpha, self.beta

    def propagator(self, sc: SimplicialComplex) -> HodgePropagator:
        """Build P under the configured normalization.

        normalize_propagator scales the whole assembled operator to unit
        spectral norm (raw Laplacians inside); otherwise each Laplacian is
        normalized per normalize_laplacians before weighting.
        """
        alpha, beta = self.effective_coefficients()
        if self.normalize_propagator:
            return build_propagator_opnorm(boundary_matrices(sc), self.gamma, alpha, beta)
        return build_propagator(
            boundary_matrices(sc), self.gamma, alpha, beta, self.normalize_laplacians
        )

    def with_variant(self, variant: KernelVariant) -> "KernelConfig":
        return replace(self, variant=variant)


@dataclass(frozen=True)
class KernelState:
    """Sigma/Theta matrices of the three streams after `layer` updates."""

    sigma_xy: np.ndarray
    sigma_xx: np.ndarray
    sigma_yy: np.ndarray
    theta_xy: np.ndarray
    theta_xx: np.ndarray
    theta_yy: np.ndarray
    layer: int


def constant_features(sc: SimplicialComplex, d: int = 1) -> np.ndarray:
    """All-ones |E| x d feature matrix, the default for structural tasks."""
    return np.ones((sc.n_edges, d))


def initial_covariance(fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
    """(1/d) F_X F_Y' for feature matrices with a shared feature dimension."""
    fx = np.asarray(fx, dtype=np.float64)
    fy = np.asarray(fy, dtype=np.float64)
    if fx.ndim != 2 or fy.ndim != 2:
        raise DimensionMismatch("feature matrices must be 2-D (|E| x d)")
    if fx.shape[1] != fy.shape[1]:
        raise FeatureDimMismatch(
            f"feature dimensions differ: {fx.shape[1]} vs {fy.shape[1]}"
        )
    return fx @ fy.T / fx.shape[1]


def _sym(m: np.ndarray) -> np.ndarray:
    return (m + m.swapaxes(-1, -2)) / 2.0


def kernel_recursion(
    p_x: np.ndarray,
    p_y: np.ndarray,
    sigma0_xy: np.ndarray,
    sigma0_xx: np.ndarray,
    sigma0_yy: np.ndarray,
    activation: ActivationKind,
    depth: int,
) -> KernelState:
    """Run the joint three-stream recursion for `depth` layers.

    Propagator-agnostic: p_x / p_y may be any symmetric operators, which
    lets the same core serve the Hodge kernels and the node-level graph
    baseline.
    """
    sxy = np.asarray(sigma0_xy, dtype=np.float64)
    sxx = _sym(np.asarray(sigma0_xx, dtype=np.float64))
    syy = _sym(np.asarray(sigma0_yy, dtype=np.float64))
    txy, txx, tyy = sxy, sxx, syy
    for _ in range(depth):
        dx = np.diagonal(sxx).copy()
        dy = np.diagonal(syy).copy()
        view_xy = CovarianceView(sxy, dx, dy)
        view_xx = CovarianceView(sxx, dx, dx)
        view_yy = CovarianceView(syy, dy, dy)
        new_sxy = p_x @ phi(activation, view_xy) @ p_y.T
        new_sxx = _sym(p_x @ phi(activation, view_xx) @ p_x.T)
        new_syy = _sym(p_y @ phi(activation, view_yy) @ p_y.T)
        txy = p_x @ (txy * phi_dot(activation, view_xy, "limit")) @ p_y.T + new_sxy
        txx = _sym(p_x @ (txx * phi_dot(activation, view_xx, "limit")) @ p_x.T) + new_sxx
        tyy = _sym(p_y @ (tyy * phi_dot(activation, view_yy, "limit")) @ p_y.T) + new_syy
        sxy, sxx, syy = new_sxy, new_sxx, new_syy
    return KernelState(
        sigma_xy=sxy, sigma_xx=sxx, sigma_yy=syy,
        theta_xy=txy, theta_xx=txx, theta_yy=tyy,
        layer=depth,
    )


def self_kernel_recursion(
    p: np.ndarray, sigma0: np.ndarray, activation: ActivationKind, depth: int
) -> tuple[np.ndarray, np.ndarray]:
    """Single-stream X = Y recursion; returns (Sigma^L, Theta^L)."""
    s = _sym(np.asarray(sigma0, dtype=np.float64))
    t = s
    for _ in range(depth):
        d = np.diagonal(s).copy()
        view = CovarianceView(s, d, d)
        new_s = _sym(p @ phi(activation, view) @ p.T)
        t = _sym(p @ (t * phi_dot(activation, view, "limit")) @ p.T) + new_s
        s = new_s
    return s, t


def ntk_pair(
    x: SimplicialComplex,
    y: SimplicialComplex,
    fx: np.ndarray,
    fy: np.ndarray,
    cfg: KernelConfig,
    propagators: tuple[HodgePropagator, HodgePropagator] | None = None,
) -> KernelState:
    """Joint kernel state for a pair of complexes with edge features."""
    fx = np.asarray(fx, dtype=np.float64)
    fy = np.asarray(fy, dtype=np.float64)
    if fx.shape[0] != x.n_edges or fy.shape[0] != y.n_edges:
        raise DimensionMismatch(
            f"feature rows ({fx.shape[0]}, {fy.shape[0]}) must match edge counts "
            f"({x.n_edges}, {y.n_edges})"
        )
    if propagators is None:
        propagators = (cfg.propagator(x), cfg.propagator(y))
    p_x, p_y = propagators[0].p, propagators[1].p
    return kernel_recursion(
        p_x, p_y,
        initial_covariance(fx, fy),
        initial_covariance(fx, fx),
        initial_covariance(fy, fy),
        cfg.activation,
        cfg.depth,
    )


def architecture_operator(
    sc: SimplicialComplex,
    cfg: KernelConfig,
    propagator: HodgePropagator | None = None,
) -> np.ndarray:
    """Within-complex kernel from the recursion with Sigma^0 = I.

    Acts on edge signals. With trace_normalize the output is scaled so its
    mean diagonal equals 1.
    """
    if propagator is None:
        propagator = cfg.propagator(sc)
    eye = np.eye(sc.n_edges)
    _, theta = self_kernel_recursion(propagator.p, eye, cfg.activation, cfg.depth)
    if cfg.trace_normalize:
        tr = float(np.trace(theta))
        if tr > 0.0:
            theta = theta * (sc.n_edges / tr)
    return theta


def pooled_kernel(state: KernelState, cfg: KernelConfig) -> float:
    """Sum-pooled scalar kernel 1' Theta^L(X,Y) 1, optionally normalized."""
    value = float(state.theta_xy.sum())
    if cfg.pool_normalize:
        n_x, n_y = state.theta_xy.shape
        value /= np.sqrt(n_x * n_y)
    return value


@dataclass(frozen=True)
class GramResult:
    """Pooled Gram matrix, pre-clip symmetrized copy, and clipped mass."""

    matrix: np.ndarray
    raw: np.ndarray
    clipped_mass: float


def _finalize_gram(g: np.ndarray, clip: bool) -> GramResult:
    raw = (g + g.T) / 2.0
    if not clip:
        return GramResult(matrix=raw, raw=raw, clipped_mass=0.0)
    w, u = np.linalg.eigh(raw)
    clipped_mass = float(-w[w < 0.0].sum())
    if clipped_mass == 0.0:
        return GramResult(matrix=raw, raw=raw, clipped_mass=0.0)
    clipped = (u * np.maximum(w, 0.0)) @ u.T
    return GramResult(matrix=_sym(clipped), raw=raw, clipped_mass=clipped_mass)


def gram_matrix(
    complexes: list[SimplicialComplex],
    features: list[np.ndarray],
    cfg: KernelConfig,
    clip: bool = True,
) -> GramResult:
    """Pairwise pooled kernels over a sample of complexes.

    Reference implementation: one recursion per pair. The result is
    symmetrized explicitly and, with clip, projected to the PSD cone with
    the removed negative eigenvalue mass reported.
    """
    if len(complexes) != len(features):
        raise DimensionMismatch("complexes and features lists must be aligned")
    n = len(complexes)
    props = [cfg.propagator(c) for c in complexes]
    g = np.zeros((n, n))
    for i in range(n):
        for j in range(i, n):
            state = ntk_pair(
                complexes[i], complexes[j], features[i], features[j], cfg,
                propagators=(props[i], props[j]),
            )
            g[i, j] = g[j, i] = pooled_kernel(state, cfg)
    return _finalize_gram(g, clip)


def batched_pooled_gram(
    complexes: list[SimplicialComplex],
    features: list[np.ndarray],
    cfg: KernelConfig,
    clip: bool = True,
) -> GramResult:
    """Fast pooled Gram for samples sharing one edge count.

    Same recursion as gram_matrix, vectorized over sample pairs: the three
    self streams run batched over samples, cross streams batch over the
    second index of each pair row, and the final layer is pooled through
    the bilinear identity 1'(P A P')1 = (P'1)' A (P'1). When every sample
    carries the same feature matrix, the layer-0 activation maps are
    constant across pairs and are computed once.
    """
    if len(complexes) != len(features):
        raise DimensionMismatch("complexes and features lists must be aligned")
    n_samples = len(complexes)
    n_edges = complexes[0].n_edges
    if any(c.n_edges != n_edges for c in complexes):
        raise DimensionMismatch("batched gram needs a shared edge count; use gram_matrix")
    feats = np.stack([np.asarray(f, dtype=np.float64) for f in features])
    if feats.shape[1] != n_edges:
        raise DimensionMismatch("feature rows must match the edge count")
    act, depth = cfg.activation, cfg.depth
    p = np.stack([cfg.propagator(c).p for c in complexes])
    pt = p.transpose(0, 2, 1)
    u = p.sum(axis=1)  # P' 1 per sample; P is symmetric but stay explicit

    # self covariance pass over all samples at once; only the per-layer
    # diagonals are kept, as inputs to the cross-pair activation maps
    sig = np.einsum("sid,sjd->sij", feats, feats) / feats.shape[2]
    sig = _sym(sig)
    diags = []
    for _ in range(depth):
        d = np.diagonal(sig, axis1=1, axis2=2).copy()
        diags.append(d)
        view = CovarianceView(sig, d, d)
        sig = _sym(p @ phi(act, view) @ pt)

    same_features = all(np.array_equal(feats[s], feats[0]) for s in range(1, n_samples))
    if same_features:
        sig0 = _sym(feats[0] @ feats[0].T / feats.shape[2])
        d0 = np.diagonal(sig0).copy()
        view0 = CovarianceView(sig0, d0, d0)
        m_phi0 = phi(act, view0)
        m_theta0 = sig0 * phi_dot(act, view0, "limit")

    # cross pass; each row batches over the second pair index, diagonal
    # included so identical samples give bitwise-identical Gram entries
    g = np.zeros((n_samples, n_samples))
    for s in range(n_samples):
        pjt = pt[s:]
        if same_features:
            sig_xy = th_xy = None  # set at layer 0
        else:
            sig_xy = np.einsum("id,bjd->bij", feats[s], feats[s:]) / feats.shape[2]
            th_xy = sig_xy
        row = None
        for layer in range(depth):
            last = layer == depth - 1
            if layer == 0 and same_features:
                if last:
                    mm = m_theta0 + m_phi0
                    row = np.einsum("e,ef,bf->b", u[s], mm, u[s:])
                else:
                    a_phi = p[s] @ m_phi0
                    a_theta = p[s] @ m_theta0
                    sig_xy = np.matmul(a_phi, pjt)
                    th_xy = np.matmul(a_theta, pjt) + sig_xy
                continue
            view = CovarianceView(sig_xy, diags[layer][s], diags[layer][s:])
            ph = phi(act, view)
            phd = phi_dot(act, view, "limit")
            if last:
                mm = th_xy * phd + ph
                row = np.einsum("e,bef,bf->b", u[s], mm, u[s:])
            else:
                new_sig = np.matmul(p[s], np.matmul(ph, pjt))
                th_xy = np.matmul(p[s], np.matmul(th_xy * phd, pjt)) + new_sig
                sig_xy = new_sig
        g[s, s:] = row
        g[s:, s] = row
    if cfg.pool_normalize:
        g = g / n_edges
    return _finalize_gram(g, clip)


def finite_width_ntk(
    x: SimplicialComplex,
    fx: np.ndarray,
    cfg: KernelConfig,
    width: int,
    n_nets: int,
    seed: int,
) -> np.ndarray:
    """Monte Carlo edge-level kernel from finite-width networks.

    Instantiates networks H^(l+1) = P sigma(H^(l) W^(l) / sqrt(m_l)) with
    standard-normal weights and a scalar readout per edge,
    f(i) = (1/sqrt(m_L)) sum_r a_r H^(L)_{i r}, then averages the explicit
    parameter-gradient inner products over nets. Converges to the analytic
    Theta^(L)(X,X) as width grows; this is the independent oracle for the
    recursion, so it shares no code with it.
    """
    fx = np.asarray(fx, dtype=np.float64)
    n_edges, d = fx.shape
    prop = cfg.propagator(x)
    p = prop.p
    relu = cfg.activation is ActivationKind.RELU
    acc = np.zeros((n_edges, n_edges))
    for net in range(n_nets):
        rng = substream(seed, net)
        widths = [d] + [width] * cfg.depth
        weights = [
            rng.standard_normal((widths[l], widths[l + 1])) for l in range(cfg.depth)
        ]
        readout = rng.standard_normal(width)
        activations_fwd = [fx]
        preacts = []
        for l in range(cfg.depth):
            z = activations_fwd[l] @ weights[l] / np.sqrt(widths[l])
            preacts.append(z)
            activations_fwd.append(p @ (np.maximum(z, 0.0) if relu else z))
        top = activations_fwd[cfg.depth]
        ntk = top @ top.T / width  # readout-weight gradients
        # grad[i, e, r] = d f(i) / d H^(L)_{e r}
        grad = np.einsum("ie,r->ier", np.eye(n_edges), readout) / np.sqrt(width)
        for l in range(cfg.depth - 1, -1, -1):
            gate = (preacts[l] > 0.0).astype(np.float64) if relu else 1.0
            grad_z = np.einsum("fe,ifr->ier", p, grad) * gate
            flat = grad_z.reshape(n_edges * n_edges, widths[l + 1])
            pair = (flat @ flat.T).reshape(n_edges, n_edges, n_edges, n_edges)
            a_gram = activations_fwd[l] @ activations_fwd[l].T
            ntk += np.einsum("iejf,ef->ij", pair, a_gram) / widths[l]
            if l > 0:
                grad = np.einsum("ier,ar->iea", grad_z, weights[l]) / np.sqrt(widths[l])
        acc += ntk
    return acc / n_nets


def edge_labels(sc: SimplicialComplex) -> list[str]:
    return [f"{i}-{j}" for i, j in sc.edges]


def save_kernel_csv(matrix: np.ndarray, path, labels: list[str] | None = None) -> None:
    """Row-major CSV export of a kernel matrix with edge-identifier header."""
    matrix = np.asarray(matrix)
    if labels is None:
        labels = [str(i) for i in range(matrix.shape[1])]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["edge"] + labels)
        for label, row in zip(labels, matrix):
            writer.writerow([label] + [repr(float(v)) for v in row])
