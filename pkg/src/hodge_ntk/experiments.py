"""Synthetic experiment drivers: triangle-count regression, Hodge component
recovery, the spectral diagnostic, triangle-flip stability, and the
filled-simplex separation sweep.

Every driver is a pure function of (config, seed); per-cell randomness is
drawn from named substreams of the master seed, so repeated runs emit
byte-identical tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.stats

from .complexes import (
    SimplicialComplex,
    b2_on_candidates,
    boundary_matrices,
    cycle_chord_skeleton,
    er_clique_complex,
    fill_candidates,
    flip_triangles,
    three_cliques,
)
from .errors import DegenerateSubspace
from .hodge import HodgeBasis, hodge_basis, laplacians, sym_operator_norm
from .learn import eigen_diagnostic, kernel_gradient_flow, krr_fit, krr_predict
from .ntk import (
    ActivationKind,
    KernelConfig,
    KernelVariant,
    architecture_operator,
    batched_pooled_gram,
    constant_features,
)
from .rng import substream

EDGE_VARIANTS = (KernelVariant.LOWER, KernelVariant.UPPER, KernelVariant.FULL)


# -- Hodge signal sampling ----------------------------------------------------


@dataclass(frozen=True)
class HodgeSignalSample:
    """A unit-norm edge signal with its stored subspace components."""

    signal: np.ndarray
    components: tuple[np.ndarray, np.ndarray, np.ndarray]
    weights: tuple[float, float, float]


def sample_hodge_signal(
    basis: HodgeBasis,
    seed: int | np.random.Generator,
    weights: tuple[float, float, float] = (1.0, 1.0, 1.0),
) -> HodgeSignalSample:
    """Sum of independent Gaussian draws in each subspace, normalized to 1.

    Components are rescaled by the same normalization factor, so they still
    sum to the signal. Requires all three subspaces to be nonempty.
    """
    rng = seed if isinstance(seed, np.random.Generator) else substream(int(seed))
    bases = (basis.u_exact, basis.u_harmonic, basis.u_coexact)
    for name, u in zip(("exact", "harmonic", "coexact"), bases):
        if u.shape[1] == 0:
            raise DegenerateSubspace(f"{name} subspace is empty")
    parts = [w * (u @ rng.standard_normal(u.shape[1])) for w, u in zip(weights, bases)]
    signal = parts[0] + parts[1] + parts[2]
    norm = float(np.linalg.norm(signal))
    if norm == 0.0:
        raise DegenerateSubspace("sampled signal has zero norm")
    scaled = tuple(p / norm for p in parts)
    return HodgeSignalSample(signal=signal / norm, components=scaled, weights=weights)


def _mixed_stability_signal(basis: HodgeBasis, rng: np.random.Generator) -> np.ndarray:
    """Equal-weight sum of one unit draw per subspace, mean-centered, unit norm."""
    parts = []
    for u in (basis.u_exact, basis.u_harmonic, basis.u_coexact):
        if u.shape[1] == 0:
            raise DegenerateSubspace("stability signal needs all three subspaces")
        v = u @ rng.standard_normal(u.shape[1])
        parts.append(v / np.linalg.norm(v))
    y = parts[0] + parts[1] + parts[2]
    y = y - y.mean()
    return y / np.linalg.norm(y)


def unit_trace_kernel(sc: SimplicialComplex, cfg: KernelConfig) -> np.ndarray:
    """Architecture operator scaled to unit trace.

    The fixed-complex experiments compare absolute ridge grids across
    complexes, so the final edge kernel is normalized by its trace; the
    mean-diagonal convention of architecture_operator would leave the
    whole spectrum above the grid.
    """
    theta = architecture_operator(sc, replace(cfg, trace_normalize=False))
    tr = float(np.trace(theta))
    return theta / tr if tr > 0 else theta


def _sample_full_decomposition_complex(
    n: int, p: float, q: float, seed: int, *path, max_tries: int = 50
) -> tuple[SimplicialComplex, HodgeBasis]:
    """ER-clique complex whose exact, harmonic, and coexact spaces are all nonempty."""
    for attempt in range(max_tries):
        sc = er_clique_complex(n, p, q, substream(seed, *path, attempt))
        basis = hodge_basis(boundary_matrices(sc))
        if all(d >= 1 for d in basis.dims):
            return sc, basis
    raise DegenerateSubspace(
        f"no complex with a full decomposition after {max_tries} tries "
        f"(n={n}, p={p}, q={q})"
    )


# -- triangle-count regression ------------------------------------------------


@dataclass(frozen=True)
class TriangleCountConfig:
    n: int = 30
    densities: tuple[float, ...] = (0.0, 0.3, 0.5, 0.7, 1.0)
    samples_per_density: int = 200
    repetitions: int = 5
    train_frac: float = 0.7
    lam: float = 1e-4
    depth: int = 2
    gamma: float = 0.5
    alpha: float = 1.0
    beta: float = 1.0
    center_targets: bool = True
    include_graph_alias: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_frac < 1.0:
            raise ValueError("train_frac must lie in (0, 1)")
        if self.lam <= 0.0:
            raise ValueError("lam must be positive")

    def kernel_config(self, variant: KernelVariant) -> KernelConfig:
        return KernelConfig(
            depth=self.depth,
            gamma=self.gamma,
            alpha=self.alpha,
            beta=self.beta,
            activation=ActivationKind.RELU,
            variant=variant,
            normalize_propagator=True,
        )


@dataclass(frozen=True)
class TriangleCountResult:
    config: TriangleCountConfig
    seed: int
    records: list[dict] = field(default_factory=list)

    def rows(self) -> list[dict]:
        from .tables import mean_and_se

        rows = []
        variants = sorted({r["variant"] for r in self.records})
        for q in self.config.densities:
            for variant in variants:
                cell = [
                    r for r in self.records if r["q"] == q and r["variant"] == variant
                ]
                rmse_mean, rmse_se = mean_and_se([r["test_rmse"] for r in cell])
                rows.append(
                    {
                        "n": self.config.n,
                        "samples_per_density": self.config.samples_per_density,
                        "repetitions": self.config.repetitions,
                        "lam": self.config.lam,
                        "depth": self.config.depth,
                        "seed": self.seed,
                        "q": q,
                        "variant": variant,
                        "metric": "test_rmse",
                        "value": rmse_mean,
                        "stderr": rmse_se,
                    }
                )
                rows.append(
                    {
                        "n": self.config.n,
                        "samples_per_density": self.config.samples_per_density,
                        "repetitions": self.config.repetitions,
                        "lam": self.config.lam,
                        "depth": self.config.depth,
                        "seed": self.seed,
                        "q": q,
                        "variant": variant,
                        "metric": "gram_row_spread_max",
                        "value": max(r["gram_row_spread"] for r in cell),
                        "stderr": 0.0,
                    }
                )
        return rows


def _krr_rmse(
    gram: np.ndarray,
    targets: np.ndarray,
    train: np.ndarray,
    test: np.ndarray,
    lam: float,
    center: bool,
) -> float:
    """Test RMSE of (optionally centered) ridge regression on a pooled Gram.

    Centering works in kernel space: targets lose the train mean and the
    Gram is double-centered (features shifted by their train mean), the
    standard unpenalized-intercept treatment. Constant d=1 features make
    the pooled Gram nearly separable with one dominant mean direction, so
    without centering the count signal sits in eigendirections far below
    the ridge and every variant collapses to mean prediction.
    """
    y_train = targets[train].astype(np.float64)
    k_train = gram[np.ix_(train, train)]
    cross = gram[np.ix_(test, train)]
    if center:
        offset = float(y_train.mean())
        row_mean = k_train.mean(axis=0)
        grand = float(k_train.mean())
        k_train = k_train - row_mean[None, :] - row_mean[:, None] + grand
        cross = cross - cross.mean(axis=1, keepdims=True) - row_mean[None, :] + grand
    else:
        offset = 0.0
    model = krr_fit(k_train, y_train - offset, lam)
    pred = krr_predict(model, cross) + offset
    return float(np.sqrt(np.mean((pred - targets[test]) ** 2)))


def run_triangle_count(cfg: TriangleCountConfig, seed: int) -> TriangleCountResult:
    """Regress the filled-triangle count from pooled kernels, per density.

    Samples live on one fixed cycle-chord skeleton with constant edge
    features, so lower/graph kernels cannot vary across samples; their
    pooled Gram row spread is reported alongside the test RMSE.
    """
    skeleton, candidates = cycle_chord_skeleton(cfg.n)
    features = [constant_features(skeleton)] * cfg.samples_per_density
    n_train = round(cfg.train_frac * cfg.samples_per_density)
    records: list[dict] = []
    for qi, q in enumerate(cfg.densities):
        for rep in range(cfg.repetitions):
            samples = [
                fill_candidates(skeleton, candidates, q, substream(seed, 1, qi, rep, s))
                for s in range(cfg.samples_per_density)
            ]
            targets = np.array([sc.n_triangles for sc in samples], dtype=np.float64)
            perm = substream(seed, 2, qi, rep).permutation(cfg.samples_per_density)
            train, test = perm[:n_train], perm[n_train:]
            for variant in EDGE_VARIANTS:
                gram = batched_pooled_gram(samples, features, cfg.kernel_config(variant))
                spread = float(np.max(np.ptp(gram.raw, axis=0))) if gram.raw.size else 0.0
                rmse = _krr_rmse(gram.matrix, targets, train, test, cfg.lam, cfg.center_targets)
                records.append(
                    {
                        "q": q,
                        "rep": rep,
                        "variant": variant.value,
                        "test_rmse": rmse,
                        "gram_row_spread": spread,
                        "clipped_mass": gram.clipped_mass,
                        "target_std": float(targets.std(ddof=0)),
                    }
                )
                if variant is KernelVariant.LOWER and cfg.include_graph_alias:
                    alias = dict(records[-1])
                    alias["variant"] = KernelVariant.GRAPH.value
                    records.append(alias)
    return TriangleCountResult(config=cfg, seed=seed, records=records)


# -- Hodge component recovery -------------------------------------------------


@dataclass(frozen=True)
class HodgeRecoveryConfig:
    n: int = 20
    p: float = 0.35
    q: float = 0.4
    n_train: int = 120
    n_test: int = 60
    seeds: int = 5
    lam: float = 1e-3
    depth: int = 2
    gamma: float = 0.5
    alpha: float = 1.0
    beta: float = 1.0

    def kernel_config(self, variant: KernelVariant) -> KernelConfig:
        return KernelConfig(
            depth=self.depth,
            gamma=self.gamma,
            alpha=self.alpha,
            beta=self.beta,
            activation=ActivationKind.RELU,
            variant=variant,
            normalize_propagator=True,
        )


@dataclass(frozen=True)
class HodgeRecoveryResult:
    config: HodgeRecoveryConfig
    seed: int
    records: list[dict]

    def mean_rmse(self, variant: str, component: str) -> float:
        vals = [
            r["relative_rmse"]
            for r in self.records
            if r["variant"] == variant and r["component"] == component
        ]
        return float(np.mean(vals))

    def rows(self) -> list[dict]:
        from .tables import mean_and_se

        rows = []
        for variant in sorted({r["variant"] for r in self.records}):
            for component in ("exact", "harmonic", "coexact"):
                vals = [
                    r["relative_rmse"]
                    for r in self.records
                    if r["variant"] == variant and r["component"] == component
                ]
                mean, se = mean_and_se(vals)
                rows.append(
                    {
                        "n": self.config.n,
                        "p": self.config.p,
                        "q": self.config.q,
                        "n_train": self.config.n_train,
                        "n_test": self.config.n_test,
                        "seeds": self.config.seeds,
                        "lam": self.config.lam,
                        "depth": self.config.depth,
                        "seed": self.seed,
                        "variant": variant,
                        "component": component,
                        "metric": "relative_rmse",
                        "value": mean,
                        "stderr": se,
                    }
                )
        return rows


def run_hodge_recovery(cfg: HodgeRecoveryConfig, seed: int) -> HodgeRecoveryResult:
    """Recover exact/harmonic/coexact components of signals by multi-output
    ridge regression in the architecture-operator kernel, per variant."""
    records: list[dict] = []
    n_signals = cfg.n_train + cfg.n_test
    for si in range(cfg.seeds):
        sc, basis = _sample_full_decomposition_complex(cfg.n, cfg.p, cfg.q, seed, 1, si)
        samples = [
            sample_hodge_signal(basis, substream(seed, 2, si, k)) for k in range(n_signals)
        ]
        signals = np.stack([s.signal for s in samples])
        components = np.stack([np.stack(s.components) for s in samples])  # (N, 3, E)
        n_edges = sc.n_edges
        train = np.arange(cfg.n_train)
        test = np.arange(cfg.n_train, n_signals)
        targets = components.reshape(n_signals, 3 * n_edges)
        for variant in EDGE_VARIANTS:
            k_arch = unit_trace_kernel(sc, cfg.kernel_config(variant))
            gram = signals @ k_arch @ signals.T
            gram = (gram + gram.T) / 2.0
            model = krr_fit(gram[np.ix_(train, train)], targets[train], cfg.lam)
            pred = krr_predict(model, gram[np.ix_(test, train)])
            pred = pred.reshape(cfg.n_test, 3, n_edges)
            true = components[test]
            for ci, component in enumerate(("exact", "harmonic", "coexact")):
                errs = np.linalg.norm(pred[:, ci] - true[:, ci], axis=1)
                norms = np.linalg.norm(true[:, ci], axis=1)
                rel = errs / np.maximum(norms, 1e-12)
                records.append(
                    {
                        "variant": variant.value,
                        "component": component,
                        "complex_seed": si,
                        "relative_rmse": float(rel.mean()),
                    }
                )
    return HodgeRecoveryResult(config=cfg, seed=seed, records=records)


# -- spectral diagnostic --------------------------------------------------------


@dataclass(frozen=True)
class SpectralConfig:
    n: int = 30
    p: float = 0.35
    q: float = 0.4
    t_grid: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 4.0)
    depth: int = 2
    gamma: float = 0.5
    alpha: float = 1.0
    beta: float = 1.0

    def kernel_config(self) -> KernelConfig:
        return KernelConfig(
            depth=self.depth,
            gamma=self.gamma,
            alpha=self.alpha,
            beta=self.beta,
            activation=ActivationKind.RELU,
            variant=KernelVariant.FULL,
            normalize_propagator=True,
        )


@dataclass(frozen=True)
class SpectralResult:
    config: SpectralConfig
    seed: int
    mode_rows: list[dict]
    harmonic_median: float
    global_median: float

    @property
    def harmonic_below_global_median(self) -> bool:
        return self.harmonic_median < self.global_median


def run_spectral_diagnostic(cfg: SpectralConfig, seed: int) -> SpectralResult:
    """Eigen-diagnostic of the full-variant architecture operator plus the
    per-mode decay check |f_t - u_j| = exp(-kappa_j t)."""
    sc, basis = _sample_full_decomposition_complex(cfg.n, cfg.p, cfg.q, seed, 1)
    k_arch = unit_trace_kernel(sc, cfg.kernel_config())
    diag = eigen_diagnostic(k_arch, basis)
    u = diag.eigenvectors
    residual_max = np.zeros(u.shape[1])
    for t in cfg.t_grid:
        f_t = kernel_gradient_flow(k_arch, u, t)
        measured = np.linalg.norm(f_t - u, axis=0)
        predicted = np.exp(-diag.eigenvalues * t)
        residual_max = np.maximum(residual_max, np.abs(measured - predicted))
    rows = []
    for j in range(u.shape[1]):
        e_exact, e_harmonic, e_coexact = diag.hodge_energies[j]
        rows.append(
            {
                "n": cfg.n,
                "p": cfg.p,
                "q": cfg.q,
                "seed": seed,
                "index": j,
                "eigenvalue": float(diag.eigenvalues[j]),
                "label": diag.hodge_labels[j],
                "e_exact": float(e_exact),
                "e_harmonic": float(e_harmonic),
                "e_coexact": float(e_coexact),
                "decay_residual": float(residual_max[j]),
            }
        )
    harmonic_eigs = [r["eigenvalue"] for r in rows if r["label"] == "harmonic"]
    harmonic_median = float(np.median(harmonic_eigs)) if harmonic_eigs else float("nan")
    global_median = float(np.median(diag.eigenvalues))
    return SpectralResult(
        config=cfg,
        seed=seed,
        mode_rows=rows,
        harmonic_median=harmonic_median,
        global_median=global_median,
    )


# -- stability under triangle flips ---------------------------------------------


@dataclass(frozen=True)
class StabilityConfig:
    n: int = 30
    p: float = 0.35
    q: float = 0.4
    eps_grid: tuple[float, ...] = (0.0, 0.05, 0.1, 0.15, 0.2, 0.3)
    lambdas: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 1e-1)
    perturbations_per_run: int = 3
    runs: int = 5
    depth: int = 2
    gamma: float = 0.5
    alpha: float = 1.0
    beta: float = 1.0

    def kernel_config(self) -> KernelConfig:
        return KernelConfig(
            depth=self.depth,
            gamma=self.gamma,
            alpha=self.alpha,
            beta=self.beta,
            activation=ActivationKind.RELU,
            variant=KernelVariant.FULL,
            normalize_propagator=True,
        )


@dataclass(frozen=True)
class StabilityRecord:
    """Per-perturbation stability measurements.

    delta_K and delta_y are relative changes; delta_L is the Frobenius
    change of the raw upper Laplacian. Extra fields carry the pieces needed
    for the Lipschitz-constant and boundary-matrix bound checks.
    """

    run: int
    perturbation: int
    eps: float
    lam: float
    delta_K: float
    delta_L: float
    delta_y: float
    abs_delta_K: float
    norm_K: float
    abs_delta_y: float
    norm_yhat: float
    delta_L_op: float
    delta_b2_op: float
    b2_norm_sum_op: float
    delta_b2_fro: float
    b2_norm_sum_fro: float

    def as_dict(self) -> dict:
        return {
            "run": self.run,
            "perturbation": self.perturbation,
            "eps": self.eps,
            "lam": self.lam,
            "delta_K": self.delta_K,
            "delta_L": self.delta_L,
            "delta_y": self.delta_y,
            "abs_delta_K": self.abs_delta_K,
            "norm_K": self.norm_K,
            "abs_delta_y": self.abs_delta_y,
            "norm_yhat": self.norm_yhat,
            "delta_L_op": self.delta_L_op,
            "delta_b2_op": self.delta_b2_op,
            "b2_norm_sum_op": self.b2_norm_sum_op,
            "delta_b2_fro": self.delta_b2_fro,
            "b2_norm_sum_fro": self.b2_norm_sum_fro,
        }


def _ridge_fit_values(k: np.ndarray, y: np.ndarray, lam: float) -> np.ndarray:
    model = krr_fit(k, y, lam)
    return krr_predict(model, k)


def run_stability(cfg: StabilityConfig, seed: int) -> list[StabilityRecord]:
    """Kernel / prediction stability under independent triangle flips.

    For each run a base complex X is drawn; perturbed complexes X' flip
    each candidate triangle with probability eps on the fixed skeleton.
    Boundary matrices are compared over the common candidate set.
    """
    kernel_cfg = cfg.kernel_config()
    records: list[StabilityRecord] = []
    for run in range(cfg.runs):
        sc, basis = _sample_full_decomposition_complex(cfg.n, cfg.p, cfg.q, seed, 1, run)
        y = _mixed_stability_signal(basis, substream(seed, 2, run))
        candidates = three_cliques(sc)
        k_base = unit_trace_kernel(sc, kernel_cfg)
        norm_k = float(np.linalg.norm(k_base))
        _, l_up_base = laplacians(boundary_matrices(sc))
        b2_base = b2_on_candidates(sc, candidates).astype(np.float64)
        yhat_base = {
            lam: _ridge_fit_values(k_base, y, lam) for lam in cfg.lambdas
        }
        for ei, eps in enumerate(cfg.eps_grid):
            for pert in range(cfg.perturbations_per_run):
                perturbed = flip_triangles(sc, eps, substream(seed, 3, run, ei, pert))
                k_pert = unit_trace_kernel(sc=perturbed, cfg=kernel_cfg)
                _, l_up_pert = laplacians(boundary_matrices(perturbed))
                b2_pert = b2_on_candidates(perturbed, candidates).astype(np.float64)
                delta_l = float(np.linalg.norm(l_up_base - l_up_pert))
                abs_delta_k = float(np.linalg.norm(k_base - k_pert))
                delta_b2 = b2_base - b2_pert
                delta_b2_op = (
                    float(np.linalg.norm(delta_b2, 2)) if delta_b2.size else 0.0
                )
                b2_sum_op = (
                    (float(np.linalg.norm(b2_base, 2)) if b2_base.size else 0.0)
                    + (float(np.linalg.norm(b2_pert, 2)) if b2_pert.size else 0.0)
                )
                for lam in cfg.lambdas:
                    yhat_pert = _ridge_fit_values(k_pert, y, lam)
                    base = yhat_base[lam]
                    abs_dy = float(np.linalg.norm(base - yhat_pert))
                    norm_yhat = float(np.linalg.norm(base))
                    records.append(
                        StabilityRecord(
                            run=run,
                            perturbation=pert,
                            eps=eps,
                            lam=lam,
                            delta_K=abs_delta_k / norm_k,
                            delta_L=delta_l,
                            delta_y=abs_dy / norm_yhat if norm_yhat > 0 else 0.0,
                            abs_delta_K=abs_delta_k,
                            norm_K=norm_k,
                            abs_delta_y=abs_dy,
                            norm_yhat=norm_yhat,
                            delta_L_op=float(sym_operator_norm(l_up_base - l_up_pert)),
                            delta_b2_op=delta_b2_op,
                            b2_norm_sum_op=b2_sum_op,
                            delta_b2_fro=float(np.linalg.norm(delta_b2)),
                            b2_norm_sum_fro=float(
                                np.linalg.norm(b2_base) + np.linalg.norm(b2_pert)
                            ),
                        )
                    )
    return records


@dataclass(frozen=True)
class StabilityBoundReport:
    """Empirical Lipschitz proxies and bound checks over stability records."""

    c_k_hat: float
    c_pred_hat: float
    pearson_r: float
    spearman_rho: float
    deltay_means_by_lambda: dict[float, float]
    deltay_monotone_in_lambda: bool
    b2_bound_ok_op: bool
    b2_bound_ok_fro: bool

    def rows(self) -> list[dict]:
        rows = [
            {"metric": "c_k_hat", "value": self.c_k_hat},
            {"metric": "c_pred_hat", "value": self.c_pred_hat},
            {"metric": "pearson_r_deltaL_absDeltaK", "value": self.pearson_r},
            {"metric": "spearman_deltay_vs_deltaL_over_lambda", "value": self.spearman_rho},
            {"metric": "deltay_monotone_in_lambda", "value": int(self.deltay_monotone_in_lambda)},
            {"metric": "b2_bound_ok_operator_norm", "value": int(self.b2_bound_ok_op)},
            {"metric": "b2_bound_ok_frobenius", "value": int(self.b2_bound_ok_fro)},
        ]
        for lam, mean in sorted(self.deltay_means_by_lambda.items()):
            rows.append({"metric": f"mean_delta_y_lambda_{lam:g}", "value": mean})
        return rows


def theorem2_bound_check(records: list[StabilityRecord]) -> StabilityBoundReport:
    """Fit the empirical Lipschitz ratios and verify the stated inequalities.

    The boundary-matrix bound |L_up - L_up'| <= (|B2| + |B2'|) |B2 - B2'|
    is checked in operator norm and, with all-Frobenius norms, as the
    companion submultiplicative variant.
    """
    nonzero = [r for r in records if r.delta_L > 0.0]
    if not nonzero:
        raise ValueError("need at least one record with a nonzero Laplacian change")
    c_k_hat = max(r.abs_delta_K / r.delta_L for r in nonzero)
    c_pred_hat = max(r.lam * r.abs_delta_y / r.delta_L for r in nonzero)  # |y| = 1
    delta_l = np.array([r.delta_L for r in records])
    abs_dk = np.array([r.abs_delta_K for r in records])
    pearson_r = float(scipy.stats.pearsonr(delta_l, abs_dk).statistic)
    ratio = np.array([r.delta_L / r.lam for r in nonzero])
    dy = np.array([r.delta_y for r in nonzero])
    spearman_rho = float(scipy.stats.spearmanr(ratio, dy).statistic)
    lambdas = sorted({r.lam for r in records})
    means = {
        lam: float(np.mean([r.delta_y for r in records if r.lam == lam and r.eps > 0]))
        for lam in lambdas
    }
    ordered = [means[lam] for lam in lambdas]
    monotone = all(b <= a + 1e-12 for a, b in zip(ordered, ordered[1:]))
    slack = 1e-9
    ok_op = all(
        r.delta_L_op <= r.b2_norm_sum_op * r.delta_b2_op + slack for r in records
    )
    ok_fro = all(
        r.delta_L <= r.b2_norm_sum_fro * r.delta_b2_fro + slack for r in records
    )
    return StabilityBoundReport(
        c_k_hat=float(c_k_hat),
        c_pred_hat=float(c_pred_hat),
        pearson_r=pearson_r,
        spearman_rho=spearman_rho,
        deltay_means_by_lambda=means,
        deltay_monotone_in_lambda=monotone,
        b2_bound_ok_op=ok_op,
        b2_bound_ok_fro=ok_fro,
    )


# -- filled-simplex separation ---------------------------------------------------


@dataclass(frozen=True)
class SeparationReport:
    rows: list[dict]

    @property
    def all_beta_zero_equal(self) -> bool:
        return all(r["lower_bitwise_equal"] for r in self.rows)

    @property
    def min_relative_difference(self) -> float:
        return min(min(r["rel_frob_full"], r["rel_frob_linear"]) for r in self.rows)


def _separation_pair_row(
    kind: str,
    pair_id: int,
    x: SimplicialComplex,
    x_prime: SimplicialComplex,
) -> dict:
    """Kernel differences for one skeleton-sharing pair of complexes."""
    base = dict(
        depth=2, gamma=0.5, alpha=1.0, beta=1.0, trace_normalize=False,
        normalize_propagator=True,
    )
    relu_cfg = KernelConfig(activation=ActivationKind.RELU, variant=KernelVariant.FULL, **base)
    lin_cfg = KernelConfig(activation=ActivationKind.LINEAR, variant=KernelVariant.FULL, **base)
    lower_cfg = KernelConfig(activation=ActivationKind.RELU, variant=KernelVariant.LOWER, **base)
    k_full = architecture_operator(x, relu_cfg)
    k_full_p = architecture_operator(x_prime, relu_cfg)
    k_lin = architecture_operator(x, lin_cfg)
    k_lin_p = architecture_operator(x_prime, lin_cfg)
    k_low = architecture_operator(x, lower_cfg)
    k_low_p = architecture_operator(x_prime, lower_cfg)
    rel_full = float(np.linalg.norm(k_full - k_full_p) / np.linalg.norm(k_full))
    rel_lin = float(np.linalg.norm(k_lin - k_lin_p) / np.linalg.norm(k_lin))
    pooled_diff = float((k_full - k_full_p).sum())
    scale = abs(float(k_full.sum()))
    return {
        "kind": kind,
        "pair": pair_id,
        "n_triangles_x": x.n_triangles,
        "n_triangles_x_prime": x_prime.n_triangles,
        "rel_frob_full": rel_full,
        "rel_frob_linear": rel_lin,
        "pooled_diff": pooled_diff,
        "pooled_cancelled": int(abs(pooled_diff) <= 1e-12 * max(scale, 1.0)),
        "lower_bitwise_equal": int(np.array_equal(k_low, k_low_p)),
    }


def separation_test(seed: int, n_pairs: int = 50) -> SeparationReport:
    """Witness pair plus random skeleton-sharing pairs with differing triangles.

    For each pair the lower (beta = 0) operators must agree bitwise; full
    operators are compared by relative Frobenius difference and by the
    sum-pooled functional, with pooled cancellations logged rather than
    failed.
    """
    rows = []
    witness_empty = SimplicialComplex(3, ((0, 1), (0, 2), (1, 2)), ())
    witness_full = SimplicialComplex(3, ((0, 1), (0, 2), (1, 2)), ((0, 1, 2),))
    rows.append(_separation_pair_row("witness", 0, witness_empty, witness_full))
    made = 0
    attempt = 0
    while made < n_pairs:
        rng_path = (1, made, attempt)
        x = er_clique_complex(10, 0.6, 0.5, substream(seed, *rng_path, 0))
        x_prime = flip_triangles(x, 0.3, substream(seed, *rng_path, 1))
        attempt += 1
        if set(x.triangles) == set(x_prime.triangles):
            continue
        rows.append(_separation_pair_row("random", made + 1, x, x_prime))
        made += 1
        attempt = 0
    return SeparationReport(rows=rows)
