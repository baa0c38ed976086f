"""Command-line interface.

Every experiment command writes a CSV results table, a JSON run manifest
(command, resolved config, seed, version, outputs, wall-clock duration),
and a PNG figure rendered from the same rows. Flag defaults reproduce the
reference experiment settings, flags override config-file keys, and a
``--config file.json`` provides declarative configuration with keys that
mirror the flag names.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .complexes import (
    cycle_chord_skeleton,
    er_clique_complex,
    fill_candidates,
    load_complex,
    save_complex,
)
from .dblp import (
    ClosureConfig,
    MiningCaps,
    parse_scholp,
    run_closure_benchmark,
    synthetic_scholp_stream,
)
from .errors import HodgeNtkError
from .experiments import (
    HodgeRecoveryConfig,
    SpectralConfig,
    StabilityConfig,
    TriangleCountConfig,
    run_hodge_recovery,
    run_spectral_diagnostic,
    run_stability,
    run_triangle_count,
    separation_test,
    theorem2_bound_check,
)
from .ntk import (
    ActivationKind,
    KernelConfig,
    KernelVariant,
    architecture_operator,
    constant_features,
    edge_labels,
    finite_width_ntk,
    ntk_pair,
    save_kernel_csv,
)
from .tables import write_rows

OUTDIR_ENV = "HODGE_NTK_OUTDIR"


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _resolve(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults <- config file <- explicitly passed flags."""
    merged = dict(defaults)
    config_path = getattr(args, "config", None)
    if config_path:
        with open(config_path, "r", encoding="utf-8") as fh:
            file_conf = json.load(fh)
        unknown = set(file_conf) - set(defaults)
        if unknown:
            raise HodgeNtkError(f"unknown config keys: {sorted(unknown)}")
        merged.update(file_conf)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _out_dir(args) -> str:
    out = args.out_dir or os.environ.get(OUTDIR_ENV) or "."
    os.makedirs(out, exist_ok=True)
    return out


def _apply_thread_cap(threads: int | None):
    if threads is None:
        return None
    try:
        import threadpoolctl

        return threadpoolctl.threadpool_limits(limits=int(threads))
    except ImportError:
        print("warning: threadpoolctl unavailable, --threads ignored", file=sys.stderr)
        return None


def _write_manifest(out_dir, name, conf, seed, outputs, started) -> str:
    manifest = {
        "command": name,
        "version": __version__,
        "seed": seed,
        "config": conf,
        "outputs": sorted(outputs),
        "duration_seconds": round(time.monotonic() - started, 3),
    }
    path = os.path.join(out_dir, f"{name}.manifest.json")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def _emit(out_dir, name, rows, fieldnames, figure, conf, seed, started, extra=()):
    csv_path = os.path.join(out_dir, f"{name}.csv")
    write_rows(csv_path, rows, fieldnames)
    outputs = [csv_path, *extra]
    if figure is not None:
        from .plots import save_figure

        fig_path = os.path.join(out_dir, f"{name}.png")
        save_figure(figure, fig_path)
        outputs.append(fig_path)
    outputs.append(_write_manifest(out_dir, name, conf, seed, outputs, started))
    print(f"wrote {', '.join(outputs)}")
    return 0


def _add_common(sub, defaults):
    sub.add_argument("--seed", type=int, default=None,
                     help=f"master seed (default {defaults.get('seed', 0)})")
    sub.add_argument("--config", type=str, default=None,
                     help="JSON config file; keys mirror the flag names")
    sub.add_argument("--out-dir", type=str, default=None,
                     help=f"output directory (default ${OUTDIR_ENV} or '.')")
    sub.add_argument("--threads", type=int, default=None,
                     help="cap numerical thread pools (default: all cores)")
    sub.add_argument("--no-figures", action="store_true",
                     help="skip PNG rendering, keep CSV + manifest")


TRIANGLE_DEFAULTS = {
    "seed": 0, "n": 30, "densities": (0.0, 0.3, 0.5, 0.7, 1.0),
    "samples_per_density": 200, "repetitions": 5, "train_frac": 0.7,
    "lam": 1e-4, "depth": 2, "gamma": 0.5, "alpha": 1.0, "beta": 1.0,
    "center_targets": True,
}


def cmd_triangle_count(args) -> int:
    started = time.monotonic()
    conf = _resolve(args, TRIANGLE_DEFAULTS)
    cfg = TriangleCountConfig(
        n=conf["n"], densities=tuple(conf["densities"]),
        samples_per_density=conf["samples_per_density"],
        repetitions=conf["repetitions"], train_frac=conf["train_frac"],
        lam=conf["lam"], depth=conf["depth"], gamma=conf["gamma"],
        alpha=conf["alpha"], beta=conf["beta"],
        center_targets=bool(conf["center_targets"]),
    )
    result = run_triangle_count(cfg, conf["seed"])
    rows = result.rows()
    fig = None
    if not args.no_figures:
        from .plots import plot_triangle_count

        fig = plot_triangle_count(rows)
    return _emit(_out_dir(args), "triangle_count", rows,
                 ["n", "samples_per_density", "repetitions", "lam", "depth",
                  "seed", "q", "variant", "metric", "value", "stderr"],
                 fig, conf, conf["seed"], started)


RECOVERY_DEFAULTS = {
    "seed": 0, "n": 20, "p": 0.35, "q": 0.4, "n_train": 120, "n_test": 60,
    "seeds": 5, "lam": 1e-3, "depth": 2, "gamma": 0.5, "alpha": 1.0, "beta": 1.0,
}


def cmd_hodge_recovery(args) -> int:
    started = time.monotonic()
    conf = _resolve(args, RECOVERY_DEFAULTS)
    cfg = HodgeRecoveryConfig(
        n=conf["n"], p=conf["p"], q=conf["q"], n_train=conf["n_train"],
        n_test=conf["n_test"], seeds=conf["seeds"], lam=conf["lam"],
        depth=conf["depth"], gamma=conf["gamma"], alpha=conf["alpha"],
        beta=conf["beta"],
    )
    result = run_hodge_recovery(cfg, conf["seed"])
    rows = result.rows()
    fig = None
    if not args.no_figures:
        from .plots import plot_hodge_recovery

        fig = plot_hodge_recovery(rows)
    return _emit(_out_dir(args), "hodge_recovery", rows,
                 ["n", "p", "q", "n_train", "n_test", "seeds", "lam", "depth",
                  "seed", "variant", "component", "metric", "value", "stderr"],
                 fig, conf, conf["seed"], started)


SPECTRAL_DEFAULTS = {
    "seed": 0, "n": 30, "p": 0.35, "q": 0.4,
    "t_grid": (0.25, 0.5, 1.0, 2.0, 4.0), "depth": 2,
    "gamma": 0.5, "alpha": 1.0, "beta": 1.0,
}


def cmd_spectral(args) -> int:
    started = time.monotonic()
    conf = _resolve(args, SPECTRAL_DEFAULTS)
    cfg = SpectralConfig(
        n=conf["n"], p=conf["p"], q=conf["q"], t_grid=tuple(conf["t_grid"]),
        depth=conf["depth"], gamma=conf["gamma"], alpha=conf["alpha"],
        beta=conf["beta"],
    )
    result = run_spectral_diagnostic(cfg, conf["seed"])
    print(
        f"harmonic median eigenvalue {result.harmonic_median:.6g} vs "
        f"global median {result.global_median:.6g}"
    )
    fig = None
    if not args.no_figures:
        from .plots import plot_spectral

        fig = plot_spectral(result.mode_rows)
    return _emit(_out_dir(args), "spectral", result.mode_rows,
                 ["n", "p", "q", "seed", "index", "eigenvalue", "label",
                  "e_exact", "e_harmonic", "e_coexact", "decay_residual"],
                 fig, conf, conf["seed"], started)


STABILITY_DEFAULTS = {
    "seed": 0, "n": 30, "p": 0.35, "q": 0.4,
    "eps_grid": (0.0, 0.05, 0.1, 0.15, 0.2, 0.3),
    "lambdas": (1e-4, 1e-3, 1e-2, 1e-1),
    "perturbations_per_run": 3, "runs": 5, "depth": 2,
    "gamma": 0.5, "alpha": 1.0, "beta": 1.0,
}


def cmd_stability(args) -> int:
    started = time.monotonic()
    conf = _resolve(args, STABILITY_DEFAULTS)
    cfg = StabilityConfig(
        n=conf["n"], p=conf["p"], q=conf["q"], eps_grid=tuple(conf["eps_grid"]),
        lambdas=tuple(conf["lambdas"]),
        perturbations_per_run=conf["perturbations_per_run"], runs=conf["runs"],
        depth=conf["depth"], gamma=conf["gamma"], alpha=conf["alpha"],
        beta=conf["beta"],
    )
    records = run_stability(cfg, conf["seed"])
    report = theorem2_bound_check(records)
    out_dir = _out_dir(args)
    summary_path = os.path.join(out_dir, "stability_summary.csv")
    write_rows(summary_path, report.rows(), ["metric", "value"])
    record_rows = [r.as_dict() for r in records]
    fig = None
    if not args.no_figures:
        from .plots import plot_stability

        fig = plot_stability(record_rows)
    print(
        f"pearson r = {report.pearson_r:.4f}, spearman = {report.spearman_rho:.4f}, "
        f"C_K^ = {report.c_k_hat:.4g}, C_pred^ = {report.c_pred_hat:.4g}"
    )
    return _emit(out_dir, "stability", record_rows,
                 list(record_rows[0].keys()), fig, conf, conf["seed"], started,
                 extra=[summary_path])


SEPARATION_DEFAULTS = {"seed": 0, "n_pairs": 50}


def cmd_separation(args) -> int:
    started = time.monotonic()
    conf = _resolve(args, SEPARATION_DEFAULTS)
    report = separation_test(conf["seed"], n_pairs=conf["n_pairs"])
    fig = None
    if not args.no_figures:
        from .plots import plot_separation

        fig = plot_separation(report.rows)
    print(
        f"{len(report.rows)} pairs, min relative kernel difference "
        f"{report.min_relative_difference:.3e}, beta=0 equal: {report.all_beta_zero_equal}"
    )
    return _emit(_out_dir(args), "separation", report.rows,
                 list(report.rows[0].keys()), fig, conf, conf["seed"], started)


FINITE_WIDTH_DEFAULTS = {
    "seed": 0, "widths": (256, 1024, 4096), "n_nets": 32,
    "gamma": 0.5, "alpha": 1.0, "beta": 1.0,
}


def cmd_finite_width_check(args) -> int:
    started = time.monotonic()
    conf = _resolve(args, FINITE_WIDTH_DEFAULTS)
    triangle = er_clique_complex(3, 1.0, 1.0, 0)  # the filled-triangle fixture
    feats = constant_features(triangle)
    rows = []
    for activation, depth in ((ActivationKind.LINEAR, 1), (ActivationKind.RELU, 2)):
        cfg = KernelConfig(
            depth=depth, gamma=conf["gamma"], alpha=conf["alpha"], beta=conf["beta"],
            activation=activation, variant=KernelVariant.FULL, trace_normalize=False,
        )
        analytic = ntk_pair(triangle, triangle, feats, feats, cfg).theta_xy
        for width in conf["widths"]:
            empirical = finite_width_ntk(
                triangle, feats, cfg, int(width), conf["n_nets"], conf["seed"]
            )
            rel = float(np.linalg.norm(empirical - analytic) / np.linalg.norm(analytic))
            rows.append(
                {
                    "activation": activation.value, "depth": depth,
                    "width": int(width), "n_nets": conf["n_nets"],
                    "seed": conf["seed"], "rel_error": rel,
                }
            )
            print(f"{activation.value} depth {depth} width {width}: rel error {rel:.4f}")
    fig = None
    if not args.no_figures:
        from .plots import plot_finite_width

        fig = plot_finite_width(rows)
    return _emit(_out_dir(args), "finite_width", rows,
                 ["activation", "depth", "width", "n_nets", "seed", "rel_error"],
                 fig, conf, conf["seed"], started)


DBLP_DEFAULTS = {
    "seed": 0, "max_simplices": 50000, "max_simplex_size": 10,
    "n_pos": 120, "n_neg": 120, "depth": 2, "lam": 1e-3, "runs": 5,
    "split_frac": 0.7, "temporal_frac": 0.7, "ego_size": 10,
    "max_group_size": 8, "max_local_triangles": 200,
    "gamma": 0.5, "alpha": 1.0, "beta": 1.0,
}


def cmd_dblp(args) -> int:
    started = time.monotonic()
    conf = _resolve(args, DBLP_DEFAULTS)
    if args.synthetic:
        stream = synthetic_scholp_stream(seed=conf["seed"])
    else:
        paths = (args.nverts, args.simplices, args.times)
        if any(p is None for p in paths):
            print("error: --nverts, --simplices, and --times are required "
                  "(or pass --synthetic)", file=sys.stderr)
            return 2
        for p in paths:
            if not os.path.exists(p):
                print(f"error: corpus file not found: {p}", file=sys.stderr)
                return 2
        stream = parse_scholp(*paths)
    caps = MiningCaps(
        max_simplices=conf["max_simplices"], max_simplex_size=conf["max_simplex_size"],
        n_pos=conf["n_pos"], n_neg=conf["n_neg"],
    )
    cfg = ClosureConfig(
        depth=conf["depth"], lam=conf["lam"], runs=conf["runs"],
        split_frac=conf["split_frac"], temporal_frac=conf["temporal_frac"],
        ego_size=conf["ego_size"], max_group_size=conf["max_group_size"],
        max_local_triangles=conf["max_local_triangles"],
        gamma=conf["gamma"], alpha=conf["alpha"], beta=conf["beta"],
    )
    result = run_closure_benchmark(stream, caps, cfg, conf["seed"])
    rows = result.rows()
    for variant in ("graph", "lower", "upper", "full"):
        print(f"{variant}: AP {result.mean_metric(variant, 'ap'):.4f}, "
              f"F1 {result.mean_metric(variant, 'f1'):.4f}")
    fig = None
    if not args.no_figures:
        from .plots import plot_closure

        fig = plot_closure(rows)
    return _emit(_out_dir(args), "dblp_closure", rows,
                 ["run", "variant", "ap", "f1", "metric", "value", "stderr"],
                 fig, conf, conf["seed"], started)


GEN_DEFAULTS = {"seed": 0, "kind": "er-clique", "n": 20, "p": 0.35, "q": 0.4}


def cmd_gen_complex(args) -> int:
    conf = _resolve(args, GEN_DEFAULTS)
    if conf["kind"] == "er-clique":
        sc = er_clique_complex(conf["n"], conf["p"], conf["q"], conf["seed"])
    elif conf["kind"] == "cycle-chord":
        skeleton, candidates = cycle_chord_skeleton(conf["n"])
        sc = fill_candidates(skeleton, candidates, conf["q"], conf["seed"])
    else:
        print(f"error: unknown kind {conf['kind']!r}", file=sys.stderr)
        return 2
    save_complex(sc, args.output)
    print(f"wrote {args.output} (|V|={sc.n_vertices}, |E|={sc.n_edges}, |T|={sc.n_triangles})")
    return 0


KERNEL_DEFAULTS = {
    "seed": 0, "variant": "full", "depth": 2, "gamma": 0.5, "alpha": 1.0,
    "beta": 1.0, "activation": "relu",
}


def cmd_kernel(args) -> int:
    conf = _resolve(args, KERNEL_DEFAULTS)
    sc = load_complex(args.complex)
    cfg = KernelConfig(
        depth=conf["depth"], gamma=conf["gamma"], alpha=conf["alpha"],
        beta=conf["beta"], activation=ActivationKind(conf["activation"]),
        variant=KernelVariant(conf["variant"]),
    )
    k = architecture_operator(sc, cfg)
    save_kernel_csv(k, args.output, edge_labels(sc))
    print(f"wrote {args.output} ({k.shape[0]} x {k.shape[1]})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hodge-ntk",
        description="Hodge-Laplacian tangent kernels on simplicial complexes: "
                    "experiments, diagnostics, and fixtures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("triangle-count", help="regress filled-triangle counts per density")
    _add_common(p, TRIANGLE_DEFAULTS)
    p.add_argument("--n", type=int, help="cycle-chord skeleton size (default 30)")
    p.add_argument("--densities", type=_floats, help="comma list of q values (default 0,0.3,0.5,0.7,1)")
    p.add_argument("--samples-per-density", type=int, dest="samples_per_density",
                   help="samples per density (default 200)")
    p.add_argument("--repetitions", type=int, help="repetitions per density (default 5)")
    p.add_argument("--train-frac", type=float, dest="train_frac", help="train fraction (default 0.7)")
    p.add_argument("--lam", type=float, help="ridge parameter (default 1e-4)")
    p.add_argument("--depth", type=int, help="recursion depth (default 2)")
    p.add_argument("--gamma", type=float), p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--no-center-targets", dest="center_targets", action="store_false",
                   default=None, help="disable centering targets by the train mean")
    p.set_defaults(func=cmd_triangle_count)

    p = sub.add_parser("hodge-recovery", help="recover Hodge components of edge signals")
    _add_common(p, RECOVERY_DEFAULTS)
    for flag, typ in (("--n", int), ("--p", float), ("--q", float), ("--n-train", int),
                      ("--n-test", int), ("--seeds", int), ("--lam", float),
                      ("--depth", int), ("--gamma", float), ("--alpha", float),
                      ("--beta", float)):
        p.add_argument(flag, type=typ, dest=flag.lstrip("-").replace("-", "_"))
    p.set_defaults(func=cmd_hodge_recovery)

    p = sub.add_parser("spectral", help="eigen-diagnostic with Hodge labels and decay check")
    _add_common(p, SPECTRAL_DEFAULTS)
    for flag, typ in (("--n", int), ("--p", float), ("--q", float), ("--depth", int),
                      ("--gamma", float), ("--alpha", float), ("--beta", float)):
        p.add_argument(flag, type=typ, dest=flag.lstrip("-").replace("-", "_"))
    p.add_argument("--t-grid", type=_floats, dest="t_grid",
                   help="comma list of flow times (default 0.25,0.5,1,2,4)")
    p.set_defaults(func=cmd_spectral)

    p = sub.add_parser("stability", help="kernel/prediction stability under triangle flips")
    _add_common(p, STABILITY_DEFAULTS)
    for flag, typ in (("--n", int), ("--p", float), ("--q", float), ("--runs", int),
                      ("--depth", int), ("--gamma", float), ("--alpha", float),
                      ("--beta", float),
                      ("--perturbations-per-run", int)):
        p.add_argument(flag, type=typ, dest=flag.lstrip("-").replace("-", "_"))
    p.add_argument("--eps-grid", type=_floats, dest="eps_grid",
                   help="comma list of flip probabilities")
    p.add_argument("--lambdas", type=_floats, help="comma list of ridge parameters")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("separation", help="filled-simplex sensitivity sweep")
    _add_common(p, SEPARATION_DEFAULTS)
    p.add_argument("--n-pairs", type=int, dest="n_pairs",
                   help="random skeleton-sharing pairs to generate (default 50)")
    p.set_defaults(func=cmd_separation)

    p = sub.add_parser("finite-width-check",
                       help="finite-width Monte Carlo kernels vs the analytic recursion")
    _add_common(p, FINITE_WIDTH_DEFAULTS)
    p.add_argument("--widths", type=_ints, help="comma list of widths (default 256,1024,4096)")
    p.add_argument("--n-nets", type=int, dest="n_nets", help="networks per width (default 32)")
    p.add_argument("--gamma", type=float), p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.set_defaults(func=cmd_finite_width_check)

    p = sub.add_parser("dblp", help="triad-closure prediction on a temporal simplex corpus")
    _add_common(p, DBLP_DEFAULTS)
    p.add_argument("--nverts", type=str, help="simplex-sizes file")
    p.add_argument("--simplices", type=str, help="simplex-members file")
    p.add_argument("--times", type=str, help="timestamps file")
    p.add_argument("--synthetic", action="store_true",
                   help="use the bundled synthetic corpus instead of files")
    for flag, typ in (("--max-simplices", int), ("--max-simplex-size", int),
                      ("--n-pos", int), ("--n-neg", int), ("--depth", int),
                      ("--lam", float), ("--runs", int), ("--split-frac", float),
                      ("--temporal-frac", float), ("--ego-size", int),
                      ("--max-group-size", int), ("--max-local-triangles", int),
                      ("--gamma", float), ("--alpha", float), ("--beta", float)):
        p.add_argument(flag, type=typ, dest=flag.lstrip("-").replace("-", "_"))
    p.set_defaults(func=cmd_dblp)

    p = sub.add_parser("gen-complex", help="generate a complex fixture file")
    _add_common(p, GEN_DEFAULTS)
    p.add_argument("--kind", choices=["er-clique", "cycle-chord"], default=None)
    p.add_argument("--n", type=int), p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen_complex)

    p = sub.add_parser("kernel", help="architecture-operator CSV for a complex file")
    _add_common(p, KERNEL_DEFAULTS)
    p.add_argument("--complex", required=True, help="complex fixture file")
    p.add_argument("--variant", choices=[v.value for v in KernelVariant], default=None)
    p.add_argument("--depth", type=int), p.add_argument("--gamma", type=float)
    p.add_argument("--alpha", type=float), p.add_argument("--beta", type=float)
    p.add_argument("--activation", choices=["relu", "linear"], default=None)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_kernel)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    limit = _apply_thread_cap(getattr(args, "threads", None))
    try:
        return args.func(args)
    except HodgeNtkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 2
    finally:
        if limit is not None:
            limit.unregister()


if __name__ == "__main__":
    sys.exit(main())
