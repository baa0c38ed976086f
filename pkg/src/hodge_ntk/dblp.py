"""Temporal simplex streams and the triad-closure benchmark.

Input is the three-file text format used by temporal hypergraph corpora:
a sizes file (one integer per line, the vertex count of each simplex), a
members file (that many vertex ids consumed sequentially, whitespace
separated), and a times file (one integer timestamp per line). The stream
is sorted by time; an early fraction forms the historical complex and the
remainder defines future collaborations.

Candidates are open triads of the historical 1-skeleton: triples whose
three pairwise edges all appear in history while the triple itself is not
contained in any single history simplex of size >= 3. Positives are open
triads contained in some future simplex; negatives appear in neither.
Prediction runs on small ego complexes built around each candidate triad,
compared across edge-level Hodge kernel variants and a node-level graph
kernel baseline.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .complexes import SimplicialComplex, new_complex
from .errors import FormatError, InsufficientCandidates
from .hodge import sym_operator_norm
from .learn import krr_fit, krr_predict
from .ntk import (
    ActivationKind,
    KernelConfig,
    KernelVariant,
    constant_features,
    gram_matrix,
    kernel_recursion,
)
from .rng import substream

Triad = tuple[int, int, int]


@dataclass(frozen=True)
class SimplexStream:
    """Time-sorted simplices with dense 0-based vertex ids."""

    simplices: tuple[tuple[int, ...], ...]
    timestamps: tuple[int, ...]
    n_vertices: int

    def __len__(self) -> int:
        return len(self.simplices)


def _read_int_lines(path) -> list[int]:
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            for token in line.split():
                try:
                    values.append(int(token))
                except ValueError as exc:
                    raise FormatError(
                        f"{path}: line {lineno}: non-integer token {token!r}"
                    ) from exc
    return values


def parse_scholp(nverts_path, simplices_path, times_path) -> SimplexStream:
    """Parse the three-file stream format, reconciling all counts.

    Vertex ids are remapped to a dense 0-based range (sorted by original
    id); simplices are stored as sorted tuples and the stream is stably
    sorted by timestamp, so positional order breaks timestamp ties.
    """
    sizes = _read_int_lines(nverts_path)
    members = _read_int_lines(simplices_path)
    times = _read_int_lines(times_path)
    if len(sizes) != len(times):
        raise FormatError(
            f"size/time mismatch: {nverts_path} has {len(sizes)} entries, "
            f"{times_path} has {len(times)}"
        )
    for i, size in enumerate(sizes, start=1):
        if size < 1:
            raise FormatError(f"{nverts_path}: line {i}: simplex size {size} < 1")
    expected = sum(sizes)
    if expected != len(members):
        raise FormatError(
            f"{simplices_path}: expected {expected} vertex ids "
            f"(sum of sizes), found {len(members)}"
        )
    remap = {v: i for i, v in enumerate(sorted(set(members)))}
    simplices = []
    cursor = 0
    for size in sizes:
        chunk = members[cursor : cursor + size]
        cursor += size
        simplices.append(tuple(sorted(remap[v] for v in chunk)))
    order = sorted(range(len(simplices)), key=lambda i: times[i])
    return SimplexStream(
        simplices=tuple(simplices[i] for i in order),
        timestamps=tuple(times[i] for i in order),
        n_vertices=len(remap),
    )


def serialize_scholp(stream: SimplexStream, nverts_path, simplices_path, times_path) -> None:
    with open(nverts_path, "w", encoding="utf-8") as fh:
        fh.writelines(f"{len(s)}\n" for s in stream.simplices)
    with open(simplices_path, "w", encoding="utf-8") as fh:
        for s in stream.simplices:
            fh.writelines(f"{v}\n" for v in s)
    with open(times_path, "w", encoding="utf-8") as fh:
        fh.writelines(f"{t}\n" for t in stream.timestamps)


def temporal_split(stream: SimplexStream, frac: float = 0.7) -> tuple[SimplexStream, SimplexStream]:
    """First floor(frac * N) simplices become history, the rest future."""
    if not 0.0 <= frac <= 1.0:
        raise ValueError(f"frac must lie in [0, 1], got {frac}")
    cut = int(np.floor(frac * len(stream)))
    history = SimplexStream(stream.simplices[:cut], stream.timestamps[:cut], stream.n_vertices)
    future = SimplexStream(stream.simplices[cut:], stream.timestamps[cut:], stream.n_vertices)
    return history, future


@dataclass(frozen=True)
class MiningCaps:
    max_simplices: int = 50000
    max_simplex_size: int = 10
    n_pos: int = 120
    n_neg: int = 120


@dataclass(frozen=True)
class CandidateTriad:
    nodes: Triad
    label: str  # "positive" | "negative"

    @property
    def positive(self) -> bool:
        return self.label == "positive"


class HistoryIndex:
    """Capped history with the lookup structures mining and egos need."""

    def __init__(self, history: SimplexStream, caps: MiningCaps):
        self.caps = caps
        kept = [s for s in history.simplices if len(s) <= caps.max_simplex_size]
        self.simplices: list[tuple[int, ...]] = kept[: caps.max_simplices]
        self.edge_set: set[tuple[int, int]] = set()
        self.adjacency: dict[int, set[int]] = {}
        self.by_vertex: dict[int, list[int]] = {}
        self.closed_triads: set[Triad] = set()
        for si, s in enumerate(self.simplices):
            for v in s:
                self.by_vertex.setdefault(v, []).append(si)
            for a, b in itertools.combinations(s, 2):
                self.edge_set.add((a, b))
                self.adjacency.setdefault(a, set()).add(b)
                self.adjacency.setdefault(b, set()).add(a)
            if len(s) >= 3:
                self.closed_triads.update(itertools.combinations(s, 3))


def candidate_pools(
    index: HistoryIndex, future: SimplexStream
) -> tuple[list[Triad], list[Triad]]:
    """(positive, negative) open-triad pools, each in deterministic order."""
    future_closed: set[Triad] = set()
    edge_set = index.edge_set
    for s in future.simplices:
        if len(s) < 3:
            continue
        present = [v for v in s if v in index.adjacency]
        for tri in itertools.combinations(present, 3):
            a, b, c = tri
            if (a, b) in edge_set and (a, c) in edge_set and (b, c) in edge_set:
                future_closed.add(tri)
    positives: list[Triad] = []
    negatives: list[Triad] = []
    adjacency = index.adjacency
    for a, b in sorted(edge_set):
        common = adjacency[a] & adjacency[b]
        for c in sorted(common):
            if c <= b:
                continue
            tri = (a, b, c)
            if tri in index.closed_triads:
                continue
            if tri in future_closed:
                positives.append(tri)
            else:
                negatives.append(tri)
    return positives, negatives


def mine_candidates(
    history: SimplexStream | HistoryIndex,
    future: SimplexStream,
    caps: MiningCaps,
    seed: int | np.random.Generator,
    pools: tuple[list[Triad], list[Triad]] | None = None,
) -> list[CandidateTriad]:
    """Uniformly sample n_pos positive and n_neg negative open triads."""
    index = history if isinstance(history, HistoryIndex) else HistoryIndex(history, caps)
    if pools is None:
        pools = candidate_pools(index, future)
    positives, negatives = pools
    if len(positives) < caps.n_pos or len(negatives) < caps.n_neg:
        raise InsufficientCandidates(
            f"requested {caps.n_pos}+/{caps.n_neg}- but only "
            f"{len(positives)}+/{len(negatives)}- are available"
        )
    rng = seed if isinstance(seed, np.random.Generator) else substream(int(seed))
    pos_idx = rng.choice(len(positives), size=caps.n_pos, replace=False)
    neg_idx = rng.choice(len(negatives), size=caps.n_neg, replace=False)
    out = [CandidateTriad(positives[i], "positive") for i in sorted(pos_idx)]
    out += [CandidateTriad(negatives[i], "negative") for i in sorted(neg_idx)]
    return out


@dataclass(frozen=True)
class EgoComplexSample:
    """A candidate triad with its local complex and constant edge features."""

    complex: SimplicialComplex
    features: np.ndarray
    node_map: dict[int, int]  # local id -> global id
    triad_local: Triad
    label: str


def build_ego_complex(
    history: SimplexStream | HistoryIndex,
    triad: CandidateTriad,
    ego_size: int = 10,
    max_group_size: int = 8,
    max_local_triangles: int = 200,
    caps: MiningCaps = MiningCaps(),
) -> EgoComplexSample:
    """Local complex around a triad, deterministic given history and caps.

    Neighbors are ranked by co-occurrence count with triad members (ties by
    global id); edges are the induced historical coauthor edges; triangles
    are 3-subsets of history simplices of size in [3, max_group_size] that
    fall inside the ego, deduplicated and truncated by first occurrence.
    """
    index = history if isinstance(history, HistoryIndex) else HistoryIndex(history, caps)
    triad_nodes = tuple(sorted(triad.nodes))
    counts: Counter[int] = Counter()
    touching: set[int] = set()
    for v in triad_nodes:
        touching.update(index.by_vertex.get(v, ()))
    for si in touching:
        for w in index.simplices[si]:
            if w not in triad_nodes:
                counts[w] += 1
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    nodes = sorted(set(triad_nodes) | {w for w, _ in ranked[: max(ego_size - 3, 0)]})
    local = {g: i for i, g in enumerate(nodes)}
    node_set = set(nodes)
    edges = [
        (local[a], local[b])
        for a, b in index.edge_set
        if a in node_set and b in node_set
    ]
    triangles: list[tuple[int, int, int]] = []
    seen: set[tuple[int, int, int]] = set()
    edge_lookup = set(edges)
    for s in index.simplices:
        if not 3 <= len(s) <= max_group_size:
            continue
        if len(triangles) >= max_local_triangles:
            break
        inside = [v for v in s if v in node_set]
        if len(inside) < 3:
            continue
        for tri in itertools.combinations(inside, 3):
            lt = tuple(sorted(local[v] for v in tri))
            if lt in seen:
                continue
            seen.add(lt)
            faces = ((lt[0], lt[1]), (lt[0], lt[2]), (lt[1], lt[2]))
            if any(f not in edge_lookup for f in faces):
                continue  # faces must come from history
            triangles.append(lt)
            if len(triangles) >= max_local_triangles:
                break
    sc = new_complex(len(nodes), edges, triangles)
    return EgoComplexSample(
        complex=sc,
        features=constant_features(sc),
        node_map={i: g for g, i in local.items()},
        triad_local=tuple(local[v] for v in triad_nodes),
        label=triad.label,
    )


# -- node-level graph kernel baseline -----------------------------------------


def _node_propagator(sc: SimplicialComplex) -> np.ndarray:
    a = np.zeros((sc.n_vertices, sc.n_vertices))
    for i, j in sc.edges:
        a[i, j] = a[j, i] = 1.0
    a_tilde = a + np.eye(sc.n_vertices)
    return a_tilde / sym_operator_norm(a_tilde)


def node_graph_ntk(
    ego: EgoComplexSample,
    depth: int,
    cfg: KernelConfig,
    other: EgoComplexSample | None = None,
) -> float:
    """Pooled node-level graph kernel on ego 1-skeletons.

    Propagation is (A + I) scaled by its spectral norm with constant node
    features; pooling sums over node pairs with 1/sqrt(|V_X| |V_Y|)
    normalization per side. Depends on triangles not at all.
    """
    other = other if other is not None else ego
    p_x = _node_propagator(ego.complex)
    p_y = _node_propagator(other.complex)
    n_x, n_y = p_x.shape[0], p_y.shape[0]
    state = kernel_recursion(
        p_x, p_y,
        np.ones((n_x, n_y)), np.ones((n_x, n_x)), np.ones((n_y, n_y)),
        cfg.activation, depth,
    )
    return float(state.theta_xy.sum()) / np.sqrt(n_x * n_y)


# -- metrics -------------------------------------------------------------------


def average_precision(labels: np.ndarray, scores: np.ndarray) -> float:
    """Step-interpolated average precision with tie-aware thresholds."""
    labels = np.asarray(labels).astype(bool)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.size == 0 or not labels.any():
        return float("nan")
    order = np.argsort(-scores, kind="stable")
    labels = labels[order]
    scores = scores[order]
    tp = np.cumsum(labels)
    fp = np.cumsum(~labels)
    # evaluate only at the last index of each tied-score block
    block_end = np.nonzero(np.append(np.diff(scores) != 0.0, True))[0]
    precision = tp[block_end] / (tp[block_end] + fp[block_end])
    recall = tp[block_end] / tp[-1]
    prev_recall = np.concatenate([[0.0], recall[:-1]])
    return float(np.sum((recall - prev_recall) * precision))


def f1_score(labels: np.ndarray, scores: np.ndarray, threshold: float = 0.0) -> float:
    """F1 with predictions score > threshold; 0 when undefined."""
    labels = np.asarray(labels).astype(bool)
    pred = np.asarray(scores, dtype=np.float64) > threshold
    tp = int(np.sum(pred & labels))
    fp = int(np.sum(pred & ~labels))
    fn = int(np.sum(~pred & labels))
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


# -- benchmark driver ----------------------------------------------------------

DBLP_VARIANTS = (
    KernelVariant.GRAPH,
    KernelVariant.LOWER,
    KernelVariant.UPPER,
    KernelVariant.FULL,
)


@dataclass(frozen=True)
class ClosureConfig:
    depth: int = 2
    lam: float = 1e-3
    runs: int = 5
    split_frac: float = 0.7
    temporal_frac: float = 0.7
    ego_size: int = 10
    max_group_size: int = 8
    max_local_triangles: int = 200
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
        )


@dataclass(frozen=True)
class ClosureResult:
    config: ClosureConfig
    caps: MiningCaps
    seed: int
    records: list[dict]

    def mean_metric(self, variant: str, metric: str) -> float:
        vals = [r[metric] for r in self.records if r["variant"] == variant]
        return float(np.mean(vals))

    def rows(self) -> list[dict]:
        from .tables import mean_and_se

        rows = list(self.records)
        for variant in sorted({r["variant"] for r in self.records}):
            for metric in ("ap", "f1"):
                mean, se = mean_and_se(
                    [r[metric] for r in self.records if r["variant"] == variant]
                )
                rows.append(
                    {
                        "run": "mean",
                        "variant": variant,
                        "metric": metric,
                        "value": mean,
                        "stderr": se,
                    }
                )
        return rows


def run_closure_benchmark(
    stream: SimplexStream,
    caps: MiningCaps,
    cfg: ClosureConfig,
    seed: int,
) -> ClosureResult:
    """Triad-closure prediction over independent candidate-sampling runs.

    Candidate pools are computed once (they are seed-independent); each run
    redraws candidates, rebuilds egos, and evaluates every kernel variant
    with ridge regression on +-1 labels under a random 70/30 split.
    """
    history, future = temporal_split(stream, cfg.temporal_frac)
    index = HistoryIndex(history, caps)
    pools = candidate_pools(index, future)
    records: list[dict] = []
    for run in range(cfg.runs):
        candidates = mine_candidates(index, future, caps, substream(seed, 3, run), pools)
        egos = [
            build_ego_complex(
                index, triad,
                ego_size=cfg.ego_size,
                max_group_size=cfg.max_group_size,
                max_local_triangles=cfg.max_local_triangles,
            )
            for triad in candidates
        ]
        labels = np.array([e.label == "positive" for e in egos])
        y = np.where(labels, 1.0, -1.0)
        n = len(egos)
        perm = substream(seed, 4, run).permutation(n)
        n_train = round(cfg.split_frac * n)
        train, test = perm[:n_train], perm[n_train:]
        for variant in DBLP_VARIANTS:
            kcfg = cfg.kernel_config(variant)
            if variant is KernelVariant.GRAPH:
                gram = np.zeros((n, n))
                for i in range(n):
                    for j in range(i, n):
                        gram[i, j] = gram[j, i] = node_graph_ntk(
                            egos[i], cfg.depth, kcfg, egos[j]
                        )
            else:
                gram = gram_matrix(
                    [e.complex for e in egos], [e.features for e in egos], kcfg
                ).matrix
            model = krr_fit(gram[np.ix_(train, train)], y[train], cfg.lam)
            scores = krr_predict(model, gram[np.ix_(test, train)])
            records.append(
                {
                    "run": run,
                    "variant": variant.value,
                    "ap": average_precision(labels[test], scores),
                    "f1": f1_score(labels[test], scores),
                }
            )
    return ClosureResult(config=cfg, caps=caps, seed=seed, records=records)


def run_closure_from_paths(
    nverts_path, simplices_path, times_path,
    caps: MiningCaps, cfg: ClosureConfig, seed: int,
) -> ClosureResult:
    stream = parse_scholp(nverts_path, simplices_path, times_path)
    return run_closure_benchmark(stream, caps, cfg, seed)


# -- synthetic corpus ----------------------------------------------------------


def synthetic_scholp_stream(
    n_group_communities: int = 40,
    n_pair_communities: int = 40,
    community_size: int = 8,
    seed: int = 0,
) -> SimplexStream:
    """Deterministic demo corpus with a planted higher-order closure signal.

    Group-type communities collaborate in simplices of size 3-5 during the
    history window and close many of their open triads in the future;
    pairwise-type communities publish two-author simplices with a similar
    edge density and never close. The temporal 70/30 split separates the
    windows exactly.
    """
    rng = substream(seed, "synthetic-corpus")
    history: list[tuple[int, ...]] = []
    future: list[tuple[int, ...]] = []
    base = 0
    for _ in range(n_group_communities):
        members = list(range(base, base + community_size))
        base += community_size
        for _ in range(10):
            size = int(rng.integers(3, 6))
            group = sorted(rng.choice(members, size=size, replace=False))
            history.append(tuple(int(v) for v in group))
        closed = {
            tuple(sorted(tri))
            for s in history[-10:]
            for tri in itertools.combinations(s, 3)
        }
        open_candidates = [
            tri
            for tri in itertools.combinations(members, 3)
            if tri not in closed and _pairs_covered(tri, history[-10:])
        ]
        for tri in open_candidates:
            if rng.random() < 0.8:
                future.append(tri)
    for _ in range(n_pair_communities):
        members = list(range(base, base + community_size))
        base += community_size
        for _ in range(25):
            pair = sorted(rng.choice(members, size=2, replace=False))
            history.append(tuple(int(v) for v in pair))
        future.append(tuple(sorted(int(v) for v in rng.choice(members, 2, replace=False))))
    # pad history so the 70/30 boundary lands exactly between the windows
    total_future = len(future)
    needed_history = int(np.ceil(7 * total_future / 3))
    pad_base = base
    while len(history) < needed_history:
        history.append((pad_base, pad_base + 1))
        pad_base += 2
    n_hist = len(history)
    while int(np.floor(0.7 * (n_hist + len(future)))) != n_hist:
        future.append((0, 1))
        if len(future) > 10 * total_future + 10:
            raise RuntimeError("failed to align the synthetic split boundary")
    simplices = history + future
    times = list(range(len(history))) + [len(history) + i for i in range(len(future))]
    members_flat = [v for s in simplices for v in s]
    remap = {v: i for i, v in enumerate(sorted(set(members_flat)))}
    return SimplexStream(
        simplices=tuple(tuple(sorted(remap[v] for v in s)) for s in simplices),
        timestamps=tuple(times),
        n_vertices=len(remap),
    )


def _pairs_covered(tri: Triad, simplices: list[tuple[int, ...]]) -> bool:
    pairs = set(itertools.combinations(tri, 2))
    covered = set()
    for s in simplices:
        covered.update(p for p in itertools.combinations(s, 2) if p in pairs)
    return covered == pairs
