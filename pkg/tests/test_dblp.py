import numpy as np
import pytest

from hodge_ntk.dblp import (
    CandidateTriad,
    ClosureConfig,
    HistoryIndex,
    MiningCaps,
    SimplexStream,
    average_precision,
    build_ego_complex,
    candidate_pools,
    f1_score,
    mine_candidates,
    node_graph_ntk,
    parse_scholp,
    run_closure_benchmark,
    serialize_scholp,
    synthetic_scholp_stream,
    temporal_split,
)
from hodge_ntk.errors import FormatError, InsufficientCandidates
from hodge_ntk.ntk import ActivationKind, KernelConfig, KernelVariant


def write_stream(tmp_path, sizes, members, times):
    paths = tmp_path / "nverts.txt", tmp_path / "simplices.txt", tmp_path / "times.txt"
    paths[0].write_text("".join(f"{s}\n" for s in sizes))
    paths[1].write_text("".join(f"{v}\n" for v in members))
    paths[2].write_text("".join(f"{t}\n" for t in times))
    return paths


class TestParse:
    def test_minimal_fixture(self, tmp_path):
        paths = write_stream(tmp_path, [2, 3], [1, 2, 1, 2, 3], [5, 9])
        stream = parse_scholp(*paths)
        assert len(stream) == 2
        assert stream.simplices == ((0, 1), (0, 1, 2))
        assert stream.timestamps == (5, 9)

    def test_empty_files(self, tmp_path):
        paths = write_stream(tmp_path, [], [], [])
        stream = parse_scholp(*paths)
        assert len(stream) == 0 and stream.n_vertices == 0

    def test_truncated_members(self, tmp_path):
        paths = write_stream(tmp_path, [2, 3], [1, 2, 1], [5, 9])
        with pytest.raises(FormatError, match="expected 5 vertex ids"):
            parse_scholp(*paths)

    def test_size_time_mismatch(self, tmp_path):
        paths = write_stream(tmp_path, [2], [1, 2], [5, 9])
        with pytest.raises(FormatError, match="size/time mismatch"):
            parse_scholp(*paths)

    def test_non_integer_token_names_line(self, tmp_path):
        paths = write_stream(tmp_path, [2], [1, 2], [5])
        paths[1].write_text("1\nx\n")
        with pytest.raises(FormatError, match="line 2"):
            parse_scholp(*paths)

    def test_sorted_by_time_with_stable_ties(self, tmp_path):
        paths = write_stream(tmp_path, [2, 2, 2], [1, 2, 3, 4, 5, 6], [7, 3, 7])
        stream = parse_scholp(*paths)
        assert stream.timestamps == (3, 7, 7)
        assert stream.simplices == ((2, 3), (0, 1), (4, 5))

    def test_round_trip(self, tmp_path):
        stream = synthetic_scholp_stream(n_group_communities=3, n_pair_communities=3, seed=1)
        paths = tmp_path / "nv.txt", tmp_path / "sx.txt", tmp_path / "tm.txt"
        serialize_scholp(stream, *paths)
        assert parse_scholp(*paths) == stream


class TestTemporalSplit:
    def test_seventy_thirty(self):
        stream = SimplexStream(tuple((i, i + 1) for i in range(10)), tuple(range(10)), 11)
        history, future = temporal_split(stream, 0.7)
        assert len(history) == 7 and len(future) == 3

    def test_full_history(self):
        stream = SimplexStream(((0, 1),), (0,), 2)
        history, future = temporal_split(stream, 1.0)
        assert len(history) == 1 and len(future) == 0


def _fixture_streams():
    """Hand-built history/future with exactly known candidate labels.

    History: edges covering triads (0,1,2), (3,4,5), (6,7,8), and a closed
    3-simplex {9,10,11}. Future: {0,1,2} closes (inside a 4-simplex) and
    {3,4,5} closes exactly; (6,7,8) never closes.
    """
    history = SimplexStream(
        simplices=(
            (0, 1), (1, 2), (0, 2),
            (3, 4), (4, 5), (3, 5),
            (6, 7), (7, 8), (6, 8),
            (9, 10, 11),
        ),
        timestamps=tuple(range(10)),
        n_vertices=12,
    )
    future = SimplexStream(
        simplices=((0, 1, 2, 7), (3, 4, 5)),
        timestamps=(100, 101),
        n_vertices=12,
    )
    return history, future


class TestMining:
    def test_fixture_labels_exact(self):
        history, future = _fixture_streams()
        index = HistoryIndex(history, MiningCaps(n_pos=2, n_neg=1))
        pos, neg = candidate_pools(index, future)
        assert set(pos) == {(0, 1, 2), (3, 4, 5)}
        assert set(neg) == {(6, 7, 8)}

    def test_closed_triad_not_candidate(self):
        history, future = _fixture_streams()
        index = HistoryIndex(history, MiningCaps())
        pos, neg = candidate_pools(index, future)
        assert (9, 10, 11) not in set(pos) | set(neg)

    def test_insufficient_candidates(self):
        history, future = _fixture_streams()
        with pytest.raises(InsufficientCandidates, match="available"):
            mine_candidates(history, future, MiningCaps(n_pos=5, n_neg=5), 0)

    def test_labels_reverified_independently(self):
        history, future = _fixture_streams()
        caps = MiningCaps(n_pos=2, n_neg=1)
        candidates = mine_candidates(history, future, caps, 0)
        hist_closed = {
            tri
            for s in history.simplices
            if len(s) >= 3
            for tri in __import__("itertools").combinations(s, 3)
        }
        future_sets = [set(s) for s in future.simplices if len(s) >= 3]
        for c in candidates:
            assert c.nodes not in hist_closed
            in_future = any(set(c.nodes) <= fs for fs in future_sets)
            assert in_future == c.positive

    def test_simplex_size_cap_filters_history(self):
        # a big simplex must contribute neither skeleton edges nor closure
        history = SimplexStream(
            simplices=((0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10),),
            timestamps=(0,),
            n_vertices=11,
        )
        index = HistoryIndex(history, MiningCaps(max_simplex_size=10))
        assert index.edge_set == set() and index.closed_triads == set()

    def test_max_simplices_cap(self):
        history = SimplexStream(
            simplices=tuple((i, i + 1) for i in range(20)),
            timestamps=tuple(range(20)),
            n_vertices=21,
        )
        index = HistoryIndex(history, MiningCaps(max_simplices=5))
        assert len(index.simplices) == 5


class TestEgoComplex:
    def test_bare_triad(self):
        history, future = _fixture_streams()
        index = HistoryIndex(history, MiningCaps())
        ego = build_ego_complex(index, CandidateTriad((6, 7, 8), "negative"))
        assert ego.complex.n_vertices == 3
        assert ego.complex.n_edges == 3
        assert ego.complex.n_triangles == 0
        assert ego.features.shape == (3, 1)

    def test_ego_size_cap(self):
        stream = synthetic_scholp_stream(n_group_communities=4, n_pair_communities=0, seed=2)
        history, future = temporal_split(stream, 0.7)
        index = HistoryIndex(history, MiningCaps(n_pos=3, n_neg=0))
        pos, neg = candidate_pools(index, future)
        for tri in pos[:5]:
            ego = build_ego_complex(index, CandidateTriad(tri, "positive"), ego_size=6)
            assert ego.complex.n_vertices <= 6

    def test_group_size_cap_blocks_triangles(self):
        nine = tuple(range(9))
        history = SimplexStream(simplices=(nine,), timestamps=(0,), n_vertices=9)
        index = HistoryIndex(history, MiningCaps(max_simplex_size=10))
        ego = build_ego_complex(index, CandidateTriad((0, 1, 2), "negative"), max_group_size=8)
        assert ego.complex.n_triangles == 0  # size-9 simplex excluded from triangles
        assert ego.complex.n_edges > 3  # but its pairwise edges stay

    def test_local_triangle_cap(self):
        stream = synthetic_scholp_stream(n_group_communities=4, n_pair_communities=0, seed=3)
        history, future = temporal_split(stream, 0.7)
        index = HistoryIndex(history, MiningCaps())
        pos, _ = candidate_pools(index, future)
        ego = build_ego_complex(index, CandidateTriad(pos[0], "positive"), max_local_triangles=5)
        assert ego.complex.n_triangles <= 5

    def test_deterministic(self):
        history, future = _fixture_streams()
        index = HistoryIndex(history, MiningCaps())
        a = build_ego_complex(index, CandidateTriad((0, 1, 2), "positive"))
        b = build_ego_complex(index, CandidateTriad((0, 1, 2), "positive"))
        assert a.complex == b.complex and a.node_map == b.node_map


class TestNodeGraphKernel:
    def test_isolated_triad_hand_value(self):
        # K3 skeleton: A + I is the all-ones 3x3, spectral norm 3, so the
        # propagator is J/3. Linear depth 1 with constant features gives
        # Theta = 2 J and pooled value 1'(2J)1 / 3 = 6.
        from hodge_ntk.complexes import new_complex
        from hodge_ntk.dblp import EgoComplexSample

        sc = new_complex(3, [(0, 1), (0, 2), (1, 2)])
        ego = EgoComplexSample(sc, np.ones((3, 1)), {i: i for i in range(3)}, (0, 1, 2), "negative")
        cfg = KernelConfig(activation=ActivationKind.LINEAR, depth=1)
        assert np.isclose(node_graph_ntk(ego, 1, cfg), 6.0, atol=1e-12)

    def test_isomorphic_egos_equal(self):
        from hodge_ntk.complexes import new_complex
        from hodge_ntk.dblp import EgoComplexSample

        a = new_complex(4, [(0, 1), (1, 2), (2, 3)])
        b = new_complex(4, [(0, 3), (1, 3), (1, 2)])  # path relabeled
        cfg = KernelConfig(activation=ActivationKind.RELU, depth=2)
        ego_a = EgoComplexSample(a, np.ones((3, 1)), {}, (0, 1, 2), "negative")
        ego_b = EgoComplexSample(b, np.ones((3, 1)), {}, (0, 1, 2), "negative")
        va = node_graph_ntk(ego_a, 2, cfg)
        vb = node_graph_ntk(ego_b, 2, cfg)
        assert np.isclose(va, vb, rtol=1e-12)

    def test_triangle_blind(self):
        from hodge_ntk.complexes import flip_triangles, er_clique_complex
        from hodge_ntk.dblp import EgoComplexSample

        sc = er_clique_complex(7, 0.7, 0.5, 0)
        flipped = flip_triangles(sc, 0.6, 1)
        cfg = KernelConfig(activation=ActivationKind.RELU, depth=2)
        ego_a = EgoComplexSample(sc, np.ones((sc.n_edges, 1)), {}, (0, 1, 2), "negative")
        ego_b = EgoComplexSample(flipped, np.ones((sc.n_edges, 1)), {}, (0, 1, 2), "negative")
        assert node_graph_ntk(ego_a, 2, cfg) == node_graph_ntk(ego_b, 2, cfg)


class TestMetrics:
    def test_average_precision_hand_values(self):
        labels = np.array([1, 0, 1, 0])
        scores = np.array([0.9, 0.8, 0.7, 0.1])
        # precision at the two positives: 1/1 and 2/3
        assert np.isclose(average_precision(labels, scores), (1.0 + 2 / 3) / 2)

    def test_average_precision_all_ties_is_base_rate(self):
        labels = np.array([1, 0, 1, 0, 1, 0])
        scores = np.zeros(6)
        assert np.isclose(average_precision(labels, scores), 0.5)

    def test_perfect_ranking(self):
        labels = np.array([1, 1, 0, 0])
        scores = np.array([2.0, 1.5, 0.5, 0.1])
        assert average_precision(labels, scores) == 1.0

    def test_f1_threshold_zero(self):
        labels = np.array([1, 1, 0, 0])
        scores = np.array([0.2, -0.1, 0.3, -0.4])
        # predictions: [1, 0, 1, 0] -> tp=1, fp=1, fn=1
        assert np.isclose(f1_score(labels, scores), 2 * 1 / (2 * 1 + 1 + 1))

    def test_f1_degenerate(self):
        assert f1_score(np.array([0, 0]), np.array([-1.0, -2.0])) == 0.0


@pytest.fixture(scope="module")
def small_closure_result():
    stream = synthetic_scholp_stream(n_group_communities=12, n_pair_communities=12, seed=0)
    caps = MiningCaps(n_pos=30, n_neg=30)
    cfg = ClosureConfig(runs=2)
    return run_closure_benchmark(stream, caps, cfg, seed=0)


class TestClosureBenchmark:
    def test_schema_and_determinism(self, small_closure_result):
        assert {r["variant"] for r in small_closure_result.records} == {"graph", "lower", "upper", "full"}
        assert len(small_closure_result.records) == 8  # 2 runs x 4 variants
        for r in small_closure_result.records:
            assert 0.0 <= r["ap"] <= 1.0 and 0.0 <= r["f1"] <= 1.0

    def test_upper_signal_present(self, small_closure_result):
        assert max(
            small_closure_result.mean_metric("upper", "ap"),
            small_closure_result.mean_metric("full", "ap"),
        ) > 0.5

    def test_separable_fixture_perfect_ap(self):
        # positives = triangle-rich egos, negatives = pairwise-only egos
        stream = synthetic_scholp_stream(n_group_communities=10, n_pair_communities=10, seed=4)
        history, future = temporal_split(stream, 0.7)
        index = HistoryIndex(history, MiningCaps())
        pos, neg = candidate_pools(index, future)
        neg_pairwise = [t for t in neg if build_ego_complex(index, CandidateTriad(t, "negative")).complex.n_triangles == 0]
        egos = [build_ego_complex(index, CandidateTriad(t, "positive")) for t in pos[:15]]
        egos += [build_ego_complex(index, CandidateTriad(t, "negative")) for t in neg_pairwise[:15]]
        labels = np.array([e.label == "positive" for e in egos])
        scores = np.array([
            node_upper_score(e) for e in egos
        ])
        assert average_precision(labels, scores) == 1.0


def node_upper_score(ego):
    """Pooled self-kernel of the upper variant, a pure triangle detector."""
    from hodge_ntk.ntk import ntk_pair, pooled_kernel

    cfg = KernelConfig(activation=ActivationKind.RELU, depth=2, variant=KernelVariant.UPPER)
    state = ntk_pair(ego.complex, ego.complex, ego.features, ego.features, cfg)
    return pooled_kernel(state, cfg)
