import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from manigraph import (
    Graph,
    InputError,
    ParseError,
    dirichlet_energy,
    generate,
    knn_graph,
    laplacian,
    load_edge_list,
    load_features_csv,
    save_edge_list,
)
from conftest import random_connected_graph


def edges_of(g):
    ii, jj, _ = g.edge_array()
    return {(int(i), int(j)) for i, j in zip(ii, jj)}


class TestLoadEdgeList:
    def test_path_from_two_lines(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("0 1\n1 2\n")
        g = load_edge_list(p)
        assert g.n == 3
        assert edges_of(g) == {(0, 1), (1, 2)}
        assert np.all(g.weights == 1.0)

    def test_single_weighted_edge(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("0 1 2.5\n")
        g = load_edge_list(p)
        assert g.n == 2
        assert g.num_edges == 1
        assert g.neighbor_weights(0)[0] == 2.5

    def test_self_loop_rejected(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("0 0\n")
        with pytest.raises(ParseError, match="self-loop"):
            load_edge_list(p)

    def test_duplicate_edge_rejected(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("0 1\n1 0 3.0\n")
        with pytest.raises(InputError, match="duplicate"):
            load_edge_list(p)

    def test_parse_error_reports_line(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("0 1\nnot an edge line at all\n")
        with pytest.raises(ParseError) as exc:
            load_edge_list(p)
        assert exc.value.lineno == 2

    def test_nonpositive_weight_rejected(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("0 1 0.0\n")
        with pytest.raises(ParseError, match="non-positive"):
            load_edge_list(p)

    def test_comments_and_blanks_ignored(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("# a comment\n\n0 1\n# another\n1 2 4\n")
        g = load_edge_list(p)
        assert g.num_edges == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError, match="cannot open"):
            load_edge_list(tmp_path / "absent.tsv")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "g.tsv"
        p.write_text("# nothing\n")
        with pytest.raises(InputError, match="no edges"):
            load_edge_list(p)

    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(5)
        g = random_connected_graph(rng, 23, extra=30, weighted=True)
        p = tmp_path / "g.tsv"
        save_edge_list(g, p)
        assert load_edge_list(p) == g


class TestGenerate:
    def test_path5_edges(self):
        g = generate("path", 5)
        assert edges_of(g) == {(0, 1), (1, 2), (2, 3), (3, 4)}

    def test_ring5_is_path_plus_closure(self):
        g = generate("ring", 5)
        assert edges_of(g) == {(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)}

    def test_ring_degrees_all_two(self):
        for n in (3, 4, 9):
            assert np.all(generate("ring", n).degrees() == 2.0)

    def test_path_has_exactly_two_leaves(self):
        for n in (2, 5, 12):
            deg = generate("path", n).degrees()
            assert int(np.sum(deg == 1.0)) == 2

    def test_star_center(self):
        g = generate("star", 4)
        assert g.n == 4
        assert edges_of(g) == {(0, 1), (0, 2), (0, 3)}

    def test_grid(self):
        g = generate("grid", (2, 3))
        assert g.n == 6
        assert g.num_edges == 7

    def test_trimesh_fixture_counts(self):
        g = generate("trimesh", 4)
        assert g.n == 10
        assert g.num_edges == 18
        assert np.all(g.weights == 1.0)

    @pytest.mark.parametrize(
        "kind,size", [("path", 1), ("ring", 2), ("star", 1), ("grid", (1, 3)), ("trimesh", 1)]
    )
    def test_invalid_sizes(self, kind, size):
        with pytest.raises(InputError):
            generate(kind, size)

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            generate("torus", 5)


class TestKnnGraph:
    def test_three_collinear_points_form_path(self):
        X = np.array([[0.0], [1.0], [2.0]])
        g = knn_graph(X, 1, weighted=False)
        assert edges_of(g) == {(0, 1), (1, 2)}

    def test_unit_square_corners_tie_break(self):
        # corners (0,0),(1,0),(0,1),(1,1): each point's two distance-1
        # neighbors tie, the lower index wins, so brute force gives exactly
        # these three undirected edges (one reciprocal pair collapses)
        X = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
        g = knn_graph(X, 1, weighted=False)
        assert edges_of(g) == {(0, 1), (0, 2), (1, 3)}

    def test_full_k_gives_complete_graph(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(7, 3))
        g = knn_graph(X, 6, weighted=False)
        assert g.num_edges == 21

    def test_union_degree_at_least_k(self):
        rng = np.random.default_rng(1)
        for _ in range(5):
            X = rng.normal(size=(30, 2))
            k = int(rng.integers(1, 6))
            g = knn_graph(X, k, weighted=False)
            counts = np.diff(g.indptr)
            assert np.all(counts >= k)

    def test_gaussian_weights_in_unit_interval(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(20, 2))
        g = knn_graph(X, 3, weighted=True)
        assert np.all(g.weights > 0.0)
        assert np.all(g.weights <= 1.0)
        assert not np.all(g.weights == 1.0)

    def test_duplicate_points_get_unit_weight(self):
        X = np.array([[0.0, 0.0], [0.0, 0.0], [5.0, 5.0]])
        g = knn_graph(X, 1, weighted=True)
        w01 = g.neighbor_weights(0)[list(g.neighbors(0)).index(1)]
        assert w01 == 1.0

    def test_k_out_of_range(self):
        X = np.zeros((4, 2))
        for k in (0, 4, 7):
            with pytest.raises(InputError):
                knn_graph(X, k)


class TestLaplacian:
    def test_path3_matrix(self):
        dense = laplacian(generate("path", 3)).to_dense()
        expected = np.array([[1, -1, 0], [-1, 2, -1], [0, -1, 1]], dtype=float)
        assert np.array_equal(dense, expected)

    def test_single_weighted_edge(self):
        g = Graph.from_edges([(0, 1, 2.5)])
        dense = laplacian(g).to_dense()
        assert np.array_equal(dense, np.array([[2.5, -2.5], [-2.5, 2.5]]))

    def test_edgeless_graph_zero_matrix(self):
        g = Graph.from_edges([], n=3)
        assert np.array_equal(laplacian(g).to_dense(), np.zeros((3, 3)))

    def test_row_sums_vanish(self):
        rng = np.random.default_rng(3)
        g = random_connected_graph(rng, 40, extra=60, weighted=True)
        assert np.max(np.abs(laplacian(g).row_sums())) < 1e-12

    def test_disc_left_ends_exactly_zero(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            n = int(rng.integers(5, 60))
            g = random_connected_graph(rng, n, weighted=True)
            left = laplacian(g).disc_left_ends()
            assert np.all(left == 0.0)


class TestDirichletEnergy:
    def test_constant_vector_is_flat(self):
        assert dirichlet_energy(generate("path", 3), np.ones(3)) == 0.0

    def test_path3_ramp(self):
        assert dirichlet_energy(generate("path", 3), np.array([0.0, 1.0, 2.0])) == 2.0

    def test_single_weighted_edge(self):
        g = Graph.from_edges([(0, 1, 2.5)])
        assert dirichlet_energy(g, np.array([0.0, 2.0])) == 10.0

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            dirichlet_energy(generate("path", 3), np.zeros(4))

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(st.integers(min_value=0, max_value=10_000))
    def test_matches_quadratic_form(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 40))
        g = random_connected_graph(rng, n, weighted=True)
        x = rng.normal(size=n)
        direct = dirichlet_energy(g, x)
        quad = float(x @ laplacian(g).matvec(x))
        assert direct == pytest.approx(quad, rel=1e-10, abs=1e-12)


class TestFeaturesCsv:
    def test_plain_and_header(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1.0,2.0\n3.0,4.0\n")
        X = load_features_csv(p)
        assert X.shape == (2, 2)
        p2 = tmp_path / "h.csv"
        p2.write_text("a,b\n1.0,2.0\n3.0,4.0\n")
        assert np.array_equal(load_features_csv(p2, header=True), X)

    def test_too_few_samples(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1.0,2.0\n")
        with pytest.raises(InputError, match="at least 2"):
            load_features_csv(p)

    def test_non_finite_rejected(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("1.0,nan\n3.0,4.0\n")
        with pytest.raises(InputError, match="non-finite"):
            load_features_csv(p)
