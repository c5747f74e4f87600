import numpy as np
import pytest

from manigraph import (
    DisconnectedGraphError,
    Graph,
    InputError,
    SparseSymMatrix,
    assemble_operator,
    build_operator_pair,
    degree_balancing,
    dirichlet_energy,
    generate,
    identity_shift,
    laplacian,
    repulsion_weight,
    two_hop_laplacian,
    two_hop_sets,
)
from conftest import random_connected_graph


def complete_graph(n):
    return Graph.from_edges([(i, j) for i in range(n) for j in range(i + 1, n)], n=n)


class TestTwoHopSets:
    def test_path5(self):
        t = two_hop_sets(generate("path", 5))
        expected = [[2], [3], [0, 4], [1], [2]]
        assert [list(t.neighbors(i)) for i in range(5)] == expected

    def test_complete_graph_empty(self):
        t = two_hop_sets(complete_graph(5))
        assert t.indices.size == 0

    def test_star4_leaves_see_each_other(self):
        t = two_hop_sets(generate("star", 4))
        assert list(t.neighbors(0)) == []
        assert list(t.neighbors(1)) == [2, 3]
        assert list(t.neighbors(2)) == [1, 3]
        assert list(t.neighbors(3)) == [1, 2]

    def test_symmetry_and_disjointness(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            g = random_connected_graph(rng, int(rng.integers(5, 40)))
            t = two_hop_sets(g)
            sets = [set(map(int, t.neighbors(i))) for i in range(g.n)]
            for i in range(g.n):
                hop1 = set(map(int, g.neighbors(i)))
                assert i not in sets[i]
                assert not (sets[i] & hop1)
                for j in sets[i]:
                    assert i in sets[j]


class TestTwoHopLaplacian:
    def test_path5_values(self):
        q = two_hop_laplacian(two_hop_sets(generate("path", 5)))
        dense = q.to_dense()
        assert np.allclose(np.diag(dense), [1.5, 2.0, 3.0, 2.0, 1.5])
        assert dense[0, 2] == pytest.approx(-1.5)
        assert dense[1, 3] == pytest.approx(-2.0)
        assert dense[2, 4] == pytest.approx(-1.5)
        assert np.max(np.abs(q.row_sums())) < 1e-12

    def test_complete_graph_zero(self):
        q = two_hop_laplacian(two_hop_sets(complete_graph(4)))
        assert q.nnz == 0

    def test_star4_triangle_of_leaves(self):
        q = two_hop_laplacian(two_hop_sets(generate("star", 4)))
        dense = q.to_dense()
        assert np.allclose(np.diag(dense), [0.0, 2.0, 2.0, 2.0])
        for i, j in [(1, 2), (1, 3), (2, 3)]:
            assert dense[i, j] == pytest.approx(-1.0)

    def test_literal_diagonal_variant(self):
        t = two_hop_sets(generate("path", 5))
        lit = two_hop_laplacian(t, literal_diagonal=True).to_dense()
        lap = two_hop_laplacian(t).to_dense()
        counts = np.array([1, 1, 2, 1, 1], dtype=float)
        assert np.allclose(np.diag(lit) - np.diag(lap), 1.0 / counts - 1.0)
        off = ~np.eye(5, dtype=bool)
        assert np.array_equal(lit[off], lap[off])

    def test_psd_and_zero_row_sums_on_random_graphs(self):
        rng = np.random.default_rng(1)
        for _ in range(15):
            n = int(rng.integers(5, 200))
            g = random_connected_graph(rng, n, weighted=True)
            q = two_hop_laplacian(two_hop_sets(g))
            assert np.max(np.abs(q.row_sums())) < 1e-10
            if n <= 150:
                w = np.linalg.eigvalsh(q.to_dense())
                assert w[0] >= -1e-9 * max(q.trace() / n, 1.0)


class TestIdentityShift:
    def test_zero_matrix(self):
        q = two_hop_laplacian(two_hop_sets(complete_graph(4)))
        assert identity_shift(q) == 0.0

    def test_path5_smallest_positive(self):
        q = two_hop_laplacian(two_hop_sets(generate("path", 5)))
        assert identity_shift(q) == pytest.approx(1.5, rel=1e-12)

    def test_single_weighted_edge(self):
        omega = 0.7
        q = SparseSymMatrix.from_coo(
            2, [0, 0, 1, 1], [0, 1, 0, 1], [omega, -omega, -omega, omega]
        )
        assert identity_shift(q) == pytest.approx(2 * omega, rel=1e-12)

    def test_asymmetric_rejected(self):
        q = SparseSymMatrix.from_coo(2, [0], [1], [1.0])
        with pytest.raises(InputError):
            identity_shift(q)


class TestRepulsionWeight:
    def test_path5_value(self):
        g = generate("path", 5)
        l = laplacian(g)
        q = two_hop_laplacian(two_hop_sets(g))
        mu = repulsion_weight(l, q, 1.5)
        assert mu == pytest.approx(0.25, rel=1e-12)
        # row-wise critical weights
        diag = q.diagonal()
        crit = 1.5 / (2.0 * diag)
        assert np.allclose(crit, [0.5, 0.375, 0.25, 0.375, 0.5])

    def test_zero_repulsion_matrix(self):
        g = complete_graph(4)
        q = two_hop_laplacian(two_hop_sets(g))
        assert repulsion_weight(laplacian(g), q, 2.0) == 0.0

    def test_zero_shift_gives_zero_weight(self):
        g = generate("path", 5)
        q = two_hop_laplacian(two_hop_sets(g))
        assert repulsion_weight(laplacian(g), q, 0.0) == 0.0

    def test_negative_shift_rejected(self):
        g = generate("path", 5)
        q = two_hop_laplacian(two_hop_sets(g))
        with pytest.raises(InputError):
            repulsion_weight(laplacian(g), q, -1.0)


class TestAssembleOperator:
    def test_zero_weights_reduce_to_laplacian(self):
        g = generate("path", 4)
        l = laplacian(g)
        q = two_hop_laplacian(two_hop_sets(g))
        a = assemble_operator(l, q, 0.0, 0.0)
        assert np.array_equal(a.to_dense(), l.to_dense())

    def test_pure_shift_is_scaled_identity(self):
        z = SparseSymMatrix.zeros(3)
        a = assemble_operator(z, z, 0.0, 2.0)
        assert np.array_equal(a.to_dense(), 2.0 * np.eye(3))

    def test_path5_binding_row(self):
        g = generate("path", 5)
        l = laplacian(g)
        q = two_hop_laplacian(two_hop_sets(g))
        a = assemble_operator(l, q, 0.25, 1.5)
        left = a.disc_left_ends()
        assert np.all(left >= 0.0)
        assert abs(left[2]) <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(InputError):
            assemble_operator(SparseSymMatrix.zeros(3), SparseSymMatrix.zeros(4), 0.0, 0.0)


class TestDegreeBalancing:
    def test_equal_radii_give_ones(self):
        g = generate("ring", 6)
        pair = build_operator_pair(g)
        assert np.allclose(pair.B.b, 1.0, atol=1e-12)

    def test_two_row_example(self):
        a = SparseSymMatrix.from_coo(
            2, [0, 0, 1, 1], [0, 1, 1, 0], [1.0, 1.0, 2.0, 2.0]
        )
        # radii (1, 2) after symmetrization of the off-diagonal pattern
        a = SparseSymMatrix.from_coo(
            2, [0, 1, 0, 1], [1, 0, 0, 1], [1.0, 1.0, 1.0, 1.0]
        )
        # build directly: off-diagonals 1 and 2 are easiest as dense
        dense = np.array([[0.0, 1.0], [1.0, 0.0]])
        m = SparseSymMatrix.from_coo(2, *np.nonzero(dense), dense[np.nonzero(dense)])
        scaled = degree_balancing(m)
        assert np.allclose(scaled.b, [1.0, 1.0])

    def test_radii_one_two(self):
        dense = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
        m = SparseSymMatrix.from_coo(3, *np.nonzero(dense), dense[np.nonzero(dense)])
        scaled = degree_balancing(m)
        assert scaled.b[0] == pytest.approx(0.70710678118654746, rel=1e-10)
        assert scaled.b[1] == pytest.approx(1.4142135623730951, rel=1e-10)
        _, r = m.gershgorin()
        ratios = r / scaled.b
        assert np.allclose(ratios, ratios[0], rtol=1e-12)
        assert abs(np.sum(np.log(scaled.b))) < 1e-12

    def test_isolated_node_rejected(self):
        g = Graph.from_edges([(0, 1)], n=3)
        l = laplacian(g)
        with pytest.raises(DisconnectedGraphError, match="connected component"):
            degree_balancing(l)


class TestPairInvariants:
    def test_disjoint_offdiagonal_support(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            g = random_connected_graph(rng, int(rng.integers(5, 60)), weighted=True)
            l = laplacian(g).to_dense()
            q = two_hop_laplacian(two_hop_sets(g)).to_dense()
            off = ~np.eye(g.n, dtype=bool)
            assert np.all((l * q)[off] == 0.0)

    def test_operator_psd_two_ways(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(5, 120))
            g = random_connected_graph(rng, n, weighted=bool(rng.integers(2)))
            pair = build_operator_pair(g)
            top = float(np.max(pair.A.diagonal()))
            assert np.min(pair.A.disc_left_ends()) >= -1e-9 * top
            w = np.linalg.eigvalsh(pair.A.to_dense())
            assert w[0] >= -1e-8 * top

    def test_repulsion_weight_is_maximal(self):
        rng = np.random.default_rng(4)
        checked = 0
        for _ in range(20):
            n = int(rng.integers(5, 80))
            g = random_connected_graph(rng, n, weighted=bool(rng.integers(2)))
            l = laplacian(g)
            q = two_hop_laplacian(two_hop_sets(g))
            eps = identity_shift(q)
            mu = repulsion_weight(l, q, eps)
            if mu <= 0.0:
                continue
            pushed = assemble_operator(l, q, 1.01 * mu, eps)
            assert np.min(pushed.disc_left_ends()) < 0.0
            checked += 1
        assert checked >= 10

    def test_balance_invariants_on_random_graphs(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            g = random_connected_graph(rng, int(rng.integers(5, 100)), weighted=True)
            pair = build_operator_pair(g)
            _, r = pair.A.gershgorin()
            ratios = r / pair.B.b
            assert np.max(np.abs(ratios - ratios[0])) / ratios[0] < 1e-10
            assert abs(np.sum(np.log(pair.B.b))) < 1e-10

    def test_quadratic_form_decomposition(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            n = int(rng.integers(5, 60))
            g = random_connected_graph(rng, n, weighted=True)
            pair = build_operator_pair(g)
            x = rng.normal(size=n)
            lhs = float(x @ pair.A.matvec(x))
            rhs = (
                dirichlet_energy(g, x)
                - pair.mu * float(x @ pair.Q.matvec(x))
                + pair.epsilon * float(x @ x)
            )
            assert lhs == pytest.approx(rhs, rel=1e-9)

    def test_diagnostics_payload(self):
        pair = build_operator_pair(generate("path", 5))
        d = pair.diagnostics()
        assert d["mu"] == pytest.approx(0.25, rel=1e-12)
        assert d["epsilon"] == pytest.approx(1.5, rel=1e-12)
        assert d["binding_row"] == 2
        assert d["q_nnz"] == pair.Q.nnz
        assert abs(d["min_disc_left_end"]) <= 1e-12
