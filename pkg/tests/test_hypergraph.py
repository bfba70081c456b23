import numpy as np
import pytest

from gateverify.errors import ValidationError
from gateverify.hypergraph import (
    Hypergraph,
    choi_hypergraph,
    ckz_dense,
    ckz_parity_expectation,
    cnx_unitary,
    cnz_unitary,
    color_strategy,
    coloring,
    generator_dense,
    hypergraph_generators,
    hypergraph_state_dense,
)
from gateverify.linalg import dagger, kron
from gateverify.strategies import omega_from_strategy, spectral_gap
from gateverify.weylbell import max_entangled_state

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def hadamard_layer(n_qubits, qubits):
    out = np.eye(1, dtype=complex)
    for k in range(n_qubits):
        out = np.kron(out, H if k in qubits else np.eye(2))
    return out


def dense_choi_vector(u):
    d = u.shape[0]
    return kron(np.eye(d), u) @ max_entangled_state(d)


class TestGateUnitaries:
    def test_cnz_is_cz(self):
        assert np.allclose(cnz_unitary(2), np.diag([1, 1, 1, -1]))

    def test_ccz(self):
        diag = np.ones(8)
        diag[7] = -1
        assert np.allclose(cnz_unitary(3), np.diag(diag))

    def test_cnx_is_cnot(self):
        expected = np.array(
            [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
        )
        assert np.max(np.abs(cnx_unitary(2) - expected)) < 1e-12

    def test_ccx_is_toffoli(self):
        u = cnx_unitary(3)
        expected = np.eye(8)
        expected[[6, 7]] = expected[[7, 6]]
        assert np.max(np.abs(u - expected)) < 1e-12


class TestChoiHypergraph:
    def test_cz_structure(self):
        hg, had = choi_hypergraph(2, "cnz")
        assert hg.vertex_count == 4
        assert set(hg.hyperedges) == {frozenset({0, 2}), frozenset({1, 3}), frozenset({2, 3})}
        assert had == (0, 1)

    def test_ccz_structure(self):
        hg, had = choi_hypergraph(3, "cnz")
        assert frozenset({3, 4, 5}) in hg.hyperedges
        assert len(hg.hyperedges) == 4
        assert had == (0, 1, 2)

    def test_cnx_hadamard_layer(self):
        _, had = choi_hypergraph(3, "cnx")
        assert had == (0, 1, 5)

    def test_rejects_small_n(self):
        with pytest.raises(ValidationError):
            choi_hypergraph(1, "cnz")

    @pytest.mark.parametrize("gate", ["cnz", "cnx"])
    @pytest.mark.parametrize("n", [2, 3])
    def test_dense_choi_equality(self, gate, n):
        hg, had = choi_hypergraph(n, gate)
        state = hadamard_layer(2 * n, had) @ hypergraph_state_dense(hg)
        u = cnz_unitary(n) if gate == "cnz" else cnx_unitary(n)
        assert np.max(np.abs(dense_choi_vector(u) - state)) < 1e-9


class TestGenerators:
    def test_one_generator_per_vertex(self):
        hg, _ = choi_hypergraph(3, "cnz")
        gens = hypergraph_generators(hg)
        assert len(gens) == 6

    def test_output_vertex_generator_structure(self):
        # Generator of the first output vertex: X there, Z on its pair
        # partner, controlled-Z on the remaining outputs.
        hg, _ = choi_hypergraph(3, "cnz")
        g = hypergraph_generators(hg)[3]
        assert g.pauli_part.label == "+ZIIXII"
        assert g.controlled_phase_part == [frozenset({4, 5})]

    def test_pair_edge_vertex_is_pauli(self):
        hg, _ = choi_hypergraph(3, "cnz")
        g = hypergraph_generators(hg)[0]
        assert g.pauli_part.label == "+XIIZII"
        assert g.controlled_phase_part == []

    @pytest.mark.parametrize("n", [2, 3])
    def test_generators_stabilize_dense_state(self, n):
        hg, _ = choi_hypergraph(n, "cnz")
        state = hypergraph_state_dense(hg)
        for g in hypergraph_generators(hg):
            assert np.max(np.abs(generator_dense(g) @ state - state)) < 1e-9

    def test_generator_involution(self):
        hg, _ = choi_hypergraph(3, "cnz")
        for g in hypergraph_generators(hg):
            dense = generator_dense(g)
            assert np.max(np.abs(dense @ dense - np.eye(dense.shape[0]))) < 1e-12


class TestColoring:
    def test_gate_hypergraph_class_counts(self):
        for n in (2, 3):
            hg, _ = choi_hypergraph(n, "cnz")
            classes = coloring(hg)
            assert len(classes) == n + 1

    def test_single_edge_two_classes(self):
        hg = Hypergraph(vertex_count=2, hyperedges=[{0, 1}])
        assert len(coloring(hg)) == 2

    @pytest.mark.parametrize("n", [2, 3])
    def test_properness(self, n):
        hg, _ = choi_hypergraph(n, "cnz")
        for cls in coloring(hg):
            for i, v in enumerate(cls):
                for w in cls[i + 1:]:
                    assert not hg.adjacent(v, w)

    def test_classes_partition_vertices(self):
        hg, _ = choi_hypergraph(3, "cnz")
        seen = sorted(v for cls in coloring(hg) for v in cls)
        assert seen == list(range(6))


class TestColorStrategy:
    @pytest.mark.parametrize("gate", ["cnz", "cnx"])
    @pytest.mark.parametrize("n", [2, 3])
    def test_gap(self, gate, n):
        omega = omega_from_strategy(color_strategy(n, gate))
        assert spectral_gap(omega) == pytest.approx(1 / (n + 1), abs=1e-9)

    @pytest.mark.parametrize("gate", ["cnz", "cnx"])
    def test_pairing_condition(self, gate):
        s = color_strategy(3, gate)
        u = s.target
        for p in s.pairs:
            assert abs(np.trace(u @ p.input_state @ dagger(u) @ p.effect) - 1) < 1e-8

    @pytest.mark.parametrize("n", [2, 3])
    def test_omega_matches_projector_mixture(self, n):
        # Oracle: per-class joint +1 projectors of the dressed dense
        # generators, mixed uniformly.
        hg, had = choi_hypergraph(n, "cnz")
        layer = hadamard_layer(2 * n, had)
        gens = hypergraph_generators(hg)
        classes = coloring(hg)
        dim = 1 << (2 * n)
        acc = np.zeros((dim, dim), dtype=complex)
        for cls in classes:
            t = np.eye(dim, dtype=complex)
            for v in cls:
                dressed = layer @ generator_dense(gens[v]) @ layer
                t = t @ (np.eye(dim) + dressed) / 2
            acc += t
        acc /= len(classes)
        omega = omega_from_strategy(color_strategy(n, "cnz"))
        assert np.max(np.abs(omega.matrix - acc)) < 1e-9

    def test_per_class_tests_fix_choi_state(self):
        n = 3
        hg, had = choi_hypergraph(n, "cnz")
        layer = hadamard_layer(2 * n, had)
        gens = hypergraph_generators(hg)
        vec = dense_choi_vector(cnz_unitary(n))
        for cls in coloring(hg):
            t = np.eye(1 << (2 * n), dtype=complex)
            for v in cls:
                dressed = layer @ generator_dense(gens[v]) @ layer
                t = t @ (np.eye(1 << (2 * n)) + dressed) / 2
            assert np.max(np.abs(t @ t - t)) < 1e-9
            assert np.max(np.abs(t @ vec - vec)) < 1e-9


class TestCkzMeasurementCompilation:
    @pytest.mark.parametrize("k,n_qubits", [(2, 2), (2, 3), (3, 3)])
    def test_parity_reproduces_expectation(self, k, n_qubits):
        rng = np.random.default_rng(17 * k + n_qubits)
        support = list(range(k))
        dense = ckz_dense(support, n_qubits)
        for _ in range(50):
            v = rng.standard_normal(1 << n_qubits) + 1j * rng.standard_normal(1 << n_qubits)
            v /= np.linalg.norm(v)
            direct = float(np.real(v.conj() @ dense @ v))
            compiled = ckz_parity_expectation(v, support, n_qubits)
            assert abs(direct - compiled) < 1e-9


class TestHypergraphValidation:
    def test_duplicate_edge(self):
        with pytest.raises(ValidationError):
            Hypergraph(vertex_count=3, hyperedges=[{0, 1}, {1, 0}])

    def test_out_of_range(self):
        with pytest.raises(ValidationError):
            Hypergraph(vertex_count=2, hyperedges=[{0, 5}])

    def test_unknown_gate(self):
        with pytest.raises(ValidationError):
            choi_hypergraph(2, "swap")
