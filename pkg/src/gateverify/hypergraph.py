"""Verification strategies for multi-controlled Z and X gates.

The Choi state of C^{n-1}Z (or C^{n-1}X) is, up to a layer of local
Hadamards, a hypergraph state with n Bell-pair edges and one hyperedge
spanning the output half. Its stabilizer-like generators split into
single-qubit input factors and locally measurable output factors, and a
proper coloring of the hypergraph packs them into n+1 tests with spectral
gap 1/(n+1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .linalg import dagger, projector
from .stabilizer import PauliString, _LOCAL_EIGS
from .strategies import Strategy, VerificationPair

__all__ = [
    "Hypergraph",
    "NonPauliGenerator",
    "choi_hypergraph",
    "hypergraph_generators",
    "hypergraph_state_dense",
    "generator_dense",
    "coloring",
    "color_strategy",
    "cnz_unitary",
    "cnx_unitary",
    "ckz_dense",
    "ckz_parity_expectation",
]

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


@dataclass(frozen=True)
class Hypergraph:
    """Vertices 0..vertex_count-1 plus edges of size >= 2."""

    vertex_count: int
    hyperedges: list = field(default_factory=list)

    def __post_init__(self):
        edges = []
        seen = set()
        for e in self.hyperedges:
            fs = frozenset(int(v) for v in e)
            if len(fs) < 2:
                raise ValidationError(f"edge {set(e)} has fewer than two vertices")
            if any(not 0 <= v < self.vertex_count for v in fs):
                raise ValidationError(f"edge {set(e)} out of range")
            if fs in seen:
                raise ValidationError(f"duplicate edge {set(e)}")
            seen.add(fs)
            edges.append(fs)
        object.__setattr__(self, "hyperedges", edges)

    def adjacent(self, v: int, w: int) -> bool:
        return any(v in e and w in e for e in self.hyperedges)


@dataclass(frozen=True)
class NonPauliGenerator:
    """Product of a Pauli string and controlled-Z factors on given supports."""

    pauli_part: PauliString
    controlled_phase_part: list = field(default_factory=list)

    def __post_init__(self):
        n = self.pauli_part.n
        supports = []
        for s in self.controlled_phase_part:
            fs = frozenset(int(v) for v in s)
            if any(not 0 <= v < n for v in fs):
                raise ValidationError("controlled-phase support out of range")
            supports.append(fs)
        object.__setattr__(self, "controlled_phase_part", supports)


def ckz_dense(support, n_qubits: int) -> np.ndarray:
    """C^{k-1}Z on a k-vertex support: -1 phase on the all-ones pattern."""
    dim = 1 << n_qubits
    diag = np.ones(dim, dtype=np.complex128)
    mask = 0
    for v in support:
        mask |= 1 << (n_qubits - 1 - v)
    for b in range(dim):
        if b & mask == mask:
            diag[b] = -1.0
    return np.diag(diag)


def cnz_unitary(n: int) -> np.ndarray:
    """The n-qubit C^{n-1}Z gate."""
    return ckz_dense(range(n), n)


def cnx_unitary(n: int) -> np.ndarray:
    """C^{n-1}X: the controlled-Z conjugated by H on the last qubit."""
    h_last = _embed_h(n, [n - 1])
    return h_last @ cnz_unitary(n) @ h_last


def _embed_h(n_qubits: int, qubits) -> np.ndarray:
    out = np.eye(1, dtype=np.complex128)
    for k in range(n_qubits):
        out = np.kron(out, _H if k in qubits else np.eye(2))
    return out


def choi_hypergraph(n: int, gate: str):
    """Hypergraph plus Hadamard layer describing the gate's Choi state.

    Vertices 0..n-1 are inputs and n..2n-1 outputs; the graph has the n
    Bell-pair edges {i, i+n} and one hyperedge over the output half. The
    returned qubit list carries the local Hadamards that turn the
    hypergraph state into the Choi state.
    """
    if n < 2:
        raise ValidationError("multi-controlled gates need n >= 2")
    gate = gate.lower()
    edges = [frozenset({i, i + n}) for i in range(n)]
    edges.append(frozenset(range(n, 2 * n)))
    hg = Hypergraph(vertex_count=2 * n, hyperedges=edges)
    if gate == "cnz":
        had = tuple(range(n))
    elif gate == "cnx":
        had = tuple(range(n - 1)) + (2 * n - 1,)
    else:
        raise ValidationError(f"unknown gate {gate!r}, expected 'cnz' or 'cnx'")
    return hg, had


def hypergraph_generators(hg: Hypergraph) -> list[NonPauliGenerator]:
    """One generator per vertex: X there, Z on pair partners, and a
    controlled-Z on every larger incident edge minus the vertex."""
    n = hg.vertex_count
    gens = []
    for v in range(n):
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[v] = 1
        supports = []
        for e in hg.hyperedges:
            if v not in e:
                continue
            rest = e - {v}
            if len(rest) == 1:
                z[next(iter(rest))] ^= 1
            else:
                supports.append(rest)
        gens.append(NonPauliGenerator(PauliString(n, x, z), supports))
    return gens


def hypergraph_state_dense(hg: Hypergraph) -> np.ndarray:
    """The state prod_e C_e |+...+> as a dense vector."""
    n = hg.vertex_count
    dim = 1 << n
    amps = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
    for e in hg.hyperedges:
        mask = 0
        for v in e:
            mask |= 1 << (n - 1 - v)
        for b in range(dim):
            if b & mask == mask:
                amps[b] = -amps[b]
    return amps


def generator_dense(g: NonPauliGenerator) -> np.ndarray:
    n = g.pauli_part.n
    out = g.pauli_part.to_dense()
    for s in g.controlled_phase_part:
        out = out @ ckz_dense(s, n)
    return out


def coloring(hg: Hypergraph) -> list[list[int]]:
    """Greedy proper coloring; vertices sharing any edge get distinct colors.

    On the gate hypergraphs the vertex order makes this produce exactly
    n+1 classes: one holding all inputs and one per output.
    """
    colors: dict[int, int] = {}
    for v in range(hg.vertex_count):
        used = {colors[w] for w in colors if hg.adjacent(v, w)}
        c = 0
        while c in used:
            c += 1
        colors[v] = c
    n_colors = max(colors.values()) + 1
    classes = [[] for _ in range(n_colors)]
    for v, c in colors.items():
        classes[c].append(v)
    return classes


def ckz_parity_expectation(state: np.ndarray, support, n_qubits: int) -> float:
    """<C^kZ> recovered from Z-basis outcome statistics.

    Measures every support qubit in Z and accepts with sign -1 exactly when
    all outcomes map to bit 1; this classical post-processing reproduces
    the controlled-phase expectation value.
    """
    state = np.asarray(state, dtype=np.complex128).reshape(-1)
    probs = np.abs(state) ** 2
    mask = 0
    for v in support:
        mask |= 1 << (n_qubits - 1 - v)
    signs = np.array([-1.0 if b & mask == mask else 1.0 for b in range(len(probs))])
    return float(np.sum(probs * signs))


def _dressed_parts(n: int, gate: str):
    """Per-vertex (input_qubit, input_code, output_operator) after dressing.

    input_code is a Pauli code (1=X, 3=Z) on input_qubit; the output
    operator is dense on the output half with the Hadamard layer applied.
    """
    hg, had = choi_hypergraph(n, gate)
    gens = hypergraph_generators(hg)
    had_in = [q for q in had if q < n]
    had_out = [q - n for q in had if q >= n]
    l_out = _embed_h(n, had_out)
    parts = []
    for v, g in enumerate(gens):
        codes = g.pauli_part.hermitian_codes()
        in_codes = codes[:n]
        touched = np.nonzero(in_codes)[0]
        if len(touched) != 1:
            raise ValidationError("generator does not touch exactly one input qubit")
        q = int(touched[0])
        code = int(in_codes[q])
        if q in had_in:
            code = {1: 3, 3: 1}[code]
        out_pauli = PauliString(
            n, g.pauli_part.x[n:], g.pauli_part.z[n:], int(np.sum(g.pauli_part.x[n:] & g.pauli_part.z[n:]))
        )
        b_dense = out_pauli.to_dense()
        for s in g.controlled_phase_part:
            b_dense = b_dense @ ckz_dense([w - n for w in s], n)
        b_dense = l_out @ b_dense @ l_out
        parts.append((q, code, b_dense))
    return hg, parts


def color_strategy(n: int, gate: str) -> Strategy:
    """Per-color tests over the Choi generators; spectral gap 1/(n+1).

    Each color class becomes the projector onto the joint +1 eigenspace of
    its generators, realized with product-state inputs and one local
    measurement setting (Pauli bases plus controlled-phase parity
    post-processing) per class.
    """
    hg, parts = _dressed_parts(n, gate)
    classes = coloring(hg)
    gate = gate.lower()
    target = cnz_unitary(n) if gate == "cnz" else cnx_unitary(n)
    dim = 1 << n
    eye = np.eye(dim, dtype=np.complex128)
    pairs = []
    class_weight = 1.0 / len(classes)
    for cls in classes:
        # Input basis per qubit: the touched Pauli's eigenbasis, otherwise
        # computational (uniform over it = maximally mixed input).
        qubit_code = {parts[v][0]: parts[v][1] for v in cls}
        members = [(parts[v][0], parts[v][2]) for v in cls]
        states = [(np.eye(1, dtype=np.complex128)[0], {})]
        for q in range(n):
            code = qubit_code.get(q, 0)
            new_states = []
            for vec, signs in states:
                for e, lv in _LOCAL_EIGS[code]:
                    s2 = dict(signs)
                    if code:
                        s2[q] = e
                    new_states.append((np.kron(vec, lv), s2))
            states = new_states
        w = class_weight / len(states)
        for vec, signs in states:
            effect = eye.copy()
            for q, b_dense in members:
                effect = effect @ (eye + signs[q] * b_dense) / 2
            pairs.append(VerificationPair(projector(vec.conj()), effect, w))
    return Strategy(d=dim, target=target, pairs=pairs)
