"""Pauli strings in symplectic form, Clifford conjugation, and local
verification strategies for n-qubit Clifford gates built from the
stabilizer generators of their Choi states.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .linalg import dagger, kron_all, projector
from .strategies import Strategy, VerificationPair

__all__ = [
    "PauliString",
    "StabilizerGroup",
    "CliffordCircuit",
    "parse_circuit",
    "circuit_to_text",
    "random_circuit",
    "conjugate_pauli",
    "choi_generators",
    "pauli_eigenbasis",
    "generator_strategy",
    "full_stabilizer_strategy",
]

_I2 = np.eye(2, dtype=np.complex128)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}

GATE_ARITY = {"H": 1, "S": 1, "X": 1, "Y": 1, "Z": 1, "CZ": 2, "CNOT": 2}


@dataclass(frozen=True)
class PauliString:
    """Phased Pauli operator i^phase_power * prod_k X_k^x[k] Z_k^z[k].

    The X-before-Z normal form keeps multiplication and Clifford
    conjugation to pure bit arithmetic; Y shows up as phase_power odd.
    """

    n: int
    x: np.ndarray
    z: np.ndarray
    phase_power: int = 0  # exponent of i, mod 4

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.uint8) & 1
        z = np.asarray(self.z, dtype=np.uint8) & 1
        if x.shape != (self.n,) or z.shape != (self.n,):
            raise ValidationError("bit vectors must have length n")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase_power", int(self.phase_power) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8))

    @classmethod
    def from_label(cls, label: str, sign: int = 1) -> "PauliString":
        """Build from a letter string like "XIZY"; sign is +1 or -1."""
        n = len(label)
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        n_y = 0
        for k, ch in enumerate(label.upper()):
            if ch == "X":
                x[k] = 1
            elif ch == "Z":
                z[k] = 1
            elif ch == "Y":
                x[k] = z[k] = 1
                n_y += 1
            elif ch != "I":
                raise ValidationError(f"unknown Pauli letter {ch!r}")
        phase = n_y + (0 if sign == 1 else 2)
        return cls(n, x, z, phase)

    @property
    def label(self) -> str:
        letters = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
        body = "".join(letters[(int(a), int(b))] for a, b in zip(self.x, self.z))
        sign = {0: "+", 1: "+i", 2: "-", 3: "-i"}[self.hermitian_sign_power]
        return sign + body

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValidationError("cannot multiply Pauli strings of different length")
        # Reordering Z^z1 X^x2 -> X^x2 Z^z1 costs (-1)^(z1.x2).
        flips = int(np.sum(self.z & other.x)) & 1
        phase = (self.phase_power + other.phase_power + 2 * flips) % 4
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, phase)

    def commutes_with(self, other: "PauliString") -> bool:
        sym = int(np.sum((self.x & other.z) ^ (self.z & other.x))) & 1
        return sym == 0

    @property
    def n_y(self) -> int:
        return int(np.sum(self.x & self.z))

    @property
    def hermitian_sign_power(self) -> int:
        """Phase power relative to the Hermitian Pauli (0 or 2 when valid)."""
        return (self.phase_power - self.n_y) % 4

    @property
    def sign(self) -> int:
        """+1 or -1 for Hermitian strings; raises otherwise."""
        rel = self.hermitian_sign_power
        if rel == 0:
            return 1
        if rel == 2:
            return -1
        raise ValidationError(f"Pauli string {self.label!r} is not Hermitian")

    def is_identity(self) -> bool:
        return not np.any(self.x) and not np.any(self.z)

    def hermitian_codes(self) -> np.ndarray:
        """Per-qubit Pauli codes (0=I, 1=X, 2=Y, 3=Z) of the Hermitian part."""
        codes = np.zeros(self.n, dtype=np.int64)
        codes[(self.x == 1) & (self.z == 0)] = 1
        codes[(self.x == 1) & (self.z == 1)] = 2
        codes[(self.x == 0) & (self.z == 1)] = 3
        return codes

    def substring(self, lo: int, hi: int) -> "PauliString":
        """Hermitian Pauli on qubits [lo, hi); the parent's sign is not carried."""
        x = self.x[lo:hi]
        z = self.z[lo:hi]
        return PauliString(hi - lo, x, z, int(np.sum(x & z)))

    def to_dense(self) -> np.ndarray:
        mats = []
        for a, b in zip(self.x, self.z):
            if a and b:
                mats.append(_X @ _Z)
            elif a:
                mats.append(_X)
            elif b:
                mats.append(_Z)
            else:
                mats.append(_I2)
        out = kron_all(*mats) if mats else np.eye(1, dtype=np.complex128)
        return (1j ** self.phase_power) * out


@dataclass(frozen=True)
class StabilizerGroup:
    """Independent, mutually commuting generators on n_qubits qubits."""

    n_qubits: int
    generators: list = field(default_factory=list)

    def __post_init__(self):
        gens = list(self.generators)
        for g in gens:
            if g.n != self.n_qubits:
                raise ValidationError("generator length mismatch")
            g.sign  # must be Hermitian
        for i in range(len(gens)):
            for j in range(i + 1, len(gens)):
                if not gens[i].commutes_with(gens[j]):
                    raise ValidationError(
                        f"generators {gens[i].label} and {gens[j].label} anticommute"
                    )
        if _gf2_rank(gens) != len(gens):
            raise ValidationError("generators are not independent")
        object.__setattr__(self, "generators", gens)

    def elements(self):
        """All 2^k - 1 nontrivial products of the generators."""
        k = len(self.generators)
        out = []
        for mask in range(1, 1 << k):
            p = PauliString.identity(self.n_qubits)
            for i in range(k):
                if mask >> i & 1:
                    p = p * self.generators[i]
            out.append(p)
        return out


def _gf2_rank(gens) -> int:
    if not gens:
        return 0
    rows = [np.concatenate([g.x, g.z]).astype(np.uint8) for g in gens]
    m = np.array(rows, dtype=np.uint8)
    rank = 0
    for col in range(m.shape[1]):
        pivots = np.nonzero(m[rank:, col])[0]
        if pivots.size == 0:
            continue
        pivot = rank + pivots[0]
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(m.shape[0]):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
        if rank == m.shape[0]:
            break
    return rank


@dataclass(frozen=True)
class CliffordCircuit:
    """Gate list over {H, S, X, Y, Z, CZ, CNOT} acting on n qubits."""

    n: int
    gates: list = field(default_factory=list)

    def __post_init__(self):
        for gate in self.gates:
            name, *qubits = gate
            if name not in GATE_ARITY:
                raise ValidationError(f"unknown gate {name!r}")
            if len(qubits) != GATE_ARITY[name]:
                raise ValidationError(f"gate {name} expects {GATE_ARITY[name]} qubit(s)")
            if any(not 0 <= q < self.n for q in qubits):
                raise ValidationError(f"qubit index out of range in {gate}")
            if len(set(qubits)) != len(qubits):
                raise ValidationError(f"repeated qubit in {gate}")
        object.__setattr__(self, "gates", [tuple(g) for g in self.gates])

    def shifted(self, offset: int, n: int) -> "CliffordCircuit":
        """Same circuit with all qubit indices moved by ``offset``."""
        gates = [(g[0], *(q + offset for q in g[1:])) for g in self.gates]
        return CliffordCircuit(n=n, gates=gates)

    def to_unitary(self) -> np.ndarray:
        dim = 1 << self.n
        u = np.eye(dim, dtype=np.complex128)
        for gate in self.gates:
            u = _gate_unitary(gate, self.n) @ u
        return u


def _gate_unitary(gate, n: int) -> np.ndarray:
    name, *qs = gate
    dim = 1 << n
    if name in ("H", "S", "X", "Y", "Z"):
        single = {
            "H": np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2),
            "S": np.diag([1, 1j]).astype(np.complex128),
            "X": _X,
            "Y": _Y,
            "Z": _Z,
        }[name]
        mats = [single if k == qs[0] else _I2 for k in range(n)]
        return kron_all(*mats)
    u = np.eye(dim, dtype=np.complex128)
    i, j = qs
    if name == "CZ":
        for b in range(dim):
            if (b >> (n - 1 - i)) & 1 and (b >> (n - 1 - j)) & 1:
                u[b, b] = -1.0
        return u
    # CNOT: control i, target j
    u = np.zeros((dim, dim), dtype=np.complex128)
    for b in range(dim):
        out = b ^ (1 << (n - 1 - j)) if (b >> (n - 1 - i)) & 1 else b
        u[out, b] = 1.0
    return u


def parse_circuit(text: str, n: int | None = None) -> CliffordCircuit:
    """Parse the one-gate-per-line format, e.g. ``H 0`` / ``CZ 0 1``."""
    gates = []
    max_q = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        name = parts[0].upper()
        if name not in GATE_ARITY:
            raise ValidationError(f"line {lineno}: unknown gate {parts[0]!r}")
        try:
            qubits = [int(p) for p in parts[1:]]
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: bad qubit index") from exc
        if len(qubits) != GATE_ARITY[name]:
            raise ValidationError(f"line {lineno}: gate {name} expects {GATE_ARITY[name]} qubit(s)")
        gates.append((name, *qubits))
        max_q = max(max_q, *qubits)
    if n is None:
        n = max_q + 1
    if n < 1:
        raise ValidationError("empty circuit with no qubit count given")
    return CliffordCircuit(n=n, gates=gates)


def circuit_to_text(c: CliffordCircuit) -> str:
    return "\n".join(" ".join(str(p) for p in gate) for gate in c.gates) + "\n"


def random_circuit(n: int, n_gates: int, seed: int) -> CliffordCircuit:
    """Random Clifford circuit, deterministic per seed (test-input generator)."""
    rng = np.random.default_rng(seed)
    names = list(GATE_ARITY)
    gates = []
    for _ in range(n_gates):
        name = names[rng.integers(len(names))] if n > 1 else names[rng.integers(5)]
        qs = rng.choice(n, size=GATE_ARITY[name], replace=False)
        gates.append((name, *(int(q) for q in qs)))
    return CliffordCircuit(n=n, gates=gates)


def conjugate_pauli(c: CliffordCircuit, p: PauliString) -> PauliString:
    """Heisenberg propagation U p U† with exact phase tracking."""
    if c.n != p.n:
        raise ValidationError("circuit and Pauli string qubit counts differ")
    x = p.x.copy()
    z = p.z.copy()
    s = p.phase_power
    for gate in c.gates:
        name = gate[0]
        if name == "H":
            i = gate[1]
            if x[i] & z[i]:
                s += 2
            x[i], z[i] = z[i], x[i]
        elif name == "S":
            i = gate[1]
            if x[i]:
                s += 1
                z[i] ^= 1
        elif name == "X":
            i = gate[1]
            if z[i]:
                s += 2
        elif name == "Y":
            i = gate[1]
            if x[i] ^ z[i]:
                s += 2
        elif name == "Z":
            i = gate[1]
            if x[i]:
                s += 2
        elif name == "CZ":
            i, j = gate[1], gate[2]
            if x[i] & x[j]:
                s += 2
            z[i] ^= x[j]
            z[j] ^= x[i]
        else:  # CNOT
            i, j = gate[1], gate[2]
            x[j] ^= x[i]
            z[i] ^= z[j]
    return PauliString(p.n, x, z, s)


def choi_generators(c: CliffordCircuit) -> StabilizerGroup:
    """Stabilizer generators of the gate's Choi state on 2n qubits.

    Qubits 0..n-1 carry the reference half, n..2n-1 the circuit output;
    the Bell-pair generators X_k X_{k+n}, Z_k Z_{k+n} are pushed through
    the circuit acting on the output half.
    """
    n = c.n
    big = c.shifted(n, 2 * n)
    gens = []
    for k in range(n):
        for letter in ("X", "Z"):
            x = np.zeros(2 * n, dtype=np.uint8)
            z = np.zeros(2 * n, dtype=np.uint8)
            if letter == "X":
                x[k] = x[k + n] = 1
            else:
                z[k] = z[k + n] = 1
            gens.append(conjugate_pauli(big, PauliString(2 * n, x, z)))
    return StabilizerGroup(n_qubits=2 * n, generators=gens)


_LOCAL_EIGS = {
    0: [(1.0, np.array([1, 0], dtype=np.complex128)),
        (1.0, np.array([0, 1], dtype=np.complex128))],
    1: [(1.0, np.array([1, 1], dtype=np.complex128) / np.sqrt(2)),
        (-1.0, np.array([1, -1], dtype=np.complex128) / np.sqrt(2))],
    2: [(1.0, np.array([1, 1j], dtype=np.complex128) / np.sqrt(2)),
        (-1.0, np.array([1, -1j], dtype=np.complex128) / np.sqrt(2))],
    3: [(1.0, np.array([1, 0], dtype=np.complex128)),
        (-1.0, np.array([0, 1], dtype=np.complex128))],
}


def pauli_eigenbasis(p: PauliString, conjugate: bool = False):
    """Full product eigenbasis of a Hermitian Pauli string.

    Returns 2^n pairs (eigenvalue, vector). Qubits where the string acts
    trivially contribute the computational basis (the uniform mixture over
    them is I/2, the maximally mixed input convention). With
    ``conjugate=True`` the vectors are complex conjugated, giving the
    eigenbasis of p^T with the same eigenvalues.
    """
    sign = p.sign
    codes = p.hermitian_codes()
    basis = [(1.0, np.eye(1, dtype=np.complex128)[0])]
    for code in codes:
        basis = [
            (e * le, np.kron(v, lv))
            for e, v in basis
            for le, lv in _LOCAL_EIGS[int(code)]
        ]
    out = []
    for e, v in basis:
        vec = v.conj() if conjugate else v
        out.append((sign * e, vec))
    return out


def _strategy_from_stabilizers(c: CliffordCircuit, stabs, weight_per_stab) -> Strategy:
    """Emit verification pairs realizing the uniform projector mixture.

    Each stabilizer sign*A⊗B becomes, per eigenstate of A^T with eigenvalue
    e, the pair (that eigenstate, projector onto the (sign*e)-eigenspace of
    B). Conjugating the input eigenbasis is what makes the pairing
    condition hold when A contains Y factors.
    """
    n = c.n
    dim = 1 << n
    target = c.to_unitary()
    eye = np.eye(dim, dtype=np.complex128)
    pairs = []
    for stab in stabs:
        sign = stab.sign
        a_part = stab.substring(0, n)
        b_part = stab.substring(n, 2 * n)
        b_dense = b_part.to_dense()
        effects = {
            1.0: (eye + sign * b_dense) / 2,
            -1.0: (eye - sign * b_dense) / 2,
        }
        eig = pauli_eigenbasis(a_part, conjugate=True)
        w = weight_per_stab / len(eig)
        for e, vec in eig:
            pairs.append(VerificationPair(projector(vec), effects[e], w))
    return Strategy(d=dim, target=target, pairs=pairs)


def generator_strategy(c: CliffordCircuit) -> Strategy:
    """Strategy from the 2n Choi generators; spectral gap 1/(2n).

    Verifies any n-qubit Clifford gate in at most ceil(2n/eps * ln(1/delta))
    trials.
    """
    group = choi_generators(c)
    k = len(group.generators)
    return _strategy_from_stabilizers(c, group.generators, 1.0 / k)


def full_stabilizer_strategy(c: CliffordCircuit) -> Strategy:
    """Uniform mixture over all 2^{2n}-1 nontrivial stabilizer projectors.

    Raises the gap to 2^{2n-1}/(2^{2n}-1) at the cost of enumerating the
    whole group, so it is limited to n <= 4.
    """
    if c.n > 4:
        raise ValidationError("full stabilizer enumeration is limited to n <= 4")
    group = choi_generators(c)
    elements = group.elements()
    return _strategy_from_stabilizers(c, elements, 1.0 / len(elements))
