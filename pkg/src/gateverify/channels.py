"""Quantum channel representations (Kraus and Choi), standard noise
models, the channel-state duality, and fidelity measures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .linalg import ATOL, as_matrix, dagger, is_unitary, kron, partial_trace
from .weylbell import WeylIndex, clock_matrix, max_entangled_state, shift_matrix, weyl

__all__ = [
    "KrausChannel",
    "ChoiState",
    "choi_from_kraus",
    "choi_of_unitary",
    "apply_via_choi",
    "entanglement_fidelity",
    "average_fidelity",
    "make_noise",
    "unitary_channel",
    "identity_channel",
    "compose",
    "channel_to_json",
    "channel_from_json",
    "matrix_to_lists",
    "matrix_from_lists",
]

NOISE_KINDS = ("depolarizing", "dephasing", "amplitude_damping", "unitary_rotation_error")


@dataclass(frozen=True)
class KrausChannel:
    """CPTP map given by Kraus operators (square, equal in/out dimension)."""

    d: int
    kraus_ops: list = field(default_factory=list)
    kind: str = "kraus"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.kraus_ops:
            raise ValidationError("channel needs at least one Kraus operator")
        ops = [as_matrix(k) for k in self.kraus_ops]
        for k in ops:
            if k.shape != (self.d, self.d):
                raise ValidationError(f"Kraus operator shape {k.shape} does not match d={self.d}")
        total = sum(dagger(k) @ k for k in ops)
        if np.max(np.abs(total - np.eye(self.d))) > ATOL:
            raise ValidationError("Kraus operators are not trace preserving")
        object.__setattr__(self, "kraus_ops", ops)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        rho = as_matrix(rho)
        return sum(k @ rho @ dagger(k) for k in self.kraus_ops)


@dataclass(frozen=True)
class ChoiState:
    """Normalized Choi state of a channel on C^d (a d^2 x d^2 density matrix).

    Validity means PSD, unit trace, and maximally mixed reduction on the
    first (reference) subsystem, i.e. the channel is trace preserving.
    """

    d: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dd = self.d * self.d
        if m.shape != (dd, dd):
            raise ValidationError(f"Choi matrix shape {m.shape} does not match d={self.d}")
        if float(np.min(np.linalg.eigvalsh((m + dagger(m)) / 2))) < -1e-9:
            raise ValidationError("Choi matrix is not PSD")
        if abs(np.trace(m) - 1.0) > 1e-9:
            raise ValidationError("Choi matrix does not have unit trace")
        reduced = partial_trace(m, [self.d, self.d], keep={0})
        if np.max(np.abs(reduced - np.eye(self.d) / self.d)) > 1e-8:
            raise ValidationError("channel is not trace preserving (Tr_B != I/d)")
        object.__setattr__(self, "matrix", m)


def choi_from_kraus(ch: KrausChannel) -> ChoiState:
    """Choi state (I ⊗ E)(Phi+) of a Kraus channel."""
    d = ch.d
    phi = max_entangled_state(d)
    rho = np.outer(phi, phi.conj())
    eye = np.eye(d)
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for k in ch.kraus_ops:
        ik = kron(eye, k)
        out += ik @ rho @ dagger(ik)
    return ChoiState(d=d, matrix=out)


def choi_of_unitary(u: np.ndarray) -> ChoiState:
    u = as_matrix(u)
    if not is_unitary(u):
        raise ValidationError("target is not unitary")
    d = u.shape[0]
    vec = kron(np.eye(d), u) @ max_entangled_state(d)
    return ChoiState(d=d, matrix=np.outer(vec, vec.conj()))


def apply_via_choi(choi: ChoiState, rho: np.ndarray) -> np.ndarray:
    """Channel output E(rho) = d Tr_A[(rho^T ⊗ I) Phi].

    The transpose is taken in the computational basis, the same basis that
    defines the maximally entangled reference state.
    """
    rho = as_matrix(rho)
    d = choi.d
    if rho.shape != (d, d):
        raise ValidationError(f"state shape {rho.shape} does not match d={d}")
    op = kron(rho.T, np.eye(d)) @ choi.matrix
    return d * partial_trace(op, [d, d], keep={1})


def entanglement_fidelity(choi: ChoiState, target: np.ndarray) -> float:
    """Overlap Tr(Phi_U Phi_E) between the channel and a target unitary."""
    target_choi = choi_of_unitary(target)
    val = np.trace(target_choi.matrix @ choi.matrix)
    if abs(val.imag) > 1e-10:
        raise ValidationError("entanglement fidelity has a non-real residue")
    return float(val.real)


def average_fidelity(f_ent: float, d: int) -> float:
    """Average gate fidelity (d F_E + 1) / (d + 1)."""
    if not 0.0 <= f_ent <= 1.0 + ATOL:
        raise ValidationError(f"entanglement fidelity {f_ent} outside [0, 1]")
    return (d * f_ent + 1.0) / (d + 1.0)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel(d=d, kraus_ops=[np.eye(d)], kind="kraus")


def unitary_channel(u: np.ndarray) -> KrausChannel:
    u = as_matrix(u)
    if not is_unitary(u):
        raise ValidationError("operator is not unitary")
    return KrausChannel(d=u.shape[0], kraus_ops=[u], kind="kraus")


def _check_strength(p: float, lo: float = 0.0, hi: float = 1.0):
    if not lo <= p <= hi:
        raise ValidationError(f"noise strength {p} outside [{lo}, {hi}]")


def make_noise(kind: str, strength: float, d: int) -> KrausChannel:
    """Build one of the parametric noise families.

    depolarizing: rho -> (1-p) rho + p I/d, realized with Weyl Kraus ops.
    dephasing: rho -> (1-p) rho + p/(d-1) sum_{v>0} Z^v rho Z^-v.
    amplitude_damping: each excited level decays to |0> with rate p.
    unitary_rotation_error: coherent over-rotation exp(-i theta (X+X†)/2),
    strength in radians.
    """
    if d < 2:
        raise ValidationError("noise models need d >= 2")
    if kind == "depolarizing":
        _check_strength(strength)
        ops = [np.sqrt(1 - strength + strength / d**2) * np.eye(d)]
        for u in range(d):
            for v in range(d):
                if (u, v) != (0, 0):
                    ops.append(np.sqrt(strength / d**2) * weyl(WeylIndex(u, v, d)))
    elif kind == "dephasing":
        _check_strength(strength)
        z = clock_matrix(d)
        ops = [np.sqrt(1 - strength) * np.eye(d)]
        for v in range(1, d):
            ops.append(np.sqrt(strength / (d - 1)) * np.linalg.matrix_power(z, v))
    elif kind == "amplitude_damping":
        _check_strength(strength)
        k0 = np.diag([1.0] + [np.sqrt(1 - strength)] * (d - 1)).astype(np.complex128)
        ops = [k0]
        for l in range(1, d):
            k = np.zeros((d, d), dtype=np.complex128)
            k[0, l] = np.sqrt(strength)
            ops.append(k)
    elif kind == "unitary_rotation_error":
        _check_strength(strength, lo=-2 * np.pi, hi=2 * np.pi)
        x = shift_matrix(d)
        gen = (x + dagger(x)) / 2
        vals, vecs = np.linalg.eigh(gen)
        u = (vecs * np.exp(-1j * strength * vals)) @ dagger(vecs)
        ops = [u]
    else:
        raise ValidationError(f"unknown noise kind {kind!r}")
    return KrausChannel(d=d, kraus_ops=ops, kind=kind, params={"strength": float(strength)})


def compose(a: KrausChannel, b: KrausChannel) -> KrausChannel:
    """Composite channel applying ``a`` first, then ``b``."""
    if a.d != b.d:
        raise ValidationError("cannot compose channels with different dimensions")
    ops = [kb @ ka for kb in b.kraus_ops for ka in a.kraus_ops]
    return KrausChannel(d=a.d, kraus_ops=ops, kind="composed",
                        params={"parts": [(a.kind, a.params), (b.kind, b.params)]})


# --- JSON wire format -------------------------------------------------------
#
# {"kind": "depolarizing", "d": 2, "params": {"strength": 0.1}}
# {"kind": "kraus", "d": 2, "ops": [[[re, im], ...], ...]}
# {"kind": "composed", "d": 2, "parts": [<channel>, <channel>]}


def matrix_to_lists(m: np.ndarray):
    m = as_matrix(m)
    return [[[float(x.real), float(x.imag)] for x in row] for row in m]


def matrix_from_lists(data) -> np.ndarray:
    try:
        return np.array([[complex(c[0], c[1]) for c in row] for row in data],
                        dtype=np.complex128)
    except (TypeError, IndexError) as exc:
        raise ValidationError(f"malformed matrix payload: {exc}") from exc


def channel_to_json(ch: KrausChannel) -> str:
    return json.dumps(_channel_to_obj(ch), indent=2)


def _channel_to_obj(ch: KrausChannel) -> dict:
    if ch.kind in NOISE_KINDS:
        return {"kind": ch.kind, "d": ch.d, "params": dict(ch.params)}
    return {"kind": "kraus", "d": ch.d, "ops": [matrix_to_lists(k) for k in ch.kraus_ops]}


def channel_from_json(text: str) -> KrausChannel:
    return _channel_from_obj(json.loads(text))


def _channel_from_obj(obj) -> KrausChannel:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValidationError("channel JSON must be an object with a 'kind' field")
    kind = obj["kind"]
    d = int(obj.get("d", 0))
    if kind in NOISE_KINDS:
        return make_noise(kind, float(obj["params"]["strength"]), d)
    if kind == "kraus":
        ops = [matrix_from_lists(k) for k in obj["ops"]]
        return KrausChannel(d=d, kraus_ops=ops, kind="kraus")
    if kind == "composed":
        parts = [_channel_from_obj(p) for p in obj["parts"]]
        if len(parts) < 2:
            raise ValidationError("composed channel needs at least two parts")
        out = parts[0]
        for p in parts[1:]:
            out = compose(out, p)
        return out
    raise ValidationError(f"unknown channel kind {kind!r}")
