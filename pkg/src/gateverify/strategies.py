"""Verification strategies: weighted (input state, effect) pairs, their
verification operator, MUB constructions, and the optimal strategy for any
qudit unitary in prime dimension.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .channels import choi_of_unitary, matrix_from_lists, matrix_to_lists
from .errors import ValidationError
from .linalg import (
    ATOL,
    as_matrix,
    dagger,
    hermitian_eig,
    is_unitary,
    kron,
    projector,
)

__all__ = [
    "VerificationPair",
    "Strategy",
    "VerificationOperator",
    "omega_from_strategy",
    "spectral_gap",
    "is_prime",
    "mub_bases",
    "cb_projector",
    "optimal_strategy",
    "strategy_from_design",
    "g_mub_strategy",
    "rotate_strategy",
    "trivial_test_mix",
    "strategy_to_json",
    "strategy_from_json",
]

PAIRING_ATOL = 1e-8


@dataclass(frozen=True)
class VerificationPair:
    """One test: prepare ``input_state``, accept on POVM effect ``effect``."""

    input_state: np.ndarray
    effect: np.ndarray
    probability: float

    def __post_init__(self):
        rho = as_matrix(self.input_state)
        eff = as_matrix(self.effect)
        if rho.shape != eff.shape or rho.shape[0] != rho.shape[1]:
            raise ValidationError("input state and effect must be square and equal-sized")
        if not 0.0 < self.probability <= 1.0:
            raise ValidationError(f"pair probability {self.probability} outside (0, 1]")
        evals = np.linalg.eigvalsh((rho + dagger(rho)) / 2)
        if np.min(evals) < -ATOL or abs(np.trace(rho) - 1.0) > ATOL:
            raise ValidationError("input state is not a density matrix")
        evals = np.linalg.eigvalsh((eff + dagger(eff)) / 2)
        if np.min(evals) < -ATOL or np.max(evals) > 1.0 + ATOL:
            raise ValidationError("effect is not between 0 and I")
        object.__setattr__(self, "input_state", rho)
        object.__setattr__(self, "effect", eff)


@dataclass(frozen=True)
class Strategy:
    """Weighted collection of verification pairs for a target unitary."""

    d: int
    target: np.ndarray
    pairs: list = field(default_factory=list)

    def __post_init__(self):
        target = as_matrix(self.target)
        if target.shape != (self.d, self.d) or not is_unitary(target):
            raise ValidationError("strategy target must be a d x d unitary")
        if not self.pairs:
            raise ValidationError("strategy has no pairs")
        total = sum(p.probability for p in self.pairs)
        if abs(total - 1.0) > 1e-10:
            raise ValidationError(f"pair probabilities sum to {total}, expected 1")
        for i, pair in enumerate(self.pairs):
            out = target @ pair.input_state @ dagger(target)
            passed = np.trace(out @ pair.effect)
            if abs(passed - 1.0) > PAIRING_ATOL:
                raise ValidationError(
                    f"pair {i} fails the pairing condition: Tr[U(rho)E] = {passed}"
                )
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "pairs", list(self.pairs))


@dataclass(frozen=True)
class VerificationOperator:
    """Operator Omega = d sum_l p_l (rho_l^T ⊗ E_l) on the Choi space."""

    d: int
    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix)
        dd = self.d * self.d
        if m.shape != (dd, dd):
            raise ValidationError(f"operator shape {m.shape} does not match d={self.d}")
        evals = np.linalg.eigvalsh((m + dagger(m)) / 2)
        if np.min(evals) < -ATOL or np.max(evals) > 1.0 + ATOL:
            raise ValidationError("verification operator is not between 0 and I")
        object.__setattr__(self, "matrix", m)


def omega_from_strategy(s: Strategy) -> VerificationOperator:
    """Assemble and validate the verification operator of a strategy."""
    dd = s.d * s.d
    m = np.zeros((dd, dd), dtype=np.complex128)
    for pair in s.pairs:
        m += pair.probability * kron(pair.input_state.T, pair.effect)
    m *= s.d
    omega = VerificationOperator(d=s.d, matrix=m)
    overlap = np.trace(m @ choi_of_unitary(s.target).matrix)
    if abs(overlap - 1.0) > PAIRING_ATOL:
        raise ValidationError(f"Tr[Omega Phi_U] = {overlap}, expected 1")
    return omega


def spectral_gap(omega: VerificationOperator) -> float:
    """Gap nu = 1 - (second largest eigenvalue of Omega).

    A valid strategy has top eigenvalue 1 (reached on the target Choi
    state); anything else is rejected.
    """
    spec = hermitian_eig(omega.matrix, atol=ATOL)
    if abs(spec.eigenvalues[0] - 1.0) > 1e-6:
        raise ValidationError(
            f"top eigenvalue {spec.eigenvalues[0]} != 1: not a valid strategy operator"
        )
    return float(1.0 - spec.eigenvalues[1])


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


def mub_bases(d: int) -> list[np.ndarray]:
    """d+1 mutually unbiased bases for prime d, each as columns of a matrix.

    For d = 2 these are the Z, X, Y eigenbases; odd primes use the
    quadratic-phase construction with j-th component omega^(a j^2 + b j)/sqrt(d)
    plus the computational basis.
    """
    if not is_prime(d):
        raise ValidationError(
            f"d={d} is not prime: supply your own bases or a weighted 2-design "
            "(see strategy_from_design)"
        )
    if d == 2:
        s = 1 / np.sqrt(2)
        z = np.eye(2, dtype=np.complex128)
        x = np.array([[s, s], [s, -s]], dtype=np.complex128)
        y = np.array([[s, s], [1j * s, -1j * s]], dtype=np.complex128)
        return [x, y, z]
    omega = np.exp(2j * np.pi / d)
    j = np.arange(d)
    bases = []
    for a in range(d):
        cols = [omega ** ((a * j * j + b * j) % d) / np.sqrt(d) for b in range(d)]
        bases.append(np.array(cols).T)
    bases.append(np.eye(d, dtype=np.complex128))
    return bases


def cb_projector(basis: np.ndarray) -> np.ndarray:
    """Conjugate-basis projector P(B) = sum_psi psi* ⊗ psi (rank d)."""
    basis = as_matrix(basis)
    d = basis.shape[0]
    if basis.shape != (d, d) or not is_unitary(basis):
        raise ValidationError("basis columns must be orthonormal")
    p = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        pr = projector(basis[:, i])
        p += kron(pr.conj(), pr)
    return p


def _pairs_from_bases(target: np.ndarray, bases, weights) -> Strategy:
    d = target.shape[0]
    pairs = []
    for basis, w in zip(bases, weights):
        for i in range(basis.shape[1]):
            rho = projector(basis[:, i])
            eff = target @ rho @ dagger(target)
            pairs.append(VerificationPair(rho, eff, w))
    return Strategy(d=d, target=target, pairs=pairs)


def optimal_strategy(target: np.ndarray, d: int) -> Strategy:
    """Optimal pure-input projective strategy from d+1 MUBs (prime d).

    Its operator is (I + d Phi_U)/(1 + d), the best achievable with
    separable tests, with spectral gap d/(d+1).
    """
    target = as_matrix(target)
    if target.shape != (d, d):
        raise ValidationError("target dimension mismatch")
    bases = mub_bases(d)
    w = 1.0 / (d * (d + 1))
    return _pairs_from_bases(target, bases, [w] * len(bases))


def strategy_from_design(target: np.ndarray, design) -> Strategy:
    """Strategy from a user-supplied weighted 2-design {(p_alpha, phi_alpha)}.

    The weights must sum to d and the vectors must reproduce the optimal
    operator sum_alpha p_alpha phi*_alpha ⊗ phi_alpha = (I + d Phi_U)/(1+d);
    this is validated rather than trusted. Intended for non-prime d where
    no MUB construction is shipped.
    """
    target = as_matrix(target)
    d = target.shape[0]
    weights = np.array([float(w) for w, _ in design])
    vectors = [np.asarray(v, dtype=np.complex128).reshape(-1) for _, v in design]
    if abs(weights.sum() - d) > 1e-8:
        raise ValidationError(f"design weights sum to {weights.sum()}, expected d={d}")
    acc = np.zeros((d * d, d * d), dtype=np.complex128)
    for w, v in zip(weights, vectors):
        pr = projector(v)
        acc += w * kron(pr.conj(), pr)
    phi = choi_of_unitary(np.eye(d)).matrix
    expected = (np.eye(d * d) + d * phi) / (1 + d)
    if np.max(np.abs(acc - expected)) > 1e-8:
        raise ValidationError("design does not reproduce the optimal operator")
    pairs = []
    for w, v in zip(weights, vectors):
        rho = projector(v)
        eff = target @ rho @ dagger(target)
        pairs.append(VerificationPair(rho, eff, w / d))
    return Strategy(d=d, target=target, pairs=pairs)


def g_mub_strategy(target: np.ndarray, d: int, g: int) -> Strategy:
    """Strategy from the first g of the d+1 MUBs; spectral gap (g-1)/g."""
    if not 2 <= g <= d + 1:
        raise ValidationError(f"g={g} outside 2..{d + 1}")
    target = as_matrix(target)
    bases = mub_bases(d)[:g]
    w = 1.0 / (d * g)
    return _pairs_from_bases(target, bases, [w] * g)


def rotate_strategy(identity_strategy: Strategy, target: np.ndarray) -> Strategy:
    """Turn an identity-channel strategy into one for ``target``.

    Inputs are kept, effects are conjugated E -> U E U†.
    """
    target = as_matrix(target)
    if target.shape != (identity_strategy.d, identity_strategy.d):
        raise ValidationError("target dimension mismatch")
    pairs = [
        VerificationPair(p.input_state, target @ p.effect @ dagger(target), p.probability)
        for p in identity_strategy.pairs
    ]
    return Strategy(d=identity_strategy.d, target=target, pairs=pairs)


def trivial_test_mix(s: Strategy, p: float) -> Strategy:
    """Mix in the always-pass trivial test (input I/d, effect I) with weight p.

    The operator becomes p I + (1-p) Omega, which realizes homogeneous
    strategies from the optimal one.
    """
    if not 0.0 <= p < 1.0:
        raise ValidationError(f"trivial test probability {p} outside [0, 1)")
    if p == 0.0:
        return s
    d = s.d
    pairs = [
        VerificationPair(q.input_state, q.effect, q.probability * (1.0 - p))
        for q in s.pairs
    ]
    pairs.append(VerificationPair(np.eye(d) / d, np.eye(d), p))
    return Strategy(d=d, target=s.target, pairs=pairs)


# --- JSON wire format -------------------------------------------------------
#
# {"d": int, "target": matrix, "pairs": [{"p": float, "rho": m, "effect": m}]}
# with matrices as nested [re, im] pairs. An optional "meta" object carries
# derived quantities (e.g. the spectral gap) and is ignored on load.


def strategy_to_json(s: Strategy, meta: dict | None = None) -> str:
    obj = {
        "d": s.d,
        "target": matrix_to_lists(s.target),
        "pairs": [
            {
                "p": float(p.probability),
                "rho": matrix_to_lists(p.input_state),
                "effect": matrix_to_lists(p.effect),
            }
            for p in s.pairs
        ],
    }
    if meta:
        obj["meta"] = meta
    return json.dumps(obj, indent=2)


def strategy_from_json(text: str) -> Strategy:
    try:
        obj = json.loads(text)
        d = int(obj["d"])
        target = matrix_from_lists(obj["target"])
        pairs = [
            VerificationPair(
                matrix_from_lists(p["rho"]),
                matrix_from_lists(p["effect"]),
                float(p["p"]),
            )
            for p in obj["pairs"]
        ]
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValidationError(f"malformed strategy JSON: {exc}") from exc
    return Strategy(d=d, target=target, pairs=pairs)
