"""Heisenberg-Weyl operators, the generalized qudit Bell basis, and the
Bell twirl that projects verification operators onto Bell-diagonal form.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .linalg import ATOL, dagger, kron, projector

__all__ = [
    "WeylIndex",
    "BellSpectrum",
    "shift_matrix",
    "clock_matrix",
    "weyl",
    "max_entangled_state",
    "bell_state",
    "bell_basis",
    "bell_twirl",
    "bell_spectrum_of",
]


@dataclass(frozen=True)
class WeylIndex:
    """Pair of shift/clock exponents labelling W(u, v) = X^u Z^v."""

    u: int
    v: int
    d: int

    def __post_init__(self):
        if self.d < 1 or not (0 <= self.u < self.d and 0 <= self.v < self.d):
            raise ValidationError(f"invalid Weyl index ({self.u},{self.v}) for d={self.d}")


@dataclass(frozen=True)
class BellSpectrum:
    """Diagonal of an operator in the Bell basis, indexed by (u, v)."""

    d: int
    lam: np.ndarray  # real (d, d) array, lam[u, v]

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=float)
        if lam.shape != (self.d, self.d):
            raise ValidationError(f"spectrum shape {lam.shape} does not match d={self.d}")
        if np.any(lam < -ATOL) or np.any(lam > 1 + ATOL):
            raise ValidationError("Bell spectrum entries must lie in [0, 1]")
        object.__setattr__(self, "lam", lam)

    @property
    def target_value(self) -> float:
        return float(self.lam[0, 0])

    def second_largest(self) -> float:
        """Largest entry away from the (0, 0) target slot."""
        masked = self.lam.copy()
        masked[0, 0] = -np.inf
        return float(np.max(masked))


def shift_matrix(d: int) -> np.ndarray:
    """X = sum_l |l+1 mod d><l|."""
    x = np.zeros((d, d), dtype=np.complex128)
    for l in range(d):
        x[(l + 1) % d, l] = 1.0
    return x


def clock_matrix(d: int) -> np.ndarray:
    """Z = diag(omega^l) with omega = exp(2 pi i / d)."""
    omega = np.exp(2j * np.pi / d)
    return np.diag(omega ** np.arange(d))


def weyl(idx: WeylIndex) -> np.ndarray:
    """Heisenberg-Weyl unitary W(u, v) = X^u Z^v."""
    d = idx.d
    x = shift_matrix(d)
    z = clock_matrix(d)
    return np.linalg.matrix_power(x, idx.u) @ np.linalg.matrix_power(z, idx.v)


def max_entangled_state(d: int) -> np.ndarray:
    """|Phi+> = d^{-1/2} sum_j |jj> as a length-d^2 vector."""
    v = np.zeros(d * d, dtype=np.complex128)
    v[np.arange(d) * d + np.arange(d)] = 1.0 / np.sqrt(d)
    return v


def bell_state(idx: WeylIndex) -> np.ndarray:
    """Generalized Bell state (I ⊗ W(u,v)) |Phi+>, as a length-d^2 vector.

    The Weyl displacement acts on the second subsystem, which fixes the
    component convention d^{-1/2} sum_l omega^{lv} |l, l+u>.
    """
    d = idx.d
    w = weyl(idx)
    return kron(np.eye(d), w) @ max_entangled_state(d)


def bell_basis(d: int) -> np.ndarray:
    """All d^2 Bell vectors stacked as columns, index (u, v) -> u*d + v."""
    cols = [bell_state(WeylIndex(u, v, d)) for u in range(d) for v in range(d)]
    return np.array(cols).T


def bell_twirl(omega: np.ndarray, d: int) -> np.ndarray:
    """Average omega over (W* ⊗ W) conjugations for all d^2 Weyl operators.

    The result is diagonal in the Bell basis and keeps the diagonal Bell
    entries of the input.
    """
    omega = np.asarray(omega, dtype=np.complex128)
    if omega.shape != (d * d, d * d):
        raise ValidationError(f"operator shape {omega.shape} does not match d={d}")
    acc = np.zeros_like(omega)
    for u in range(d):
        for v in range(d):
            w = weyl(WeylIndex(u, v, d))
            ww = kron(w.conj(), w)
            acc += ww @ omega @ dagger(ww)
    return acc / (d * d)


def bell_spectrum_of(omega: np.ndarray, d: int, atol: float = ATOL) -> BellSpectrum:
    """Read off lambda_{u,v} = <Phi_{u,v}| omega |Phi_{u,v}>.

    Raises if omega is not Bell-diagonal within tolerance.
    """
    omega = np.asarray(omega, dtype=np.complex128)
    basis = bell_basis(d)
    in_bell = dagger(basis) @ omega @ basis
    off = in_bell - np.diag(np.diagonal(in_bell))
    if np.max(np.abs(off)) > atol:
        raise ValidationError("operator is not Bell-diagonal within tolerance")
    lam = np.real(np.diagonal(in_bell)).reshape(d, d)
    return BellSpectrum(d=d, lam=lam)
