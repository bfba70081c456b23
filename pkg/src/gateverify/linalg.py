"""Dense complex linear algebra for small Hilbert spaces.

Everything is carried by complex128 numpy arrays; the dimensions in this
package stay at or below 256 (Choi spaces of up to 4-qubit gates), so
plain dense LAPACK routines are more than adequate.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NumericFault, ValidationError

# Global numeric tolerances: matrix equality / PSD slack, and the stricter
# Hermiticity/unitarity checks.
ATOL = 1e-9
HERM_ATOL = 1e-10
# Eigenvalues closer than this are treated as one degenerate group.
DEGENERACY_ATOL = 1e-8

__all__ = [
    "ATOL",
    "HERM_ATOL",
    "DEGENERACY_ATOL",
    "HermitianSpectrum",
    "as_matrix",
    "dagger",
    "kron",
    "kron_all",
    "partial_trace",
    "is_hermitian",
    "is_unitary",
    "is_psd",
    "hermitian_eig",
    "haar_random_unitary",
    "haar_random_state",
    "projector",
]


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite complex128 2-D array."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValidationError(f"expected a matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise NumericFault("matrix contains NaN/Inf entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product."""
    return np.kron(a, b)


def kron_all(*mats: np.ndarray) -> np.ndarray:
    out = np.asarray(mats[0], dtype=np.complex128)
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def projector(vec: np.ndarray) -> np.ndarray:
    """Rank-1 projector |v><v| of a (normalized) column vector."""
    v = np.asarray(vec, dtype=np.complex128).reshape(-1)
    return np.outer(v, v.conj())


def partial_trace(m: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out the subsystems not listed in ``keep``.

    ``dims`` are the subsystem dimensions in tensor order and must multiply
    to the (square) matrix size; ``keep`` is an iterable of subsystem
    indices that survive.
    """
    m = as_matrix(m)
    dims = list(dims)
    total = int(np.prod(dims))
    if m.shape != (total, total):
        raise ValidationError(
            f"dims {dims} do not match matrix shape {m.shape}"
        )
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValidationError(f"keep indices {keep} out of range")
    n = len(dims)
    t = m.reshape(dims + dims)
    # Contract row/column indices of every traced subsystem, highest first
    # so the remaining axis numbers stay valid.
    for k in reversed(range(n)):
        if k not in keep:
            t = np.trace(t, axis1=k, axis2=k + (t.ndim // 2))
    size = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(size, size)


def is_hermitian(m: np.ndarray, atol: float = HERM_ATOL) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - dagger(m))) <= atol


def is_unitary(m: np.ndarray, atol: float = HERM_ATOL) -> bool:
    m = np.asarray(m)
    if m.shape[0] != m.shape[1]:
        return False
    return np.max(np.abs(dagger(m) @ m - np.eye(m.shape[0]))) <= atol


def is_psd(m: np.ndarray, atol: float = ATOL) -> bool:
    if not is_hermitian(m, atol=max(atol, HERM_ATOL)):
        return False
    return float(np.min(np.linalg.eigvalsh(m))) >= -atol


@dataclass(frozen=True)
class HermitianSpectrum:
    """Eigen-decomposition of a Hermitian matrix.

    ``eigenvalues`` are sorted descending and ``eigenvectors`` holds the
    matching orthonormal eigenvectors as columns.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)

    def groups(self, atol: float = DEGENERACY_ATOL):
        """Split the spectrum into degenerate groups.

        Returns a list of ``(eigenvalue, projector)`` pairs, one per group,
        with the group eigenvalue taken as the mean of its members.
        """
        vals = self.eigenvalues
        out = []
        start = 0
        for i in range(1, len(vals) + 1):
            if i == len(vals) or vals[start] - vals[i] > atol:
                block = self.eigenvectors[:, start:i]
                out.append((float(np.mean(vals[start:i])), block @ dagger(block)))
                start = i
        return out


def hermitian_eig(m: np.ndarray, atol: float = HERM_ATOL) -> HermitianSpectrum:
    """Eigen-decomposition with descending eigenvalues.

    Near-degenerate eigenvector blocks are re-orthonormalized so that
    downstream eigenspace projectors are clean.
    """
    m = as_matrix(m)
    if not is_hermitian(m, atol=atol):
        raise ValidationError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    # Re-orthonormalize within degenerate groups (QR is a numerical no-op
    # for already-orthonormal columns but removes LAPACK mixing artifacts).
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[start] - vals[i] > DEGENERACY_ATOL:
            if i - start > 1:
                q, _ = np.linalg.qr(vecs[:, start:i])
                vecs[:, start:i] = q
            start = i
    spec = HermitianSpectrum(eigenvalues=vals, eigenvectors=vecs)
    if np.max(np.abs(spec.reconstruct() - m)) >= 1e-9:
        raise NumericFault("eigendecomposition failed to reconstruct input")
    return spec


def haar_random_unitary(d: int, seed: int) -> np.ndarray:
    """Haar-distributed d x d unitary, deterministic for a given seed."""
    if d < 1:
        raise ValidationError(f"dimension must be >= 1, got {d}")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    # Fix the phase ambiguity of QR so the distribution is Haar.
    phases = np.diagonal(r) / np.abs(np.diagonal(r))
    return q * phases


def haar_random_state(d: int, seed: int) -> np.ndarray:
    """Haar-random pure state as a length-d vector."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)
