import numpy as np
import pytest

from gateverify.channels import KrausChannel
from gateverify.linalg import dagger, haar_random_unitary
from gateverify.strategies import (
    Strategy,
    VerificationOperator,
    VerificationPair,
    cb_projector,
)


def random_density(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = a @ dagger(a)
    return rho / np.trace(rho)


def random_kraus_channel(d: int, n_ops: int, seed: int) -> KrausChannel:
    """Random CPTP channel from a Haar-ish isometry split into Kraus blocks."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n_ops * d, d)) + 1j * rng.standard_normal((n_ops * d, d))
    q, _ = np.linalg.qr(z)
    ops = [q[i * d:(i + 1) * d] for i in range(n_ops)]
    return KrausChannel(d=d, kraus_ops=ops)


def random_valid_omega(d: int, seed: int, n_terms: int = 3) -> VerificationOperator:
    """Random verification operator with top eigenvalue exactly 1 on Phi+.

    Mixtures of conjugate-basis projectors from Haar-random bases are
    exactly the operators of random pure-input projective strategies for
    the identity channel.
    """
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(n_terms))
    m = sum(
        w * cb_projector(haar_random_unitary(d, int(rng.integers(2**31))))
        for w in weights
    )
    return VerificationOperator(d=d, matrix=m)


def random_identity_strategy(d: int, seed: int, n_bases: int = 2) -> Strategy:
    """Random pure-input projective strategy for the identity channel."""
    rng = np.random.default_rng(seed)
    pairs = []
    w = 1.0 / (n_bases * d)
    for _ in range(n_bases):
        basis = haar_random_unitary(d, int(rng.integers(2**31)))
        for i in range(d):
            v = basis[:, i]
            pr = np.outer(v, v.conj())
            pairs.append(VerificationPair(pr, pr, w))
    return Strategy(d=d, target=np.eye(d), pairs=pairs)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
