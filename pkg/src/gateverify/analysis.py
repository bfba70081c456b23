"""Performance analysis of verification strategies: pass-probability
bounds, trial-count formulas, a numeric bracket for the general
pass-probability program, and the adversarial (correlated-rounds)
fidelity bound for homogeneous strategies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericFault, ValidationError
from .linalg import dagger, hermitian_eig, is_unitary, kron, partial_trace
from .strategies import VerificationOperator, spectral_gap
from .weylbell import BellSpectrum, WeylIndex, max_entangled_state, weyl

__all__ = [
    "HomogeneousStrategy",
    "SymmetricPoint",
    "UselessStrategyError",
    "pass_probability_bound",
    "target_frame_spectrum",
    "pass_probability_bell_exact",
    "pass_probability_numeric",
    "trial_count",
    "symmetric_point",
    "symmetric_curve",
    "adversarial_fidelity_bound",
    "adversarial_trial_count",
    "optimal_lambda",
    "analysis_report",
]


class UselessStrategyError(ValidationError):
    """No channel can pass the tests often enough to matter."""


@dataclass(frozen=True)
class HomogeneousStrategy:
    """Strategy with operator Phi_U + lam (I - Phi_U): one number suffices."""

    d: int
    lam: float

    def __post_init__(self):
        if not 0.0 <= self.lam < 1.0:
            raise ValidationError(f"lambda={self.lam} outside [0, 1)")


@dataclass(frozen=True)
class SymmetricPoint:
    """Joint (pass probability, pass-and-fidelity weight) of the symmetric
    state with m bad rounds out of N+1."""

    m: int
    N: int
    p: float
    f: float

    def __post_init__(self):
        if not -1e-12 <= self.f <= self.p <= 1.0 + 1e-12:
            raise ValidationError(f"invalid symmetric point p={self.p}, f={self.f}")


def _check_unit_interval(name, value, open_ends=True):
    ok = 0.0 < value < 1.0 if open_ends else 0.0 <= value <= 1.0
    if not ok:
        raise ValidationError(f"{name}={value} outside the unit interval")


def pass_probability_bound(omega: VerificationOperator, epsilon: float) -> float:
    """Spectral upper bound 1 - nu(Omega) * epsilon on the pass probability."""
    _check_unit_interval("epsilon", epsilon, open_ends=False)
    return 1.0 - spectral_gap(omega) * epsilon


def target_frame_spectrum(omega: VerificationOperator, target: np.ndarray) -> BellSpectrum:
    """Bell spectrum of Omega in the frame where the target Choi state is
    Phi+, i.e. of (I ⊗ U)† Omega (I ⊗ U).

    Raises if the operator is not Bell-diagonal relative to its target.
    """
    from .weylbell import bell_spectrum_of  # local import avoids a cycle

    d = omega.d
    rot = kron(np.eye(d), np.asarray(target, dtype=complex))
    return bell_spectrum_of(dagger(rot) @ omega.matrix @ rot, d)


def pass_probability_bell_exact(spectrum: BellSpectrum, epsilon: float) -> float:
    """Exact maximal pass probability for a Bell-diagonal operator.

    The worst admissible channel keeps weight 1-eps on the target Bell
    state and moves eps onto the largest remaining eigenvalue, so the
    spectral bound is tight here.
    """
    _check_unit_interval("epsilon", epsilon, open_ends=False)
    if abs(spectrum.target_value - 1.0) > 1e-8:
        raise ValidationError(
            f"target Bell eigenvalue is {spectrum.target_value}, expected 1"
        )
    beta = spectrum.second_largest()
    return (1.0 - epsilon) + epsilon * beta


def _unitary_from_top_eigenvector(omega: VerificationOperator) -> np.ndarray:
    """Recover the target unitary from Omega's top eigenvector."""
    d = omega.d
    spec = hermitian_eig(omega.matrix)
    if abs(spec.eigenvalues[0] - 1.0) > 1e-6:
        raise ValidationError("top eigenvalue != 1, cannot infer the target")
    if spec.eigenvalues[0] - spec.eigenvalues[1] < 1e-8:
        raise ValidationError(
            "degenerate top eigenspace: pass the target unitary explicitly"
        )
    vec = spec.eigenvectors[:, 0]
    u = np.sqrt(d) * vec.reshape(d, d).T
    if not is_unitary(u, atol=1e-6):
        raise ValidationError("top eigenvector is not a maximally entangled state")
    return u


def pass_probability_numeric(
    omega: VerificationOperator,
    epsilon: float,
    iterations: int = 300,
    seed: int = 0,
    target: np.ndarray | None = None,
) -> tuple[float, float]:
    """Bracket (lower, upper) of the maximal pass probability.

    The upper bound is spectral. The lower bound is the best feasible value
    found by (a) mixtures of the target channel with Weyl-shifted unitaries,
    which are exact for Bell-diagonal operators, and (b) projected gradient
    ascent over Stinespring-parameterized channels with the fidelity
    constraint enforced by penalty plus a final feasibility projection.
    Every reported lower value comes from an explicitly feasible channel.
    """
    _check_unit_interval("epsilon", epsilon, open_ends=False)
    d = omega.d
    om = omega.matrix
    upper = pass_probability_bound(omega, epsilon)
    u = np.asarray(target, dtype=complex) if target is not None else _unitary_from_top_eigenvector(omega)
    if not is_unitary(u, atol=1e-8):
        raise ValidationError("target is not unitary")
    phi_plus = max_entangled_state(d)
    vec_u = kron(np.eye(d), u) @ phi_plus
    phi_u = np.outer(vec_u, vec_u.conj())

    # Weyl-shifted Bell states relative to the target: orthogonal to Phi_U,
    # each a legal unitary-channel Choi state.
    shifted = []
    for uu in range(d):
        for vv in range(d):
            if (uu, vv) == (0, 0):
                continue
            w = weyl(WeylIndex(uu, vv, d))
            vec = kron(np.eye(d), w @ u) @ phi_plus
            shifted.append(np.outer(vec, vec.conj()))
    shift_vals = [float(np.real(np.trace(om @ s))) for s in shifted]
    anchor = shifted[int(np.argmax(shift_vals))]
    anchor_val = max(shift_vals)

    def feasible_value(choi_mat: np.ndarray) -> float:
        """Pass probability after projecting onto the fidelity-feasible set."""
        fid = float(np.real(np.trace(phi_u @ choi_mat)))
        val = float(np.real(np.trace(om @ choi_mat)))
        if fid <= 1.0 - epsilon + 1e-12:
            return val
        s = (fid - (1.0 - epsilon)) / fid
        return (1.0 - s) * val + s * anchor_val

    best = max(
        feasible_value((1.0 - epsilon) * phi_u + epsilon * s) for s in shifted
    )

    # Stinespring ascent: K_i stacked into an isometry, Wirtinger gradient,
    # polar retraction, quadratic penalty on the fidelity constraint.
    n_env = d * d
    fid_limit = 1.0 - epsilon

    def choi_of_stack(w_stack: np.ndarray) -> np.ndarray:
        acc = np.zeros((d * d, d * d), dtype=complex)
        for i in range(n_env):
            x = w_stack[i * d:(i + 1) * d].T.reshape(-1)
            acc += np.outer(x, x.conj())
        return acc / d

    rng = np.random.default_rng(seed)
    for _ in range(3):
        z = rng.standard_normal((n_env * d, d)) + 1j * rng.standard_normal((n_env * d, d))
        q, _ = np.linalg.qr(z)
        w_stack = q
        mu = 25.0
        eta = 0.2
        for it in range(iterations):
            choi = choi_of_stack(w_stack)
            val = float(np.real(np.trace(om @ choi)))
            fid = float(np.real(np.trace(phi_u @ choi)))
            best = max(best, feasible_value(choi))
            viol = max(0.0, fid - fid_limit)
            grad = np.zeros_like(w_stack)
            eff = om - (2.0 * mu * viol) * phi_u
            for i in range(n_env):
                x = w_stack[i * d:(i + 1) * d].T.reshape(-1)
                grad[i * d:(i + 1) * d] = (eff @ x).reshape(d, d).T / d
            w_new = w_stack + eta * grad
            uu, _, vv = np.linalg.svd(w_new, full_matrices=False)
            w_stack = uu @ vv
            if it % 50 == 49 and viol > 1e-9:
                mu *= 4.0
        best = max(best, feasible_value(choi_of_stack(w_stack)))

    if best > upper + 1e-8:
        raise NumericFault(
            f"feasible value {best} exceeds the spectral bound {upper}"
        )
    return min(best, upper), upper


def trial_count(epsilon: float, delta: float, omega: VerificationOperator) -> int:
    """Rounds needed so the worst admissible channel passes them all with
    probability at most delta: ceil(ln(1/delta) / ln(1/P)) at the spectral
    bound P = 1 - nu*eps.

    Degenerate corners follow the ceiling convention: as delta -> 1 the
    ratio vanishes and the ceiling collapses to a single round (exactly 0
    only in the delta = 1 limit, outside the domain), and P = 0 also
    yields a single round.
    """
    _check_unit_interval("epsilon", epsilon)
    _check_unit_interval("delta", delta)
    nu = spectral_gap(omega)
    if nu <= 1e-12:
        raise ValidationError("spectral gap is zero: strategy cannot verify")
    p = 1.0 - nu * epsilon
    if p <= 0.0:
        return 1
    return math.ceil(math.log(1.0 / delta) / math.log(1.0 / p))


def symmetric_point(m: int, N: int, lam: float) -> SymmetricPoint:
    """Pass/fidelity weights of the m-bad-rounds symmetric state.

    p = [(N+1-m) lam^m + m lam^(m-1)] / (N+1) and f = (N+1-m) lam^m / (N+1),
    with lam^0 = 1 even at lam = 0 and the lam^(m-1) term absent at m = 0.
    """
    if not 0 <= m <= N + 1:
        raise ValidationError(f"m={m} outside 0..N+1")
    if not 0.0 <= lam < 1.0:
        raise ValidationError(f"lambda={lam} outside [0, 1)")
    lam_m = lam**m if m > 0 else 1.0
    lam_m1 = lam ** (m - 1) if m > 1 else 1.0
    f = (N + 1 - m) * lam_m / (N + 1)
    p = f + (m * lam_m1 / (N + 1) if m > 0 else 0.0)
    return SymmetricPoint(m=m, N=N, p=p, f=f)


def symmetric_curve(N: int, lam: float) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (p, f) arrays over m = 0..N+1."""
    m = np.arange(N + 2, dtype=float)
    lam_m = np.power(lam, m)  # 0^0 == 1 in numpy, as required
    lam_prev = np.concatenate([[0.0], np.power(lam, np.maximum(m[1:] - 1, 0.0))])
    f = (N + 1 - m) * lam_m / (N + 1)
    p = f + m * lam_prev / (N + 1)
    return p, f


def adversarial_fidelity_bound(N: int, delta: float, hs: HomogeneousStrategy) -> float:
    """Worst-case fidelity of the left-out round after N passed tests.

    Minimizes (sum c f)/(sum c p) over mixtures of symmetric points subject
    to sum c p >= delta. The minimum sits on a vertex: either one feasible
    point or a two-point mixture saturating the constraint, so exhaustive
    vertex enumeration is exact.
    """
    if N < 1:
        raise ValidationError(f"N={N} must be >= 1")
    _check_unit_interval("delta", delta)
    p, f = symmetric_curve(N, hs.lam)
    feasible = p >= delta
    if not np.any(feasible):
        raise UselessStrategyError(
            f"no symmetric state reaches pass probability {delta}"
        )
    best = float(np.min(f[feasible] / p[feasible]))
    # p is non-increasing in m, so constraint-crossing pairs live across the
    # feasibility threshold.
    above = np.nonzero(p > delta)[0]
    below = np.nonzero(p < delta)[0]
    if above.size and below.size:
        p1 = p[above][:, None]
        f1 = f[above][:, None]
        p2 = p[below][None, :]
        f2 = f[below][None, :]
        c = (delta - p2) / (p1 - p2)
        vals = (c * f1 + (1.0 - c) * f2) / delta
        best = min(best, float(np.min(vals)))
    return best


def adversarial_trial_count(epsilon: float, delta: float, hs: HomogeneousStrategy,
                            cap: int = 10**7) -> int:
    """Smallest N with adversarial fidelity bound >= 1 - epsilon.

    Doubling plus bisection; the bracket endpoints are re-verified so a
    monotonicity failure of F in N would surface as an error instead of a
    silent wrong answer.
    """
    _check_unit_interval("epsilon", epsilon)
    _check_unit_interval("delta", delta)

    def ok(n):
        return adversarial_fidelity_bound(n, delta, hs) >= 1.0 - epsilon

    if ok(1):
        return 1
    lo, hi = 1, 2
    while not ok(hi):
        lo = hi
        hi *= 2
        if hi > cap:
            raise NumericFault(
                f"no N <= {cap} reaches fidelity {1.0 - epsilon} at delta={delta}"
            )
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    if not ok(hi) or ok(hi - 1):
        raise NumericFault("fidelity bound is not monotone across the bracket")
    return hi


def optimal_lambda(N: int, delta: float) -> float:
    """Homogeneous eigenvalue maximizing the adversarial fidelity bound.

    Coarse grid scan to bracket the optimum, then golden-section; ties
    resolve toward the smaller lambda. Approaches 1/e for small delta and
    large N.
    """
    if N < 1:
        raise ValidationError(f"N={N} must be >= 1")
    _check_unit_interval("delta", delta)
    hi_end = 1.0 - 1e-9

    def obj(lam):
        return adversarial_fidelity_bound(N, delta, HomogeneousStrategy(d=2, lam=lam))

    grid = np.linspace(0.0, hi_end, 201)
    vals = np.array([obj(l) for l in grid])
    k = int(np.argmax(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    e = a + invphi * (b - a)
    fc, fe = obj(c), obj(e)
    for _ in range(120):
        if fc >= fe:  # prefer the left (smaller lambda) on ties
            b, e, fe = e, c, fc
            c = b - invphi * (b - a)
            fc = obj(c)
        else:
            a, c, fc = c, e, fe
            e = a + invphi * (b - a)
            fe = obj(e)
    return float((a + b) / 2)


def analysis_report(
    omega: VerificationOperator,
    epsilon: float,
    delta: float,
    spectrum: BellSpectrum | None = None,
    adversarial: dict | None = None,
) -> dict:
    """Plain-dict report mirroring the JSON wire format."""
    nu = spectral_gap(omega)
    report = {
        "inputs": {"d": omega.d, "epsilon": epsilon, "delta": delta},
        "nu": nu,
        "P_bound": pass_probability_bound(omega, epsilon),
        "P_exact": (
            pass_probability_bell_exact(spectrum, epsilon) if spectrum is not None else None
        ),
        "N": trial_count(epsilon, delta, omega),
        "adversarial": adversarial,
    }
    return report
