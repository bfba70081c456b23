"""Monte Carlo simulation of the three-step verification protocol against
simulated noisy channels.

Each round draws a verification pair, prepares one pure eigenstate of its
input (mixed inputs sample an eigenstate per round, keeping preparations
physically pure), pushes it through the channel and draws the binary test
outcome. All randomness is counter-keyed by (seed, round), so runs are
reproducible and chunks can be simulated independently with bitwise
identical results.

The inner loop runs on a compiled Cython kernel when the extension built,
with a vectorized numpy fallback otherwise; both produce identical
streams. ``KERNEL_BACKEND`` records which one is active.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from .analysis import trial_count
from .channels import KrausChannel, average_fidelity
from .errors import NumericFault, ValidationError
from .strategies import Strategy, VerificationOperator

if os.environ.get("GATEVERIFY_PURE_PYTHON"):  # pragma: no cover
    from . import _simkernel_py as _kernel

    KERNEL_BACKEND = "python"
else:  # pragma: no cover - depends on the build environment
    try:
        from . import _simkernel as _kernel

        KERNEL_BACKEND = "cython"
    except ImportError:
        from . import _simkernel_py as _kernel

        KERNEL_BACKEND = "python"

__all__ = [
    "KERNEL_BACKEND",
    "TrialRecord",
    "VerificationRun",
    "run_verification",
    "verdict",
    "estimate_pass_rate",
    "run_to_csv",
    "run_summary",
]


@dataclass(frozen=True)
class TrialRecord:
    round_index: int
    pair_index: int
    passed: bool


@dataclass(frozen=True)
class VerificationRun:
    seed: int
    N: int
    pair_indices: np.ndarray
    passed: np.ndarray

    @property
    def all_passed(self) -> bool:
        return bool(np.all(self.passed))

    @property
    def empirical_pass_rate(self) -> float:
        return float(np.mean(self.passed)) if self.N else 0.0

    @property
    def failures(self) -> int:
        return int(self.N - np.sum(self.passed))

    @property
    def records(self) -> list[TrialRecord]:
        return [
            TrialRecord(k, int(p), bool(s))
            for k, (p, s) in enumerate(zip(self.pair_indices, self.passed))
        ]


def _pass_tables(channel: KrausChannel, s: Strategy):
    """Flattened (pair_cum, sub_offset, sub_cum, q) tables for the kernel.

    Mixed inputs are eigendecomposed; each eigenstate carries its weight
    and its own pass probability Tr[E(psi) E_l].
    """
    if channel.d != s.d:
        raise ValidationError(f"channel d={channel.d} does not match strategy d={s.d}")
    pair_cum = np.cumsum([p.probability for p in s.pairs])
    pair_cum[-1] = 1.0  # guard against roundoff in the final bin
    sub_offset = [0]
    sub_cum = []
    qs = []
    for pair in s.pairs:
        vals, vecs = np.linalg.eigh(pair.input_state)
        weights = []
        for i in range(len(vals)):
            w = float(vals[i])
            if w < 1e-12:
                continue
            psi = vecs[:, i]
            out = channel.apply(np.outer(psi, psi.conj()))
            q = float(np.real(np.trace(out @ pair.effect)))
            if not -1e-9 <= q <= 1.0 + 1e-9:
                raise NumericFault(f"pass probability {q} escapes [0, 1]")
            weights.append(w)
            qs.append(min(max(q, 0.0), 1.0))
        cum = np.cumsum(weights)
        cum /= cum[-1]
        cum[-1] = 1.0
        sub_cum.extend(cum)
        sub_offset.append(len(sub_cum))
    return (
        np.asarray(pair_cum, dtype=np.float64),
        np.asarray(sub_offset, dtype=np.int64),
        np.asarray(sub_cum, dtype=np.float64),
        np.asarray(qs, dtype=np.float64),
    )


def run_verification(channel, s: Strategy, N: int, seed: int) -> VerificationRun:
    """Simulate N protocol rounds; deterministic for a given seed.

    ``channel`` may be a single KrausChannel or a list, in which case round
    k runs against channels[k % len] (per-round drift).
    """
    if N < 0:
        raise ValidationError("round count must be nonnegative")
    channels = channel if isinstance(channel, (list, tuple)) else [channel]
    per_channel = [_pass_tables(ch, s) for ch in channels]
    outputs = [
        _kernel.simulate_rounds(seed, 0, N, *tables) for tables in per_channel
    ]
    pair_idx = outputs[0][0]
    passed = np.empty(N, dtype=np.uint8)
    for i, (_, ch_passed) in enumerate(outputs):
        passed[i::len(outputs)] = ch_passed[i::len(outputs)]
    return VerificationRun(seed=seed, N=N, pair_indices=pair_idx, passed=passed)


def verdict(run: VerificationRun, epsilon: float, delta: float,
            omega: VerificationOperator) -> dict:
    """Accept/reject statement for a completed run.

    Requires at least trial_count(epsilon, delta, omega) rounds; anything
    less is refused outright rather than weakened into a vaguer claim.
    """
    needed = trial_count(epsilon, delta, omega)
    if run.N < needed:
        raise ValidationError(
            f"run has {run.N} rounds but {needed} are required for "
            f"epsilon={epsilon}, delta={delta}; refusing to issue a verdict"
        )
    d = omega.d
    f_avg = average_fidelity(1.0 - epsilon, d)
    if run.all_passed:
        statement = (
            f"accepted: all {run.N} rounds passed (needed {needed}); with "
            f"significance level {delta} the entanglement fidelity is at least "
            f"{1.0 - epsilon} and the average gate fidelity at least {f_avg}"
        )
    else:
        statement = (
            f"rejected: {run.failures} of {run.N} rounds failed; "
            f"the all-pass condition does not hold"
        )
    return {"accepted": run.all_passed, "statement": statement}


def estimate_pass_rate(channel, s: Strategy, trials: int, seed: int) -> tuple[float, float]:
    """Binomial estimate (rate, stderr) of the per-round pass probability."""
    if trials < 100:
        raise ValidationError("need at least 100 trials for a rate estimate")
    run = run_verification(channel, s, trials, seed)
    rate = run.empirical_pass_rate
    stderr = float(np.sqrt(rate * (1.0 - rate) / trials))
    return rate, stderr


def run_to_csv(run: VerificationRun, fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(["round", "pair", "passed"])
    for k in range(run.N):
        writer.writerow([k, int(run.pair_indices[k]), int(run.passed[k])])


def run_summary(run: VerificationRun, verdict_obj: dict | None = None) -> dict:
    out = {
        "seed": run.seed,
        "N": run.N,
        "pass_rate": run.empirical_pass_rate,
        "all_passed": run.all_passed,
        "kernel_backend": KERNEL_BACKEND,
    }
    if verdict_obj is not None:
        out["verdict"] = verdict_obj
    return out
