"""Channel property testing built on gate verification: detecting the
entanglement-preserving property and lower-bounding the robustness of a
quantum memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChoiState
from .errors import ValidationError
from .weylbell import max_entangled_state

__all__ = [
    "PropertyReport",
    "witness_expectation",
    "ep_detection_rounds",
    "ep_two_mub_rounds",
    "robustness_lower_bound",
    "robustness_rounds",
]

MODES = ("EP_detect", "EP_2MUB", "robustness")


@dataclass(frozen=True)
class PropertyReport:
    d: int
    delta: float
    mode: str
    rounds: int
    r_target: float = 0.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.rounds < 1:
            raise ValidationError("rounds must be >= 1")
        if self.mode == "robustness" and not 0.0 <= self.r_target < self.d - 1:
            raise ValidationError(f"robustness target {self.r_target} outside [0, d-1)")

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "d": self.d, "delta": self.delta, "rounds": self.rounds}
        if self.mode == "robustness":
            out["r_target"] = self.r_target
        return out


def witness_expectation(choi: ChoiState) -> float:
    """Expectation of the witness I/d - Phi+ on the Choi state.

    Nonnegative on every separable state, so a negative value certifies
    that the channel preserves entanglement.
    """
    d = choi.d
    phi = max_entangled_state(d)
    overlap = float(np.real(phi.conj() @ choi.matrix @ phi))
    return 1.0 / d - overlap


def _check_delta(delta: float):
    if not 0.0 < delta < 1.0:
        raise ValidationError(f"delta={delta} outside (0, 1)")


def ep_detection_rounds(d: int, delta: float) -> int:
    """Rounds of the optimal strategy that certify entanglement preservation.

    The witness threshold sits at infidelity 1 - 1/d, which turns the
    trial-count ceiling into ceil(ln(1/delta) / ln((d+1)/2)); a single
    round suffices once d >= 2/delta - 1.
    """
    if d < 2:
        raise ValidationError("entanglement detection needs d >= 2")
    _check_delta(delta)
    return math.ceil(math.log(1.0 / delta) / math.log((d + 1) / 2.0))


def ep_two_mub_rounds(d: int, delta: float) -> int:
    """Same detection with only two measurement settings:
    ceil(ln(1/delta) / ln(2d/(d+1)))."""
    if d < 2:
        raise ValidationError("entanglement detection needs d >= 2")
    _check_delta(delta)
    return math.ceil(math.log(1.0 / delta) / math.log(2.0 * d / (d + 1)))


def robustness_lower_bound(f_ent: float, d: int) -> float:
    """Witness-based lower bound max(0, d F_E - 1) on the robustness of
    quantum memory (negative witness values are clamped: the bound is
    vacuous there)."""
    if not 0.0 <= f_ent <= 1.0 + 1e-12:
        raise ValidationError(f"entanglement fidelity {f_ent} outside [0, 1]")
    return max(0.0, d * f_ent - 1.0)


def robustness_rounds(d: int, delta: float, r: float) -> int:
    """Rounds certifying robustness at least r: ceil(ln(1/delta) /
    ln((d+1)/(r+2))); r = 0 reduces to plain entanglement detection."""
    if d < 2:
        raise ValidationError("robustness certification needs d >= 2")
    _check_delta(delta)
    if not 0.0 <= r < d - 1:
        raise ValidationError(f"robustness target r={r} outside [0, d-1)")
    return math.ceil(math.log(1.0 / delta) / math.log((d + 1) / (r + 2.0)))
