"""Pure-numpy fallback for the trial-loop kernel.

Implements exactly the counter-keyed splitmix64 stream of _simkernel.pyx
with vectorized uint64 arithmetic; outputs are bitwise identical to the
compiled kernel.
"""

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


def _mix_scalar(x: int) -> int:
    x &= _MASK
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK
    x ^= x >> 31
    return x


def _mix_array(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    x ^= x >> np.uint64(30)
    x *= _M1
    x ^= x >> np.uint64(27)
    x *= _M2
    x ^= x >> np.uint64(31)
    return x


def _unit_array(state: int, counters: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        h = _mix_array(np.uint64(state) + (counters + np.uint64(1)) * _GOLDEN)
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53


def simulate_rounds(seed, start, n, pair_cum, sub_offset, sub_cum, q):
    """Simulate rounds [start, start+n); returns (pair indices, passed)."""
    state = _mix_scalar(int(seed))
    with np.errstate(over="ignore"):
        base = (np.uint64(start) + np.arange(n, dtype=np.uint64)) * np.uint64(3)
    u_pair = _unit_array(state, base)
    u_sub = _unit_array(state, base + np.uint64(1))
    u_acc = _unit_array(state, base + np.uint64(2))
    pair = np.searchsorted(pair_cum, u_pair, side="right").astype(np.int64)
    qidx = np.empty(int(n), dtype=np.int64)
    for l in np.unique(pair):
        mask = pair == l
        lo, hi = int(sub_offset[l]), int(sub_offset[l + 1])
        qidx[mask] = lo + np.searchsorted(sub_cum[lo:hi], u_sub[mask], side="right")
    passed = (u_acc < q[qidx]).astype(np.uint8)
    return pair, passed
