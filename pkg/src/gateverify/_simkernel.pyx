# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial-loop kernel.

Counter-based randomness: round k consumes the three splitmix64 outputs
keyed by (seed, 3k), (seed, 3k+1), (seed, 3k+2) for pair choice, input
eigenstate choice, and the accept draw. The pure-python kernel
(_simkernel_py) implements the identical stream; outputs must match
bitwise.
"""

import numpy as np

from libc.stdint cimport int64_t, uint8_t, uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15U
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _mix(uint64_t x) nogil:
    x ^= x >> 30
    x *= <uint64_t>0xBF58476D1CE4E5B9U
    x ^= x >> 27
    x *= <uint64_t>0x94D049BB133111EBU
    x ^= x >> 31
    return x


cdef inline double _unit(uint64_t state, uint64_t counter) nogil:
    cdef uint64_t h = _mix(state + (counter + 1U) * GOLDEN)
    return <double>(h >> 11) * INV_2_53


def simulate_rounds(seed, start, n,
                    double[::1] pair_cum not None,
                    int64_t[::1] sub_offset not None,
                    double[::1] sub_cum not None,
                    double[::1] q not None):
    """Simulate rounds [start, start+n); returns (pair indices, passed)."""
    cdef uint64_t state = _mix(<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef uint64_t c0
    cdef uint64_t start_c = <uint64_t>(int(start))
    cdef Py_ssize_t k, l, j
    cdef Py_ssize_t count = int(n)
    cdef double u
    pair_out = np.empty(count, dtype=np.int64)
    pass_out = np.empty(count, dtype=np.uint8)
    cdef int64_t[::1] vp = pair_out
    cdef uint8_t[::1] vs = pass_out
    with nogil:
        for k in range(count):
            c0 = (start_c + <uint64_t>k) * 3U
            u = _unit(state, c0)
            l = 0
            while u >= pair_cum[l]:
                l += 1
            u = _unit(state, c0 + 1U)
            j = sub_offset[l]
            while u >= sub_cum[j]:
                j += 1
            u = _unit(state, c0 + 2U)
            vp[k] = l
            vs[k] = 1 if u < q[j] else 0
    return pair_out, pass_out
