"""Counter-based random streams (splitmix64).

Gate draws are keyed by spacetime coordinates so that any engine visiting a
subset of the circuit sees exactly the same gates, independent of visiting
order or worker count.  The same mix function derives per-realization seeds
from (master seed, point index, realization index) in the sweep harness.
"""

from __future__ import annotations

import numba
import numpy as np

U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)
_M1 = U64(0xBF58476D1CE4E5B9)
_M2 = U64(0x94D049BB133111EB)

# distinct domains for the independent streams hanging off one realization seed
DOM_STRUCT = 0x1111111111111111
DOM_GATE = 0x2222222222222222
DOM_GATE_2D_CHAIN = 0x3333333333333333
DOM_INTERACT = 0x4444444444444444
DOM_SWAP2D = 0x5555555555555555


@numba.njit(numba.uint64(numba.uint64), cache=True, inline="always")
def _mix(z):
    z = (z + U64(0x9E3779B97F4A7C15)) & U64(0xFFFFFFFFFFFFFFFF)
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@numba.njit(numba.uint64(numba.uint64, numba.uint64), cache=True, inline="always")
def mix2(a, b):
    return _mix(a ^ (_mix(b) + U64(0x9E3779B97F4A7C15)))


@numba.njit(numba.uint64(numba.uint64, numba.uint64, numba.uint64), cache=True,
            inline="always")
def mix3(a, b, c):
    return mix2(mix2(a, b), c)


@numba.njit(numba.uint64(numba.uint64, numba.uint64, numba.uint64, numba.uint64),
            cache=True, inline="always")
def mix4(a, b, c, d):
    return mix2(mix3(a, b, c), d)


def np_mix(z: np.ndarray) -> np.ndarray:
    """Vectorized splitmix finalizer, identical to the numba one."""
    with np.errstate(over="ignore"):
        z = (z.astype(U64) + _GOLD)
        z = (z ^ (z >> U64(30))) * _M1
        z = (z ^ (z >> U64(27))) * _M2
        return z ^ (z >> U64(31))


def np_mix2(a, b) -> np.ndarray:
    with np.errstate(over="ignore"):
        return np_mix(np.asarray(a, dtype=U64) ^ (np_mix(np.asarray(b, dtype=U64)) + _GOLD))


def np_mix3(a, b, c) -> np.ndarray:
    return np_mix2(np_mix2(a, b), c)


def np_mix4(a, b, c, d) -> np.ndarray:
    return np_mix2(np_mix3(a, b, c), d)


def as_u64(x) -> np.uint64:
    """Two's-complement cast accepting negative ints (bond coordinates)."""
    return U64(np.int64(x).view(np.uint64)) if np.isscalar(x) else np.asarray(x, dtype=np.int64).view(np.uint64)


def realization_seed(master: int, point_index: int, realization_index: int) -> int:
    """Substream seed for one disorder realization of one grid point."""
    return int(np_mix3(U64(master & 0xFFFFFFFFFFFFFFFF), U64(point_index), U64(realization_index)))
