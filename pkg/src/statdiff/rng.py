"""Counter-based uniform variates.

``uniforms(seed, index, stream)`` is a pure function of its arguments: the
value for sample ``i`` never depends on how many other samples were drawn
or in which order, so Monte Carlo estimates are invariant under any
partitioning of the index range. The mixer is the SplitMix64 finalizer
applied to ``seed + (counter + 1) * golden``.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def stream_key(seed: int, stream: int) -> np.uint64:
    """Derive an independent 64-bit key for substream ``stream`` of ``seed``."""
    with np.errstate(over="ignore"):
        base = np.uint64(seed & _MASK)
        s = np.array([stream & _MASK], dtype=np.uint64)
        return _mix(base ^ _mix((s + np.uint64(1)) * _GOLDEN))[0]


def uniforms(seed: int, index: np.ndarray, stream: int = 0) -> np.ndarray:
    """Uniform variates on the open interval (0, 1), one per ``index``."""
    idx = np.asarray(index, dtype=np.uint64)
    key = stream_key(seed, stream)
    with np.errstate(over="ignore"):
        z = _mix(key + (idx + np.uint64(1)) * _GOLDEN)
    # top 53 bits, offset by half a ulp so 0 and 1 are never produced
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)
