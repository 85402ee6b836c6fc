import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB

# Lanes of the edge stream: three words per examined edge
LANE_A = 0
LANE_B = 1
LANE_U = 2
_LANES_PER_EDGE = 4


def mix64(value: int) -> int:
    """SplitMix64 finalizer on a Python int (taken mod 2^64)."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * _MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_2) & MASK64
    return z ^ (z >> 31)


def mix64_array(values: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer over a uint64 array (wrapping arithmetic)."""
    z = values.astype(np.uint64, copy=True)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX_1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX_2)
    return z ^ (z >> np.uint64(31))


def substream_seed(seed: int, replica: int) -> int:
    """Seed of replica `replica` under master `seed`: mix64(seed XOR replica).

    Stable across versions; every replica-parallel run derives its seeds here.
    """
    return mix64((seed & MASK64) ^ replica)


def generator(seed: int) -> np.random.Generator:
    """numpy Generator for the continuous-time samplers."""
    return np.random.Generator(np.random.PCG64(seed & MASK64))


def _lane_words(seed: int, start: int, count: int, lane: int) -> np.ndarray:
    key = np.uint64(mix64(seed))
    counters = np.arange(start, start + count, dtype=np.uint64) * np.uint64(_LANES_PER_EDGE) + np.uint64(lane)
    return mix64_array(key + counters * np.uint64(GOLDEN_GAMMA))


def edge_block(seed: int, n: int, start: int, count: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Edges start .. start+count-1 of the stream for `seed` on n vertices.

    Returns 0-based endpoints and keep-marks u in (0, 1]. Every word is a pure
    function of (seed, edge index, lane), so any block can be regenerated alone.
    """
    if not 1 <= n < 2**32:
        raise ValueError(f"vertex count must be in [1, 2^32), got {n}")
    shift = np.uint64(32)
    a = ((_lane_words(seed, start, count, LANE_A) >> shift) * np.uint64(n)) >> shift
    b = ((_lane_words(seed, start, count, LANE_B) >> shift) * np.uint64(n)) >> shift
    mantissa = (_lane_words(seed, start, count, LANE_U) >> np.uint64(11)) + np.uint64(1)
    u = mantissa.astype(np.float64) * 2.0**-53
    return a.astype(np.int64), b.astype(np.int64), u
