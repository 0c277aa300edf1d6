"""Counter-based uniform substreams.

Every sample index owns its own substream, so a batch result is a pure
function of (seed, index) and cannot depend on how work is sharded across
workers.  Draw j of stream i applies a SplitMix64-style finalizer to an
affine counter:

    base(seed, i) = mix64(mix64(seed + GAMMA) + i * GAMMA)
    u(seed, i, j) = (mix64(base + (j + 1) * DRAW_STEP) >> 11) * 2**-53

The finalizer has full avalanche and the construction is the one used to
seed the xoshiro family; it holds up under the standard empirical batteries
for the few dozen draws a sample ever consumes.

This module is the scalar reference implementation (plain Python integers,
masked to 64 bits).  The numba and numpy kernel modules reimplement the same
arithmetic on uint64; tests pin all three together bit for bit.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1

GAMMA = 0x9E3779B97F4A7C15  # stream-base step
DRAW_STEP = 0xD1B54A32D192ED03  # within-stream counter step, odd
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB

INV_2_53 = 2.0 ** -53
SQRT3_OVER_2 = math.sqrt(3.0) / 2.0
PI = math.pi

# guard against a broken acceptance test looping forever; the true rejection
# rate is under 10%, so 4096 attempts can only mean a bug upstream
MAX_ATTEMPTS = 4096


def mix64(z: int) -> int:
    """SplitMix64 output finalizer on 64-bit integers."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return z ^ (z >> 31)


def stream_base(seed: int, index: int) -> int:
    """Starting state of the substream owned by one sample index."""
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    return mix64((mix64((seed + GAMMA) & MASK64) + index * GAMMA) & MASK64)


def unit_draw(base: int, j: int) -> float:
    """Draw j of a stream, uniform on [0, 1)."""
    return float(mix64((base + (j + 1) * DRAW_STEP) & MASK64) >> 11) * INV_2_53


def draw_modular_coords(seed: int, index: int) -> tuple[float, float, float, int]:
    """One rejection-sampled coordinate triple (x, y, theta).

    x is uniform on [-1/2, 1/2), y has density proportional to 1/y**2 on
    [sqrt(3)/2, inf) via inverse CDF of a (0, 1] uniform, and the pair is
    accepted once x*x + y*y >= 1.  theta is uniform on [0, pi).  Returns the
    triple plus the number of draws consumed (useful only to tests).
    """
    base = stream_base(seed, index)
    j = 0
    for _ in range(MAX_ATTEMPTS):
        ux = unit_draw(base, j)
        uu = unit_draw(base, j + 1)
        j += 2
        x = ux - 0.5
        y = SQRT3_OVER_2 / (1.0 - uu)
        if x * x + y * y >= 1.0:
            theta = PI * unit_draw(base, j)
            return x, y, theta, j + 1
    raise RuntimeError("rejection sampler failed to accept; this is a bug")
