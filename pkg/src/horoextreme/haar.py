"""Haar-random unimodular lattices.

Sampling factors a lattice as (rotation by theta) applied to the standard
fundamental-domain representative with coordinates (x, y): the shear x is
uniform on [-1/2, 1/2), the height y has density proportional to 1/y**2, the
pair is accepted once x*x + y*y >= 1, and theta is uniform on [0, pi).  The
acceptance region is exactly the classical fundamental domain, where the
invariant measure has density proportional to 1/y**2, so accepted triples
follow the normalized invariant (Haar) measure on unimodular lattices.

Batches are embarrassingly parallel: sample i of a batch is a pure function
of (seed, start + i), so results never depend on worker count or chunking.

All trigonometry happens in `bases_from_coords`, shared by every code path.
The batch kernels stay trig-free, which is what lets the numba and numpy
builds agree bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import backend
from ._rng import draw_modular_coords
from .errors import ResourceLimitError

# above this, callers should stream chunks instead of one resident batch
MAX_BATCH = 5_000_000


@dataclass(frozen=True)
class LatticeSample:
    """One Haar draw: fundamental-domain coordinates plus the basis."""

    x: float
    y: float
    theta: float
    index: int
    basis: np.ndarray


@dataclass(frozen=True)
class HaarBatch:
    """A contiguous run of Haar draws with their bases stacked."""

    xs: np.ndarray
    ys: np.ndarray
    thetas: np.ndarray
    bases: np.ndarray
    start: int = 0

    def __len__(self) -> int:
        return int(self.xs.shape[0])

    def __getitem__(self, i: int) -> LatticeSample:
        n = len(self)
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError(i)
        return LatticeSample(
            x=float(self.xs[i]),
            y=float(self.ys[i]),
            theta=float(self.thetas[i]),
            index=self.start + i,
            basis=self.bases[i],
        )


def bases_from_coords(xs, ys, thetas) -> np.ndarray:
    """Stack of bases for fundamental-domain coordinate triples.

    Column one is the rotated vertical-height vector, column two the rotated
    sheared one; determinant is 1 by construction.  Every sampling path goes
    through this one function so a given triple always yields the same
    floats.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.float64))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=np.float64))
    c = np.cos(thetas)
    s = np.sin(thetas)
    sy = np.sqrt(ys)
    out = np.empty((xs.shape[0], 2, 2), dtype=np.float64)
    out[:, 0, 0] = c / sy
    out[:, 1, 0] = s / sy
    out[:, 0, 1] = c * (xs / sy) - s * sy
    out[:, 1, 1] = s * (xs / sy) + c * sy
    return out


def from_coords(x: float, y: float, theta: float, index: int = -1) -> LatticeSample:
    """Build a sample from explicit fundamental-domain coordinates.

    Test hook; validates the coordinates lie in the acceptance region.
    """
    x = float(x)
    y = float(y)
    theta = float(theta)
    if not (-0.5 <= x <= 0.5):
        raise ValueError(f"x must lie in [-1/2, 1/2], got {x}")
    if not y > 0.0 or x * x + y * y < 1.0:
        raise ValueError(f"(x, y) must satisfy x*x + y*y >= 1, got ({x}, {y})")
    if not (0.0 <= theta < np.pi):
        raise ValueError(f"theta must lie in [0, pi), got {theta}")
    basis = bases_from_coords(x, y, theta)[0]
    return LatticeSample(x=x, y=y, theta=theta, index=index, basis=basis)


def sample(seed: int, index: int = 0) -> LatticeSample:
    """The Haar draw owned by (seed, index); equals batch element index."""
    x, y, theta, _ = draw_modular_coords(seed, index)
    basis = bases_from_coords(x, y, theta)[0]
    return LatticeSample(x=x, y=y, theta=theta, index=index, basis=basis)


def sample_batch(seed: int, count: int, workers: int = 1, start: int = 0) -> HaarBatch:
    """Draws start .. start+count-1 of the stream owned by seed."""
    if seed < 0 or start < 0:
        raise ValueError("seed and start must be nonnegative")
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count > MAX_BATCH:
        raise ResourceLimitError(
            f"batch of {count} exceeds MAX_BATCH={MAX_BATCH}; use iter_samples"
        )
    backend.set_workers(workers)
    xs, ys, ths = backend.kernels.sample_coords(seed, start, count)
    return HaarBatch(
        xs=xs, ys=ys, thetas=ths, bases=bases_from_coords(xs, ys, ths), start=start
    )


def iter_samples(
    seed: int,
    count: int,
    chunk: int = 1_000_000,
    workers: int = 1,
    start: int = 0,
) -> Iterator[HaarBatch]:
    """Yield the same draws as one huge batch, in bounded-memory chunks."""
    if chunk < 1:
        raise ValueError("chunk must be positive")
    done = 0
    while done < count:
        n = min(chunk, count - done)
        yield sample_batch(seed, n, workers=workers, start=start + done)
        done += n
