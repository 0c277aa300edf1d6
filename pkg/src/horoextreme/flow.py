"""Shear-flow excursions of a lattice over a finite time window.

The flow acts on the plane by (x, y) -> (x + t*y, y).  Over a window
t in [0, T] the quantity of interest is the minimum, over nonzero lattice
vectors v and times t, of |flow_t v|^2; its negative half-log is the peak of
the cusp height along the orbit.  The excursion event at level r asks
whether that peak stays below r + log(T)/2, which reduces to the strict
threshold test min > exp(-2r)/T.  Ties on the boundary therefore resolve to
the event failing, exactly like a region hit on the boundary counting as a
hit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from ._tags import ENUM_CAP
from .errors import ResourceLimitError
from .lattice import LatticePoint, gauss_reduce
from .regions import as_batch

# walk-step cap: beyond this the slab scan is cheap enough anyway
_MAX_STEPS = 256


def default_window_steps(T: float) -> int:
    """Orbit-walk step count for a window of length T.

    The walk only supplies an upper bound that shrinks the exhaustive slab
    scan, so the count trades compile-time-constant work against scan size;
    sqrt(T) steps keep both phases near their joint optimum.
    """
    return int(min(max(16.0, math.ceil(1.2 * math.sqrt(T))), float(_MAX_STEPS)))


def sheared_min_norm(v, T: float) -> tuple[float, float]:
    """Minimum of |flow_t v| over t in [0, T], with a minimizing time.

    The square norm is a parabola in t, so the minimum sits at the clamped
    vertex.  Returns (norm, t_star).
    """
    x, y = float(v[0]), float(v[1])
    if x == 0.0 and y == 0.0:
        raise ValueError("v must be nonzero")
    if not T >= 0.0:
        raise ValueError("T must be nonnegative")
    if y == 0.0:
        return abs(x), 0.0
    t = min(max(-x / y, 0.0), T)
    d = x + t * y
    return math.sqrt(d * d + y * y), t


@dataclass(frozen=True)
class ExcursionResult:
    """Peak of the cusp height over one window, with a witness vector."""

    peak_log_height: float
    argmin_vector: LatticePoint
    argmin_time: float
    T: float


def window_min_batch(
    bases,
    T: float,
    K: int | None = None,
    workers: int = 1,
    cap: int = ENUM_CAP,
) -> np.ndarray:
    """min over nonzero v and t in [0, T] of |flow_t v|^2, per basis."""
    if not T > 0.0:
        raise ValueError("T must be positive")
    if K is None:
        K = default_window_steps(T)
    if K < 1:
        raise ValueError("K must be positive")
    backend.set_workers(workers)
    red, _, _ = backend.kernels.reduce_bases(as_batch(bases))
    gmin, _, _, ok = backend.kernels.window_min(red, float(T), int(K), cap)
    bad = int(np.sum(ok == 0))
    if bad:
        raise ResourceLimitError(
            f"{bad} sample(s) exceeded the {cap}-cell slab-scan cap"
        )
    return gmin


def window_peak(
    matrix, T: float, K: int | None = None, cap: int = ENUM_CAP
) -> ExcursionResult:
    """Peak log cusp height over the window, with the witness vector.

    The reported time is the clamped parabola vertex for the witness; the
    witness coefficients refer to the caller's basis.
    """
    if not T > 0.0:
        raise ValueError("T must be positive")
    if K is None:
        K = default_window_steps(T)
    rb = gauss_reduce(matrix)
    red = np.ascontiguousarray(rb.matrix[None])
    gmin, pa, qa, ok = backend.kernels.window_min(red, float(T), int(K), cap)
    if ok[0] == 0:
        raise ResourceLimitError(f"slab scan exceeded the {cap}-cell cap")
    g = float(gmin[0])
    p, q = int(pa[0]), int(qa[0])
    vx = p * float(rb.matrix[0, 0]) + q * float(rb.matrix[0, 1])
    vy = p * float(rb.matrix[1, 0]) + q * float(rb.matrix[1, 1])
    t_star = 0.0 if vy == 0.0 else min(max(-vx / vy, 0.0), T)
    u = rb.transform
    srcp = int(u[0, 0]) * p + int(u[0, 1]) * q
    srcq = int(u[1, 0]) * p + int(u[1, 1]) * q
    witness = LatticePoint(
        p=srcp,
        q=srcq,
        x=vx,
        y=vy,
        primitive=math.gcd(srcp, srcq) == 1,
    )
    return ExcursionResult(
        peak_log_height=-0.5 * math.log(g),
        argmin_vector=witness,
        argmin_time=t_star,
        T=float(T),
    )


def excursion_threshold(r: float, T: float) -> float:
    """Strict lower bound the window minimum must beat for the event."""
    b = math.exp(-r)
    return b * b / T


def excursion_event(
    matrix, r: float, T: float, K: int | None = None, cap: int = ENUM_CAP
) -> bool:
    """Whether the peak log cusp height stays below r + log(T)/2."""
    gmin = window_min_batch(matrix, T, K=K, cap=cap)
    return bool(gmin[0] > excursion_threshold(r, T))


def excursion_events_batch(
    bases,
    r: float,
    T: float,
    K: int | None = None,
    workers: int = 1,
    cap: int = ENUM_CAP,
) -> np.ndarray:
    gmin = window_min_batch(bases, T, K=K, workers=workers, cap=cap)
    return gmin > excursion_threshold(r, T)


@dataclass(frozen=True)
class EmpiricalLaw:
    """Event counts for several levels r at one window length."""

    r_values: tuple[float, ...]
    successes: np.ndarray
    samples: int
    T: float

    @property
    def fractions(self) -> np.ndarray:
        return self.successes / float(self.samples)


def empirical_law(
    seed: int,
    count: int,
    r_values,
    T: float,
    K: int | None = None,
    workers: int = 1,
    chunk: int = 1_000_000,
    start: int = 0,
) -> EmpiricalLaw:
    """Monte Carlo event frequencies at each level, one window pass.

    All levels share the same per-sample window minimum, so the estimated
    law is exactly monotone in r by construction.
    """
    from . import haar

    rs = tuple(float(r) for r in r_values)
    if count < 1:
        raise ValueError("count must be positive")
    thresholds = np.array([excursion_threshold(r, T) for r in rs])
    successes = np.zeros(len(rs), dtype=np.int64)
    for batch in haar.iter_samples(seed, count, chunk=chunk, workers=workers,
                                   start=start):
        gmin = window_min_batch(batch.bases, T, K=K, workers=workers)
        for i, thr in enumerate(thresholds):
            successes[i] += int(np.count_nonzero(gmin > thr))
    return EmpiricalLaw(r_values=rs, successes=successes, samples=count, T=float(T))
