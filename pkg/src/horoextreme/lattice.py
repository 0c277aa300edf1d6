"""Planar unimodular lattices: validation, reduction, enumeration.

A lattice is represented by a 2x2 float64 basis whose columns generate it;
determinant 1 is required (covolume-1 normalization).  The scalar Gauss
reduction here mirrors the batch kernels operation for operation so that a
reduced basis computed in Python is bit-identical to the kernel output for
the same input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._tags import ENUM_CAP
from .errors import ResourceLimitError

# a draw-and-normalize pipeline keeps determinants well inside this
DET_TOL = 1e-9

_REDUCE_ITERS = 96


def as_basis(matrix) -> np.ndarray:
    """Validate and return a (2, 2) float64 basis with determinant 1."""
    b = np.asarray(matrix, dtype=np.float64)
    if b.shape != (2, 2):
        raise ValueError(f"basis must have shape (2, 2), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("basis entries must be finite")
    det = float(b[0, 0] * b[1, 1] - b[1, 0] * b[0, 1])
    if abs(det - 1.0) > DET_TOL:
        raise ValueError(f"basis determinant must be 1 within {DET_TOL}, got {det!r}")
    return b


@dataclass(frozen=True)
class SuccessiveMinima:
    """Norms of a shortest vector and of a shortest one independent of it."""

    lambda1: float
    lambda2: float


@dataclass(frozen=True)
class LatticePoint:
    """One lattice vector: integer coefficients in the caller's basis plus
    its plane coordinates.  primitive means gcd(p, q) == 1."""

    p: int
    q: int
    x: float
    y: float
    primitive: bool


@dataclass(frozen=True)
class ReducedBasis:
    """Gauss-reduced basis plus the integer change of basis.

    transform column i holds the coefficients of reduced column i in the
    source basis, so source @ transform == matrix exactly over the integers.
    """

    matrix: np.ndarray
    transform: np.ndarray


def gauss_reduce(matrix) -> ReducedBasis:
    """Gauss-reduce a basis; scalar mirror of the batch kernel.

    The reduced columns satisfy |a| <= |b| and |<a, b>| <= |a|^2 / 2 and are
    sign-normalized so each column's first nonzero coordinate is positive.
    """
    return _reduce_floats(as_basis(matrix))


def _reduce_floats(b) -> ReducedBasis:
    # internal: no determinant check, so re-reducing an already reduced
    # basis (column swaps may have flipped its orientation) stays legal
    ax, ay = float(b[0, 0]), float(b[1, 0])
    bx, by = float(b[0, 1]), float(b[1, 1])
    u00, u10, u01, u11 = 1, 0, 0, 1
    for _ in range(_REDUCE_ITERS):
        na = ax * ax + ay * ay
        nb = bx * bx + by * by
        if nb < na:
            ax, ay, bx, by = bx, by, ax, ay
            u00, u10, u01, u11 = u01, u11, u00, u10
            na = nb
        m = math.floor((ax * bx + ay * by) / na + 0.5)
        if m == 0:
            break
        bx = bx - m * ax
        by = by - m * ay
        u01 = u01 - m * u00
        u11 = u11 - m * u10
    if ax < 0.0 or (ax == 0.0 and ay < 0.0):
        ax, ay, u00, u10 = -ax, -ay, -u00, -u10
    if bx < 0.0 or (bx == 0.0 and by < 0.0):
        bx, by, u01, u11 = -bx, -by, -u01, -u11
    red = np.array([[ax, bx], [ay, by]], dtype=np.float64)
    tr = np.array([[u00, u01], [u10, u11]], dtype=np.int64)
    return ReducedBasis(matrix=red, transform=tr)


def successive_minima(matrix) -> SuccessiveMinima:
    red = gauss_reduce(matrix).matrix
    l1 = math.sqrt(red[0, 0] * red[0, 0] + red[1, 0] * red[1, 0])
    l2 = math.sqrt(red[0, 1] * red[0, 1] + red[1, 1] * red[1, 1])
    return SuccessiveMinima(lambda1=l1, lambda2=l2)


def shortest_vector_norm(matrix) -> float:
    return successive_minima(matrix).lambda1


def cusp_height(matrix) -> float:
    """Reciprocal of the shortest-vector norm.

    Large values mean the lattice has a very short vector, i.e. sits far out
    in the cusp of the space of unimodular lattices.
    """
    return 1.0 / shortest_vector_norm(matrix)


def coefficient_ranges(
    ax: float,
    ay: float,
    bx: float,
    by: float,
    box: tuple[float, float, float, float],
) -> tuple[int, int, int, int]:
    """Integer coefficient bounds covering an axis box under a basis.

    Scalar mirror of the kernel helper: maps the box corners through the
    inverse basis and pads the hull so boundary points cannot be lost to
    rounding.  Returns python ints, so the width check cannot overflow.
    """
    x0, x1, y0, y1 = box
    det = ax * by - ay * bx
    ps = []
    qs = []
    for bxx in (x0, x1):
        for byy in (y0, y1):
            ps.append((by * bxx - bx * byy) / det)
            qs.append((ax * byy - ay * bxx) / det)
    pmin, pmax = min(ps), max(ps)
    qmin, qmax = min(qs), max(qs)
    pad_p = 1e-9 + 1e-12 * (abs(pmin) + abs(pmax))
    pad_q = 1e-9 + 1e-12 * (abs(qmin) + abs(qmax))
    return (
        math.ceil(pmin - pad_p),
        math.floor(pmax + pad_p),
        math.ceil(qmin - pad_q),
        math.floor(qmax + pad_q),
    )


def enumerate_points(
    matrix,
    box: tuple[float, float, float, float],
    cap: int = ENUM_CAP,
) -> list[LatticePoint]:
    """All nonzero lattice points inside a closed axis box.

    Coefficients in the returned points refer to the caller's basis, not the
    internal reduced one.  Raises ResourceLimitError when the candidate grid
    would exceed cap cells.
    """
    x0, x1, y0, y1 = (float(v) for v in box)
    if not (x0 <= x1 and y0 <= y1):
        raise ValueError("box must satisfy x0 <= x1 and y0 <= y1")
    rb = gauss_reduce(matrix)
    ax, bx = float(rb.matrix[0, 0]), float(rb.matrix[0, 1])
    ay, by = float(rb.matrix[1, 0]), float(rb.matrix[1, 1])
    pmin, pmax, qmin, qmax = coefficient_ranges(ax, ay, bx, by, (x0, x1, y0, y1))
    width = (pmax - pmin + 1) * (qmax - qmin + 1)
    if width > cap:
        raise ResourceLimitError(
            f"enumeration grid of {width} candidates exceeds cap {cap}"
        )
    ps = np.arange(pmin, pmax + 1, dtype=np.int64)
    qs = np.arange(qmin, qmax + 1, dtype=np.int64)
    P = np.repeat(ps, qs.size)
    Q = np.tile(qs, ps.size)
    vx = P * ax + Q * bx
    vy = P * ay + Q * by
    keep = (
        (vx >= x0)
        & (vx <= x1)
        & (vy >= y0)
        & (vy <= y1)
        & ((P != 0) | (Q != 0))
    )
    P, Q, vx, vy = P[keep], Q[keep], vx[keep], vy[keep]
    u = rb.transform
    srcp = u[0, 0] * P + u[0, 1] * Q
    srcq = u[1, 0] * P + u[1, 1] * Q
    prim = np.gcd(srcp, srcq) == 1
    return [
        LatticePoint(
            p=int(srcp[i]),
            q=int(srcq[i]),
            x=float(vx[i]),
            y=float(vy[i]),
            primitive=bool(prim[i]),
        )
        for i in range(P.size)
    ]
