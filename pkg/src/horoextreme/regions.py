"""Plane regions and lattice-point hit and count tests.

All regions are closed subsets of the plane with the origin removed, so a
hit always means a nonzero lattice point.  Each region is a frozen dataclass
exposing a small duck-typed interface:

    contains(x, y)              pointwise membership (origin never a member)
    measure()                   Lebesgue area (0 for the segment)
    bounding_box()              (x0, x1, y0, y1) covering the region
    outer_radius()              sup of |v| over the region
    closure_contains_origin()   whether the closure touches the origin

Static regions map to integer tags understood by the batch kernels.  Swept
regions (a profile dragged along the shear flow for time T) get their own
kernel entry point that works in flow-rescaled coordinates; membership
formulas here mirror the kernel expressions exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from ._tags import (
    ENUM_CAP,
    PROFILE_DISK,
    PROFILE_RECT,
    PROFILE_SEGMENT,
    TAG_ANNULUS,
    TAG_BOX,
    TAG_DISK,
    TAG_HALF_DISK,
    TAG_ROT_TRIANGLE,
    TAG_TRIANGLE,
)
from .errors import ResourceLimitError
from .lattice import (
    LatticePoint,
    _reduce_floats,
    coefficient_ranges,
    enumerate_points,
    gauss_reduce,
)

PROFILES = ("segment", "disk", "rect")
_PROFILE_TAGS = {
    "segment": PROFILE_SEGMENT,
    "disk": PROFILE_DISK,
    "rect": PROFILE_RECT,
}


class Region:
    """Shared behaviour for all region dataclasses."""

    def contains(self, x: float, y: float) -> bool:
        if x == 0.0 and y == 0.0:
            return False
        return bool(self._mask(np.float64(x), np.float64(y)))

    def closure_contains_origin(self) -> bool:
        return True

    def outer_radius(self) -> float:
        x0, x1, y0, y1 = self.bounding_box()
        return max(math.hypot(cx, cy) for cx in (x0, x1) for cy in (y0, y1))


@dataclass(frozen=True)
class HalfDisk(Region):
    """Closed upper half disk {y >= 0, x*x + y*y <= radius**2}."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")

    def measure(self) -> float:
        return 0.5 * math.pi * self.radius * self.radius

    def bounding_box(self):
        return -self.radius, self.radius, 0.0, self.radius

    def outer_radius(self) -> float:
        return self.radius

    def _mask(self, xs, ys):
        return (ys >= 0.0) & (xs * xs + ys * ys <= self.radius * self.radius)


@dataclass(frozen=True)
class PuncturedDisk(Region):
    """Closed disk of the given radius, origin removed."""

    radius: float

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ValueError("radius must be positive")

    def measure(self) -> float:
        return math.pi * self.radius * self.radius

    def bounding_box(self):
        return -self.radius, self.radius, -self.radius, self.radius

    def outer_radius(self) -> float:
        return self.radius

    def _mask(self, xs, ys):
        return xs * xs + ys * ys <= self.radius * self.radius


@dataclass(frozen=True)
class Annulus(Region):
    """Closed annulus inner <= |v| <= outer."""

    inner: float
    outer: float

    def __post_init__(self):
        if not 0.0 <= self.inner <= self.outer:
            raise ValueError("need 0 <= inner <= outer")

    def measure(self) -> float:
        return math.pi * (self.outer * self.outer - self.inner * self.inner)

    def bounding_box(self):
        return -self.outer, self.outer, -self.outer, self.outer

    def outer_radius(self) -> float:
        return self.outer

    def closure_contains_origin(self) -> bool:
        return self.inner == 0.0

    def _mask(self, xs, ys):
        rr = xs * xs + ys * ys
        return (rr >= self.inner * self.inner) & (rr <= self.outer * self.outer)


@dataclass(frozen=True)
class Segment(Region):
    """Vertical segment {0} x [0, length]; area zero."""

    length: float

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError("length must be positive")

    def measure(self) -> float:
        return 0.0

    def bounding_box(self):
        return 0.0, 0.0, 0.0, self.length

    def outer_radius(self) -> float:
        return self.length

    def _mask(self, xs, ys):
        return (xs == 0.0) & (ys >= 0.0) & (ys <= self.length)


@dataclass(frozen=True)
class Rect(Region):
    """Closed rectangle [-extent, extent] x [0, extent]."""

    extent: float

    def __post_init__(self):
        if not self.extent > 0.0:
            raise ValueError("extent must be positive")

    def measure(self) -> float:
        return 2.0 * self.extent * self.extent

    def bounding_box(self):
        return -self.extent, self.extent, 0.0, self.extent

    def _mask(self, xs, ys):
        e = self.extent
        return (xs >= -e) & (xs <= e) & (ys >= 0.0) & (ys <= e)


@dataclass(frozen=True)
class Box(Region):
    """Closed axis-aligned box [x0, x1] x [y0, y1]."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x0 <= self.x1 and self.y0 <= self.y1):
            raise ValueError("need x0 <= x1 and y0 <= y1")

    def measure(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def bounding_box(self):
        return self.x0, self.x1, self.y0, self.y1

    def closure_contains_origin(self) -> bool:
        return self.x0 <= 0.0 <= self.x1 and self.y0 <= 0.0 <= self.y1

    def _mask(self, xs, ys):
        return (
            (xs >= self.x0) & (xs <= self.x1) & (ys >= self.y0) & (ys <= self.y1)
        )


@dataclass(frozen=True)
class Triangle(Region):
    """Closed right triangle with vertices (0,0), (s,0), (s,s), s = exp(-r).

    The height parameter r sets the side: positive r shrinks the triangle
    below the unit square, negative r grows it.  Membership is 0 <= y <= x
    <= s with the origin removed.
    """

    r: float

    @property
    def side(self) -> float:
        return math.exp(-self.r)

    def measure(self) -> float:
        s = self.side
        return 0.5 * s * s

    def bounding_box(self):
        s = self.side
        return 0.0, s, 0.0, s

    def outer_radius(self) -> float:
        return math.sqrt(2.0) * self.side

    def _mask(self, xs, ys):
        s = self.side
        return (ys >= 0.0) & (ys <= xs) & (xs <= s)


@dataclass(frozen=True)
class RotatedTriangle(Region):
    """Quarter-turn counterclockwise image of Triangle(r): vertices (0,0),
    (0,s), (-s,s)."""

    r: float

    @property
    def side(self) -> float:
        return math.exp(-self.r)

    def measure(self) -> float:
        s = self.side
        return 0.5 * s * s

    def bounding_box(self):
        s = self.side
        return -s, 0.0, 0.0, s

    def outer_radius(self) -> float:
        return math.sqrt(2.0) * self.side

    def _mask(self, xs, ys):
        s = self.side
        return (xs <= 0.0) & (-xs <= ys) & (ys <= s)


@dataclass(frozen=True)
class Swept(Region):
    """A profile dragged backwards along the shear flow for time T.

    The profile sits at scale radius = exp(-r) / sqrt(T):

        segment  {0} x [0, radius]
        rect     [-radius, radius] x [0, radius]
        disk     upper half disk of that radius

    A point belongs to the swept set when some shear time t in [0, T] moves
    it into the profile.  The segment sweep is contained in the disk sweep,
    which is contained in the rect sweep.  Membership is evaluated in
    rescaled coordinates (x / sqrt(T), y * sqrt(T)), mirroring the kernels.
    """

    r: float
    T: float
    profile: str

    def __post_init__(self):
        if not self.T > 0.0:
            raise ValueError("T must be positive")
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}")

    @property
    def height_bound(self) -> float:
        """exp(-r): the rescaled height of the swept set."""
        return math.exp(-self.r)

    @property
    def radius(self) -> float:
        """Profile scale in plane coordinates."""
        return self.height_bound / math.sqrt(self.T)

    def measure(self) -> float:
        b = self.height_bound
        wedge = 0.5 * b * b
        if self.profile == "segment":
            return wedge
        R = self.radius
        if self.profile == "rect":
            return wedge + 2.0 * R * R
        return wedge + 0.5 * math.pi * R * R

    def bounding_box(self):
        b = self.height_bound
        sT = math.sqrt(self.T)
        R = self.radius
        if self.profile == "segment":
            return -b * sT, 0.0, 0.0, R
        return -b * sT - R, R, 0.0, R

    def _mask(self, xs, ys):
        sT = math.sqrt(self.T)
        return self._rescaled_mask(xs / sT, ys * sT)

    def _rescaled_mask(self, wx, wy):
        """Membership in rescaled coordinates; same expressions as the
        kernels, vectorized."""
        b = self.height_bound
        T = self.T
        if self.profile == "segment":
            return (wy >= 0.0) & (wy <= b) & (-wy <= wx) & (wx <= 0.0)
        if self.profile == "rect":
            a = b / T
            return (wy >= 0.0) & (wy <= b) & (-wy - a <= wx) & (wx <= a)
        thr = b * b / T
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.where(wy != 0.0, -wx / wy, 0.0)
        tau = np.clip(tau, 0.0, 1.0)
        d = wx + tau * wy
        g = T * d * d + wy * wy / T
        return (wy >= 0.0) & (g <= thr)

    def _rescaled_box(self):
        """Candidate box in rescaled coordinates; matches the hit kernel."""
        b = self.height_bound
        if self.profile == "segment":
            return -b, 0.0, 0.0, b
        a = b / self.T
        return -b - a, a, 0.0, b


@dataclass(frozen=True)
class Difference(Region):
    """Set difference of two swept regions with the same r and T.

    Only the rect sweep minus the segment sweep is supported; its area is
    exactly 2 * radius**2 and it sandwiches what the disk sweep adds to the
    segment sweep.
    """

    outer: Swept
    inner: Swept

    def __post_init__(self):
        if not (isinstance(self.outer, Swept) and isinstance(self.inner, Swept)):
            raise NotImplementedError("Difference only supports swept regions")
        if self.outer.profile != "rect" or self.inner.profile != "segment":
            raise NotImplementedError(
                "Difference only supports a rect sweep minus a segment sweep"
            )
        if self.outer.r != self.inner.r or self.outer.T != self.inner.T:
            raise NotImplementedError("operands must share r and T")

    @property
    def r(self) -> float:
        return self.outer.r

    @property
    def T(self) -> float:
        return self.outer.T

    def measure(self) -> float:
        R = self.outer.radius
        return 2.0 * R * R

    def bounding_box(self):
        return self.outer.bounding_box()

    def outer_radius(self) -> float:
        return self.outer.outer_radius()

    def _mask(self, xs, ys):
        return self.outer._mask(xs, ys) & ~self.inner._mask(xs, ys)

    def _rescaled_mask(self, wx, wy):
        return self.outer._rescaled_mask(wx, wy) & ~self.inner._rescaled_mask(wx, wy)

    def _rescaled_box(self):
        return self.outer._rescaled_box()


def _kernel_spec(region):
    """(tag, r0, r1, r2, r3) for regions the static count kernel handles."""
    if isinstance(region, Triangle):
        return TAG_TRIANGLE, region.side, 0.0, 0.0, 0.0
    if isinstance(region, RotatedTriangle):
        return TAG_ROT_TRIANGLE, region.side, 0.0, 0.0, 0.0
    if isinstance(region, PuncturedDisk):
        return TAG_DISK, region.radius, 0.0, 0.0, 0.0
    if isinstance(region, HalfDisk):
        return TAG_HALF_DISK, region.radius, 0.0, 0.0, 0.0
    if isinstance(region, Annulus):
        return TAG_ANNULUS, region.inner, region.outer, 0.0, 0.0
    if isinstance(region, Rect):
        e = region.extent
        return TAG_BOX, -e, e, 0.0, e
    if isinstance(region, Segment):
        return TAG_BOX, 0.0, 0.0, 0.0, region.length
    if isinstance(region, Box):
        return TAG_BOX, region.x0, region.x1, region.y0, region.y1
    return None


def as_batch(bases) -> np.ndarray:
    """Normalize one basis or a stack of bases to contiguous (n, 2, 2)."""
    arr = np.ascontiguousarray(np.asarray(bases, dtype=np.float64))
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[1:] != (2, 2):
        raise ValueError(f"expected (n, 2, 2) bases, got shape {arr.shape}")
    return arr


def _require_ok(ok, cap):
    bad = int(np.sum(ok == 0))
    if bad:
        raise ResourceLimitError(
            f"{bad} sample(s) exceeded the {cap}-cell enumeration cap"
        )


def count_batch(bases, region, workers: int = 1, cap: int = ENUM_CAP):
    """Per-basis counts (all, primitive) of lattice points in a static region."""
    spec = _kernel_spec(region)
    if spec is None:
        raise NotImplementedError(
            "batch counting supports only static regions; "
            "use count_points for swept regions"
        )
    backend.set_workers(workers)
    tag, r0, r1, r2, r3 = spec
    red, _, _ = backend.kernels.reduce_bases(as_batch(bases))
    call, cprim, ok = backend.kernels.count_region(red, tag, r0, r1, r2, r3, cap)
    _require_ok(ok, cap)
    return call, cprim


def hit_batch(bases, region, workers: int = 1, cap: int = ENUM_CAP) -> np.ndarray:
    """Boolean hit indicator per basis."""
    if isinstance(region, Swept):
        backend.set_workers(workers)
        ker = backend.kernels
        red, _, _ = ker.reduce_bases(as_batch(bases))
        wred, _, _ = ker.reduce_bases(ker.rescale_bases(red, region.T))
        hits, ok = ker.hit_swept(
            wred,
            region.height_bound,
            region.T,
            _PROFILE_TAGS[region.profile],
            cap,
        )
        _require_ok(ok, cap)
        return hits != 0
    call, _ = count_batch(bases, region, workers=workers, cap=cap)
    return call > 0


def hit_primitive_batch(
    bases, region, workers: int = 1, cap: int = ENUM_CAP
) -> np.ndarray:
    """Boolean primitive-hit indicator per basis.

    Swept regions are star shaped about the origin (shrinking a member
    toward the origin stays inside), so a hit there always implies a
    primitive hit and the plain indicator is returned.
    """
    if isinstance(region, Swept):
        return hit_batch(bases, region, workers=workers, cap=cap)
    _, cprim = count_batch(bases, region, workers=workers, cap=cap)
    return cprim > 0


def _swept_points(matrix, region, cap: int) -> list[LatticePoint]:
    """Nonzero lattice points in a swept region via rescaled enumeration.

    Mirrors the kernel route: Gauss reduce, rescale, reduce again, scan the
    profile box.  Coefficients are mapped back to the caller's basis.
    """
    T = region.T
    sT = math.sqrt(T)
    rb1 = gauss_reduce(matrix)
    m1 = rb1.matrix
    resc = np.array(
        [
            [m1[0, 0] / sT, m1[0, 1] / sT],
            [m1[1, 0] * sT, m1[1, 1] * sT],
        ]
    )
    rb2 = _reduce_floats(resc)
    ax, bx = float(rb2.matrix[0, 0]), float(rb2.matrix[0, 1])
    ay, by = float(rb2.matrix[1, 0]), float(rb2.matrix[1, 1])
    box = region._rescaled_box()
    pmin, pmax, qmin, qmax = coefficient_ranges(ax, ay, bx, by, box)
    width = (pmax - pmin + 1) * (qmax - qmin + 1)
    if width > cap:
        raise ResourceLimitError(
            f"enumeration grid of {width} candidates exceeds cap {cap}"
        )
    ps = np.arange(pmin, pmax + 1, dtype=np.int64)
    qs = np.arange(qmin, qmax + 1, dtype=np.int64)
    P = np.repeat(ps, qs.size)
    Q = np.tile(qs, ps.size)
    nz = (P != 0) | (Q != 0)
    P, Q = P[nz], Q[nz]
    wx = P * ax + Q * bx
    wy = P * ay + Q * by
    keep = region._rescaled_mask(wx, wy)
    P, Q, wx, wy = P[keep], Q[keep], wx[keep], wy[keep]
    u = (rb1.transform @ rb2.transform).astype(np.int64)
    srcp = u[0, 0] * P + u[0, 1] * Q
    srcq = u[1, 0] * P + u[1, 1] * Q
    prim = np.gcd(srcp, srcq) == 1
    return [
        LatticePoint(
            p=int(srcp[i]),
            q=int(srcq[i]),
            x=float(wx[i] * sT),
            y=float(wy[i] / sT),
            primitive=bool(prim[i]),
        )
        for i in range(P.size)
    ]


def points_in(matrix, region, cap: int = ENUM_CAP) -> list[LatticePoint]:
    """All nonzero lattice points of one lattice inside a region."""
    if isinstance(region, (Swept, Difference)):
        return _swept_points(matrix, region, cap)
    pts = enumerate_points(matrix, region.bounding_box(), cap=cap)
    if not pts:
        return []
    xs = np.array([t.x for t in pts])
    ys = np.array([t.y for t in pts])
    keep = region._mask(xs, ys)
    return [t for t, k in zip(pts, keep) if k]


def count_points(
    matrix, region, primitive: bool = False, cap: int = ENUM_CAP
) -> int:
    pts = points_in(matrix, region, cap=cap)
    if primitive:
        return sum(1 for t in pts if t.primitive)
    return len(pts)


def hit(matrix, region, cap: int = ENUM_CAP) -> bool:
    """Whether the lattice has a nonzero point in the region.

    For swept regions this routes through the batch kernel so that the
    result shares every float with the flow-excursion event test.
    """
    if isinstance(region, Swept):
        return bool(hit_batch(matrix, region, cap=cap)[0])
    return len(points_in(matrix, region, cap=cap)) > 0


def hit_primitive(matrix, region, cap: int = ENUM_CAP) -> bool:
    return any(t.primitive for t in points_in(matrix, region, cap=cap))


def hit_matches_primitive_hit(matrix, region, cap: int = ENUM_CAP) -> bool:
    pts = points_in(matrix, region, cap=cap)
    return (len(pts) > 0) == any(t.primitive for t in pts)


def sweep_to_triangle_map(T: float) -> np.ndarray:
    """Matrix carrying the segment sweep onto the triangle of the same r.

    Composes the flow rescaling diag(1/sqrt(T), sqrt(T)) with a clockwise
    quarter turn; it is measure preserving and maps lattices to lattices, so
    hitting Swept(r, T, "segment") is equivalent to the image lattice
    hitting Triangle(r).
    """
    if not T > 0.0:
        raise ValueError("T must be positive")
    sT = math.sqrt(T)
    return np.array([[0.0, sT], [-1.0 / sT, 0.0]])


def sweep_to_triangle_bases(bases, T: float) -> np.ndarray:
    """Apply sweep_to_triangle_map to a stack of bases without extra rounding.

    The rescale runs through the shared kernel expression and the quarter
    turn is an exact sign permutation, so the output floats are the rescaled
    inputs rearranged: row 0 becomes old row 1, row 1 becomes old row 0
    negated.
    """
    resc = backend.kernels.rescale_bases(as_batch(bases), float(T))
    out = np.empty_like(resc)
    out[:, 0, :] = resc[:, 1, :]
    out[:, 1, :] = -resc[:, 0, :]
    return out
