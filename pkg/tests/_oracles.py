"""Independent reference implementations used to cross-check the package.

Nothing here imports package kernels or reuses package formulas beyond plain
definitions: enumeration is brute force from inverse-matrix coefficient
bounds, window minima come from a coefficient sweep, and distribution
functions are integrated directly.  Slow and simple on purpose.
"""

from __future__ import annotations

import math

import numpy as np

SQRT3_OVER_2 = math.sqrt(3.0) / 2.0


def coeff_bound(basis, box) -> tuple[int, int]:
    """Coefficient bounds covering an axis box, via the inverse basis.

    v = B (p, q) inside the box implies (p, q) = B^-1 v, so each coefficient
    is bounded by the max of the corresponding inverse row over the box
    corners.
    """
    binv = np.linalg.inv(np.asarray(basis, dtype=float))
    x0, x1, y0, y1 = box
    corners = [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
    pmax = max(abs(binv[0, 0] * cx + binv[0, 1] * cy) for cx, cy in corners)
    qmax = max(abs(binv[1, 0] * cx + binv[1, 1] * cy) for cx, cy in corners)
    return int(math.ceil(pmax)) + 1, int(math.ceil(qmax)) + 1


def brute_points(basis, box, predicate=None):
    """All nonzero lattice points in the box, optionally filtered.

    Returns a list of (p, q, x, y) with coefficients in the caller's basis.
    """
    b = np.asarray(basis, dtype=float)
    x0, x1, y0, y1 = box
    pb, qb = coeff_bound(b, box)
    out = []
    for p in range(-pb, pb + 1):
        for q in range(-qb, qb + 1):
            if p == 0 and q == 0:
                continue
            x = p * b[0, 0] + q * b[0, 1]
            y = p * b[1, 0] + q * b[1, 1]
            if x0 <= x <= x1 and y0 <= y <= y1:
                if predicate is None or predicate(x, y):
                    out.append((p, q, x, y))
    return out


def shear_min_sq(x: float, y: float, T: float) -> float:
    """Exact min over t in [0, T] of (x + t*y)**2 + y**2."""
    if y == 0.0:
        return x * x
    t = min(max(-x / y, 0.0), T)
    d = x + t * y
    return d * d + y * y


def brute_window_min(basis, T: float) -> float:
    """Window minimum by coefficient sweep; exact up to float evaluation.

    First takes the best value over a small seed set of combinations, then
    sweeps every coefficient pair that could beat it, using the box
    |x| <= sqrt(g0) * (1 + T), |y| <= sqrt(g0) implied by g <= g0.
    """
    b = np.asarray(basis, dtype=float)

    def g_of(p, q):
        x = p * b[0, 0] + q * b[0, 1]
        y = p * b[1, 0] + q * b[1, 1]
        return shear_min_sq(x, y, T)

    g0 = min(
        g_of(p, q)
        for p in range(-3, 4)
        for q in range(-3, 4)
        if (p, q) != (0, 0)
    )
    rad = math.sqrt(g0) * 1.0000001
    box = (-rad * (1.0 + T), rad * (1.0 + T), -rad, rad)
    pb, qb = coeff_bound(b, box)
    best = g0
    for p in range(-pb, pb + 1):
        for q in range(-qb, qb + 1):
            if p == 0 and q == 0:
                continue
            g = g_of(p, q)
            if g < best:
                best = g
    return best


def swept_member(x: float, y: float, r: float, T: float,
                 profile: str) -> bool:
    """Swept-region membership in plane coordinates.

    A point belongs when some t in [0, T] shears it into the profile set of
    scale exp(-r)/sqrt(T).  The shear leaves y fixed and moves u = x + t*y
    monotonically, and each profile's admissible u-set is an interval, so the
    time set is an interval containing the clamped vertex; checking the
    vertex (or, for the segment, the exact crossing time) is exact.
    """
    R = math.exp(-r) / math.sqrt(T)
    if profile == "segment":
        if not 0.0 < y <= R:
            return False
        t = -x / y
        return 0.0 <= t <= T
    if y != 0.0:
        t = min(max(-x / y, 0.0), T)
    else:
        t = 0.0
    u = x + t * y
    if profile == "rect":
        return -R <= u <= R and 0.0 <= y <= R
    return u * u + y * y <= R * R and y >= 0.0


def height_cdf(y: float) -> float:
    """CDF of the height coordinate of the fundamental-domain density 1/y^2.

    Closed form from integrating the admissible shear width: width 1 above
    y = 1, width 1 - 2*sqrt(1-y^2) between sqrt(3)/2 and 1.
    """
    if y <= SQRT3_OVER_2:
        return 0.0
    if y >= 1.0:
        return 1.0 - (3.0 / math.pi) / y
    val = -1.0 / y + 2.0 * math.sqrt(1.0 - y * y) / y + 2.0 * math.asin(y)
    return (3.0 / math.pi) * (val - 2.0 * math.pi / 3.0)


def mc_area(region_mask, box, n: int, seed: int) -> tuple[float, float]:
    """Monte Carlo area of a masked set inside a box: (estimate, stderr)."""
    rng = np.random.default_rng(seed)
    x0, x1, y0, y1 = box
    xs = rng.uniform(x0, x1, n)
    ys = rng.uniform(y0, y1, n)
    inside = region_mask(xs, ys)
    phat = inside.mean()
    area = (x1 - x0) * (y1 - y0)
    return phat * area, math.sqrt(phat * (1.0 - phat) / n) * area


def kolmogorov_stat(samples, cdf) -> float:
    """Two-sided KS statistic of samples against a scalar CDF callable."""
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    cs = np.array([cdf(v) for v in xs])
    up = np.max(np.arange(1, n + 1) / n - cs)
    dn = np.max(cs - np.arange(0, n) / n)
    return max(up, dn)
