"""Hot loops, numba build.

Mirrors `_kernels_numpy` function by function with identical arithmetic and
draw order; the backend module picks one of the two at import time and the
cross-backend tests compare outputs bit for bit.  Keep expressions textually
in sync between the two files.  Kernels stick to exactly-rounded float ops
(+ - * / sqrt floor) and integer arithmetic; anything that needs libm (trig
in the basis builder) lives outside the backend seam, which is what makes
bit-for-bit agreement between the two builds possible at all.

All kernels are per-sample pure functions of (seed, index) plus parameters,
write only to their own output slot, and leave aggregation to the caller, so
results cannot depend on the number of threads.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from ._rng import DRAW_STEP, GAMMA, INV_2_53, MIX_A, MIX_B, PI, SQRT3_OVER_2
from ._tags import (
    TAG_ANNULUS,
    TAG_BOX,
    TAG_DISK,
    TAG_HALF_DISK,
    TAG_ROT_TRIANGLE,
    TAG_TRIANGLE,
    PROFILE_DISK,
    PROFILE_RECT,
    PROFILE_SEGMENT,
)

BACKEND = "numba"

_GAMMA = np.uint64(GAMMA)
_STEP = np.uint64(DRAW_STEP)
_MIX_A = np.uint64(MIX_A)
_MIX_B = np.uint64(MIX_B)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO = np.uint64(2)


@njit(cache=True, inline="always")
def _mix(z):
    z = (z ^ (z >> _S30)) * _MIX_A
    z = (z ^ (z >> _S27)) * _MIX_B
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _stream_base(seed, index):
    return _mix(_mix(seed + _GAMMA) + index * _GAMMA)


@njit(cache=True, inline="always")
def _unit(base, j):
    return np.float64(_mix(base + (j + _ONE) * _STEP) >> _S11) * INV_2_53


@njit(cache=True)
def probe_uniform(seed, index, j):
    # test hook: raw draw j of stream index
    return _unit(_stream_base(np.uint64(seed), np.uint64(index)), np.uint64(j))


@njit(parallel=True, cache=True)
def sample_coords(seed, start, count):
    xs = np.empty(count, np.float64)
    ys = np.empty(count, np.float64)
    ths = np.empty(count, np.float64)
    s = np.uint64(seed)
    for k in prange(count):
        base = _stream_base(s, np.uint64(start + k))
        j = np.uint64(0)
        x = 0.0
        y = 1.0
        while True:
            ux = _unit(base, j)
            uu = _unit(base, j + _ONE)
            j = j + _TWO
            x = ux - 0.5
            y = SQRT3_OVER_2 / (1.0 - uu)
            if x * x + y * y >= 1.0:
                break
        xs[k] = x
        ys[k] = y
        ths[k] = PI * _unit(base, j)
    return xs, ys, ths


@njit(cache=True)
def _reduce2(ax, ay, bx, by):
    """Gauss reduction of a planar basis given by columns (a, b).

    Returns the reduced, sign-normalized columns plus the integer
    change-of-basis U (column i of U holds the coefficients of output
    column i in the input basis).  Output satisfies |a| <= |b| and
    |<a, b>| <= |a|^2 / 2.
    """
    u00 = np.int64(1)
    u10 = np.int64(0)
    u01 = np.int64(0)
    u11 = np.int64(1)
    for _ in range(96):
        na = ax * ax + ay * ay
        nb = bx * bx + by * by
        if nb < na:
            tx = ax
            ty = ay
            ax = bx
            ay = by
            bx = tx
            by = ty
            t0 = u00
            t1 = u10
            u00 = u01
            u10 = u11
            u01 = t0
            u11 = t1
            na = nb
        m = np.floor((ax * bx + ay * by) / na + 0.5)
        if m == 0.0:
            break
        bx = bx - m * ax
        by = by - m * ay
        mi = np.int64(m)
        u01 = u01 - mi * u00
        u11 = u11 - mi * u10
    if ax < 0.0 or (ax == 0.0 and ay < 0.0):
        ax = -ax
        ay = -ay
        u00 = -u00
        u10 = -u10
    if bx < 0.0 or (bx == 0.0 and by < 0.0):
        bx = -bx
        by = -by
        u01 = -u01
        u11 = -u11
    return ax, ay, bx, by, u00, u10, u01, u11


@njit(parallel=True, cache=True)
def reduce_bases(bases):
    n = bases.shape[0]
    red = np.empty((n, 2, 2), np.float64)
    l1 = np.empty(n, np.float64)
    l2 = np.empty(n, np.float64)
    for k in prange(n):
        ax, ay, bx, by, u00, u10, u01, u11 = _reduce2(
            bases[k, 0, 0], bases[k, 1, 0], bases[k, 0, 1], bases[k, 1, 1]
        )
        red[k, 0, 0] = ax
        red[k, 1, 0] = ay
        red[k, 0, 1] = bx
        red[k, 1, 1] = by
        l1[k] = np.sqrt(ax * ax + ay * ay)
        l2[k] = np.sqrt(bx * bx + by * by)
    return red, l1, l2


@njit(parallel=True, cache=True)
def rescale_bases(bases, T):
    """Columns of diag(1/sqrt(T), sqrt(T)) times each basis.

    The swept-region hit kernel and the window minimizer must enumerate the
    same float lattice, so both obtain it through this one expression.
    """
    n = bases.shape[0]
    out = np.empty((n, 2, 2), np.float64)
    sT = np.sqrt(T)
    for k in prange(n):
        out[k, 0, 0] = bases[k, 0, 0] / sT
        out[k, 1, 0] = bases[k, 1, 0] * sT
        out[k, 0, 1] = bases[k, 0, 1] / sT
        out[k, 1, 1] = bases[k, 1, 1] * sT
    return out


@njit(cache=True, inline="always")
def _gcd64(a, b):
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b != 0:
        t = a % b
        a = b
        b = t
    return a


@njit(cache=True, inline="always")
def _corner_ranges(ax, ay, bx, by, x0, x1, y0, y1):
    """Integer coefficient bounds covering an axis box under the basis.

    Maps the four box corners through the inverse basis and pads the hull a
    hair so points exactly on the box boundary cannot fall outside the
    candidate range through rounding.
    """
    det = ax * by - ay * bx
    p0 = (by * x0 - bx * y0) / det
    q0 = (ax * y0 - ay * x0) / det
    p1 = (by * x1 - bx * y0) / det
    q1 = (ax * y0 - ay * x1) / det
    p2 = (by * x0 - bx * y1) / det
    q2 = (ax * y1 - ay * x0) / det
    p3 = (by * x1 - bx * y1) / det
    q3 = (ax * y1 - ay * x1) / det
    pmin = min(min(p0, p1), min(p2, p3))
    pmax = max(max(p0, p1), max(p2, p3))
    qmin = min(min(q0, q1), min(q2, q3))
    qmax = max(max(q0, q1), max(q2, q3))
    pad_p = 1e-9 + 1e-12 * (abs(pmin) + abs(pmax))
    pad_q = 1e-9 + 1e-12 * (abs(qmin) + abs(qmax))
    return (
        np.int64(np.ceil(pmin - pad_p)),
        np.int64(np.floor(pmax + pad_p)),
        np.int64(np.ceil(qmin - pad_q)),
        np.int64(np.floor(qmax + pad_q)),
    )


@njit(cache=True, inline="always")
def _member(tag, r0, r1, r2, r3, vx, vy):
    if tag == TAG_TRIANGLE:
        return vy >= 0.0 and vy <= vx and vx <= r0
    if tag == TAG_ROT_TRIANGLE:
        return vx <= 0.0 and -vx <= vy and vy <= r0
    if tag == TAG_DISK:
        return vx * vx + vy * vy <= r0 * r0
    if tag == TAG_ANNULUS:
        rr = vx * vx + vy * vy
        return rr >= r0 * r0 and rr <= r1 * r1
    if tag == TAG_HALF_DISK:
        return vy >= 0.0 and vx * vx + vy * vy <= r0 * r0
    return vx >= r0 and vx <= r1 and vy >= r2 and vy <= r3


@njit(cache=True, inline="always")
def _tag_box(tag, r0, r1, r2, r3):
    if tag == TAG_TRIANGLE:
        return 0.0, r0, 0.0, r0
    if tag == TAG_ROT_TRIANGLE:
        return -r0, 0.0, 0.0, r0
    if tag == TAG_DISK:
        return -r0, r0, -r0, r0
    if tag == TAG_ANNULUS:
        return -r1, r1, -r1, r1
    if tag == TAG_HALF_DISK:
        return -r0, r0, 0.0, r0
    return r0, r1, r2, r3


@njit(parallel=True, cache=True)
def count_region(red, tag, r0, r1, r2, r3, cap):
    """Count lattice points (all, primitive) of each reduced basis in a tag
    region.  ok[k] = 0 flags a sample whose candidate range blew the cap."""
    n = red.shape[0]
    call = np.zeros(n, np.int64)
    cprim = np.zeros(n, np.int64)
    ok = np.ones(n, np.uint8)
    x0, x1, y0, y1 = _tag_box(tag, r0, r1, r2, r3)
    for k in prange(n):
        ax = red[k, 0, 0]
        ay = red[k, 1, 0]
        bx = red[k, 0, 1]
        by = red[k, 1, 1]
        pmin, pmax, qmin, qmax = _corner_ranges(ax, ay, bx, by, x0, x1, y0, y1)
        width = (np.float64(pmax) - np.float64(pmin) + 1.0) * (
            np.float64(qmax) - np.float64(qmin) + 1.0
        )
        if width > cap:
            ok[k] = 0
            continue
        na = np.int64(0)
        npr = np.int64(0)
        for p in range(pmin, pmax + 1):
            for q in range(qmin, qmax + 1):
                if p == 0 and q == 0:
                    continue
                vx = p * ax + q * bx
                vy = p * ay + q * by
                if _member(tag, r0, r1, r2, r3, vx, vy):
                    na += 1
                    if _gcd64(p, q) == 1:
                        npr += 1
        call[k] = na
        cprim[k] = npr
    return call, cprim, ok


@njit(cache=True, inline="always")
def _swept_member(profile, b, a, thr, T, wx, wy):
    """Membership of a rescaled point in the rescaled swept region.

    Coordinates here are w = diag(1/sqrt(T), sqrt(T)) v.  b = exp(-r) bounds
    the height, a = b / T is the horizontal half-width of the rescaled disk,
    thr = b*b / T its squared-radius threshold.  For the disk profile the
    height bound is implied by g <= thr, so it is not re-tested; that keeps
    the hit indicator bit-consistent with the window minimizer.
    """
    if profile == PROFILE_SEGMENT:
        return 0.0 <= wy and wy <= b and -wy <= wx and wx <= 0.0
    if profile == PROFILE_RECT:
        return 0.0 <= wy and wy <= b and -wy - a <= wx and wx <= a
    if wy < 0.0:
        return False
    tau = 0.0
    if wy != 0.0:
        tau = -wx / wy
        if tau < 0.0:
            tau = 0.0
        elif tau > 1.0:
            tau = 1.0
    d = wx + tau * wy
    g = T * d * d + wy * wy / T
    return g <= thr


@njit(parallel=True, cache=True)
def hit_swept(wred, b, T, profile, cap):
    """Hit indicator of the swept region for each rescaled reduced basis.

    b must equal exp(-r); callers that also threshold window_min output pass
    the same b so both routes share every float.  wred must hold the
    Gauss-reduced bases of rescale_bases output; the sweep then fits in a
    compact box.
    """
    n = wred.shape[0]
    hits = np.zeros(n, np.uint8)
    ok = np.ones(n, np.uint8)
    a = b / T
    thr = b * b / T
    if profile == PROFILE_SEGMENT:
        x0 = -b
        x1 = 0.0
    else:
        x0 = -b - a
        x1 = a
    for k in prange(n):
        ax = wred[k, 0, 0]
        ay = wred[k, 1, 0]
        bx = wred[k, 0, 1]
        by = wred[k, 1, 1]
        pmin, pmax, qmin, qmax = _corner_ranges(ax, ay, bx, by, x0, x1, 0.0, b)
        width = (np.float64(pmax) - np.float64(pmin) + 1.0) * (
            np.float64(qmax) - np.float64(qmin) + 1.0
        )
        if width > cap:
            ok[k] = 0
            continue
        found = False
        for p in range(pmin, pmax + 1):
            if found:
                break
            for q in range(qmin, qmax + 1):
                if p == 0 and q == 0:
                    continue
                wx = p * ax + q * bx
                wy = p * ay + q * by
                if _swept_member(profile, b, a, thr, T, wx, wy):
                    found = True
                    break
        if found:
            hits[k] = 1
    return hits, ok


@njit(cache=True, inline="always")
def _window_g(vx, vy, T):
    """Exact min of (vx + t*vy)^2 + vy^2 over t in [0, T] (clamped vertex)."""
    tau = 0.0
    if vy != 0.0:
        tau = -vx / vy
        if tau < 0.0:
            tau = 0.0
        elif tau > T:
            tau = T
    d = vx + tau * vy
    return d * d + vy * vy


@njit(parallel=True, cache=True)
def window_min(red, T, K, cap):
    """Global minimum over nonzero lattice vectors of the windowed shear norm.

    For each reduced basis, returns g = min_v min_{t in [0,T]} |u_t v|^2
    together with the integer coefficients of a minimizer (relative to the
    input basis, ties broken lexicographically).  Phase 1 walks a coarse
    orbit grid; every bound it records is evaluated on an exact integer
    combination of the input columns, so it is an achieved value even though
    the walk itself accumulates float error.  Phase 2 exhaustively scans the
    rescaled slab that must contain every vector at least that good, which
    makes the result exact whatever the grid resolution.
    """
    n = red.shape[0]
    gmin = np.empty(n, np.float64)
    pa = np.zeros(n, np.int64)
    qa = np.zeros(n, np.int64)
    ok = np.ones(n, np.uint8)
    sT = np.sqrt(T)
    dt = T / K
    for k in prange(n):
        ax = red[k, 0, 0]
        ay = red[k, 1, 0]
        bx = red[k, 0, 1]
        by = red[k, 1, 1]

        # phase 1: achieved upper bound from a coarse orbit walk
        c2 = _window_g(ax, ay, T)
        g2 = _window_g(bx, by, T)
        if g2 < c2:
            c2 = g2
        cax = ax
        cay = ay
        cbx = bx
        cby = by
        w00 = np.int64(1)
        w10 = np.int64(0)
        w01 = np.int64(0)
        w11 = np.int64(1)
        for step in range(K):
            cax = cax + dt * cay
            cbx = cbx + dt * cby
            cax, cay, cbx, cby, v00, v10, v01, v11 = _reduce2(cax, cay, cbx, cby)
            n00 = w00 * v00 + w01 * v10
            n10 = w10 * v00 + w11 * v10
            n01 = w00 * v01 + w01 * v11
            n11 = w10 * v01 + w11 * v11
            w00 = n00
            w10 = n10
            w01 = n01
            w11 = n11
            # exact candidates: columns of the walk expressed in the input basis
            vx = w00 * ax + w10 * bx
            vy = w00 * ay + w10 * by
            g2 = _window_g(vx, vy, T)
            if g2 < c2:
                c2 = g2
            vx = w01 * ax + w11 * bx
            vy = w01 * ay + w11 * by
            g2 = _window_g(vx, vy, T)
            if g2 < c2:
                c2 = g2

        # phase 2: exhaustive scan of the rescaled slab
        ex, ey, fx, fy, u00, u10, u01, u11 = _reduce2(ax / sT, ay * sT, bx / sT, by * sT)
        c = np.sqrt(c2)
        cy = c * sT * (1.0 + 1e-9) + 1e-300
        cx = (c / sT) * (1.0 + 1e-9) + 1e-300
        pmin, pmax, qmin, qmax = _corner_ranges(
            ex, ey, fx, fy, -cy - cx, cy + cx, -cy, cy
        )
        width = (np.float64(pmax) - np.float64(pmin) + 1.0) * (
            np.float64(qmax) - np.float64(qmin) + 1.0
        )
        if width > cap:
            ok[k] = 0
            gmin[k] = np.nan
            continue
        best = np.inf
        bp = np.int64(0)
        bq = np.int64(0)
        for p in range(pmin, pmax + 1):
            for q in range(qmin, qmax + 1):
                if p == 0 and q == 0:
                    continue
                wx = p * ex + q * fx
                wy = p * ey + q * fy
                tau = 0.0
                if wy != 0.0:
                    tau = -wx / wy
                    if tau < 0.0:
                        tau = 0.0
                    elif tau > 1.0:
                        tau = 1.0
                d = wx + tau * wy
                g = T * d * d + wy * wy / T
                if g < best:
                    best = g
                    bp = u00 * p + u01 * q
                    bq = u10 * p + u11 * q
                elif g == best:
                    mp = u00 * p + u01 * q
                    mq = u10 * p + u11 * q
                    if mp < bp or (mp == bp and mq < bq):
                        bp = mp
                        bq = mq
        gmin[k] = best
        pa[k] = bp
        qa[k] = bq
    return gmin, pa, qa, ok
