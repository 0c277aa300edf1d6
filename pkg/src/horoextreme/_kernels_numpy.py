"""Hot loops, pure-numpy build.

Vectorized mirror of `_kernels_numba`: same function surface, same
arithmetic expression for every per-element operation, same draw order.
Both builds restrict themselves to exactly-rounded float ops
(+ - * / sqrt floor) and integer arithmetic, so their outputs agree bit for
bit and the cross-backend tests can compare with == instead of a tolerance.
Keep expressions textually in sync between the two files.

Aggregation here is order-free (minimum, saturation to 1, unit increments),
so chunked evaluation cannot change any result.
"""

from __future__ import annotations

import numpy as np

from ._rng import (
    DRAW_STEP,
    GAMMA,
    INV_2_53,
    MASK64,
    MIX_A,
    MIX_B,
    PI,
    SQRT3_OVER_2,
    mix64,
    stream_base,
    unit_draw,
)
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

BACKEND = "numpy"

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

# cells materialized per vectorized enumeration shot
_CELL_BUDGET = 1 << 21


def _mix(z):
    z = (z ^ (z >> _S30)) * _MIX_A
    z = (z ^ (z >> _S27)) * _MIX_B
    return z ^ (z >> _S31)


def _unit(base, j):
    return (_mix(base + (j + _ONE) * _STEP) >> _S11).astype(np.float64) * INV_2_53


def probe_uniform(seed, index, j):
    # test hook: raw draw j of stream index
    return unit_draw(stream_base(int(seed), int(index)), int(j))


def sample_coords(seed, start, count):
    # seed mixing on python ints; array ops wrap silently, scalar ones warn
    b0 = mix64((int(seed) + GAMMA) & MASK64)
    idx = np.arange(int(start), int(start) + count, dtype=np.uint64)
    base = _mix(np.uint64(b0) + idx * _GAMMA)
    xs = np.empty(count, np.float64)
    ys = np.empty(count, np.float64)
    j = np.zeros(count, np.uint64)
    pending = np.arange(count)
    while pending.size:
        b = base[pending]
        jj = j[pending]
        ux = _unit(b, jj)
        uu = _unit(b, jj + _ONE)
        x = ux - 0.5
        y = SQRT3_OVER_2 / (1.0 - uu)
        xs[pending] = x
        ys[pending] = y
        j[pending] = jj + _TWO
        pending = pending[x * x + y * y < 1.0]
    ths = PI * _unit(base, j)
    return xs, ys, ths


def _reduce_cols(ax, ay, bx, by):
    """Vectorized Gauss reduction; the per-sample operation sequence matches
    the scalar kernel exactly, so outputs are bit-identical.  Mutates its
    argument arrays in place and returns them plus the integer
    change-of-basis columns (column i of U holds the coefficients of output
    column i in the input basis)."""
    n = ax.shape[0]
    u00 = np.ones(n, np.int64)
    u10 = np.zeros(n, np.int64)
    u01 = np.zeros(n, np.int64)
    u11 = np.ones(n, np.int64)
    active = np.arange(n)
    for _ in range(96):
        if not active.size:
            break
        na = ax[active] * ax[active] + ay[active] * ay[active]
        nb = bx[active] * bx[active] + by[active] * by[active]
        sw = nb < na
        if sw.any():
            ids = active[sw]
            ax[ids], bx[ids] = bx[ids], ax[ids].copy()
            ay[ids], by[ids] = by[ids], ay[ids].copy()
            u00[ids], u01[ids] = u01[ids], u00[ids].copy()
            u10[ids], u11[ids] = u11[ids], u10[ids].copy()
            na = np.where(sw, nb, na)
        m = np.floor((ax[active] * bx[active] + ay[active] * by[active]) / na + 0.5)
        live = m != 0.0
        ids = active[live]
        mm = m[live]
        bx[ids] = bx[ids] - mm * ax[ids]
        by[ids] = by[ids] - mm * ay[ids]
        mi = mm.astype(np.int64)
        u01[ids] = u01[ids] - mi * u00[ids]
        u11[ids] = u11[ids] - mi * u10[ids]
        active = ids
    neg = (ax < 0.0) | ((ax == 0.0) & (ay < 0.0))
    ax[neg] = -ax[neg]
    ay[neg] = -ay[neg]
    u00[neg] = -u00[neg]
    u10[neg] = -u10[neg]
    neg = (bx < 0.0) | ((bx == 0.0) & (by < 0.0))
    bx[neg] = -bx[neg]
    by[neg] = -by[neg]
    u01[neg] = -u01[neg]
    u11[neg] = -u11[neg]
    return ax, ay, bx, by, u00, u10, u01, u11


def reduce_bases(bases):
    n = bases.shape[0]
    ax = bases[:, 0, 0].copy()
    ay = bases[:, 1, 0].copy()
    bx = bases[:, 0, 1].copy()
    by = bases[:, 1, 1].copy()
    ax, ay, bx, by, _, _, _, _ = _reduce_cols(ax, ay, bx, by)
    red = np.empty((n, 2, 2), np.float64)
    red[:, 0, 0] = ax
    red[:, 1, 0] = ay
    red[:, 0, 1] = bx
    red[:, 1, 1] = by
    return red, np.sqrt(ax * ax + ay * ay), np.sqrt(bx * bx + by * by)


def rescale_bases(bases, T):
    """Columns of diag(1/sqrt(T), sqrt(T)) times each basis.

    The swept-region hit kernel and the window minimizer must enumerate the
    same float lattice, so both obtain it through this one expression.
    """
    out = np.empty_like(bases)
    sT = np.sqrt(T)
    out[:, 0, 0] = bases[:, 0, 0] / sT
    out[:, 1, 0] = bases[:, 1, 0] * sT
    out[:, 0, 1] = bases[:, 0, 1] / sT
    out[:, 1, 1] = bases[:, 1, 1] * sT
    return out


def _corner_ranges_vec(ax, ay, bx, by, x0, x1, y0, y1):
    """Integer coefficient bounds covering an axis box under each basis.

    Vector form of the scalar kernel's corner mapping, same padding.  The
    box bounds may be scalars or per-sample arrays.
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
    pmin = np.minimum(np.minimum(p0, p1), np.minimum(p2, p3))
    pmax = np.maximum(np.maximum(p0, p1), np.maximum(p2, p3))
    qmin = np.minimum(np.minimum(q0, q1), np.minimum(q2, q3))
    qmax = np.maximum(np.maximum(q0, q1), np.maximum(q2, q3))
    pad_p = 1e-9 + 1e-12 * (np.abs(pmin) + np.abs(pmax))
    pad_q = 1e-9 + 1e-12 * (np.abs(qmin) + np.abs(qmax))
    return (
        np.ceil(pmin - pad_p).astype(np.int64),
        np.floor(pmax + pad_p).astype(np.int64),
        np.ceil(qmin - pad_q).astype(np.int64),
        np.floor(qmax + pad_q).astype(np.int64),
    )


def _range_width(pmin, pmax, qmin, qmax):
    return (pmax.astype(np.float64) - pmin.astype(np.float64) + 1.0) * (
        qmax.astype(np.float64) - qmin.astype(np.float64) + 1.0
    )


def _grid_eval(ids, pmin, pmax, qmin, qmax, ax, ay, bx, by, fn):
    """Run fn over the candidate (p, q) grid of every listed sample.

    fn(sid, p, q, vx, vy) receives flat arrays (origin excluded) covering one
    chunk; chunks are sized so no shot materializes more than _CELL_BUDGET
    cells, with oversized single-sample grids split into bands.  fn must
    aggregate order-free.
    """
    if not ids.size:
        return
    wp = pmax[ids] - pmin[ids] + 1
    wq = qmax[ids] - qmin[ids] + 1
    order = np.argsort(wp * wq, kind="stable")
    ids = ids[order]
    wp = wp[order]
    wq = wq[order]
    m = ids.size
    pos = 0
    while pos < m:
        mp = int(wp[pos])
        mq = int(wq[pos])
        take = 1
        while pos + take < m:
            tp = max(mp, int(wp[pos + take]))
            tq = max(mq, int(wq[pos + take]))
            if (take + 1) * tp * tq > _CELL_BUDGET:
                break
            mp = tp
            mq = tq
            take += 1
        sel = ids[pos : pos + take]
        pos += take
        if take == 1 and mp * mq > _CELL_BUDGET:
            _banded_eval(sel[0], pmin, pmax, qmin, qmax, ax, ay, bx, by, fn)
            continue
        p = pmin[sel][:, None, None] + np.arange(mp, dtype=np.int64)[None, :, None]
        q = qmin[sel][:, None, None] + np.arange(mq, dtype=np.int64)[None, None, :]
        keep = (p <= pmax[sel][:, None, None]) & (q <= qmax[sel][:, None, None])
        keep &= ~((p == 0) & (q == 0))
        vx = p * ax[sel][:, None, None] + q * bx[sel][:, None, None]
        vy = p * ay[sel][:, None, None] + q * by[sel][:, None, None]
        sid = np.broadcast_to(sel[:, None, None], vx.shape)
        kf = keep.ravel()
        pb = np.broadcast_to(p, vx.shape).ravel()[kf]
        qb = np.broadcast_to(q, vx.shape).ravel()[kf]
        fn(sid.ravel()[kf], pb, qb, vx.ravel()[kf], vy.ravel()[kf])


def _banded_eval(k, pmin, pmax, qmin, qmax, ax, ay, bx, by, fn):
    """One sample whose grid exceeds the cell budget, in p x q bands."""
    k = int(k)
    pl, ph = int(pmin[k]), int(pmax[k])
    ql, qh = int(qmin[k]), int(qmax[k])
    cax, cay, cbx, cby = ax[k], ay[k], bx[k], by[k]
    qstep = max(1, min(qh - ql + 1, _CELL_BUDGET))
    pstep = max(1, _CELL_BUDGET // qstep)
    for p0 in range(pl, ph + 1, pstep):
        p = np.arange(p0, min(p0 + pstep - 1, ph) + 1, dtype=np.int64)[:, None]
        for q0 in range(ql, qh + 1, qstep):
            q = np.arange(q0, min(q0 + qstep - 1, qh) + 1, dtype=np.int64)[None, :]
            vx = p * cax + q * cbx
            vy = p * cay + q * cby
            keep = ~((p == 0) & (q == 0))
            kf = np.broadcast_to(keep, vx.shape).ravel()
            pf = np.broadcast_to(p, vx.shape).ravel()[kf]
            qf = np.broadcast_to(q, vx.shape).ravel()[kf]
            sid = np.full(pf.size, k, np.int64)
            fn(sid, pf, qf, vx.ravel()[kf], vy.ravel()[kf])


def _member_vec(tag, r0, r1, r2, r3, vx, vy):
    if tag == TAG_TRIANGLE:
        return (vy >= 0.0) & (vy <= vx) & (vx <= r0)
    if tag == TAG_ROT_TRIANGLE:
        return (vx <= 0.0) & (-vx <= vy) & (vy <= r0)
    if tag == TAG_DISK:
        return vx * vx + vy * vy <= r0 * r0
    if tag == TAG_ANNULUS:
        rr = vx * vx + vy * vy
        return (rr >= r0 * r0) & (rr <= r1 * r1)
    if tag == TAG_HALF_DISK:
        return (vy >= 0.0) & (vx * vx + vy * vy <= r0 * r0)
    return (vx >= r0) & (vx <= r1) & (vy >= r2) & (vy <= r3)


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


def count_region(red, tag, r0, r1, r2, r3, cap):
    """Count lattice points (all, primitive) of each reduced basis in a tag
    region.  ok[k] = 0 flags a sample whose candidate range blew the cap."""
    n = red.shape[0]
    ax = red[:, 0, 0]
    ay = red[:, 1, 0]
    bx = red[:, 0, 1]
    by = red[:, 1, 1]
    x0, x1, y0, y1 = _tag_box(tag, r0, r1, r2, r3)
    pmin, pmax, qmin, qmax = _corner_ranges_vec(ax, ay, bx, by, x0, x1, y0, y1)
    ok = (_range_width(pmin, pmax, qmin, qmax) <= cap).astype(np.uint8)
    call = np.zeros(n, np.int64)
    cprim = np.zeros(n, np.int64)

    def tally(sid, p, q, vx, vy):
        inside = _member_vec(tag, r0, r1, r2, r3, vx, vy)
        if not inside.any():
            return
        sid = sid[inside]
        np.add.at(call, sid, 1)
        prim = np.gcd(np.abs(p[inside]), np.abs(q[inside])) == 1
        np.add.at(cprim, sid[prim], 1)

    _grid_eval(np.flatnonzero(ok), pmin, pmax, qmin, qmax, ax, ay, bx, by, tally)
    return call, cprim, ok


def hit_swept(wred, b, T, profile, cap):
    """Hit indicator of the swept region for each rescaled reduced basis.

    b must equal exp(-r); callers that also threshold window_min output pass
    the same b so both routes share every float.  wred must hold the
    Gauss-reduced bases of rescale_bases output; the sweep then fits in a
    compact box.
    """
    n = wred.shape[0]
    ax = wred[:, 0, 0]
    ay = wred[:, 1, 0]
    bx = wred[:, 0, 1]
    by = wred[:, 1, 1]
    a = b / T
    thr = b * b / T
    if profile == PROFILE_SEGMENT:
        x0 = -b
        x1 = 0.0
    else:
        x0 = -b - a
        x1 = a
    pmin, pmax, qmin, qmax = _corner_ranges_vec(ax, ay, bx, by, x0, x1, 0.0, b)
    ok = (_range_width(pmin, pmax, qmin, qmax) <= cap).astype(np.uint8)
    hits = np.zeros(n, np.uint8)

    def tally(sid, p, q, wx, wy):
        if profile == PROFILE_SEGMENT:
            inside = (0.0 <= wy) & (wy <= b) & (-wy <= wx) & (wx <= 0.0)
        elif profile == PROFILE_RECT:
            inside = (0.0 <= wy) & (wy <= b) & (-wy - a <= wx) & (wx <= a)
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                tau = np.where(wy != 0.0, -wx / wy, 0.0)
            np.clip(tau, 0.0, 1.0, out=tau)
            d = wx + tau * wy
            g = T * d * d + wy * wy / T
            inside = (wy >= 0.0) & (g <= thr)
        if inside.any():
            hits[sid[inside]] = 1

    _grid_eval(np.flatnonzero(ok), pmin, pmax, qmin, qmax, ax, ay, bx, by, tally)
    return hits, ok


def window_min(red, T, K, cap):
    """Global minimum over nonzero lattice vectors of the windowed shear norm.

    Same two phases as the scalar kernel: a coarse orbit walk whose bounds
    are evaluated on exact integer combinations of the input columns, then
    an exhaustive scan of the rescaled slab that must contain every vector
    at least that good.  The witness tie-break (lexicographically smallest
    coefficients in the input basis) runs as a second scan pass so the chunk
    order cannot affect it.
    """
    n = red.shape[0]
    ax = red[:, 0, 0].copy()
    ay = red[:, 1, 0].copy()
    bx = red[:, 0, 1].copy()
    by = red[:, 1, 1].copy()
    sT = np.sqrt(T)
    dt = T / K

    def window_g(vx, vy):
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.where(vy != 0.0, -vx / vy, 0.0)
        np.clip(tau, 0.0, T, out=tau)
        d = vx + tau * vy
        return d * d + vy * vy

    # phase 1: achieved upper bound from a coarse orbit walk
    c2 = np.minimum(window_g(ax, ay), window_g(bx, by))
    cax = ax.copy()
    cay = ay.copy()
    cbx = bx.copy()
    cby = by.copy()
    w00 = np.ones(n, np.int64)
    w10 = np.zeros(n, np.int64)
    w01 = np.zeros(n, np.int64)
    w11 = np.ones(n, np.int64)
    for _ in range(K):
        cax += dt * cay
        cbx += dt * cby
        cax, cay, cbx, cby, v00, v10, v01, v11 = _reduce_cols(cax, cay, cbx, cby)
        n00 = w00 * v00 + w01 * v10
        n10 = w10 * v00 + w11 * v10
        n01 = w00 * v01 + w01 * v11
        n11 = w10 * v01 + w11 * v11
        w00, w10, w01, w11 = n00, n10, n01, n11
        # exact candidates: columns of the walk expressed in the input basis
        np.minimum(c2, window_g(w00 * ax + w10 * bx, w00 * ay + w10 * by), out=c2)
        np.minimum(c2, window_g(w01 * ax + w11 * bx, w01 * ay + w11 * by), out=c2)

    # phase 2: exhaustive scan of the rescaled slab
    ex = ax / sT
    ey = ay * sT
    fx = bx / sT
    fy = by * sT
    ex, ey, fx, fy, u00, u10, u01, u11 = _reduce_cols(ex, ey, fx, fy)
    c = np.sqrt(c2)
    cy = c * sT * (1.0 + 1e-9) + 1e-300
    cx = (c / sT) * (1.0 + 1e-9) + 1e-300
    pmin, pmax, qmin, qmax = _corner_ranges_vec(ex, ey, fx, fy, -cy - cx, cy + cx, -cy, cy)
    ok = (_range_width(pmin, pmax, qmin, qmax) <= cap).astype(np.uint8)
    gmin = np.where(ok == 1, np.inf, np.nan)
    pa = np.zeros(n, np.int64)
    qa = np.zeros(n, np.int64)

    def slab_g(wx, wy):
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.where(wy != 0.0, -wx / wy, 0.0)
        np.clip(tau, 0.0, 1.0, out=tau)
        d = wx + tau * wy
        return T * d * d + wy * wy / T

    def scan_min(sid, p, q, wx, wy):
        np.minimum.at(gmin, sid, slab_g(wx, wy))

    imax = np.iinfo(np.int64).max
    best_p = np.full(n, imax, np.int64)
    best_q = np.full(n, imax, np.int64)

    def scan_witness(sid, p, q, wx, wy):
        achieves = slab_g(wx, wy) == gmin[sid]
        if not achieves.any():
            return
        sid = sid[achieves]
        mp = u00[sid] * p[achieves] + u01[sid] * q[achieves]
        mq = u10[sid] * p[achieves] + u11[sid] * q[achieves]
        # lexicographically smallest witness inside this chunk, then merge
        order = np.lexsort((mq, mp, sid))
        sid = sid[order]
        mp = mp[order]
        mq = mq[order]
        lead = np.ones(sid.size, bool)
        lead[1:] = sid[1:] != sid[:-1]
        sid = sid[lead]
        mp = mp[lead]
        mq = mq[lead]
        better = (mp < best_p[sid]) | ((mp == best_p[sid]) & (mq < best_q[sid]))
        best_p[sid[better]] = mp[better]
        best_q[sid[better]] = mq[better]

    live = np.flatnonzero(ok)
    _grid_eval(live, pmin, pmax, qmin, qmax, ex, ey, fx, fy, scan_min)
    _grid_eval(live, pmin, pmax, qmin, qmax, ex, ey, fx, fy, scan_witness)
    found = best_p != imax
    pa[found] = best_p[found]
    qa[found] = best_q[found]
    return gmin, pa, qa, ok
