"""Compare the numba and numpy kernel builds on the main pipelines.

Runs each stage on both backends with identical inputs, checks the outputs
agree bit for bit, and prints a timing table.  The numba build pays a one-off
compile cost that is excluded by a warmup pass.

    python3 benchmarks/bench_backends.py --n 200000 --T 1000
"""

import argparse
import math
import time

import numpy as np

from horoextreme import _kernels_numba as knb
from horoextreme import _kernels_numpy as knp
from horoextreme import flow, haar
from horoextreme._tags import ENUM_CAP, PROFILE_DISK, TAG_TRIANGLE


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return time.perf_counter() - t0, out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=200_000)
    parser.add_argument("--T", type=float, default=1000.0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--r", type=float, default=0.3)
    args = parser.parse_args()

    side = math.exp(-args.r)
    K = flow.default_window_steps(args.T)

    # warmup compiles every numba signature used below
    knb.sample_coords(args.seed, 0, 64)
    wb = haar.bases_from_coords(*knb.sample_coords(args.seed, 0, 64))
    wred, _, _ = knb.reduce_bases(wb)
    knb.count_region(wred, TAG_TRIANGLE, side, 0.0, 0.0, 0.0, ENUM_CAP)
    knb.hit_swept(wred, side, args.T, PROFILE_DISK, ENUM_CAP)
    knb.window_min(wred, args.T, K, ENUM_CAP)

    rows = []

    t_nb, coords = timed(knb.sample_coords, args.seed, 0, args.n)
    t_np, coords2 = timed(knp.sample_coords, args.seed, 0, args.n)
    assert all(np.array_equal(a, b) for a, b in zip(coords, coords2))
    rows.append(("sample_coords", t_nb, t_np))

    bases = haar.bases_from_coords(*coords)
    t_nb, red_nb = timed(knb.reduce_bases, bases)
    t_np, red_np = timed(knp.reduce_bases, bases)
    assert all(np.array_equal(a, b) for a, b in zip(red_nb, red_np))
    rows.append(("reduce_bases", t_nb, t_np))
    red = red_nb[0]

    t_nb, out_nb = timed(
        knb.count_region, red, TAG_TRIANGLE, side, 0.0, 0.0, 0.0, ENUM_CAP)
    t_np, out_np = timed(
        knp.count_region, red, TAG_TRIANGLE, side, 0.0, 0.0, 0.0, ENUM_CAP)
    assert all(np.array_equal(a, b) for a, b in zip(out_nb, out_np))
    rows.append(("count_region", t_nb, t_np))

    wred_nb, _, _ = knb.reduce_bases(knb.rescale_bases(red, args.T))
    t_nb, hit_nb = timed(
        knb.hit_swept, wred_nb, side, args.T, PROFILE_DISK, ENUM_CAP)
    t_np, hit_np = timed(
        knp.hit_swept, wred_nb, side, args.T, PROFILE_DISK, ENUM_CAP)
    assert all(np.array_equal(a, b) for a, b in zip(hit_nb, hit_np))
    rows.append(("hit_swept", t_nb, t_np))

    t_nb, win_nb = timed(knb.window_min, red, args.T, K, ENUM_CAP)
    t_np, win_np = timed(knp.window_min, red, args.T, K, ENUM_CAP)
    assert all(np.array_equal(a, b) for a, b in zip(win_nb, win_np))
    rows.append(("window_min", t_nb, t_np))

    print(f"n = {args.n}, T = {args.T}, r = {args.r}, seed = {args.seed}")
    print(f"{'kernel':<16}{'numba (s)':>12}{'numpy (s)':>12}{'speedup':>10}")
    for name, t_nb, t_np in rows:
        print(f"{name:<16}{t_nb:>12.4f}{t_np:>12.4f}{t_np / t_nb:>10.1f}x")
    print("all outputs bit-identical across backends")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
