"""Random lattice sampling: determinism, domain, and distribution."""

import math

import numpy as np
import pytest

import _oracles as orc
from horoextreme import haar
from horoextreme.errors import ResourceLimitError

N_KS = 1_000_000
# two-sided Kolmogorov critical value at significance 1e-3
KS_CRIT = 1.9495


@pytest.fixture(scope="module")
def big_batch():
    return haar.sample_batch(31337, N_KS)


def test_sample_is_deterministic():
    a = haar.sample(7, 0)
    b = haar.sample(7, 0)
    assert (a.x, a.y, a.theta, a.index) == (b.x, b.y, b.theta, b.index)
    assert np.array_equal(a.basis, b.basis)
    assert a.x == 0.3839337757280413
    assert a.y == 1.4504366941065914
    assert a.theta == 0.9714815401679829


def test_scalar_equals_batch_element():
    batch = haar.sample_batch(7, 3)
    for i in range(3):
        s = haar.sample(7, i)
        assert s.x == batch.xs[i]
        assert s.y == batch.ys[i]
        assert s.theta == batch.thetas[i]
        assert np.array_equal(s.basis, batch.bases[i])
        assert s.index == i
        assert batch[i].index == s.index
        assert batch[i].x == s.x


def test_batch_split_invariance():
    whole = haar.sample_batch(99, 100)
    head = haar.sample_batch(99, 60)
    tail = haar.sample_batch(99, 40, start=60)
    assert np.array_equal(whole.xs, np.concatenate([head.xs, tail.xs]))
    assert np.array_equal(whole.bases,
                          np.concatenate([head.bases, tail.bases]))
    assert tail[0].index == 60


def test_iter_samples_matches_batch():
    whole = haar.sample_batch(5, 250)
    seen = list(haar.iter_samples(5, 250, chunk=64))
    assert sum(len(b) for b in seen) == 250
    assert np.array_equal(np.concatenate([b.xs for b in seen]), whole.xs)
    assert np.array_equal(np.concatenate([b.bases for b in seen]),
                          whole.bases)


def test_workers_do_not_change_results():
    a = haar.sample_batch(42, 5000, workers=1)
    b = haar.sample_batch(42, 5000, workers=2)
    assert np.array_equal(a.xs, b.xs)
    assert np.array_equal(a.bases, b.bases)


@pytest.mark.parametrize("x,y,theta", [
    (0.6, 1.2, 0.5),
    (0.0, 0.9, 0.5),       # inside the unit circle
    (0.0, -1.5, 0.5),
    (0.0, 1.2, -0.1),
    (0.0, 1.2, math.pi),
])
def test_from_coords_rejects(x, y, theta):
    with pytest.raises(ValueError):
        haar.from_coords(x, y, theta)


def test_from_coords_accepts_boundary():
    s = haar.from_coords(0.5, 1.0, 0.0)
    assert s.basis.shape == (2, 2)


def test_batch_bounds():
    with pytest.raises(ResourceLimitError):
        haar.sample_batch(0, haar.MAX_BATCH + 1)
    with pytest.raises(ValueError):
        haar.sample_batch(-1, 10)
    with pytest.raises(ValueError):
        haar.sample_batch(0, -1)


def test_coords_in_fundamental_domain(big_batch):
    xs, ys = big_batch.xs, big_batch.ys
    assert (np.abs(xs) <= 0.5).all()
    assert (ys >= orc.SQRT3_OVER_2).all()
    assert (xs * xs + ys * ys >= 1.0).all()
    th = big_batch.thetas
    assert ((th >= 0.0) & (th < math.pi)).all()


def test_bases_are_unimodular(big_batch):
    b = big_batch.bases[:50_000]
    det = b[:, 0, 0] * b[:, 1, 1] - b[:, 0, 1] * b[:, 1, 0]
    assert np.max(np.abs(det - 1.0)) < 1e-12


def test_height_marginal_ks(big_batch):
    stat = orc.kolmogorov_stat(big_batch.ys, orc.height_cdf)
    assert stat < KS_CRIT / math.sqrt(N_KS)


def test_rotation_marginal_ks(big_batch):
    stat = orc.kolmogorov_stat(big_batch.thetas, lambda t: t / math.pi)
    assert stat < KS_CRIT / math.sqrt(N_KS)


def test_shear_conditional_uniform(big_batch):
    # conditioned on height >= 1 the shear coordinate is uniform
    xs = big_batch.xs[big_batch.ys >= 1.0]
    stat = orc.kolmogorov_stat(xs, lambda x: x + 0.5)
    assert stat < KS_CRIT / math.sqrt(xs.size)


def test_bases_from_coords_matches_by_hand():
    xs = np.array([0.25])
    ys = np.array([1.5])
    th = np.array([0.6])
    b = haar.bases_from_coords(xs, ys, th)[0]
    c, s = math.cos(0.6), math.sin(0.6)
    sy = math.sqrt(1.5)
    want = np.array([
        [c / sy, c * (0.25 / sy) - s * sy],
        [s / sy, s * (0.25 / sy) + c * sy],
    ])
    assert np.max(np.abs(b - want)) < 1e-15
