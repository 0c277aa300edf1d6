"""Basis validation, Gauss reduction, and box enumeration."""

import math

import numpy as np
import pytest

import _oracles as orc
from horoextreme import haar, lattice
from horoextreme.backend import kernels
from horoextreme.errors import ResourceLimitError


@pytest.mark.parametrize("bad", [
    [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    [[1.0, 0.0], [0.0, 2.0]],
    [[0.0, 1.0], [1.0, 0.0]],          # determinant -1
    [[np.nan, 0.0], [0.0, 1.0]],
    [[np.inf, 0.0], [0.0, 1.0]],
])
def test_as_basis_rejects(bad):
    with pytest.raises(ValueError):
        lattice.as_basis(bad)


def test_as_basis_passes_near_unimodular():
    b = lattice.as_basis([[1.0, 0.0], [0.0, 1.0 + 5e-10]])
    assert b.dtype == np.float64


def test_reduce_shear_example():
    # columns (1, 0) and (5, 1) reduce to the standard basis
    rb = lattice.gauss_reduce([[1.0, 5.0], [0.0, 1.0]])
    assert np.array_equal(rb.matrix, np.eye(2))
    assert np.array_equal(rb.transform, [[1, -5], [0, 1]])


def test_reduce_rotation_example():
    # columns (0, 1) and (-1, 0): already reduced, signs get normalized
    rb = lattice.gauss_reduce([[0.0, -1.0], [1.0, 0.0]])
    assert np.array_equal(rb.matrix, [[0.0, 1.0], [1.0, 0.0]])


def test_transform_reproduces_reduction_exactly():
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = rng.normal(size=(2, 2))
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        m = m / math.sqrt(abs(det))
        if det < 0:
            m[:, 1] *= -1.0
        rb = lattice.gauss_reduce(m)
        u = rb.transform
        assert abs(u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]) == 1
        # reduced column i = src @ transform[:, i], same float path
        for i in (0, 1):
            cx = u[0, i] * m[0, 0] + u[1, i] * m[0, 1]
            cy = u[0, i] * m[1, 0] + u[1, i] * m[1, 1]
            assert math.hypot(cx - rb.matrix[0, i],
                              cy - rb.matrix[1, i]) < 1e-12


def test_scalar_reduce_matches_kernel_bitwise():
    batch = haar.sample_batch(909, 500)
    red, l1, l2 = kernels.reduce_bases(batch.bases)
    for i in range(len(batch)):
        rb = lattice.gauss_reduce(batch.bases[i])
        assert np.array_equal(rb.matrix, red[i])
        mins = lattice.successive_minima(batch.bases[i])
        assert mins.lambda1 == l1[i]
        assert mins.lambda2 == l2[i]


def test_reduced_basis_properties():
    batch = haar.sample_batch(17, 400)
    for i in range(len(batch)):
        rb = lattice.gauss_reduce(batch.bases[i]).matrix
        na = rb[0, 0] ** 2 + rb[1, 0] ** 2
        nb = rb[0, 1] ** 2 + rb[1, 1] ** 2
        dot = rb[0, 0] * rb[0, 1] + rb[1, 0] * rb[1, 1]
        assert na <= nb * (1.0 + 1e-12)
        assert abs(dot) <= 0.5 * na * (1.0 + 1e-12)
        det = rb[0, 0] * rb[1, 1] - rb[1, 0] * rb[0, 1]
        assert abs(abs(det) - 1.0) < 1e-9


def test_minima_diag_example():
    m = [[2.0, 0.0], [0.0, 0.5]]
    mins = lattice.successive_minima(m)
    assert mins.lambda1 == 0.5
    assert mins.lambda2 == 2.0
    assert lattice.cusp_height(m) == 2.0
    assert lattice.shortest_vector_norm(m) == 0.5


def test_minkowski_product_bound():
    batch = haar.sample_batch(2718, 10_000)
    _, l1, l2 = kernels.reduce_bases(batch.bases)
    prod = l1 * l2
    assert prod.max() <= 4.0 / math.pi + 1e-9
    assert (l1 <= l2 + 1e-12).all()
    assert l1.max() <= 2.0 / math.sqrt(math.pi) + 1e-9


def test_enumerate_square_lattice():
    pts = lattice.enumerate_points(np.eye(2), (-1.0, 1.0, -1.0, 1.0))
    assert len(pts) == 8
    assert all(p.primitive for p in pts)
    coords = sorted((p.p, p.q) for p in pts)
    assert (0, 0) not in coords
    pts2 = lattice.enumerate_points(np.eye(2), (0.0, 1.0, 0.0, 1.0))
    assert sorted((p.p, p.q) for p in pts2) == [(0, 1), (1, 0), (1, 1)]


def test_enumerate_rejects_bad_box():
    with pytest.raises(ValueError):
        lattice.enumerate_points(np.eye(2), (1.0, -1.0, 0.0, 1.0))


def test_enumerate_cap():
    with pytest.raises(ResourceLimitError):
        lattice.enumerate_points(np.eye(2), (-100.0, 100.0, -100.0, 100.0),
                                 cap=100)


def test_enumerate_against_brute_force():
    rng = np.random.default_rng(11)
    for _ in range(30):
        m = rng.normal(size=(2, 2))
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        m = m / math.sqrt(abs(det))
        if det < 0:
            m[:, 1] *= -1.0
        lo = rng.uniform(-2.0, 0.0, 2)
        hi = rng.uniform(0.0, 2.0, 2)
        box = (lo[0], hi[0], lo[1], hi[1])
        got = lattice.enumerate_points(m, box)
        want = orc.brute_points(m, box)
        assert len(got) == len(want)
        gset = sorted((round(p.x, 9), round(p.y, 9)) for p in got)
        wset = sorted((round(x, 9), round(y, 9)) for _, _, x, y in want)
        assert gset == wset
        # coefficients refer to the original basis
        for p in got:
            x = p.p * m[0, 0] + p.q * m[0, 1]
            y = p.p * m[1, 0] + p.q * m[1, 1]
            assert math.hypot(x - p.x, y - p.y) < 1e-9
            assert p.primitive == (math.gcd(p.p, p.q) == 1)


def test_coefficient_ranges_cover_box():
    pmin, pmax, qmin, qmax = lattice.coefficient_ranges(
        1.0, 0.0, 0.0, 1.0, (-1.5, 2.5, -0.5, 0.5))
    assert pmin <= -1 and pmax >= 2
    assert qmin <= 0 and qmax >= 0
