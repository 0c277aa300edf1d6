"""Closed-form law, slopes, moments, and the quadrature cross-check."""

import math

import numpy as np
import pytest

from horoextreme import analytic
from horoextreme.errors import QuadratureError

SPLIT = analytic.BRANCH_SPLIT


def test_branch_classification():
    assert analytic.branch_of(0.5) == analytic.POSITIVE_BRANCH
    assert analytic.branch_of(1e-300) == analytic.POSITIVE_BRANCH
    assert analytic.branch_of(0.0) == analytic.MIDDLE_BRANCH
    assert analytic.branch_of(-0.3) == analytic.MIDDLE_BRANCH
    assert analytic.branch_of(SPLIT) == analytic.TAIL_BRANCH
    assert analytic.branch_of(-2.0) == analytic.TAIL_BRANCH
    assert SPLIT == pytest.approx(-0.5 * math.log(2.0), rel=0, abs=0)


def test_limit_law_frozen_values():
    assert analytic.limit_law(0.5).value == 0.8881780587484831
    assert analytic.limit_law(0.0).value == 0.6960364490729867
    assert analytic.limit_law(-0.25).value == 0.5060592297436033
    tail = analytic.limit_law(-1.0)
    assert tail.value is None
    assert tail.lower == 0.03230891895277295
    assert tail.upper == 6.766764161830635


def test_limit_law_structure():
    v = analytic.limit_law(0.25)
    assert v.lower == v.value == v.upper
    assert v.branch == analytic.POSITIVE_BRANCH
    t = analytic.limit_law(-0.5, c1=2.0)
    assert t.value is None
    assert t.upper == 2.0 * math.exp(-1.0)
    with pytest.raises(ValueError):
        analytic.limit_law(0.5, c1=0.0)


def test_tail_bounds_domain():
    lo, hi = analytic.tail_bounds(SPLIT)
    assert 0.0 < lo < hi
    with pytest.raises(ValueError):
        analytic.tail_bounds(-0.3)
    with pytest.raises(ValueError):
        analytic.tail_bounds(-1.0, c1=-1.0)
    # doubling c1 doubles only the upper end
    a = analytic.tail_bounds(-1.0, c1=10.0)
    b = analytic.tail_bounds(-1.0, c1=20.0)
    assert b[0] == a[0] and b[1] == 2.0 * a[1]


def test_law_continuous_at_zero():
    mid = analytic.limit_law(0.0).value
    pos = analytic.limit_law(1e-13).value
    assert abs(mid - pos) < 1e-12
    # the tail bracket stays consistent with the middle value at the split
    mid_at_split = 1.0 - (3.0 / math.pi ** 2) * (
        2.0 * SPLIT * SPLIT - 2.0 * SPLIT + 1.0)
    lo, hi = analytic.tail_bounds(SPLIT)
    assert lo <= mid_at_split <= hi


def test_slope_values_and_continuity():
    assert analytic.limit_law_slope(0.0) == 0.6079271018540267
    assert analytic.limit_law_slope(1e-14) == pytest.approx(
        analytic.limit_law_slope(0.0), rel=1e-12)
    with pytest.raises(ValueError):
        analytic.limit_law_slope(SPLIT)
    with pytest.raises(ValueError):
        analytic.limit_law_slope(-2.0)


@pytest.mark.parametrize("r", [-0.3, -0.1, 0.0, 0.2, 0.7, 1.5])
def test_slope_matches_finite_difference(r):
    h = 1e-6
    fd = (analytic.limit_law(r + h).value
          - analytic.limit_law(r - h).value) / (2.0 * h)
    assert analytic.limit_law_slope(r) == pytest.approx(fd, rel=1e-6)


def test_slope_positive_decreasing():
    rs = np.linspace(SPLIT + 1e-6, 3.0, 200)
    slopes = np.array([analytic.limit_law_slope(r) for r in rs])
    assert (slopes > 0.0).all()
    assert (np.diff(slopes) < 0.0).all()


def test_trapezoid_continuity_modulus():
    # |F(b) - F(a)| never exceeds the endpoint-slope average times (b - a)
    rng = np.random.default_rng(2024)
    for _ in range(100):
        a = rng.uniform(SPLIT + 0.01, 2.0)
        b = a + rng.uniform(0.0, 0.5)
        fa, fb = analytic.limit_law(a).value, analytic.limit_law(b).value
        bound = 0.5 * (analytic.limit_law_slope(a)
                       + analytic.limit_law_slope(b)) * (b - a)
        assert abs(fb - fa) <= bound * (1.0 + 1e-12) + 1e-15


def test_first_moment_values():
    assert analytic.first_moment(0.0) == 3.0 / math.pi ** 2
    assert analytic.first_moment(-0.25) == 0.5011511719309085
    # mean scales as the triangle area over zeta(2)
    tri_area = 0.5 * math.exp(0.5)
    assert analytic.first_moment(-0.25) == pytest.approx(
        analytic.INV_ZETA2 * tri_area, rel=1e-15)


def test_second_moment_values_and_domain():
    assert analytic.second_moment_closed(-0.25) == 0.5155719752799323
    assert analytic.second_moment_closed(0.0) == pytest.approx(
        analytic.first_moment(0.0), rel=1e-15)
    for bad in (0.1, SPLIT, -1.0):
        with pytest.raises(ValueError):
            analytic.second_moment_closed(bad)


def test_count_distribution():
    d = analytic.count_distribution(-0.25)
    assert d.exactly_one == 0.4867303685818848
    assert d.exactly_two == 0.007210401674511868
    assert d.exactly_one > 0.0 and d.exactly_two > 0.0
    # with at most two points, P(N >= 1) must equal 1 - limit_law
    for r in np.linspace(SPLIT + 1e-6, 0.0, 25):
        dd = analytic.count_distribution(r)
        pge1 = dd.exactly_one + dd.exactly_two
        assert pge1 == pytest.approx(1.0 - analytic.limit_law(r).value,
                                     rel=0, abs=1e-14)
        assert dd.exactly_two >= -1e-15
    # the unit triangle almost surely holds at most one point
    assert abs(analytic.count_distribution(0.0).exactly_two) < 1e-15


def test_corrected_family_frozen_values():
    assert analytic.unimodular_pair_probability(-0.25) == 0.014420803349023771
    assert analytic.second_moment_corrected(-0.25) == 0.5299927786289561
    assert analytic.limit_law_corrected(-0.25).value == 0.5132696314181152
    d = analytic.count_distribution_corrected(-0.25)
    assert d.exactly_one == 0.472309565232861
    assert d.exactly_two == 0.014420803349023771


def test_corrected_family_identities():
    for r in np.linspace(SPLIT + 1e-6, 0.0, 25):
        pair = analytic.unimodular_pair_probability(r)
        one_sided = analytic.count_distribution(r).exactly_two
        # both determinant signs contribute the same companion integral
        assert pair == pytest.approx(2.0 * one_sided, rel=0, abs=1e-15)
        d = analytic.count_distribution_corrected(r)
        assert d.exactly_one + d.exactly_two == pytest.approx(
            1.0 - analytic.limit_law_corrected(r).value, rel=0, abs=1e-14)
        assert d.exactly_one + 2.0 * d.exactly_two == pytest.approx(
            analytic.first_moment(r), rel=0, abs=1e-14)
        assert d.exactly_one + 4.0 * d.exactly_two == pytest.approx(
            analytic.second_moment_corrected(r), rel=0, abs=1e-14)
        # corrected hit probability collapses to the one-sided exactly-one
        assert 1.0 - analytic.limit_law_corrected(r).value == pytest.approx(
            analytic.count_distribution(r).exactly_one, rel=0, abs=1e-14)


def test_corrected_family_branches():
    assert analytic.unimodular_pair_probability(0.5) == 0.0
    assert analytic.second_moment_corrected(0.5) == analytic.first_moment(0.5)
    assert (analytic.limit_law_corrected(0.5).value
            == analytic.limit_law(0.5).value)
    t = analytic.limit_law_corrected(-1.0)
    assert t.value is None
    assert (t.lower, t.upper) == analytic.tail_bounds(-1.0)
    with pytest.raises(ValueError):
        analytic.unimodular_pair_probability(SPLIT)
    with pytest.raises(ValueError):
        analytic.limit_law_corrected(0.5, c1=0.0)
    mid = analytic.limit_law_corrected(-1e-13).value
    pos = analytic.limit_law_corrected(1e-13).value
    assert abs(mid - pos) < 1e-12


def test_counts_match_corrected_family():
    # exact per-sample counts decide between the two families: the pair
    # probability lands on the corrected value and far from the one-sided one
    from horoextreme import haar, regions

    r = -0.25
    n = 400_000
    bases = haar.sample_batch(20250816, n).bases
    _, cprim = regions.count_batch(bases, regions.Triangle(r))
    hit = np.count_nonzero(cprim) / n
    p2 = np.count_nonzero(cprim == 2) / n
    m2 = float(np.mean(cprim.astype(np.float64) ** 2))

    law = 1.0 - analytic.limit_law_corrected(r).value
    se = math.sqrt(law * (1.0 - law) / n)
    assert abs(hit - law) <= 4.0 * se

    pair = analytic.unimodular_pair_probability(r)
    se = math.sqrt(pair * (1.0 - pair) / n)
    assert abs(p2 - pair) <= 4.0 * se
    assert abs(p2 - analytic.count_distribution(r).exactly_two) > 10.0 * se

    m2c = analytic.second_moment_corrected(r)
    d = analytic.count_distribution_corrected(r)
    m4 = d.exactly_one + 16.0 * d.exactly_two
    se = math.sqrt((m4 - m2c * m2c) / n)
    assert abs(m2 - m2c) <= 4.0 * se


def test_companion_interval_length():
    s = 1.3
    with pytest.raises(ValueError):
        analytic.companion_interval_length(0.5, 0.2, 1, 1.5)  # s too big
    with pytest.raises(ValueError):
        analytic.companion_interval_length(0.5, 0.6, 1, s)  # y > x
    with pytest.raises(ValueError):
        analytic.companion_interval_length(0.5, 0.2, 0, s)
    assert analytic.companion_interval_length(1.2, 0.1, -1, s) == 0.0
    assert analytic.companion_interval_length(1.2, 0.1, 5, s) == 0.0
    # too close to the short side: no companion time
    assert analytic.companion_interval_length(0.5, 0.2, 1, s) == 0.0
    got = analytic.companion_interval_length(1.25, 0.1, 1, s)
    want = (s * 1.15 - 1.0) / (1.25 * 1.15)
    assert got == pytest.approx(want, rel=1e-15)
    assert got > 0.0


def test_quadrature_matches_closed_form_on_grid():
    for s in np.linspace(1.0, math.sqrt(2.0) - 1e-3, 50):
        got = analytic.second_moment_by_quadrature(float(s))
        want = analytic.second_moment_closed(-math.log(s))
        assert abs(got - want) < 1e-6


def test_quadrature_validation():
    with pytest.raises(ValueError):
        analytic.second_moment_by_quadrature(0.9)
    with pytest.raises(ValueError):
        analytic.second_moment_by_quadrature(math.sqrt(2.0))
    with pytest.raises(QuadratureError):
        analytic.second_moment_by_quadrature(1.4, abs_tol=1e-18)


def test_expected_counts():
    from horoextreme import regions

    disk = regions.PuncturedDisk(0.5)
    assert analytic.expected_count(disk) == pytest.approx(
        math.pi * 0.25, rel=1e-15)
    assert analytic.expected_count(2.0) == 2.0
    assert analytic.expected_primitive_count(disk) == pytest.approx(
        analytic.INV_ZETA2 * math.pi * 0.25, rel=1e-15)


def test_short_vector_probability():
    assert analytic.short_vector_probability(0.5) == pytest.approx(
        3.0 * 0.25 / math.pi, rel=1e-15)
    for bad in (0.0, 1.0, -0.2, 2.0):
        with pytest.raises(ValueError):
            analytic.short_vector_probability(bad)


def test_triangle_count_bound():
    assert analytic.triangle_count_bound(0.0) == 2.0
    assert analytic.triangle_count_bound(-0.34) < 3.0
    assert analytic.triangle_count_bound(-1.0) == math.exp(2.0) + 1.0


@pytest.mark.parametrize("n,phi", [(1, 1), (2, 1), (6, 2), (12, 4),
                                   (97, 96), (360, 96)])
def test_totient(n, phi):
    assert analytic.totient(n) == phi


def test_totient_rejects():
    with pytest.raises(ValueError):
        analytic.totient(0)
