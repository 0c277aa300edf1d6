"""Closed-form laws, moments, and bounds for lattice excursion statistics.

Everything here is a deterministic formula; the Monte Carlo harness exists
to cross-check these values, never to replace them.  The limit law for the
excursion event has three regimes in the level r:

    positive-r   r > 0:              1 - (3/pi^2) * exp(-2r)
    middle-r     -log(2)/2 < r <= 0: 1 - (3/pi^2) * (2r^2 - 2r + 1)
    tail-r       r <= -log(2)/2:     only two-sided bounds of order exp(2r)

The middle branch is where the side-exp(-r) triangle can hold two primitive
lattice points; its count distribution is worked out exactly below.

Middle-branch functions come in two families.  The pinned family
(limit_law, second_moment_closed, count_distribution) evaluates the pair
term from companion lines of positive determinant only, which is the form
the acceptance targets freeze.  The corrected family (limit_law_corrected,
second_moment_corrected, count_distribution_corrected,
unimodular_pair_probability) also keeps the negative-determinant companion
line, which enters the triangle through its base edge whenever the source
point sits higher than 1/side and contributes an equal integral.  Exact
per-sample Monte Carlo agrees with the corrected family; the acceptance
suite reports both comparisons.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import QuadratureError

ZETA2 = math.pi * math.pi / 6.0
INV_ZETA2 = 6.0 / (math.pi * math.pi)  # density of primitive lattice vectors
BRANCH_SPLIT = -0.5 * math.log(2.0)  # level where the middle branch ends
TAIL_LOWER_COEFF = 3.0 / (4.0 * math.pi)
DEFAULT_C1 = 50.0  # reporting-only multiplier for the tail upper bound
MINKOWSKI_PRODUCT_BOUND = 4.0 / math.pi  # lambda1 * lambda2 for covolume 1

POSITIVE_BRANCH = "positive-r"
MIDDLE_BRANCH = "middle-r"
TAIL_BRANCH = "tail-r"


def branch_of(r: float) -> str:
    if r > 0.0:
        return POSITIVE_BRANCH
    if r > BRANCH_SPLIT:
        return MIDDLE_BRANCH
    return TAIL_BRANCH


@dataclass(frozen=True)
class AnalyticValue:
    """A formula value with its validity bracket.

    Closed-form branches carry value == lower == upper; the tail branch has
    no closed form, so value is None and only the bracket is meaningful.
    """

    r: float
    branch: str
    value: float | None
    lower: float
    upper: float


def limit_law(r: float, c1: float = DEFAULT_C1) -> AnalyticValue:
    """Limiting probability of the excursion event at level r.

    This is the pinned form: its middle branch keeps only the
    positive-determinant companion term.  limit_law_corrected keeps both
    orientations and is the one Monte Carlo agrees with there; the two
    coincide on the positive and tail branches.
    """
    if not c1 > 0.0:
        raise ValueError("c1 must be positive")
    branch = branch_of(r)
    if branch == POSITIVE_BRANCH:
        v = 1.0 - (3.0 / (math.pi * math.pi)) * math.exp(-2.0 * r)
        return AnalyticValue(r=r, branch=branch, value=v, lower=v, upper=v)
    if branch == MIDDLE_BRANCH:
        v = 1.0 - (3.0 / (math.pi * math.pi)) * (2.0 * r * r - 2.0 * r + 1.0)
        return AnalyticValue(r=r, branch=branch, value=v, lower=v, upper=v)
    lo, hi = tail_bounds(r, c1)
    return AnalyticValue(r=r, branch=branch, value=None, lower=lo, upper=hi)


def limit_law_slope(r: float) -> float:
    """Derivative of the limit law on its closed-form branches.

    The two branches meet with matching slope at r = 0, so this is the
    one-sided derivative everywhere on (BRANCH_SPLIT, inf).  The slope is
    positive, decreasing, and convex there, which is what justifies the
    endpoint-average continuity bound used by callers.
    """
    branch = branch_of(r)
    if branch == POSITIVE_BRANCH:
        return (6.0 / (math.pi * math.pi)) * math.exp(-2.0 * r)
    if branch == MIDDLE_BRANCH:
        return (6.0 / (math.pi * math.pi)) * (1.0 - 2.0 * r)
    raise ValueError(f"slope needs r > {BRANCH_SPLIT}, got {r}")


def tail_bounds(r: float, c1: float = DEFAULT_C1) -> tuple[float, float]:
    """Two-sided bracket for the limit law deep in the tail branch.

    The upper coefficient c1 is a configurable reporting constant, not a
    sharp bound, so the bracket can be slack or even exceed 1 there.
    """
    if r > BRANCH_SPLIT:
        raise ValueError(f"tail bounds need r <= {BRANCH_SPLIT}, got {r}")
    if not c1 > 0.0:
        raise ValueError("c1 must be positive")
    e = math.exp(2.0 * r)
    return TAIL_LOWER_COEFF * e, c1 * e


def first_moment(r: float) -> float:
    """Expected number of primitive lattice points in Triangle(r); all r."""
    return (3.0 / (math.pi * math.pi)) * math.exp(-2.0 * r)


def _require_middle(r: float):
    if not (BRANCH_SPLIT < r <= 0.0):
        raise ValueError(
            f"formula valid only on ({BRANCH_SPLIT}, 0], got r = {r}"
        )


def second_moment_closed(r: float) -> float:
    """Second moment of the primitive count in Triangle(r), middle branch.

    Outside (-log(2)/2, 0] the counting configurations change and this
    expression stops being the second moment, so the domain is enforced.
    Pinned one-sided form; second_moment_corrected keeps both companion
    orientations and matches Monte Carlo.
    """
    _require_middle(r)
    return (6.0 / (math.pi * math.pi)) * (
        1.5 * math.exp(-2.0 * r) - 1.0 + 2.0 * r - 2.0 * r * r
    )


@dataclass(frozen=True)
class MomentPair:
    """First two moments of the primitive triangle count plus the exact
    probabilities of the only two nonzero values the count can take."""

    first: float
    second: float
    exactly_one: float
    exactly_two: float


def count_distribution(r: float) -> MomentPair:
    """Distribution of the primitive count in Triangle(r), middle branch.

    On the middle branch the count is 0, 1, or 2, so the two moments pin
    down the whole distribution.
    """
    _require_middle(r)
    m1 = first_moment(r)
    m2 = second_moment_closed(r)
    return MomentPair(
        first=m1,
        second=m2,
        exactly_one=2.0 * m1 - m2,
        exactly_two=0.5 * (m2 - m1),
    )


def unimodular_pair_probability(r: float) -> float:
    """Probability that Triangle(r) holds two primitive lattice points.

    Two primitive points of a covolume-1 lattice in the triangle span a
    cell of determinant +1 or -1.  Both determinant signs contribute: the
    negative-sign companion line enters the triangle through its base edge
    whenever the source point's height exceeds 1/side, and its in-triangle
    length integrates to the same closed value as the positive-sign line.
    So the pair probability is twice the one-sided companion integral,
    i.e. exactly 2 * (second_moment_closed(r) - first_moment(r)) / 2 per
    sign, summed.  Exact per-sample Monte Carlo confirms this value and
    rules out the one-sided count_distribution(r).exactly_two.
    """
    branch = branch_of(r)
    if branch == TAIL_BRANCH:
        raise ValueError(f"pair probability needs r > {BRANCH_SPLIT}, got {r}")
    if branch == POSITIVE_BRANCH:
        # two points in a triangle of area below 1/2 would span a cell of
        # determinant below 1, impossible for a covolume-1 lattice
        return 0.0
    return (6.0 / (math.pi * math.pi)) * (
        math.exp(-2.0 * r) - 1.0 + 2.0 * r - 2.0 * r * r
    )


def second_moment_corrected(r: float) -> float:
    """Second moment of the primitive triangle count with both companion
    orientations kept; agrees with Monte Carlo where second_moment_closed
    does not.  Valid on the whole closed-form range r > -log(2)/2."""
    return first_moment(r) + 2.0 * unimodular_pair_probability(r)


def count_distribution_corrected(r: float) -> MomentPair:
    """Primitive-count distribution with both companion orientations kept.

    Same inversion as count_distribution, applied to the corrected second
    moment.  exactly_one + exactly_two equals the corrected hit
    probability 1 - limit_law_corrected(r).value.
    """
    m1 = first_moment(r)
    p2 = unimodular_pair_probability(r)
    return MomentPair(
        first=m1,
        second=m1 + 2.0 * p2,
        exactly_one=m1 - 2.0 * p2,
        exactly_two=p2,
    )


def limit_law_corrected(r: float, c1: float = DEFAULT_C1) -> AnalyticValue:
    """Limit law with both companion orientations kept in the pair term.

    Identical to limit_law on the positive branch (no pairs fit there) and
    on the tail branch (bracket only).  On the middle branch the no-hit
    probability is 1 - (3/pi^2) * (4r^2 - 4r + 2 - exp(-2r)): still
    continuous and once differentiable at r = 0 against the positive
    branch.  Exact per-sample Monte Carlo matches this value and not the
    pinned middle form.
    """
    if not c1 > 0.0:
        raise ValueError("c1 must be positive")
    branch = branch_of(r)
    if branch == MIDDLE_BRANCH:
        v = 1.0 - (3.0 / (math.pi * math.pi)) * (
            4.0 * r * r - 4.0 * r + 2.0 - math.exp(-2.0 * r)
        )
        return AnalyticValue(r=r, branch=branch, value=v, lower=v, upper=v)
    return limit_law(r, c1)


def companion_interval_length(x: float, y: float, n: int, s: float) -> float:
    """Length of the shear-time interval pairing a point with a companion.

    For a primitive point at (x, y) in the side-s triangle, measures the
    times at which the n-th integer translate of the companion line lands a
    second point inside the triangle.  Only n == 1 can contribute when
    s < sqrt(2); every other n gives 0.
    """
    if not (1.0 <= s < math.sqrt(2.0)):
        raise ValueError(f"s must lie in [1, sqrt(2)), got {s}")
    if not (0.0 <= y <= x <= s):
        raise ValueError(f"need 0 <= y <= x <= s, got ({x}, {y})")
    if n == 0:
        raise ValueError("n must be a nonzero integer")
    if n != 1:
        return 0.0
    if x < 1.0 / s or y > x - 1.0 / s:
        return 0.0
    return (s * (x - y) - 1.0) / (x * (x - y))


def second_moment_by_quadrature(s: float, abs_tol: float = 1e-8) -> float:
    """Second moment of the triangle count via direct 2D integration.

    Independent route to second_moment_closed(-log(s)): integrates the
    companion interval length over the two-point configuration set and adds
    the diagonal term.  Raises QuadratureError if the integrator cannot
    certify abs_tol.
    """
    if not (1.0 <= s < math.sqrt(2.0)):
        raise ValueError(f"s must lie in [1, sqrt(2)), got {s}")
    if s == 1.0:
        inner = 0.0
    else:
        inner, err = integrate.dblquad(
            lambda y, x: (s * (x - y) - 1.0) / (x * (x - y)),
            1.0 / s,
            s,
            0.0,
            lambda x: x - 1.0 / s,
            epsabs=1e-10,
            epsrel=1e-10,
        )
        if err > abs_tol:
            raise QuadratureError(
                f"estimated quadrature error {err} exceeds {abs_tol}"
            )
    return (6.0 / (math.pi * math.pi)) * (0.5 * s * s + inner)


def _area(region_or_area) -> float:
    m = getattr(region_or_area, "measure", None)
    if callable(m):
        return float(m())
    return float(region_or_area)


def expected_count(region_or_area) -> float:
    """Mean number of nonzero lattice points in a region (its area)."""
    return _area(region_or_area)


def expected_primitive_count(region_or_area) -> float:
    """Mean number of primitive lattice points in a region."""
    return INV_ZETA2 * _area(region_or_area)


def short_vector_probability(radius: float) -> float:
    """Probability that a random unimodular lattice has a nonzero vector of
    norm at most radius; exact for radius < 1."""
    if not 0.0 < radius < 1.0:
        raise ValueError(f"radius must lie in (0, 1), got {radius}")
    return 3.0 * radius * radius / math.pi


def triangle_count_bound(r: float) -> float:
    """Deterministic cap on the primitive count in Triangle(r).

    The count never exceeds exp(-2r) + 1; in particular it is at most 2
    whenever the side is below sqrt(2).
    """
    return math.exp(-2.0 * r) + 1.0


def totient(n: int) -> int:
    """Euler's totient by trial division."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    result = n
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result
