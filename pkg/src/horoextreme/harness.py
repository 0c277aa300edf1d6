"""Monte Carlo experiment runner with CSV/JSON reporting.

Every experiment is a pure function of (experiment, r grid, T grid, samples,
seed): sample i always consumes substream i of the seed, accumulators are
exact integer sums (the counts involved are tiny), and derived statistics
are computed once from those integers.  Reports are therefore byte-identical
across worker counts and chunk sizes.

A cell that blows a resource or accuracy budget is reported as a row with an
empty estimate and a failure tag instead of aborting the other cells; the
CLI turns the presence of such rows into exit code 4.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import analytic, backend, flow, haar, regions
from ._tags import ENUM_CAP, TAG_ANNULUS, TAG_DISK, TAG_TRIANGLE
from ._version import __version__
from .errors import QuadratureError, ResourceLimitError

EXPERIMENTS = (
    "hit-prob",
    "evl",
    "moments",
    "tail",
    "siegel-check",
    "lemma-checks",
    "ky-integral",
)

MIN_SAMPLES = 100
DEFAULT_SAMPLES = 100_000
DEFAULT_CHUNK = 500_000

# annulus and disk the fixed-region experiments use
SIEGEL_ANNULUS = (0.2, 0.8)
SHORT_VECTOR_RADIUS = 0.5
KY_GRID_POINTS = 50

Z_95 = 1.959963984540054
Z_999 = 3.290526731491926
_Z_BY_LEVEL = {0.95: Z_95, 0.999: Z_999}

_DEFAULT_R = {
    "hit-prob": (0.25, 0.5, 1.0),
    "evl": (0.25, 0.5, 1.0),
    "moments": (-0.25,),
    "tail": (-0.5, -1.0, -1.5, -2.0),
    "lemma-checks": (-0.3,),
}
_DEFAULT_T = {
    "evl": (1e4,),
    "tail": (1e4,),
}
_NEEDS_R = ("hit-prob", "evl", "moments", "tail", "lemma-checks")
_NEEDS_T = ("evl", "tail")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    r_values: tuple[float, ...] = ()
    T_values: tuple[float, ...] = ()
    samples: int = DEFAULT_SAMPLES
    seed: int = 0
    workers: int = 1
    c1: float = analytic.DEFAULT_C1
    output_path: str | None = None
    fmt: str = "csv"


def with_defaults(config: ExperimentConfig) -> ExperimentConfig:
    """Fill empty r/T grids with the experiment's standard grid."""
    out = config
    if not out.r_values and out.experiment in _DEFAULT_R:
        out = replace(out, r_values=_DEFAULT_R[out.experiment])
    if not out.T_values and out.experiment in _DEFAULT_T:
        out = replace(out, T_values=_DEFAULT_T[out.experiment])
    return out


def validate_config(config: ExperimentConfig) -> ExperimentConfig:
    """Apply grid defaults and reject unusable configurations."""
    cfg = with_defaults(config)
    if cfg.experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {cfg.experiment!r}")
    if cfg.samples < MIN_SAMPLES:
        raise ValueError(f"samples must be at least {MIN_SAMPLES}")
    if not 0 <= cfg.seed < 2**64:
        raise ValueError("seed must be a nonnegative 64-bit integer")
    if cfg.workers < 1:
        raise ValueError("workers must be positive")
    if not cfg.c1 > 0.0:
        raise ValueError("c1 must be positive")
    if cfg.fmt not in ("csv", "json"):
        raise ValueError(f"format must be csv or json, got {cfg.fmt!r}")
    if cfg.experiment in _NEEDS_R and not cfg.r_values:
        raise ValueError(f"{cfg.experiment} needs at least one r value")
    if cfg.experiment in _NEEDS_T and not cfg.T_values:
        raise ValueError(f"{cfg.experiment} needs at least one T value")
    for T in cfg.T_values:
        if not T > 0.0:
            raise ValueError(f"T values must be positive, got {T}")
    if cfg.experiment == "moments":
        for r in cfg.r_values:
            if not (analytic.BRANCH_SPLIT < r <= 0.0):
                raise ValueError(
                    "moments formulas hold only for r in "
                    f"({analytic.BRANCH_SPLIT:.6f}, 0]; got {r}"
                )
    if cfg.experiment == "tail":
        for r in cfg.r_values:
            if r > analytic.BRANCH_SPLIT:
                raise ValueError(
                    f"tail experiment needs r <= {analytic.BRANCH_SPLIT:.6f}; got {r}"
                )
    return cfg


@dataclass(frozen=True)
class Row:
    """One report cell; None fields print as empty CSV cells."""

    experiment: str
    r: float | None
    T: float | None
    n: int
    estimate: float | None
    stderr: float | None
    ci_low: float | None
    ci_high: float | None
    target: float | None
    target_source: str
    z: float | None


@dataclass
class TrialReport:
    experiment: str
    rows: list[Row] = field(default_factory=list)
    samples: int = 0
    seed: int = 0
    workers: int = 1
    wall_time: float = 0.0
    version: str = __version__
    failures: int = 0


def confidence_interval(
    successes: int, n: int, level: float = 0.95
) -> tuple[float, float]:
    """Wilson score interval; always contains successes / n."""
    if level not in _Z_BY_LEVEL:
        raise ValueError(f"level must be one of {sorted(_Z_BY_LEVEL)}")
    if n < 1 or not 0 <= successes <= n:
        raise ValueError("need 0 <= successes <= n and n >= 1")
    z = _Z_BY_LEVEL[level]
    phat = successes / n
    z2n = z * z / n
    denom = 1.0 + z2n
    center = (phat + 0.5 * z2n) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + 0.25 * z2n / n) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _zscore(estimate, target, stderr):
    if target is None or stderr is None or stderr <= 0.0:
        return None
    return (estimate - target) / stderr


def _binomial_row(sub, r, T, successes, n, target, source) -> Row:
    est = successes / n
    se = math.sqrt(est * (1.0 - est) / n)
    lo, hi = confidence_interval(successes, n, 0.95)
    return Row(
        experiment=sub,
        r=r,
        T=T,
        n=n,
        estimate=est,
        stderr=se,
        ci_low=lo,
        ci_high=hi,
        target=target,
        target_source=source,
        z=_zscore(est, target, se),
    )


def _mean_row(sub, r, T, s1: int, s2: int, n, target, source) -> Row:
    """Row for a sample mean, from exact integer sums of values and squares."""
    est = s1 / n
    var = max(s2 / n - est * est, 0.0)
    se = math.sqrt(var / n)
    return Row(
        experiment=sub,
        r=r,
        T=T,
        n=n,
        estimate=est,
        stderr=se,
        ci_low=est - Z_95 * se,
        ci_high=est + Z_95 * se,
        target=target,
        target_source=source,
        z=_zscore(est, target, se),
    )


def _extreme_row(sub, r, T, value, n, target, source) -> Row:
    """Row for an observed extreme checked against a deterministic bound."""
    return Row(
        experiment=sub,
        r=r,
        T=T,
        n=n,
        estimate=value,
        stderr=None,
        ci_low=None,
        ci_high=None,
        target=target,
        target_source=source,
        z=None,
    )


def _failed_row(sub, r, T, n, reason: str) -> Row:
    return Row(
        experiment=sub,
        r=r,
        T=T,
        n=n,
        estimate=None,
        stderr=None,
        ci_low=None,
        ci_high=None,
        target=None,
        target_source=reason,
        z=None,
    )


def _event_target(r: float, c1: float):
    """(target, source) for the excursion-event probability at level r."""
    law = analytic.limit_law(r, c1)
    if law.value is None:
        return None, "empirical-only"
    return law.value, "limit-law"


def _hit_target(r: float, c1: float):
    """(target, source) for the primitive-hit probability of Triangle(r)."""
    law = analytic.limit_law(r, c1)
    if law.value is None:
        return None, "empirical-only"
    return 1.0 - law.value, "one-minus-limit-law"


def _iter_reduced(cfg: ExperimentConfig):
    """Stream Gauss-reduced basis stacks for the configured sample budget."""
    chunk = min(cfg.samples, DEFAULT_CHUNK)
    for batch in haar.iter_samples(
        cfg.seed, cfg.samples, chunk=chunk, workers=cfg.workers
    ):
        red, l1, l2 = backend.kernels.reduce_bases(batch.bases)
        yield red, l1, l2


def _run_hit_prob(cfg: ExperimentConfig, rows: list[Row]) -> int:
    ker = backend.kernels
    tally = {r: 0 for r in cfg.r_values}
    failed = set()
    for red, _, _ in _iter_reduced(cfg):
        for r in cfg.r_values:
            if r in failed:
                continue
            side = math.exp(-r)
            _, cprim, ok = ker.count_region(
                red, TAG_TRIANGLE, side, 0.0, 0.0, 0.0, ENUM_CAP
            )
            if not np.all(ok == 1):
                failed.add(r)
                continue
            tally[r] += int(np.count_nonzero(cprim > 0))
    for r in cfg.r_values:
        if r in failed:
            rows.append(_failed_row("hit-prob", r, None, cfg.samples, "resource-error"))
            continue
        target, source = _hit_target(r, cfg.c1)
        rows.append(
            _binomial_row("hit-prob", r, None, tally[r], cfg.samples, target, source)
        )
    return len(failed)


def _run_evl(cfg: ExperimentConfig, rows: list[Row]) -> int:
    failures = 0
    chunk = min(cfg.samples, DEFAULT_CHUNK)
    for T in cfg.T_values:
        try:
            law = flow.empirical_law(
                cfg.seed,
                cfg.samples,
                cfg.r_values,
                T,
                workers=cfg.workers,
                chunk=chunk,
            )
        except ResourceLimitError:
            for r in cfg.r_values:
                rows.append(_failed_row("evl", r, T, cfg.samples, "resource-error"))
                failures += 1
            continue
        for r, succ in zip(law.r_values, law.successes):
            target, source = _event_target(r, cfg.c1)
            rows.append(
                _binomial_row("evl", r, T, int(succ), cfg.samples, target, source)
            )
    return failures


def _run_moments(cfg: ExperimentConfig, rows: list[Row]) -> int:
    ker = backend.kernels
    acc = {r: [0, 0, 0, 0, 0] for r in cfg.r_values}  # s1, s2, s4, ones, twos
    failed = set()
    for red, _, _ in _iter_reduced(cfg):
        for r in cfg.r_values:
            if r in failed:
                continue
            side = math.exp(-r)
            _, cprim, ok = ker.count_region(
                red, TAG_TRIANGLE, side, 0.0, 0.0, 0.0, ENUM_CAP
            )
            if not np.all(ok == 1):
                failed.add(r)
                continue
            c2 = cprim * cprim
            a = acc[r]
            a[0] += int(np.sum(cprim))
            a[1] += int(np.sum(c2))
            a[2] += int(np.sum(c2 * c2))
            a[3] += int(np.count_nonzero(cprim == 1))
            a[4] += int(np.count_nonzero(cprim == 2))
    n = cfg.samples
    for r in cfg.r_values:
        if r in failed:
            for sub in (".first", ".second", ".exactly-one", ".exactly-two"):
                rows.append(_failed_row("moments" + sub, r, None, n, "resource-error"))
            continue
        s1, s2, s4, ones, twos = acc[r]
        dist = analytic.count_distribution(r)
        rows.append(
            _mean_row("moments.first", r, None, s1, s2, n, dist.first, "first-moment")
        )
        rows.append(
            _mean_row(
                "moments.second", r, None, s2, s4, n, dist.second, "second-moment"
            )
        )
        rows.append(
            _binomial_row(
                "moments.exactly-one", r, None, ones, n,
                dist.exactly_one, "count-distribution",
            )
        )
        rows.append(
            _binomial_row(
                "moments.exactly-two", r, None, twos, n,
                dist.exactly_two, "count-distribution",
            )
        )
    return len(failed)


def _run_tail(cfg: ExperimentConfig, rows: list[Row]) -> int:
    failures = 0
    chunk = min(cfg.samples, DEFAULT_CHUNK)
    n = cfg.samples
    for T in cfg.T_values:
        try:
            law = flow.empirical_law(
                cfg.seed, n, cfg.r_values, T, workers=cfg.workers, chunk=chunk
            )
        except ResourceLimitError:
            for r in cfg.r_values:
                for sub in ("tail.fraction", "tail.ratio"):
                    rows.append(_failed_row(sub, r, T, n, "resource-error"))
                failures += 1
            continue
        for r, succ in zip(law.r_values, law.successes):
            succ = int(succ)
            lower, _ = analytic.tail_bounds(r, cfg.c1)
            frac = _binomial_row(
                "tail.fraction", r, T, succ, n, lower, "tail-lower-bound"
            )
            rows.append(frac)
            scale = math.exp(-2.0 * r)
            rows.append(
                Row(
                    experiment="tail.ratio",
                    r=r,
                    T=T,
                    n=n,
                    estimate=frac.estimate * scale,
                    stderr=frac.stderr * scale,
                    ci_low=frac.ci_low * scale,
                    ci_high=frac.ci_high * scale,
                    target=None,
                    target_source="empirical-only",
                    z=None,
                )
            )
    return failures


def _run_siegel(cfg: ExperimentConfig, rows: list[Row]) -> int:
    ker = backend.kernels
    inner, outer = SIEGEL_ANNULUS
    region = regions.Annulus(inner, outer)
    s1a = s2a = s1p = s2p = 0
    for red, _, _ in _iter_reduced(cfg):
        call, cprim, ok = ker.count_region(
            red, TAG_ANNULUS, inner, outer, 0.0, 0.0, ENUM_CAP
        )
        if not np.all(ok == 1):
            for sub in ("siegel-check.full", "siegel-check.primitive"):
                rows.append(_failed_row(sub, None, None, cfg.samples, "resource-error"))
            return 1
        s1a += int(np.sum(call))
        s2a += int(np.sum(call * call))
        s1p += int(np.sum(cprim))
        s2p += int(np.sum(cprim * cprim))
    n = cfg.samples
    rows.append(
        _mean_row(
            "siegel-check.full", None, None, s1a, s2a, n,
            analytic.expected_count(region), "siegel-mean",
        )
    )
    rows.append(
        _mean_row(
            "siegel-check.primitive", None, None, s1p, s2p, n,
            analytic.expected_primitive_count(region), "siegel-mean-primitive",
        )
    )
    return 0


def _run_lemma_checks(cfg: ExperimentConfig, rows: list[Row]) -> int:
    ker = backend.kernels
    n = cfg.samples
    R = SHORT_VECTOR_RADIUS
    prod_max = 0.0
    per_r = {r: {"max": 0, "failed": False} for r in cfg.r_values}
    disk_hits = 0
    matches = 0
    disk_failed = False
    for red, l1, l2 in _iter_reduced(cfg):
        prod_max = max(prod_max, float(np.max(l1 * l2)))
        if not disk_failed:
            calld, cprimd, okd = ker.count_region(
                red, TAG_DISK, R, 0.0, 0.0, 0.0, ENUM_CAP
            )
            if not np.all(okd == 1):
                disk_failed = True
            else:
                disk_hits += int(np.count_nonzero(calld > 0))
                match = (calld > 0) == (cprimd > 0)
        for r in cfg.r_values:
            st = per_r[r]
            if st["failed"]:
                continue
            side = math.exp(-r)
            callt, cprimt, ok = ker.count_region(
                red, TAG_TRIANGLE, side, 0.0, 0.0, 0.0, ENUM_CAP
            )
            if not np.all(ok == 1):
                st["failed"] = True
                continue
            st["max"] = max(st["max"], int(np.max(cprimt)) if cprimt.size else 0)
            if r == cfg.r_values[0] and not disk_failed:
                both = match & ((callt > 0) == (cprimt > 0))
                matches += int(np.count_nonzero(both))
    failures = 0
    rows.append(
        _extreme_row(
            "lemma-checks.minkowski", None, None, prod_max, n,
            analytic.MINKOWSKI_PRODUCT_BOUND, "product-bound",
        )
    )
    for r in cfg.r_values:
        st = per_r[r]
        if st["failed"]:
            rows.append(_failed_row("lemma-checks.count-bound", r, None, n,
                                    "resource-error"))
            failures += 1
            continue
        side = math.exp(-r)
        bound = 2.0 if side < math.sqrt(2.0) else analytic.triangle_count_bound(r)
        rows.append(
            _extreme_row(
                "lemma-checks.count-bound", r, None, float(st["max"]), n,
                bound, "count-bound",
            )
        )
    if disk_failed:
        for sub in ("lemma-checks.hit-bound", "lemma-checks.hit-primitive-match"):
            rows.append(_failed_row(sub, None, None, n, "resource-error"))
        failures += 1
    else:
        rows.append(
            _binomial_row(
                "lemma-checks.hit-bound", None, None, disk_hits, n,
                analytic.short_vector_probability(R), "short-vector-probability",
            )
        )
        match_ok = not per_r[cfg.r_values[0]]["failed"]
        if match_ok:
            rows.append(
                _binomial_row(
                    "lemma-checks.hit-primitive-match", cfg.r_values[0], None,
                    matches, n, 1.0, "exact-identity",
                )
            )
        else:
            rows.append(_failed_row("lemma-checks.hit-primitive-match",
                                    cfg.r_values[0], None, n, "resource-error"))
            failures += 1
    return failures


def _run_ky(cfg: ExperimentConfig, rows: list[Row]) -> int:
    failures = 0
    grid = np.linspace(1.0, math.sqrt(2.0) - 1e-3, KY_GRID_POINTS)
    for s in grid:
        s = float(s)
        r = -math.log(s)
        try:
            est = analytic.second_moment_by_quadrature(s)
        except QuadratureError:
            rows.append(_failed_row("ky-integral", r, None, 0, "numerical-error"))
            failures += 1
            continue
        target = analytic.second_moment_closed(r)
        rows.append(
            Row(
                experiment="ky-integral",
                r=r,
                T=None,
                n=0,
                estimate=est,
                stderr=None,
                ci_low=None,
                ci_high=None,
                target=target,
                target_source="closed-form",
                z=None,
            )
        )
    return failures


_RUNNERS = {
    "hit-prob": _run_hit_prob,
    "evl": _run_evl,
    "moments": _run_moments,
    "tail": _run_tail,
    "siegel-check": _run_siegel,
    "lemma-checks": _run_lemma_checks,
    "ky-integral": _run_ky,
}


def run(config: ExperimentConfig) -> TrialReport:
    """Execute one experiment grid and return its report."""
    cfg = validate_config(config)
    t0 = time.monotonic()
    report = TrialReport(
        experiment=cfg.experiment,
        samples=cfg.samples,
        seed=cfg.seed,
        workers=cfg.workers,
    )
    report.failures = _RUNNERS[cfg.experiment](cfg, report.rows)
    report.wall_time = time.monotonic() - t0
    return report


_COLUMNS = [f.name for f in fields(Row)]


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def _report_payload(report: TrialReport) -> dict:
    return {
        "experiment": report.experiment,
        "metadata": {
            "samples": report.samples,
            "seed": report.seed,
            "workers": report.workers,
            "wall_time": report.wall_time,
            "version": report.version,
            "failures": report.failures,
        },
        "rows": [
            {col: getattr(row, col) for col in _COLUMNS} for row in report.rows
        ],
    }


def render(report: TrialReport, fmt: str = "csv") -> str:
    """Serialize a report; CSV output is deterministic byte for byte."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(_COLUMNS)
        for row in report.rows:
            writer.writerow([_csv_cell(getattr(row, col)) for col in _COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps(_report_payload(report), indent=2) + "\n"
    raise ValueError(f"format must be csv or json, got {fmt!r}")


def emit(report: TrialReport, path: str | None = None, fmt: str = "csv") -> None:
    """Write a report to a file path, or stdout when path is None or '-'."""
    text = render(report, fmt)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
