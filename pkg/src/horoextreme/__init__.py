"""Extreme-value statistics of shear-flow excursions on random planar
lattices: exact sampling, exact orbit observables, closed-form laws, and a
Monte Carlo harness that cross-checks every formula.

The package splits into thin layers:

    haar       Haar-random unimodular lattice sampling
    lattice    basis validation, Gauss reduction, point enumeration
    regions    plane regions plus lattice hit/count tests
    flow       shear-flow window minima and excursion events
    analytic   closed-form limit laws, moments, and bounds
    harness    reproducible Monte Carlo experiments with CSV/JSON output
    backend    numba/numpy kernel selection (HOROEXTREME_BACKEND)
"""

from . import analytic, backend, flow, haar, harness, lattice, regions
from ._version import __version__
from .errors import QuadratureError, ResourceLimitError

__all__ = [
    "analytic",
    "backend",
    "flow",
    "haar",
    "harness",
    "lattice",
    "regions",
    "QuadratureError",
    "ResourceLimitError",
    "__version__",
]
