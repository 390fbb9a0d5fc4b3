"""Hyperbolic density and distance estimates.

The disc carries the curvature -1 metric ``2|dz| / (1 - |z|^2)``. For a
general simply connected domain the density is only bracketed through the
Euclidean boundary distance, within a factor 4 either way, and that distance is itself estimated
by shooting rays through a membership oracle.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .errors import (InvalidBoundaryDistance, OracleInconclusive, OutsideDisc,
                     QueryOutsideDomain, SegmentExitsDomain)

INSIDE = 1
OUTSIDE = -1
UNKNOWN = 0


def disc_density(z) -> float:
    r2 = abs(z) ** 2
    if r2 >= 1:
        raise OutsideDisc()
    return 2.0 / (1.0 - r2)


def disc_distance(z, w) -> float:
    """Hyperbolic distance in the unit disc (density ``2/(1-|z|^2)``)."""
    z, w = complex(z), complex(w)
    if abs(z) >= 1 or abs(w) >= 1:
        raise OutsideDisc()
    pseudo = abs(z - w) / abs(1 - w.conjugate() * z)
    return 2.0 * math.atanh(min(pseudo, 1.0))


@dataclass(frozen=True)
class DensityBand:
    lower: float
    upper: float

    def __post_init__(self):
        if not 0 < self.lower <= self.upper:
            raise ValueError("need 0 < lower <= upper")

    def __contains__(self, rho):
        return self.lower <= rho <= self.upper


def density_band(delta: float) -> DensityBand:
    """Bracket for the density of a simply connected domain.

    ``delta`` is the Euclidean distance to the boundary.
    """
    if not delta > 0:
        raise InvalidBoundaryDistance()
    return DensityBand(1.0 / (2.0 * delta), 2.0 / delta)


class DomainOracle:
    """Membership predicate plus a boundary-distance cache.

    Subclasses implement :meth:`classify_many`; verdicts are ``INSIDE``,
    ``OUTSIDE`` or ``UNKNOWN``. The cache is guarded by a lock so one
    oracle can be shared between threads.
    """

    def __init__(self, use_cache=True):
        self.use_cache = use_cache
        self._cache = {}
        self._lock = threading.Lock()

    def classify_many(self, zs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def classify(self, z) -> int:
        return int(self.classify_many(np.array([complex(z)]))[0])

    def cached(self, key):
        if not self.use_cache:
            return None
        return self._cache.get(key)

    def store(self, key, value):
        if self.use_cache:
            with self._lock:
                self._cache.setdefault(key, value)

    def clear_cache(self):
        with self._lock:
            self._cache.clear()


class DiscOracle(DomainOracle):
    def __init__(self, center=0j, radius=1.0, **kw):
        super().__init__(**kw)
        self.center = complex(center)
        self.radius = float(radius)

    def classify_many(self, zs):
        inside = np.abs(np.asarray(zs) - self.center) < self.radius
        return np.where(inside, INSIDE, OUTSIDE).astype(np.int8)


class HalfPlaneOracle(DomainOracle):
    """The half-plane ``Re z > edge``."""

    def __init__(self, edge=0.0, **kw):
        super().__init__(**kw)
        self.edge = float(edge)

    def classify_many(self, zs):
        inside = np.asarray(zs).real > self.edge
        return np.where(inside, INSIDE, OUTSIDE).astype(np.int8)


class PredicateOracle(DomainOracle):
    """Wrap a scalar predicate returning one of the three verdicts."""

    def __init__(self, predicate, **kw):
        super().__init__(**kw)
        self.predicate = predicate

    def classify_many(self, zs):
        return np.array([self.predicate(complex(z)) for z in zs], dtype=np.int8)


def boundary_distance(oracle: DomainOracle, z, rays: int = 64, tol: float = 1e-6,
                      max_radius: float | None = None, growth: float = 1.1) -> float:
    """Estimate the Euclidean distance from ``z`` to the domain boundary.

    Along each of ``rays`` equally spaced directions the oracle is sampled
    on a geometric radius grid (ratio ``growth``, starting at ``tol``) until
    the first non-inside sample, and that bracket is bisected down to
    ``tol``. Unknown verdicts count as outside. The result is the minimum
    over rays; rays that never leave within ``max_radius`` (default
    ``4*(1+|z|)``) contribute ``max_radius``. Exit regions thinner than the
    radial grid spacing can be missed.
    """
    if rays < 8:
        raise ValueError("need at least 8 rays")
    if not tol > 0:
        raise ValueError("tol must be positive")
    z = complex(z)
    if max_radius is None:
        max_radius = 4.0 * (1.0 + abs(z))
    key = (z, rays, tol, max_radius, growth)
    hit = oracle.cached(key)
    if hit is not None:
        return hit

    verdict = oracle.classify(z)
    if verdict == OUTSIDE:
        raise QueryOutsideDomain()
    if verdict == UNKNOWN:
        raise OracleInconclusive()

    dirs = np.exp(2j * np.pi * np.arange(rays) / rays)
    n_r = int(math.ceil(math.log(max_radius / tol) / math.log(growth))) + 1
    radii = np.minimum(tol * growth ** np.arange(n_r), max_radius)

    pts = z + np.outer(dirs, radii)
    out = oracle.classify_many(pts.ravel()).reshape(pts.shape) != INSIDE
    exited = out.any(axis=1)
    first = np.argmax(out, axis=1)

    hi = np.where(exited, radii[first], max_radius)
    lo = np.where(exited & (first > 0), radii[np.maximum(first - 1, 0)], 0.0)
    lo = np.where(exited, lo, max_radius)
    open_ = exited.copy()
    while open_.any() and np.max(hi[open_] - lo[open_]) > tol:
        mid = 0.5 * (lo + hi)
        probe = oracle.classify_many(z + mid[open_] * dirs[open_]) == INSIDE
        lo_o, hi_o = lo[open_], hi[open_]
        lo_o = np.where(probe, mid[open_], lo_o)
        hi_o = np.where(probe, hi_o, mid[open_])
        lo[open_], hi[open_] = lo_o, hi_o
        open_ = open_ & (hi - lo > tol)
    est = np.where(exited, 0.5 * (lo + hi), max_radius)
    result = float(est.min())
    oracle.store(key, result)
    return result


def _trapezoid(values, length):
    v = np.asarray(values, dtype=float)
    h = length / (len(v) - 1)
    return float(h * (v.sum() - 0.5 * (v[0] + v[-1])))


def _segment_deltas(oracle, z, w, steps, rays, rel_tol):
    z, w = complex(z), complex(w)
    pts = [z + (w - z) * j / steps for j in range(1, steps)]
    pts = [z, *pts, w]
    deltas = []
    for p in pts:
        try:
            deltas.append(boundary_distance(oracle, p, rays=rays,
                                            tol=rel_tol * (1 + abs(p))))
        except (QueryOutsideDomain, OracleInconclusive):
            raise SegmentExitsDomain() from None
    return np.array(deltas)


def segment_distance_bounds(oracle: DomainOracle, z, w, steps: int = 64,
                            rays: int = 32, rel_tol: float = 1e-4) -> tuple[float, float]:
    """Density-band quadratures of the segment ``[z, w]``.

    Returns ``(lower_proxy, upper)`` where ``upper`` integrates ``2/delta``
    and is a genuine upper bound for the hyperbolic distance, while
    ``lower_proxy`` integrates ``1/(2*delta)`` along the same straight
    segment. Boundary distances are resolved to ``rel_tol*(1+|p|)``.
    """
    z, w = complex(z), complex(w)
    if z == w:
        return 0.0, 0.0
    if steps < 1:
        raise ValueError("steps must be positive")
    deltas = _segment_deltas(oracle, z, w, steps, rays, rel_tol)
    length = abs(w - z)
    return _trapezoid(0.5 / deltas, length), _trapezoid(2.0 / deltas, length)


def segment_distance_upper(oracle: DomainOracle, z, w, steps: int = 64,
                           rays: int = 32, rel_tol: float = 1e-4) -> float:
    """Upper bound for the hyperbolic distance between ``z`` and ``w``."""
    return segment_distance_bounds(oracle, z, w, steps, rays, rel_tol)[1]


def polyline_distance_bounds(oracle, points, steps=64, rays=32, rel_tol=1e-4):
    """Sum of :func:`segment_distance_bounds` over consecutive vertices."""
    lo = up = 0.0
    for p, q in zip(points[:-1], points[1:]):
        a, b = segment_distance_bounds(oracle, p, q, steps, rays, rel_tol)
        lo += a
        up += b
    return lo, up


__all__ = [
    "INSIDE", "OUTSIDE", "UNKNOWN", "DensityBand", "DomainOracle", "DiscOracle",
    "HalfPlaneOracle", "PredicateOracle", "boundary_distance", "density_band",
    "disc_density", "disc_distance", "polyline_distance_bounds",
    "segment_distance_bounds", "segment_distance_upper",
]
