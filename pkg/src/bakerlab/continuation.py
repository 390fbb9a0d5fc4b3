"""Fixed-point continuation along parameter paths and multiplier diagnostics."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Optional

from .dynamics import CLASS_TOL, FixedPointRecord, find_fixed_point
from .errors import (BranchLost, FoldSuspected, IdentityCheckInfeasible,
                     NoFixedPoint, DegenerateNewtonStep, NumericOverflow,
                     UndefinedStatistic)
from .maps import EntireMap, Fatou, Scaled

HOROCYCLIC = "horocyclic-evidence"
TANGENTIAL = "tangential-evidence"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ParamFamily:
    """``builder(param) -> EntireMap`` with an optional closed-form partial.

    ``param_partial(param, z)`` returns the derivative of ``f_param(z)`` with
    respect to the parameter.
    """

    builder: Callable[[complex], EntireMap]
    param_partial: Optional[Callable[[complex, complex], complex]] = None
    label: str = ""
    guess: Optional[Callable[[complex], complex]] = None

    def __call__(self, param) -> EntireMap:
        return self.builder(param)

    def partial(self, param, z, h=None) -> complex:
        if self.param_partial is not None:
            return self.param_partial(param, z)
        if h is None:
            h = 1e-6 * (1 + abs(param))
        return (self(param + h)(z) - self(param - h)(z)) / (2 * h)


def fatou_family() -> ParamFamily:
    """``lam -> z + exp(-z) + lam``; fixed points ``-log(lam) - i*pi``."""
    return ParamFamily(Fatou, lambda lam, z: 1.0, "fatou",
                       lambda lam: -math.log(lam) - 1j * math.pi)


def scaled_family(c=1.0) -> ParamFamily:
    """``alpha -> alpha * (z + exp(-z) + c)``."""
    base = Fatou(c)
    return ParamFamily(lambda a: Scaled(base, a), lambda a, z: base(z), "scaled",
                       lambda a: a / (1 - a))


def constant_family(f: EntireMap) -> ParamFamily:
    return ParamFamily(lambda _: f, lambda lam, z: 0.0, "constant")


FAMILIES = {"fatou": fatou_family, "scaled": scaled_family}


@dataclass
class PathTrace:
    params: list = field(default_factory=list)
    locations: list = field(default_factory=list)
    multipliers: list = field(default_factory=list)
    horocyclic_stats: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    escaped_at: Optional[int] = None

    def __len__(self):
        return len(self.params)

    def append(self, param, rec: FixedPointRecord):
        self.params.append(param)
        self.locations.append(rec.location)
        self.multipliers.append(rec.multiplier)
        try:
            stat = horocyclic_statistic(rec.multiplier)
        except UndefinedStatistic:
            stat = math.inf
        self.horocyclic_stats.append(stat)
        self.residuals.append(rec.residual)


def horocyclic_statistic(rho) -> float:
    """``Re(1/(1 - rho))``; grows without bound iff rho -> 1 inside every horodisc."""
    if rho == 1:
        raise UndefinedStatistic()
    return (1 / (1 - complex(rho))).real


def _solve(f, guess, tol):
    try:
        return find_fixed_point(f, guess, tol=tol)
    except (NoFixedPoint, DegenerateNewtonStep, NumericOverflow):
        return None


def track_fixed_point(family: ParamFamily, grid, guess, R: float = 100.0,
                      tol: float = 1e-12, refine_levels: int = 3,
                      refine_factor: int = 4) -> PathTrace:
    """Follow a fixed point across ``grid`` by predictor-corrector steps.

    The predictor is the previous location, then the secant through the
    last two. Tracking stops after the first location with ``|z| > R``,
    whose index is stored in ``escaped_at``.
    """
    grid = list(grid)
    trace = PathTrace()
    prev = []  # (param, location) of the last two accepted points
    for p in grid:
        if not prev:
            pred = complex(guess)
        elif len(prev) == 1:
            pred = prev[-1][1]
        else:
            (p0, z0), (p1, z1) = prev
            pred = z1 + (z1 - z0) * (p - p1) / (p1 - p0)
        rec = _solve(family(p), pred, tol)
        if rec is None and prev:
            rec = _solve(family(p), prev[-1][1], tol)
        if rec is None:
            raise BranchLost(trace)
        if abs(rec.multiplier - 1) <= CLASS_TOL:
            rec = _refine(family, prev, p, tol, refine_levels, refine_factor)
            if rec is None:
                raise FoldSuspected(trace)
        trace.append(p, rec)
        prev = (prev + [(p, rec.location)])[-2:]
        if abs(rec.location) > R:
            trace.escaped_at = len(trace) - 1
            break
    return trace


def _refine(family, prev, p, tol, levels, factor):
    """Re-approach ``p`` on finer sub-grids; None if the multiplier stays at 1."""
    if not prev:
        return None
    p_start, z = prev[-1]
    for level in range(1, levels + 1):
        k = factor ** level
        zk, rec = z, None
        for j in range(1, k + 1):
            q = p_start + (p - p_start) * j / k
            rec = _solve(family(q), zk, tol)
            if rec is None:
                break
            zk = rec.location
        if rec is not None and abs(rec.multiplier - 1) > CLASS_TOL:
            return rec
    return None


def _increasing(xs):
    return all(b > a for a, b in zip(xs[:-1], xs[1:]))


def _decreasing(xs):
    return all(b < a for a, b in zip(xs[:-1], xs[1:]))


def _nonincreasing(xs):
    return all(b <= a for a, b in zip(xs[:-1], xs[1:]))


def is_horocyclic(trace: PathTrace, threshold: float) -> str:
    """Classify how the multipliers of ``trace`` approach 1.

    Horocyclic when the last quarter of the statistic is strictly
    increasing with median above ``threshold``; tangential when
    ``|rho|`` closes in on 1 while the statistic stays at or below
    ``threshold``.
    """
    if len(trace) == 0:
        raise ValueError("empty trace")
    q = max(2, len(trace) // 4)
    stats = trace.horocyclic_stats[-q:]
    rhos = trace.multipliers[-q:]
    if len(stats) < 2:
        return INCONCLUSIVE
    if _increasing(stats) and statistics.median(stats) > threshold:
        return HOROCYCLIC
    gaps = [abs(1 - abs(r)) for r in rhos]
    dist = [abs(1 - r) for r in rhos]
    if (gaps[-1] < 0.1 and _nonincreasing(gaps) and _decreasing(dist)
            and max(stats) <= threshold):
        return TANGENTIAL
    return INCONCLUSIVE


def multiplier_identity_residual(family: ParamFamily, lam, fp: FixedPointRecord,
                                 h: Optional[float] = None, tol: float = 1e-12) -> float:
    """Relative mismatch between both sides of ``dz/dlam = f_lam'(z)/(1 - rho)``.

    The left side is a central difference of the re-solved fixed point at
    ``lam +- h``; the right side uses the family's parameter partial.
    """
    if h is None:
        h = 1e-5 * (1 + abs(lam))
    if not h > 0:
        raise ValueError("h must be positive")
    if not abs(fp.multiplier - 1) > 10 * h:
        raise ValueError("multiplier too close to 1 for this step")
    hi = _solve(family(lam + h), fp.location, tol)
    lo = _solve(family(lam - h), fp.location, tol)
    if hi is None or lo is None:
        raise IdentityCheckInfeasible()
    lhs = (hi.location - lo.location) / (2 * h)
    rhs = family.partial(lam, fp.location) / (1 - fp.multiplier)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


def bounded_partial_check(family: ParamFamily, sample_z, sample_lam) -> float:
    """Largest ``|d f_lam(z) / d lam|`` over the sample grid."""
    sample_z, sample_lam = list(sample_z), list(sample_lam)
    if not sample_z or not sample_lam:
        raise ValueError("samples must be nonempty")
    return max(abs(family.partial(lam, z)) for lam in sample_lam for z in sample_z)


__all__ = [
    "FAMILIES", "HOROCYCLIC", "INCONCLUSIVE", "TANGENTIAL", "ParamFamily",
    "PathTrace", "bounded_partial_check", "constant_family", "fatou_family",
    "horocyclic_statistic", "is_horocyclic", "multiplier_identity_residual",
    "scaled_family", "track_fixed_point",
]
