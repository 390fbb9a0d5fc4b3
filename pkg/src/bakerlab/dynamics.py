"""Orbits, fixed points, linearizing coordinates and Baker-domain diagnostics."""

from __future__ import annotations

import cmath
import math
import statistics
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from . import _kernels
from .errors import (CurveTracingStalled, DegenerateNewtonStep, NoFixedPoint,
                     NoSecondaryFixedPoint, NotACycle, NotLinearizable,
                     NumericOverflow, OracleInconclusive, QueryOutsideDomain,
                     SegmentExitsDomain)
from .hyperbolic import (INSIDE, OUTSIDE, UNKNOWN, DomainOracle,
                         polyline_distance_bounds, segment_distance_bounds)
from .maps import (EntireMap, RayCurve, damp, damping_schedule, pin_fixed_point,
                   renormalize_at)

CLASS_TOL = 1e-9

ATTRACTING = "attracting"
REPELLING = "repelling"
INDIFFERENT = "indifferent"

DOUBLY_PARABOLIC = "doubly-parabolic-evidence"
NOT_DOUBLY_PARABOLIC = "not-doubly-parabolic-evidence"
INCONCLUSIVE = "inconclusive"


def stability(multiplier, class_tol=CLASS_TOL) -> str:
    m = abs(multiplier)
    if m < 1 - class_tol:
        return ATTRACTING
    if m > 1 + class_tol:
        return REPELLING
    return INDIFFERENT


@dataclass(frozen=True)
class FixedPointRecord:
    location: complex
    multiplier: complex
    stability: str
    residual: float
    iterations: int = 0

    @classmethod
    def at(cls, f: EntireMap, z, iterations=0):
        """Record for a point already known to be fixed."""
        z = complex(z)
        rho = f.deriv(z)
        return cls(z, rho, stability(rho), abs(f(z) - z), iterations)


@dataclass
class OrbitTrace:
    """Orbit ``z0, f(z0), ...``.

    ``escape_index`` points at the first entry with modulus above the escape
    radius. If evaluation overflowed, ``overflowed`` is set and the orbit
    stops at the last representable point.
    """

    points: list
    escaped: bool = False
    escape_index: int | None = None
    overflowed: bool = False


def iterate(f: EntireMap, z0, n: int, R: float = math.inf) -> OrbitTrace:
    if n < 1 or not R > 0:
        raise ValueError("need n >= 1 and R > 0")
    z = complex(z0)
    trace = OrbitTrace([z])
    if abs(z) > R:
        trace.escaped, trace.escape_index = True, 0
        return trace
    for _ in range(n):
        try:
            z = f(z)
        except NumericOverflow:
            trace.escaped = trace.overflowed = True
            return trace
        trace.points.append(z)
        if abs(z) > R:
            trace.escaped, trace.escape_index = True, len(trace.points) - 1
            break
    return trace


STEP_GUARD = 1e-3


def find_fixed_point(f: EntireMap, guess, tol: float = 1e-12,
                     max_iter: int = 100) -> FixedPointRecord:
    """Damped Newton iteration on ``f(z) - z``.

    Converged when ``|f(z) - z| <= tol*(1+|z|)`` and the pending Newton
    step is below ``1e-3*(1+|z|)``; the second test rejects points that
    only look fixed because ``f(z) - z`` decays, as when drifting towards
    an attracting direction at infinity. One extra polishing step is taken
    when it lowers the residual further.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    z = complex(guess)
    try:
        F = f(z) - z
    except NumericOverflow:
        raise NoFixedPoint() from None
    degenerate = 0
    for it in range(max_iter + 1):
        res = abs(F)
        d = f.deriv(z) - 1
        if res <= tol * (1 + abs(z)) and (d == 0 or abs(F / d) <= STEP_GUARD * (1 + abs(z))):
            z, F = _polish(f, z, F)
            return FixedPointRecord.at(f, z, iterations=it)
        if it == max_iter:
            break
        if abs(d) < 1e-14:
            degenerate += 1
            if degenerate > 3:
                raise DegenerateNewtonStep()
            z += 1e-7 * (1 + abs(z)) * cmath.exp(1j * degenerate)
            F = f(z) - z
            continue
        step = F / d
        lam = 1.0
        for _ in range(21):
            zn = z - lam * step
            try:
                Fn = f(zn) - zn
            except NumericOverflow:
                Fn = None
            if Fn is not None and abs(Fn) < res:
                break
            lam *= 0.5
        else:
            raise NoFixedPoint()
        z, F = zn, Fn
    raise NoFixedPoint()


def _polish(f, z, F):
    try:
        zn = z - F / (f.deriv(z) - 1)
        Fn = f(zn) - zn
    except (ZeroDivisionError, NumericOverflow):
        return z, F
    if abs(Fn) <= abs(F):
        return zn, Fn
    return z, F


def cycle_multiplier(f: EntireMap, orbit, tol: float = 1e-9) -> complex:
    pts = [complex(z) for z in orbit]
    if not pts:
        raise ValueError("empty cycle")
    p = len(pts)
    for i, z in enumerate(pts):
        nxt = pts[(i + 1) % p]
        if abs(f(z) - nxt) > tol * (1 + abs(nxt)):
            raise NotACycle()
    rho = 1 + 0j
    for z in pts:
        rho *= f.deriv(z)
    return rho


# -- linearizing coordinates ----------------------------------------------

N_START = 50
N_CAP = 6400
KOENIGS_RTOL = 1e-8


def _series_coefficients(taylor, order):
    """Coefficients of the local linearizer ``u + b2 u^2 + ...``.

    ``taylor`` holds ``f(z*), f'(z*), f''(z*)/2, ...``. Solves
    ``Phi(g(u)) = rho * Phi(u)`` order by order.
    """
    g = np.zeros(order + 1, dtype=complex)
    g[1:] = taylor[1:order + 1]
    rho = g[1]
    powers = [None, g]
    for _ in range(2, order + 1):
        powers.append(np.convolve(powers[-1], g)[:order + 1])
    b = np.zeros(order + 1, dtype=complex)
    b[1] = 1
    for n in range(2, order + 1):
        acc = sum(b[j] * powers[j][n] for j in range(1, n))
        b[n] = acc / (rho - rho ** n)
    return b


class KoenigsCoordinate:
    """Linearizer ``phi`` of an attracting fixed point, ``phi(f(z)) = rho*phi(z)``.

    ``phi(z)`` is ``rho**-N * Phi(u_N)`` where ``u_N = f^N(z) - z*`` is
    iterated in displacement form (no cancellation against ``z*``) and
    ``Phi`` is the degree-``order`` local series of the linearizer. With
    ``order=1`` this is the plain ``rho**-N * (f^N(z) - z*)`` estimate.
    """

    def __init__(self, f: EntireMap, fp: FixedPointRecord, order: int = 8):
        rho = complex(fp.multiplier)
        if not 0 < abs(rho) < 1:
            raise ValueError("Koenigs requires attracting non-super fixed point")
        self.f = f
        self.center = complex(fp.location)
        self.rho = rho
        self.order = order
        self.coeffs = _series_coefficients(f.taylor(self.center, order), order)
        self._dcoeffs = self.coeffs[1:] * np.arange(1, order + 1)
        self._bound = 1e6 * (1 + abs(self.center))
        self._near = 1e-3 * (1 + abs(self.center))

    def _orbit(self, z, n, with_deriv):
        u = complex(z) - self.center
        dprod = 1 + 0j
        k = 0
        try:
            while k < n and abs(u) >= 1e-200:
                if with_deriv:
                    dprod *= self.f.deriv(self.center + u) / self.rho
                u = self.f.displacement(self.center, u)
                k += 1
                if abs(u) > self._bound:
                    raise NotLinearizable()
        except NumericOverflow:
            raise NotLinearizable() from None
        return u, k, dprod

    def _series(self, u):
        return np.polyval(self.coeffs[::-1], u)

    def evaluate(self, z, N: int) -> tuple[complex, float]:
        """``(phi_N(z), |u_N|)`` for a fixed iteration count."""
        u, k, _ = self._orbit(z, N, False)
        return complex(self._series(u) * self.rho ** (-k)), abs(u)

    def value_and_derivative(self, z, N: int) -> tuple[complex, complex]:
        u, k, dprod = self._orbit(z, N, True)
        val = self._series(u) * self.rho ** (-k)
        dval = np.polyval(self._dcoeffs[::-1], u) * dprod
        return complex(val), complex(dval)

    def adaptive(self, z) -> tuple[complex, int]:
        """Double N from 50 until successive values agree to 1e-8 relative."""
        N = N_START
        prev, _ = self.evaluate(z, N)
        while N < N_CAP:
            N *= 2
            cur, u = self.evaluate(z, N)
            if u <= self._near and abs(cur - prev) <= KOENIGS_RTOL * abs(cur):
                return cur, N
            prev = cur
        raise NotLinearizable()

    def __call__(self, z, N: int | None = None) -> complex:
        if N is None:
            return self.adaptive(z)[0]
        val, u = self.evaluate(z, N)
        if u > self._near:
            raise NotLinearizable()
        return val


def koenigs(f: EntireMap, fp: FixedPointRecord, z, N: int | None = None) -> complex:
    """Linearizing coordinate of ``z``; ``N=None`` selects N adaptively."""
    return KoenigsCoordinate(f, fp)(z, N)


def _newton_phi(phi, N, z, target, scale):
    for _ in range(40):
        try:
            v, dv = phi.value_and_derivative(z, N)
        except NotLinearizable:
            return None
        r = v - target
        if abs(r) <= 1e-12 * scale:
            return z
        if dv == 0:
            return None
        z = z - r / dv
    return None


def invariant_curve(f: EntireMap, fp: FixedPointRecord, seed, samples: int = 64,
                    s_min: float = 1e-8) -> list:
    """Points on ``phi^-1`` of the segment from ``phi(seed)`` to 0.

    The segment is sampled geometrically from the seed end down to
    ``s_min``; the fixed point itself closes the curve. Each point is found
    by Newton from its neighbour, subdividing the step when Newton fails.
    """
    if samples < 16:
        raise ValueError("need at least 16 samples")
    phi = KoenigsCoordinate(f, fp)
    seed = complex(seed)
    target0, N = phi.adaptive(seed)
    if target0 == 0:
        raise ValueError("seed is the fixed point")
    scale = 1 + abs(target0)
    grid = np.geomspace(1.0, s_min, samples - 1)
    curve = [seed]
    z = seed
    for s_prev, s in zip(grid[:-1], grid[1:]):
        z = _continue_curve(phi, N, z, s_prev * target0, s * target0, scale, 0)
        if z is None:
            raise CurveTracingStalled(curve)
        curve.append(z)
    curve.append(complex(fp.location))
    return curve


def _continue_curve(phi, N, z, t_from, t_to, scale, depth):
    hit = _newton_phi(phi, N, z, t_to, scale)
    if hit is not None or depth >= 10:
        return hit
    mid = 0.5 * (t_from + t_to)
    zm = _continue_curve(phi, N, z, t_from, mid, scale, depth + 1)
    if zm is None:
        return None
    return _continue_curve(phi, N, zm, mid, t_to, scale, depth + 1)


def distance_to_polyline(p, polyline) -> float:
    p = complex(p)
    best = math.inf
    for a, b in zip(polyline[:-1], polyline[1:]):
        d = b - a
        if d == 0:
            best = min(best, abs(p - a))
            continue
        t = ((p - a) * d.conjugate()).real / abs(d) ** 2
        t = min(1.0, max(0.0, t))
        best = min(best, abs(p - (a + t * d)))
    return best


# -- membership oracles for dynamically defined domains --------------------

class RightEscapeOracle(DomainOracle):
    """Domain of points whose orbit runs off to the right.

    Inside once the orbit reaches ``Re > re_in`` with its real part
    increasing over the last ``window`` steps; outside when the real part
    drops below ``re_out`` or the orbit stalls or oscillates through the
    whole budget.
    """

    def __init__(self, f: EntireMap, budget=200, re_in=50.0, re_out=-50.0,
                 window=10, **kw):
        super().__init__(**kw)
        self.f = f
        self.params = f.affine_form()
        self.budget, self.re_in, self.re_out, self.window = budget, re_in, re_out, window

    def classify_many(self, zs):
        zs = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
        c, a, b = self.params
        return _kernels.right_escape_many(zs, c, a, b, self.budget, self.re_in,
                                          self.re_out, self.window)


class EscapeOracle(DomainOracle):
    """Basin of infinity: inside iff the orbit leaves ``|z| <= radius``."""

    def __init__(self, f: EntireMap, radius=1e6, budget=200, **kw):
        super().__init__(**kw)
        self.f = f
        self.params = f.affine_form()
        self.radius, self.budget = radius, budget

    def classify_many(self, zs):
        zs = np.ascontiguousarray(zs, dtype=np.complex128).ravel()
        c, a, b = self.params
        return _kernels.escapes_many(zs, c, a, b, self.budget, self.radius)


# -- Baker-domain classifier -----------------------------------------------

@dataclass
class StepDistanceSequence:
    """Per-step bounds on the hyperbolic distance between consecutive iterates.

    Entries are ``None`` where no bound could be computed.
    """

    upper: list
    lower: list
    verdict: str
    orbit: list = field(default_factory=list)

    def tail_median(self):
        vals = [u for u in self.upper[-_quarter(len(self.upper)):] if u is not None]
        return statistics.median(vals) if vals else math.nan


def _quarter(m):
    return max(1, m // 4)


DP_TAIL_MAX = 0.2
DP_DECREASE = 2.0
NDP_LOWER_MIN = 0.05


def classify_steps(upper, lower) -> str:
    """Verdict from step bounds; thresholds are diagnostic, not proofs."""
    if not upper or any(u is None for u in upper):
        return INCONCLUSIVE
    q = _quarter(len(upper))
    head, tail = upper[:q], upper[-q:]
    if max(tail) < DP_TAIL_MAX and statistics.median(tail) * DP_DECREASE <= statistics.median(head):
        return DOUBLY_PARABOLIC
    if min(lower[-q:]) > NDP_LOWER_MIN:
        return NOT_DOUBLY_PARABOLIC
    return INCONCLUSIVE


def _detour_bounds(oracle, z, w, steps, rays, rel_tol):
    mid = 0.5 * (z + w)
    normal = 1j * (w - z)
    for t in (0.5, -0.5, 1.0, -1.0):
        try:
            return polyline_distance_bounds(oracle, [z, mid + t * normal, w],
                                            steps, rays, rel_tol)
        except SegmentExitsDomain:
            continue
    return None


def step_distance_sequence(f: EntireMap, z0, oracle: DomainOracle, n: int,
                           steps: int = 16, rays: int = 16,
                           rel_tol: float = 1e-3) -> StepDistanceSequence:
    """Bound ``d_U(f^{k+1}(z0), f^k(z0))`` for ``k < n`` and classify.

    A fixed point can never lie in a Baker domain, so a (numerically)
    fixed ``z0`` is rejected as outside before the oracle is consulted.
    """
    if n < 10:
        raise ValueError("need n >= 10")
    z0 = complex(z0)
    if abs(f(z0) - z0) <= 1e-12 * (1 + abs(z0)):
        raise QueryOutsideDomain()
    verdict = oracle.classify(z0)
    if verdict == OUTSIDE:
        raise QueryOutsideDomain()
    if verdict == UNKNOWN:
        raise OracleInconclusive()
    orbit = iterate(f, z0, n).points
    upper, lower = [], []
    for z, w in zip(orbit[:-1], orbit[1:]):
        try:
            lo, up = segment_distance_bounds(oracle, z, w, steps, rays, rel_tol)
        except SegmentExitsDomain:
            got = _detour_bounds(oracle, z, w, steps, rays, rel_tol)
            lo, up = got if got is not None else (None, None)
        upper.append(up)
        lower.append(lo)
    return StepDistanceSequence(upper, lower, classify_steps(upper, lower), orbit)


# -- behaviour along an invariant curve -------------------------------------

def derivative_along_curve(f: EntireMap, gamma: RayCurve, s_values) -> list:
    return [abs(f.deriv(gamma(s))) for s in s_values]


class Stabilized(NamedTuple):
    map: EntireMap
    record: FixedPointRecord
    branch: str  # "direct", "secondary" or "damped"


def _secondary_parameter(h, gamma, s, span=1e4, samples=2000):
    """Smallest ``x > s`` where ``|h(gamma(x))|`` falls through ``|gamma(x)|``."""

    def gap(x):
        w = gamma(x)
        return abs(h(w)) - abs(w)

    xs = s * np.geomspace(1 + 1e-6, span, samples)
    prev_x, prev_g = None, None
    for x in xs:
        try:
            g = gap(x)
        except NumericOverflow:
            break
        if prev_g is not None and prev_g > 0 and g < 0:
            return bisect(gap, prev_x, x, xtol=1e-15 * x, maxiter=200)
        prev_x, prev_g = x, g
    raise NoSecondaryFixedPoint()


def stabilize_along_curve(base: EntireMap, gamma: RayCurve, s: float) -> Stabilized:
    """Pin ``gamma(s)`` as a fixed point and make sure it attracts.

    An attracting anchor is returned directly. A repelling anchor is
    replaced by the first ``x > s`` with ``|h(gamma(x))| = |gamma(x)|``,
    renormalized to be fixed there. If the resulting point (or the anchor
    itself) is indifferent it is damped with ``eps = s**-2``.
    """
    h = pin_fixed_point(base, gamma, s)
    w = gamma(s)
    rec = FixedPointRecord.at(h, w)
    if rec.stability == ATTRACTING:
        return Stabilized(h, rec, "direct")
    if rec.stability == REPELLING:
        x = _secondary_parameter(h, gamma, s)
        w = gamma(x)
        h = renormalize_at(h, w)
        rec = FixedPointRecord.at(h, w)
        if rec.stability == ATTRACTING:
            return Stabilized(h, rec, "secondary")
        if rec.stability == REPELLING:
            raise NoSecondaryFixedPoint("secondary fixed point is repelling")
    damped = damp(h, w, damping_schedule(s))
    return Stabilized(damped, FixedPointRecord.at(damped, w), "damped")


__all__ = [
    "ATTRACTING", "CLASS_TOL", "DOUBLY_PARABOLIC", "INCONCLUSIVE", "INDIFFERENT",
    "INSIDE", "NOT_DOUBLY_PARABOLIC", "REPELLING", "EscapeOracle",
    "FixedPointRecord", "KoenigsCoordinate", "OrbitTrace", "RightEscapeOracle",
    "StepDistanceSequence", "Stabilized", "classify_steps", "cycle_multiplier",
    "derivative_along_curve", "distance_to_polyline", "find_fixed_point",
    "invariant_curve", "iterate", "koenigs", "stability", "stabilize_along_curve",
    "step_distance_sequence",
]
