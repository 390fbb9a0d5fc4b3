"""Property battery behind ``baker-lab verify``.

Each check returns a :class:`Check` with the measured quantity and the
limit it was held to. Sampling is driven by one seeded generator so a
report is reproducible from its recorded seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .continuation import (bounded_partial_check, fatou_family,
                           horocyclic_statistic, multiplier_identity_residual,
                           track_fixed_point)
from .dynamics import (KoenigsCoordinate, derivative_along_curve,
                       distance_to_polyline, find_fixed_point, invariant_curve)
from .hyperbolic import disc_density, disc_distance
from .maps import REAL_AXIS, Fatou, Scaled, pin_fixed_point

S_GRID = (5, 10, 20, 50, 100)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    limit: float
    note: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        extra = f"  {self.note}" if self.note else ""
        return f"{flag} {self.name}: measured={self.measured:.6g} limit={self.limit:.6g}{extra}"


def disc_samples(rng, n, rmax=0.999):
    r = rmax * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


def check_density_ratio(rng, n):
    zs, ws = disc_samples(rng, n), disc_samples(rng, n)
    worst = -math.inf
    for z, w in zip(zs, ws):
        d = disc_distance(z, w)
        log_ratio = math.log(disc_density(z) / disc_density(w))
        worst = max(worst, abs(log_ratio) - 2 * d)
    return Check("density_ratio", worst <= 1e-12, worst, 1e-12, "max |log ratio| - 2d")


def check_distance_bound(rng, n):
    zs, ws = disc_samples(rng, n), disc_samples(rng, n)
    worst = -math.inf
    for z, w in zip(zs, ws):
        d = disc_distance(z, w)
        bound = 2 * d * math.exp(2 * d) * (1 - abs(z))
        worst = max(worst, abs(z - w) - bound)
    return Check("distance_bound", worst <= 1e-12, worst, 1e-12, "max |z-w| - bound")


def check_density_band(rng, n):
    vals = [disc_density(z) * (1 - abs(z)) for z in disc_samples(rng, n)]
    lo, hi = min(vals), max(vals)
    ok = 0.5 <= lo and hi <= 2.0
    return Check("density_band", ok, hi, 2.0, f"range=[{lo:.6g}, {hi:.6g}]")


def check_disc_quadrature(tol):
    exact = disc_distance(0, 0.5)
    ref, _ = quad(lambda x: 2 / (1 - x * x), 0, 0.5, epsabs=1e-13, epsrel=1e-13)
    err = abs(exact - ref)
    return Check("disc_distance_quadrature", err <= tol, err, tol)


def koenigs_samples(rng, n):
    return 3 + 12 * rng.random(n) + 1j * (6 * rng.random(n) - 3)


def check_koenigs(rng, n, tol):
    f = Scaled(Fatou(1), 0.9)
    fp = find_fixed_point(f, 9)
    phi = KoenigsCoordinate(f, fp)
    worst = max(abs(phi(f(z)) - fp.multiplier * phi(z)) for z in koenigs_samples(rng, n))
    return Check("koenigs_relation", worst < tol, worst, tol)


def check_invariant_curve(tol):
    h = pin_fixed_point(Fatou(1), REAL_AXIS, 20)
    fp = find_fixed_point(h, 20)
    curve = invariant_curve(h, fp, 2.0)
    worst = max(distance_to_polyline(h(z), curve) for z in curve)
    return Check("invariant_curve", worst < tol, worst, tol)


def check_identity(tol, tol_small):
    fam = fatou_family()
    out = []
    for lam in (0.1, 0.05, 0.01):
        limit = tol_small if lam < 0.05 else tol
        fp = find_fixed_point(fam(lam), fam.guess(lam))
        r = multiplier_identity_residual(fam, lam, fp)
        out.append(Check(f"multiplier_identity[lam={lam}]", r < limit, r, limit))
    return out


def check_escape_witness(tol):
    fam = fatou_family()
    grid = list(np.linspace(0.5, 0.01, 50))
    trace = track_fixed_point(fam, grid, fam.guess(grid[0]))
    err = max(max(abs(z.real + math.log(p)), abs(abs(r - 1) - p))
              for p, z, r in zip(trace.params, trace.locations, trace.multipliers))
    bound = bounded_partial_check(fam, trace.locations, trace.params)
    ok = err <= tol and bound == 1.0
    return Check("escape_witness", ok, err, tol, f"max partial={bound:g}")


def check_derivative_limit(tol):
    out = []
    f = Fatou(1)
    for s, v in zip((1, 5, 10, 20), derivative_along_curve(f, REAL_AXIS, (1, 5, 10, 20))):
        gap = abs(1 - v)
        excess = gap - math.exp(-s)
        out.append(Check(f"derivative_limit[s={s}]", excess <= tol, gap, math.exp(-s) + tol))
    return out


def check_perturbation(tol):
    out = []
    for s in S_GRID:
        h = pin_fixed_point(Fatou(1), REAL_AXIS, s)
        res = abs(h(s) - s)
        rho = h.deriv(s)
        stat = horocyclic_statistic(rho)
        ok = (res < tol and abs(rho) < 1 and abs(1 - abs(rho)) <= 2 / s and stat >= s / 2)
        note = f"|rho|={abs(rho):.10g} stat={stat:.6g}"
        out.append(Check(f"perturbation[s={s}]", ok, res, tol, note))
    return out


def run_battery(cfg) -> list[Check]:
    rng = np.random.default_rng(cfg.seed)
    checks = [
        check_density_ratio(rng, cfg.samples),
        check_distance_bound(rng, cfg.samples),
        check_density_band(rng, cfg.samples),
        check_disc_quadrature(cfg.tol_quadrature),
        check_koenigs(rng, 100, cfg.tol_koenigs),
        check_invariant_curve(cfg.tol_curve),
        *check_identity(cfg.tol_identity, cfg.tol_identity_small),
        check_escape_witness(cfg.tol_multiplier),
        *check_derivative_limit(cfg.tol_derivative),
        *check_perturbation(cfg.tol_fixed),
    ]
    return checks


__all__ = ["Check", "run_battery", "disc_samples", "koenigs_samples"]
