import math
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from bakerlab.errors import (InvalidBoundaryDistance, OracleInconclusive, OutsideDisc,
                             QueryOutsideDomain, SegmentExitsDomain)
from bakerlab.hyperbolic import (UNKNOWN, DiscOracle, HalfPlaneOracle, PredicateOracle,
                                 boundary_distance, density_band, disc_density,
                                 disc_distance, polyline_distance_bounds,
                                 segment_distance_bounds, segment_distance_upper)


@st.composite
def disc_points(draw, rmax=0.999):
    r = draw(st.floats(0, rmax))
    t = draw(st.floats(0, 2 * math.pi))
    return r * complex(math.cos(t), math.sin(t))


def mobius(a, z):
    return (z - a) / (1 - a.conjugate() * z)


def test_density_examples():
    assert disc_density(0) == 2
    assert disc_density(0.5) == pytest.approx(8 / 3, rel=1e-15)
    assert disc_density(0.5j) == pytest.approx(8 / 3, rel=1e-15)
    with pytest.raises(OutsideDisc, match="outside unit disc"):
        disc_density(1)


def test_distance_examples():
    assert disc_distance(0, 0) == 0
    assert disc_distance(0.3, 0.3) == 0
    assert disc_distance(0, 0.5) == pytest.approx(math.log(3), abs=1e-15)
    with pytest.raises(OutsideDisc):
        disc_distance(0, 1.2)
    with pytest.raises(OutsideDisc):
        disc_distance(1j, 0)


@pytest.mark.parametrize("x", [0.1, 0.5, 0.9, 0.99])
def test_distance_against_quadrature(x):
    ref, _ = quad(lambda t: 2 / (1 - t * t), 0, x, epsabs=1e-13, epsrel=1e-13)
    assert abs(disc_distance(0, x) - ref) < 1e-9


@settings(max_examples=100, deadline=None)
@given(disc_points(0.95), disc_points(0.95), disc_points(0.9))
def test_distance_is_mobius_invariant(z, w, a):
    d = disc_distance(z, w)
    assert disc_distance(mobius(a, z), mobius(a, w)) == pytest.approx(d, rel=1e-7, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(disc_points(0.95), disc_points(0.95), disc_points(0.95))
def test_distance_is_a_metric(z, w, v):
    assert disc_distance(z, w) == pytest.approx(disc_distance(w, z), rel=1e-9, abs=1e-12)
    assert disc_distance(z, w) <= disc_distance(z, v) + disc_distance(v, w) + 1e-9


@settings(max_examples=200, deadline=None)
@given(disc_points(), disc_points())
def test_density_ratio_controlled_by_distance(z, w):
    d = disc_distance(z, w)
    assert abs(math.log(disc_density(z) / disc_density(w))) <= 2 * d + 1e-12


@settings(max_examples=200, deadline=None)
@given(disc_points(), disc_points())
def test_euclidean_displacement_controlled_by_distance(z, w):
    d = disc_distance(z, w)
    assert abs(z - w) <= 2 * d * math.exp(2 * d) * (1 - abs(z)) + 1e-12


@settings(max_examples=200, deadline=None)
@given(disc_points())
def test_disc_density_in_boundary_band(z):
    assert disc_density(z) in density_band(1 - abs(z))


def test_density_band_examples():
    b = density_band(1)
    assert (b.lower, b.upper) == (0.5, 2)
    assert disc_density(0) in b
    b = density_band(0.5)
    assert (b.lower, b.upper) == (1, 4)
    for bad in (0, -1):
        with pytest.raises(InvalidBoundaryDistance, match="invalid boundary distance"):
            density_band(bad)


def test_boundary_distance_examples():
    tol = 1e-6
    assert boundary_distance(DiscOracle(), 0, rays=64, tol=tol) == pytest.approx(1, abs=2 * tol)
    # nearest boundary point sits on ray 0 here, so only tol matters
    assert boundary_distance(DiscOracle(), 0.5, rays=64, tol=tol) == pytest.approx(0.5, abs=2 * tol)
    assert boundary_distance(HalfPlaneOracle(), 3, rays=64, tol=tol) == pytest.approx(3, abs=2 * tol)


def test_boundary_distance_off_axis_angular_error():
    # true distance 0.5; nearest direction is between rays
    z = 0.5 * np.exp(1j * math.pi / 64)
    est = boundary_distance(DiscOracle(), z, rays=64, tol=1e-8)
    assert 0.5 - 1e-8 <= est <= 0.5 + 0.5 * (math.pi / 64) ** 2 + 1e-6


def test_boundary_distance_errors():
    with pytest.raises(QueryOutsideDomain, match="query outside domain"):
        boundary_distance(DiscOracle(), 2)
    unknown = PredicateOracle(lambda z: UNKNOWN)
    with pytest.raises(OracleInconclusive, match="oracle inconclusive"):
        boundary_distance(unknown, 0)
    with pytest.raises(ValueError):
        boundary_distance(DiscOracle(), 0, rays=4)
    with pytest.raises(ValueError):
        boundary_distance(DiscOracle(), 0, tol=0)


def test_more_rays_never_increase_estimate(rng):
    for z in 0.8 * (rng.random(10) + 1j * rng.random(10) - 0.5 - 0.5j):
        coarse = boundary_distance(DiscOracle(), z, rays=16, tol=1e-9)
        fine = boundary_distance(DiscOracle(), z, rays=64, tol=1e-9)
        assert fine <= coarse + 2e-9
        assert fine >= 1 - abs(z) - 2e-9


def test_nested_domains_are_monotone(rng):
    big, small = DiscOracle(radius=2), DiscOracle(radius=1)
    for z in 0.7 * (rng.random(10) + 1j * rng.random(10) - 0.5 - 0.5j):
        assert boundary_distance(small, z, tol=1e-8) <= boundary_distance(big, z, tol=1e-8) + 2e-8


def test_unbounded_rays_capped():
    # strip |Im z| < 1: horizontal rays never leave
    strip = PredicateOracle(lambda z: 1 if abs(z.imag) < 1 else -1)
    assert boundary_distance(strip, 0, rays=16, tol=1e-8) == pytest.approx(1, abs=1e-7)
    everything = PredicateOracle(lambda z: 1)
    assert boundary_distance(everything, 0, max_radius=7.0) == 7.0


def test_cache_is_used_and_thread_safe():
    calls = []

    def pred(z):
        calls.append(z)
        return 1 if abs(z) < 1 else -1

    oracle = PredicateOracle(pred)
    first = boundary_distance(oracle, 0.2)
    n = len(calls)
    assert boundary_distance(oracle, 0.2) == first
    assert len(calls) == n

    results = []
    pts = [0.1 * k for k in range(8)]

    def worker():
        results.append([boundary_distance(oracle, p) for p in pts])

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == results[0] for r in results)
    oracle.clear_cache()
    boundary_distance(oracle, 0.2)
    assert len(calls) > n


def test_segment_examples():
    hp = HalfPlaneOracle()
    assert segment_distance_bounds(hp, 1, 1) == (0.0, 0.0)
    lo, up = segment_distance_bounds(hp, 1, 2, steps=256, rays=64, rel_tol=1e-7)
    assert up == pytest.approx(2 * math.log(2), rel=1e-4)
    assert lo == pytest.approx(0.5 * math.log(2), rel=1e-4)
    up_disc = segment_distance_upper(DiscOracle(), 0, 0.5, steps=256, rays=64, rel_tol=1e-7)
    assert up_disc >= math.log(3)
    assert up_disc == pytest.approx(2 * math.log(2), rel=1e-4)


def test_segment_exit_and_polyline():
    # slit disc: the positive real axis from 0.2 is removed
    def slit_disc(z):
        on_slit = z.real >= 0.2 and abs(z.imag) < 1e-3
        return 1 if abs(z) < 1 and not on_slit else -1

    slit = PredicateOracle(slit_disc)
    with pytest.raises(SegmentExitsDomain, match="segment exits domain"):
        segment_distance_bounds(slit, 0.5 + 0.3j, 0.5 - 0.3j, steps=16, rays=16)
    lo, up = polyline_distance_bounds(slit, [0.5 + 0.3j, 0.1 + 0.3j, 0.1 - 0.3j, 0.5 - 0.3j],
                                      steps=16, rays=16)
    assert 0 < lo < up
