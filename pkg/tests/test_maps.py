import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bakerlab.errors import AnchorDivisionError, AnchorNotFixed, NumericOverflow
from bakerlab.maps import (REAL_AXIS, AffineDamped, Fatou, RayCurve, ScalarMultiple,
                           Scaled, damp, damping_schedule, derivative, evaluate,
                           pin_fixed_point, renormalize_at)

finite = st.floats(-20, 20)
points = st.builds(complex, st.floats(-5, 30), st.floats(-10, 10))


def composite_maps():
    f = Fatou(1)
    h = pin_fixed_point(f, REAL_AXIS, 10)
    return [
        f,
        Fatou(0.3 - 0.2j),
        Scaled(f, 0.5),
        Scaled(f, 0.9 + 0.1j),
        h,
        renormalize_at(h, 12),
        damp(h, 10, 0.01),
    ]


def test_eval_examples():
    assert evaluate(Fatou(1), 0) == 2
    assert abs(evaluate(Fatou(1), 1j * math.pi) - 1j * math.pi) < 1e-15
    assert evaluate(Scaled(Fatou(1), 0.5), 0) == 1


def test_derivative_examples():
    assert derivative(Fatou(1), 0) == 0
    assert abs(derivative(Fatou(1), 10) - 0.9999546) < 1e-7
    assert abs(derivative(Fatou(1), 1j * math.pi) - 2) < 1e-15


def test_overflow_signalled():
    with pytest.raises(NumericOverflow, match="numeric overflow"):
        Fatou(1)(-800)
    with pytest.raises(NumericOverflow):
        Fatou(1).deriv(-800)


@pytest.mark.parametrize("f", composite_maps(), ids=repr)
def test_derivative_matches_central_difference(f):
    for z in (0.3, 2 + 1j, 7 - 2j, 12 + 0.5j):
        for h in (1e-5, 1e-5j):
            fd = (f(z + h) - f(z - h)) / (2 * h)
            assert abs(fd - f.deriv(z)) < 1e-7 * (1 + abs(f.deriv(z)))


@pytest.mark.parametrize("f", composite_maps(), ids=repr)
def test_affine_form_agrees_with_call(f):
    c, a, b = f.affine_form()
    for z in (0, 1 + 1j, 5 - 3j, 20):
        assert abs(a * (z + cmath.exp(-z) + c) + b - f(z)) < 1e-12 * (1 + abs(f(z)))
    zs = np.array([0, 1 + 1j, 5 - 3j])
    assert np.allclose(f.eval_array(zs), [f(z) for z in zs], rtol=1e-14)


@pytest.mark.parametrize("f", composite_maps(), ids=repr)
def test_taylor_reproduces_nearby_values(f):
    z0, u = 4 + 1j, 0.05 - 0.02j
    coeffs = f.taylor(z0, 10)
    approx = sum(a * u ** k for k, a in enumerate(coeffs))
    assert abs(approx - f(z0 + u)) < 1e-13 * abs(f(z0 + u))
    assert abs(f.displacement(z0, u) - (f(z0 + u) - f(z0))) < 1e-13


@settings(max_examples=60, deadline=None)
@given(points)
def test_fatou_translation_identity(z):
    # f(z + 2 pi i) = f(z) + 2 pi i
    f = Fatou(1)
    assert abs(f(z + 2j * math.pi) - f(z) - 2j * math.pi) < 1e-9 * (1 + abs(f(z)))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 200))
def test_pinned_map_fixes_anchor(s):
    h = pin_fixed_point(Fatou(1), REAL_AXIS, s)
    assert abs(h(s) - s) < 1e-12 * (1 + s)


def test_pin_examples():
    h = pin_fixed_point(Fatou(1), REAL_AXIS, 10)
    assert isinstance(h, ScalarMultiple)
    assert abs(h.coeff - 10 / (math.exp(-10) + 11)) < 1e-15
    assert abs(h.coeff - 0.9090868) < 1e-6  # quoted value is rounded low
    assert abs(h(10) - 10) < 1e-12
    assert abs(h.deriv(10) - 0.9090455) < 1e-6
    h100 = pin_fixed_point(Fatou(1), REAL_AXIS, 100)
    assert abs(1 - h100.deriv(100)) <= 2 / 100


def test_pin_division_at_anchor():
    c = -(1 + math.exp(-1))
    with pytest.raises(AnchorDivisionError, match="division by zero at anchor"):
        pin_fixed_point(Fatou(c), REAL_AXIS, 1)
    with pytest.raises(ValueError):
        pin_fixed_point(Fatou(1), REAL_AXIS, 0)


def test_renormalize_examples():
    f = Fatou(1)
    unit = ScalarMultiple(f, 1)
    assert renormalize_at(unit, 10).coeff == pin_fixed_point(f, REAL_AXIS, 10).coeff
    h = pin_fixed_point(f, REAL_AXIS, 10)
    same = renormalize_at(h, 10)
    assert abs(same.coeff - h.coeff) < 1e-15
    g = renormalize_at(h, 12)
    assert abs(abs(g(12)) - 12) < 1e-12
    assert g.base == f  # nested multiples fold into one coefficient


def test_renormalize_division():
    c = -(1 + math.exp(-1))
    with pytest.raises(AnchorDivisionError):
        renormalize_at(Fatou(c), 1)


def test_damp_examples():
    h = pin_fixed_point(Fatou(1), REAL_AXIS, 10)
    g = damp(h, 10, 0.01)
    assert isinstance(g, AffineDamped)
    assert abs(g.deriv(10) - 0.99 * h.deriv(10)) < 1e-15
    assert abs(g(10) - 10) < 1e-12
    # this c makes the pinned multiplier at s exactly 1
    s = 6.0
    base = Fatou(-math.exp(-s) * (s + 1))
    par = pin_fixed_point(base, REAL_AXIS, s)
    assert abs(abs(par.deriv(s)) - 1) < 1e-12
    assert abs(abs(damp(par, s, 0.1).deriv(s)) - 0.9) < 1e-12


def test_damp_rejects_bad_input():
    h = pin_fixed_point(Fatou(1), REAL_AXIS, 10)
    for eps in (0, 1, -0.5, 1.5):
        with pytest.raises(ValueError):
            damp(h, 10, eps)
    with pytest.raises(AnchorNotFixed, match="anchor not fixed"):
        damp(h, 11, 0.1)


def test_damping_schedule():
    assert damping_schedule(10) == pytest.approx(0.01)
    assert damping_schedule(100) * 100 < damping_schedule(10) * 10


def test_ray_curve():
    g = RayCurve(1j, 2)
    assert g(3) == 2 + 3j
    with pytest.raises(ValueError):
        RayCurve(2)
    assert REAL_AXIS(5) == 5


def test_maps_hashable_and_frozen():
    f = Fatou(1)
    assert hash(f) == hash(Fatou(1))
    with pytest.raises(Exception):
        f.c = 2
