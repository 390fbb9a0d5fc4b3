"""Compiled orbit kernels.

All kernels take a map in affine form ``(c, a, b)``, i.e.
``f(z) = a*(z + exp(-z) + c) + b``.
"""

import warnings

import numpy as np
from numba import njit, prange

# an outdated system TBB only disables that layer; numba falls back on its own
warnings.filterwarnings("ignore", message="The TBB threading layer", module="numba")

INSIDE = 1
OUTSIDE = -1
UNKNOWN = 0

# pixel classes
BOUNDED = 0
BAKER = 1
GENERIC = 2

_LIMIT = 1e300


@njit(cache=True)
def step(z, c, a, b):
    return a * (z + np.exp(-z) + c) + b


@njit(cache=True)
def _bad(z):
    return not (np.isfinite(z.real) and np.isfinite(z.imag)) or abs(z) > _LIMIT


@njit(cache=True)
def right_escape(z, c, a, b, budget, re_in, re_out, window):
    """Membership of ``z`` in the right-escaping domain.

    Inside once ``Re z > re_in`` after ``window`` consecutive increases of
    the real part; outside once ``Re z < re_out``, on overflow, or if the
    budget runs out while the real part is not increasing; unknown when the
    budget runs out on a still-increasing orbit. Returns (verdict, steps).
    """
    run = 0
    prev = z.real
    for k in range(1, budget + 1):
        z = step(z, c, a, b)
        if _bad(z):
            return OUTSIDE, k
        x = z.real
        if x > prev:
            run += 1
        else:
            run = 0
        prev = x
        if x > re_in and run >= window:
            return INSIDE, k
        if x < re_out:
            return OUTSIDE, k
    if run >= window:
        return UNKNOWN, budget
    return OUTSIDE, budget


@njit(cache=True)
def escapes(z, c, a, b, budget, radius):
    """Inside iff the orbit leaves the disc of ``radius`` within ``budget``."""
    if abs(z) > radius:
        return INSIDE, 0
    for k in range(1, budget + 1):
        z = step(z, c, a, b)
        if _bad(z) or abs(z) > radius:
            return INSIDE, k
    return OUTSIDE, budget


@njit(cache=True)
def right_escape_many(zs, c, a, b, budget, re_in, re_out, window):
    out = np.empty(zs.shape[0], dtype=np.int8)
    for i in range(zs.shape[0]):
        out[i] = right_escape(zs[i], c, a, b, budget, re_in, re_out, window)[0]
    return out


@njit(cache=True)
def escapes_many(zs, c, a, b, budget, radius):
    out = np.empty(zs.shape[0], dtype=np.int8)
    for i in range(zs.shape[0]):
        out[i] = escapes(zs[i], c, a, b, budget, radius)[0]
    return out


@njit(cache=True)
def classify_pixel(z, c, a, b, budget, radius, re_in, re_out, window):
    """Pixel class and the iteration at which it was decided."""
    run = 0
    prev = z.real
    for k in range(1, budget + 1):
        z = step(z, c, a, b)
        if _bad(z):
            return GENERIC, k
        x = z.real
        if x > prev:
            run += 1
        else:
            run = 0
        prev = x
        if x > re_in and run >= window:
            return BAKER, k
        if x < re_out or (abs(z) > radius and x <= re_in):
            return GENERIC, k
    return BOUNDED, budget


@njit(cache=True, parallel=True)
def render_grid(xmin, xmax, ymin, ymax, width, height, c, a, b,
                budget, radius, re_in, re_out, window):
    classes = np.empty((height, width), dtype=np.uint8)
    iters = np.empty((height, width), dtype=np.int32)
    dx = (xmax - xmin) / width
    dy = (ymax - ymin) / height
    for row in prange(height):
        # row 0 is the top edge
        y = ymax - (row + 0.5) * dy
        for col in range(width):
            x = xmin + (col + 0.5) * dx
            cls, k = classify_pixel(complex(x, y), c, a, b, budget, radius,
                                    re_in, re_out, window)
            classes[row, col] = cls
            iters[row, col] = k
    return classes, iters
