"""baker-lab: attracting fixed points escaping to infinity and doubly
parabolic Baker domains, explored numerically on Fatou's function."""

from .maps import (REAL_AXIS, AffineDamped, EntireMap, Fatou, RayCurve,
                   ScalarMultiple, Scaled, damp, derivative, evaluate,
                   pin_fixed_point, renormalize_at)

__version__ = "0.1.0"

__all__ = [
    "REAL_AXIS", "AffineDamped", "EntireMap", "Fatou", "RayCurve", "ScalarMultiple",
    "Scaled", "damp", "derivative", "evaluate", "pin_fixed_point", "renormalize_at",
]
