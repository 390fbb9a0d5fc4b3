"""Escape-time phase portraits written as binary PGM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .maps import EntireMap

CLASS_NAMES = {
    _kernels.BAKER: "baker-right-escape",
    _kernels.BOUNDED: "bounded/unknown",
    _kernels.GENERIC: "generic-escape",
}

RE_IN = 50.0
RE_OUT = -50.0
WINDOW = 10


@dataclass
class RenderResult:
    width: int
    height: int
    classes: np.ndarray  # (height, width) uint8, row 0 at the top
    iterations: np.ndarray
    max_iter: int

    def counts(self) -> dict:
        return {name: int((self.classes == code).sum())
                for code, name in CLASS_NAMES.items()}

    def summary(self) -> str:
        c = self.counts()
        return " ".join(f"{name}={c[name]}" for name in
                        ("baker-right-escape", "bounded/unknown", "generic-escape"))

    def intensities(self) -> np.ndarray:
        """0 for undecided pixels, otherwise brighter the earlier the decision."""
        k = self.iterations.astype(np.int64)
        val = 255 - (254 * k) // self.max_iter
        val = np.where(self.classes == _kernels.BOUNDED, 0, val)
        return val.astype(np.uint8)

    def to_pgm(self) -> bytes:
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        return header + self.intensities().tobytes(order="C")


def render(f: EntireMap, xmin, xmax, ymin, ymax, width, height,
           max_iter=200, radius=100.0) -> RenderResult:
    """Classify the centre of each pixel of the window.

    A pixel is ``baker-right-escape`` when its orbit passes ``Re > 50``
    with 10 consecutive increases of the real part, ``generic-escape`` when
    it leaves ``|z| <= radius`` elsewhere (or drops below ``Re = -50``),
    and ``bounded/unknown`` otherwise.
    """
    c, a, b = f.affine_form()
    classes, iters = _kernels.render_grid(
        float(xmin), float(xmax), float(ymin), float(ymax), int(width), int(height),
        complex(c), complex(a), complex(b), int(max_iter), float(radius),
        RE_IN, RE_OUT, WINDOW)
    return RenderResult(int(width), int(height), classes, iters, int(max_iter))


def read_pgm(data: bytes) -> np.ndarray:
    """Parse the binary PGM written by :meth:`RenderResult.to_pgm`."""
    magic, dims, maxval, raster = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError("not an 8-bit binary PGM")
    w, h = (int(x) for x in dims.split())
    return np.frombuffer(raster, dtype=np.uint8).reshape(h, w)
