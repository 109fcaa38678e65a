"""Periodic square grid with precomputed wavevectors and dealias mask.

Spectral coefficients follow the Fourier-series convention

    f(x) = sum_m c_m exp(i k_m . x),     k_m = (2 pi / L) * m,

with integer frequencies m laid out as in ``numpy.fft.fftfreq``. Under this
convention ``sin(x)`` on an L = 2 pi grid has coefficients -i/2 at m = (1, 0)
and +i/2 at m = (-1, 0). See CONVENTIONS.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Grid:
    """n x n periodic grid on [0, L)^2.

    n must be even and at least 8; the two-thirds dealias mask keeps
    integer frequencies with |m1|, |m2| <= n/3.
    """

    n: int
    length: float = TWO_PI

    def __post_init__(self):
        if self.n % 2 != 0 or self.n < 8:
            raise ConfigError(f"grid n must be even and >= 8, got {self.n}")
        if not (self.length > 0.0):
            raise ConfigError(f"grid length must be positive, got {self.length}")

    @property
    def h(self) -> float:
        return self.length / self.n

    @cached_property
    def freq(self) -> np.ndarray:
        """Integer frequencies m along one axis, fftfreq layout."""
        return (np.fft.fftfreq(self.n) * self.n).astype(np.int64)

    @cached_property
    def m1(self) -> np.ndarray:
        m1, _ = np.meshgrid(self.freq, self.freq, indexing="ij")
        m1.setflags(write=False)
        return m1

    @cached_property
    def m2(self) -> np.ndarray:
        _, m2 = np.meshgrid(self.freq, self.freq, indexing="ij")
        m2.setflags(write=False)
        return m2

    @cached_property
    def k1(self) -> np.ndarray:
        k = (TWO_PI / self.length) * self.m1
        k.setflags(write=False)
        return k

    @cached_property
    def k2(self) -> np.ndarray:
        k = (TWO_PI / self.length) * self.m2
        k.setflags(write=False)
        return k

    @cached_property
    def ksq(self) -> np.ndarray:
        k = self.k1 * self.k1 + self.k2 * self.k2
        k.setflags(write=False)
        return k

    @cached_property
    def inv_ksq(self) -> np.ndarray:
        """1/|k|^2 with the zero mode mapped to 0."""
        out = np.zeros_like(self.ksq)
        np.divide(1.0, self.ksq, out=out, where=self.ksq > 0)
        out.setflags(write=False)
        return out

    @cached_property
    def kmag(self) -> np.ndarray:
        k = np.sqrt(self.ksq)
        k.setflags(write=False)
        return k

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        cut = self.n / 3.0
        mask = (np.abs(self.m1) <= cut) & (np.abs(self.m2) <= cut)
        mask.setflags(write=False)
        return mask

    @property
    def dealias_cutoff(self) -> int:
        """Largest retained integer frequency per axis."""
        return int(self.n // 3)

    @cached_property
    def x(self) -> np.ndarray:
        xs = np.arange(self.n) * self.h
        x, _ = np.meshgrid(xs, xs, indexing="ij")
        x.setflags(write=False)
        return x

    @cached_property
    def y(self) -> np.ndarray:
        xs = np.arange(self.n) * self.h
        _, y = np.meshgrid(xs, xs, indexing="ij")
        y.setflags(write=False)
        return y

    # Nyquist column is its own conjugate partner; odd-derivative multipliers
    # zero it to keep outputs real-symmetric.
    @cached_property
    def deriv_k1(self) -> np.ndarray:
        k = self.k1.copy()
        k[np.abs(self.m1) == self.n // 2] = 0.0
        k.setflags(write=False)
        return k

    @cached_property
    def deriv_k2(self) -> np.ndarray:
        k = self.k2.copy()
        k[np.abs(self.m2) == self.n // 2] = 0.0
        k.setflags(write=False)
        return k
