"""Extra bits <-> rotation angle on the uniform grid 2*pi*d / 2**ell."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
GRID_TOL = 1e-6
MAX_ELL = 16


@dataclass(frozen=True)
class ExtraBits:
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not 1 <= len(bits) <= MAX_ELL:
            raise ValueError(f"extra bit count must be in 1..{MAX_ELL}, got {len(bits)}")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("extra bits must be 0/1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def from_int(cls, d, ell):
        if not 0 <= d < 2**ell:
            raise ValueError(f"value {d} does not fit in {ell} bits")
        return cls(tuple((d >> (ell - 1 - i)) & 1 for i in range(ell)))

    @property
    def ell(self):
        return len(self.bits)

    @property
    def value(self):
        """MSB-first integer value d(v)."""
        d = 0
        for b in self.bits:
            d = (d << 1) | b
        return d

    def __str__(self):
        return "".join(map(str, self.bits))


@dataclass(frozen=True)
class RotationAngle:
    radians: float
    grid_index: int | None = None

    def __post_init__(self):
        r = float(self.radians) % TWO_PI
        if r >= TWO_PI:  # x % 2pi can round up to 2pi for tiny negative x
            r = 0.0
        object.__setattr__(self, "radians", r)

    @classmethod
    def on_grid(cls, k, ell):
        n = 2**ell
        k %= n
        return cls(TWO_PI * k / n, k)


def angle_of(v):
    """Rotation angle r(v) = 2*pi*d(v) / 2**ell."""
    return RotationAngle.on_grid(v.value, v.ell)


def bits_of_angle(theta, ell):
    """Invert :func:`angle_of`.

    Raises
    ------
    ValueError
        If ``theta`` is farther than 1e-6 rad from every grid angle.
    """
    rad = theta.radians if isinstance(theta, RotationAngle) else float(theta) % TWO_PI
    n = 2**ell
    k = int(np.rint(rad * n / TWO_PI))
    if abs(rad - TWO_PI * k / n) > GRID_TOL:
        raise ValueError(f"angle {rad!r} is not on the {n}-point grid")
    return ExtraBits.from_int(k % n, ell)


def rotate(x, theta):
    """Multiply every sample by exp(j*theta)."""
    rad = theta.radians if isinstance(theta, RotationAngle) else float(theta)
    return np.asarray(x, dtype=np.complex128) * np.exp(1j * rad)


def derotate(y, theta):
    rad = theta.radians if isinstance(theta, RotationAngle) else float(theta)
    return rotate(y, -rad)
