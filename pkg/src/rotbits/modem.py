"""Labeled 2-D constellations with hard and soft (LLR) demapping.

Point ``i`` of a constellation carries the label whose MSB-first integer
value is ``i``; within a group of ``m`` codeword bits the first bit is the
most significant label bit.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .ldpc import LLR_CLAMP

SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Constellation:
    name: str
    points: np.ndarray
    m: int
    symmetry_order: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        if pts.size != 2**self.m:
            raise ValueError(f"{self.name}: need {2**self.m} points, got {pts.size}")
        if np.min(np.abs(pts[:, None] - pts[None, :]) + np.eye(pts.size)) == 0:
            raise ValueError(f"{self.name}: points are not distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def size(self):
        return self.points.size

    @property
    def labels(self):
        """Label bits of every point, shape ``(2**m, m)``, MSB first."""
        idx = np.arange(self.size)
        return ((idx[:, None] >> np.arange(self.m - 1, -1, -1)) & 1).astype(np.uint8)

    def average_energy(self):
        return float(np.mean(np.abs(self.points) ** 2))

    def to_csv(self):
        """Dump as CSV rows ``index,label,real,imag``."""
        buf = io.StringIO()
        buf.write("index,label,real,imag\n")
        for i, (p, lab) in enumerate(zip(self.points, self.labels)):
            buf.write(f"{i},{''.join(map(str, lab))},{float(p.real)!r},{float(p.imag)!r}\n")
        return buf.getvalue()


def _qpsk():
    # natural labeling counterclockwise from the first quadrant; the antipode
    # of every point differs in the first label bit only
    pts = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / SQRT2
    return Constellation("qpsk", pts, 2, 4)


def _qpsk_gray():
    # 00 -> (+,+), 01 -> (+,-), 10 -> (-,+), 11 -> (-,-)
    pts = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / SQRT2
    return Constellation("qpsk-gray", pts, 2, 4)


_GRAY_LEVELS = {0b00: -3.0, 0b01: -1.0, 0b11: 1.0, 0b10: 3.0}


def _qam16():
    pts = np.empty(16, dtype=np.complex128)
    for i in range(16):
        pts[i] = _GRAY_LEVELS[i >> 2] + 1j * _GRAY_LEVELS[i & 3]
    return Constellation("16qam", pts / np.sqrt(10.0), 4, 4)


_KINDS = {"qpsk": _qpsk, "qpsk-gray": _qpsk_gray, "16qam": _qam16}


def make_constellation(kind):
    """Build a named unit-energy constellation.

    ``"qpsk"`` uses natural (non-Gray) labeling so that a half-turn is
    detectable by parity checks of even row weight; ``"qpsk-gray"`` is the
    Gray-labeled variant; ``"16qam"`` uses an independent Gray map per axis
    (first two label bits on I, last two on Q).
    """
    try:
        return _KINDS[kind.lower()]()
    except KeyError:
        raise ValueError(f"unknown constellation {kind!r}; choose from {sorted(_KINDS)}") from None


def map_bits(c, cons):
    """Map a bit sequence to symbols, ``m`` bits per symbol."""
    c = np.asarray(c, dtype=np.int64)
    if c.ndim != 1 or c.size % cons.m:
        raise ValueError(f"bit count {c.size} is not a multiple of m={cons.m}")
    groups = c.reshape(-1, cons.m)
    idx = groups @ (1 << np.arange(cons.m - 1, -1, -1))
    return cons.points[idx]


def _sq_dist(y, cons):
    y = np.asarray(y, dtype=np.complex128)
    d = y[:, None] - cons.points[None, :]
    return d.real**2 + d.imag**2


def hard_demap(y, cons):
    """Nearest-point decision; ties go to the lowest point index."""
    idx = np.argmin(_sq_dist(y, cons), axis=1)
    return cons.labels[idx].reshape(-1)


def soft_demap(y, cons, sigma2):
    """Exact per-bit LLRs (log-sum-exp), positive meaning bit 0, clamped to +/-30."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    metric = -_sq_dist(y, cons) / sigma2
    labels = cons.labels
    llr = np.empty((metric.shape[0], cons.m))
    for k in range(cons.m):
        zero = labels[:, k] == 0
        llr[:, k] = logsumexp(metric[:, zero], axis=1) - logsumexp(metric[:, ~zero], axis=1)
    return np.clip(llr.reshape(-1), -LLR_CLAMP, LLR_CLAMP)
