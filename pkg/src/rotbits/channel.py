"""Complex AWGN channel and SNR conventions (unit symbol energy)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONVENTIONS = ("ebn0", "esn0")


@dataclass(frozen=True)
class NoiseSpec:
    """Total complex noise variance ``sigma2`` (each real dimension gets half)."""

    sigma2: float
    snr_db: float | None = None
    convention: str | None = None

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")


def sigma_from_snr(snr_db, rate, m, convention="ebn0"):
    """Noise variance for a given SNR with Es = 1.

    ``esn0``: sigma2 = 10**(-snr/10). ``ebn0``: sigma2 = 1 / (rate*m*10**(snr/10)),
    with ``rate`` counting payload bits only.
    """
    convention = convention.lower()
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown SNR convention {convention!r}")
    if not 0 < rate <= 1:
        raise ValueError("rate must lie in (0, 1]")
    if m < 1:
        raise ValueError("m must be at least 1")
    lin = 10.0 ** (snr_db / 10.0)
    sigma2 = 1.0 / lin if convention == "esn0" else 1.0 / (rate * m * lin)
    return NoiseSpec(sigma2, snr_db, convention)


def frame_rng(seed, *key):
    """Independent generator for a (master seed, key...) tuple, e.g. (seed, point, frame)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


def complex_noise(n, sigma2, rng):
    scale = np.sqrt(sigma2 / 2.0)
    w = rng.standard_normal((2, n))
    return scale * (w[0] + 1j * w[1])


def awgn(x, spec, rng):
    """Return ``x + w`` with w ~ CN(0, sigma2)."""
    x = np.asarray(x, dtype=np.complex128)
    sigma2 = spec.sigma2 if isinstance(spec, NoiseSpec) else float(spec)
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    return x + complex_noise(x.size, sigma2, rng)
