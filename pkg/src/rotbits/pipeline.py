"""Transmitter and receiver chains for rotation-embedded extra bits.

Transmit: LDPC-encode the payload, map to symbols, rotate the whole frame by
the angle of the extra bits. Receive: grid search for the angle, resolve the
symmetry ambiguity by syndrome weight, derotate, soft-demap, SPA-decode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .estimator import CandidateSet, candidate_list, disambiguate
from .ldpc import DecodeResult, LdpcCode, encode, extract_info, sum_product_decode
from .modem import Constellation, map_bits, soft_demap
from .rotation import MAX_ELL, ExtraBits, RotationAngle, angle_of, bits_of_angle, derotate, rotate


@dataclass(frozen=True)
class TxConfig:
    code: LdpcCode
    cons: Constellation
    ell: int

    def __post_init__(self):
        if not 1 <= self.ell <= MAX_ELL:
            raise ValueError(f"ell must lie in 1..{MAX_ELL}")

    @property
    def k(self):
        return self.code.k

    @property
    def n_pad(self):
        """Zero bits appended so the codeword fills whole symbols."""
        return -self.code.n % self.cons.m

    @property
    def n_symbols(self):
        return (self.code.n + self.n_pad) // self.cons.m


@dataclass
class FrameResult:
    u_hat: np.ndarray
    v_hat: ExtraBits
    angle: RotationAngle
    spa_iterations: int
    converged: bool
    candidate_diagnostics: CandidateSet | None
    hard_bits: np.ndarray
    angle_correct: bool | None = None
    payload_bit_errors: int | None = None


def modulate(u, cfg):
    """Encode and map the payload without any rotation."""
    c = encode(cfg.code.encoder, np.asarray(u))
    if cfg.n_pad:
        c = np.concatenate([c, np.zeros(cfg.n_pad, dtype=c.dtype)])
    return map_bits(c, cfg.cons)


def encode_frame(u, v, cfg):
    """Transmitted frame: the modulated codeword rotated by r(v)."""
    if v.ell != cfg.ell:
        raise ValueError(f"expected {cfg.ell} extra bits, got {v.ell}")
    return rotate(modulate(u, cfg), angle_of(v))


def decode_payload(y_aligned, cfg, sigma2, max_iters=50):
    """Soft-demap an already derotated frame and run SPA.

    Returns ``(u_hat, DecodeResult)``.
    """
    llr = soft_demap(y_aligned, cfg.cons, sigma2)[: cfg.code.n]
    res: DecodeResult = sum_product_decode(llr, cfg.code.h, max_iters)
    return extract_info(cfg.code.encoder, res.hard_bits), res


def decode_frame(y, cfg, sigma2, max_iters=50, *, threshold_delta=None, force_angle=None, u=None, v=None):
    """Receiver chain.

    Parameters
    ----------
    y : array_like of complex
        Received frame of ``cfg.n_symbols`` samples.
    sigma2 : float
        Noise variance, assumed known at the receiver.
    threshold_delta : float, optional
        Also keep grid angles whose objective is within this margin of the best.
    force_angle : RotationAngle, optional
        Skip estimation and derotate by this angle (testing hook).
    u, v : optional
        Ground truth; when given, ``angle_correct`` and ``payload_bit_errors``
        are filled in.

    Returns
    -------
    FrameResult
    """
    y = np.asarray(y, dtype=np.complex128)
    if y.shape != (cfg.n_symbols,):
        raise ValueError(f"expected {cfg.n_symbols} samples, got shape {y.shape}")
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    if force_angle is None:
        cands = candidate_list(y, cfg.cons, cfg.ell, sigma2, threshold_delta=threshold_delta)
        theta, cands = disambiguate(y, cands, cfg.code.h, cfg.cons)
    else:
        theta, cands = force_angle, None
    v_hat = bits_of_angle(theta, cfg.ell)
    u_hat, res = decode_payload(derotate(y, theta), cfg, sigma2, max_iters)
    out = FrameResult(u_hat, v_hat, theta, res.iterations_used, res.converged, cands, res.hard_bits)
    if v is not None:
        out.angle_correct = v_hat == v
    if u is not None:
        out.payload_bit_errors = int(np.count_nonzero(u_hat != np.asarray(u)))
    return out
