"""Monte Carlo harness: extra-bit FER / payload BER sweeps and syndrome-weight
histograms.

Every frame draws its payload, extra bits and noise from its own generator
seeded by ``(seed, point index, frame index)``, and per-point results are
reduced in frame order. Output is therefore identical for any worker count.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from functools import lru_cache

import numpy as np

from .channel import awgn, frame_rng, sigma_from_snr
from .estimator import symmetry_coset
from .ldpc import LdpcCode, build_encoder, import_matrix, peg_code, syndrome_weight
from .modem import hard_demap, make_constellation
from .pipeline import TxConfig, decode_frame, decode_payload, modulate
from .rotation import MAX_ELL, ExtraBits, angle_of, derotate, rotate

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "snr_db",
    "convention",
    "constellation",
    "ell",
    "frames",
    "extra_fer",
    "extra_err_count",
    "payload_ber",
    "payload_bit_errs",
    "baseline_ber",
    "mean_iters",
    "mean_list_size",
)


@dataclass
class SimConfig:
    constellation: str = "qpsk"
    ell: int = 4
    snr_db: list[float] = field(default_factory=lambda: [0.0, 1.0, 2.0, 3.0, 4.0])
    convention: str = "ebn0"
    frames: int = 1000
    max_frame_errors: int | None = 100
    max_iters: int = 50
    seed: int = 0
    n_vars: int = 2304
    n_checks: int = 1152
    col_degree: int = 3
    code_seed: int = 1
    alist: str | None = None
    baseline: bool = False
    threshold_delta: float | None = None
    workers: int = 1
    batch_size: int = 64

    def validate(self):
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if not self.snr_db:
            raise ValueError("snr_db must be a nonempty list")
        if not 1 <= self.ell <= MAX_ELL:
            raise ValueError(f"ell must lie in 1..{MAX_ELL}")
        if self.convention not in ("ebn0", "esn0"):
            raise ValueError(f"convention must be 'ebn0' or 'esn0', got {self.convention!r}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.max_frame_errors is not None and self.max_frame_errors < 1:
            raise ValueError("max_frame_errors must be >= 1 or None")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.threshold_delta is not None and self.threshold_delta < 0:
            raise ValueError("threshold_delta must be non-negative")
        make_constellation(self.constellation)


@lru_cache(maxsize=8)
def _cached_code(alist, n_vars, n_checks, col_degree, code_seed):
    if alist is not None:
        h = import_matrix(alist)
        return LdpcCode(h, build_encoder(h))
    return peg_code(n_vars, n_checks, col_degree, seed=code_seed)


def load_code(cfg):
    """The LDPC code named by ``cfg`` (alist file, else PEG parameters)."""
    return _cached_code(cfg.alist, cfg.n_vars, cfg.n_checks, cfg.col_degree, cfg.code_seed)


def tx_config(cfg):
    return TxConfig(load_code(cfg), make_constellation(cfg.constellation), cfg.ell)


# ---------------------------------------------------------------------------
# per-frame work
# ---------------------------------------------------------------------------


@dataclass
class FrameRecord:
    extra_error: bool
    payload_bit_errors: int
    iterations: int
    list_size: int
    objective_evals: int
    syndrome_evals: int
    baseline_bit_errors: int | None = None
    matches_baseline: bool | None = None
    diagnostics: list | None = None

    @property
    def frame_error(self):
        return self.extra_error or self.payload_bit_errors > 0


def draw_frame(txc, seed, point, frame):
    """Payload, extra bits, unrotated symbols and noisy unrotated frame."""
    rng = frame_rng(seed, point, frame)
    u = rng.integers(0, 2, txc.k, dtype=np.uint8)
    v = ExtraBits.from_int(int(rng.integers(0, 2**txc.ell)), txc.ell)
    x = modulate(u, txc)
    return u, v, x, rng


def simulate_frame(txc, sigma2, seed, point, frame, *, max_iters=50, baseline=False, threshold_delta=None, diagnostics=False):
    """Run one frame through the rotated scheme (and optionally the baseline).

    The receiver sees ``rotate(x + w)``. Because w is circularly symmetric this
    is the same channel as ``rotate(x) + w``, and it lets the unrotated baseline
    reuse the identical noise realization ``x + w``.
    """
    u, v, x, rng = draw_frame(txc, seed, point, frame)
    noisy = awgn(x, sigma2, rng)
    y = rotate(noisy, angle_of(v))
    r = decode_frame(y, txc, sigma2, max_iters, threshold_delta=threshold_delta, u=u, v=v)
    cs = r.candidate_diagnostics
    rec = FrameRecord(
        extra_error=not r.angle_correct,
        payload_bit_errors=r.payload_bit_errors,
        iterations=r.spa_iterations,
        list_size=cs.size,
        objective_evals=cs.objective_evals,
        syndrome_evals=cs.syndrome_evals,
    )
    if baseline:
        u_b, res_b = decode_payload(noisy, txc, sigma2, max_iters)
        rec.baseline_bit_errors = int(np.count_nonzero(u_b != u))
        rec.matches_baseline = bool(np.array_equal(res_b.hard_bits, r.hard_bits))
    if diagnostics:
        rec.diagnostics = [
            (frame, c.angle.grid_index, c.objective, c.syndrome_weight, i == cs.chosen) for i, c in enumerate(cs.entries)
        ]
    return rec


def frame_weights(txc, sigma2, seed, point, frame):
    """Syndrome weights at the true angle and at the other members of its coset."""
    u, v, x, rng = draw_frame(txc, seed, point, frame)
    theta = angle_of(v)
    y = rotate(awgn(x, sigma2, rng), theta)
    h = txc.code.h
    correct, wrong = None, []
    for a in symmetry_coset(theta, txc.cons, txc.ell):
        w = syndrome_weight(hard_demap(derotate(y, a), txc.cons)[: h.n_cols], h)
        if a.grid_index == theta.grid_index:
            correct = w
        else:
            wrong.append(w)
    return correct, wrong


# ---------------------------------------------------------------------------
# parallel driver
# ---------------------------------------------------------------------------

_WORKER_TXC = None


def _init_worker(txc):
    global _WORKER_TXC
    _WORKER_TXC = txc


def _call(args):
    fn, a, kw = args
    return fn(_WORKER_TXC, *a, **kw)


def _run_frames(txc, fn, arg_fn, kwargs, n_frames, workers, batch_size, stop=None):
    """Evaluate ``fn`` for frames 0..n_frames-1 in order, honoring ``stop``.

    ``stop(record)`` is called in frame order; once it returns True no later
    frame is kept. Batches only change how much speculative work is done.
    """
    out = []
    pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(txc,)) if workers > 1 else None
    try:
        for lo in range(0, n_frames, batch_size):
            idx = range(lo, min(lo + batch_size, n_frames))
            if pool is None:
                recs = [fn(txc, *arg_fn(i), **kwargs) for i in idx]
            else:
                recs = list(pool.map(_call, [(fn, arg_fn(i), kwargs) for i in idx], chunksize=max(1, len(idx) // workers)))
            for rec in recs:
                out.append(rec)
                if stop is not None and stop(rec):
                    return out
    finally:
        if pool is not None:
            pool.shutdown()
    return out


@dataclass
class PointResult:
    snr_db: float
    convention: str
    constellation: str
    ell: int
    frames: int
    extra_err_count: int
    payload_bit_errs: int
    payload_frame_errs: int
    k: int
    mean_iters: float
    mean_list_size: float
    objective_evals: int
    syndrome_evals: int
    baseline_bit_errs: int | None = None
    angle_correct_frames: int = 0
    matches_baseline_on_correct: int | None = None

    @property
    def extra_fer(self):
        return self.extra_err_count / self.frames

    @property
    def payload_ber(self):
        return self.payload_bit_errs / (self.frames * self.k)

    @property
    def baseline_ber(self):
        if self.baseline_bit_errs is None:
            return None
        return self.baseline_bit_errs / (self.frames * self.k)

    def csv_row(self):
        return [_fmt(getattr(self, c)) for c in CSV_COLUMNS]


@dataclass
class SimResult:
    config: SimConfig
    points: list[PointResult]
    diagnostics: list = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p in self.points:
            w.writerow(p.csv_row())
        return buf.getvalue()

    def diagnostics_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("snr_db", "frame", "grid_index", "objective", "syndrome_weight", "chosen"))
        for snr, rows in self.diagnostics:
            for frame, gi, f, wt, chosen in rows:
                w.writerow((_fmt(snr), frame, gi, _fmt(f), wt, int(chosen)))
        return buf.getvalue()


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def run_monte_carlo(cfg, diagnostics=False):
    """Sweep the configured SNR points.

    Each point runs ``cfg.frames`` frames, or stops early after the frame that
    brings the number of erroneous frames (extra bits or payload wrong) to
    ``cfg.max_frame_errors``.
    """
    cfg.validate()
    txc = tx_config(cfg)
    points, diag = [], []
    for pi, snr in enumerate(cfg.snr_db):
        noise = sigma_from_snr(snr, txc.code.rate, txc.cons.m, cfg.convention)
        errs = 0

        def stop(rec):
            nonlocal errs
            errs += rec.frame_error
            return cfg.max_frame_errors is not None and errs >= cfg.max_frame_errors

        recs = _run_frames(
            txc,
            simulate_frame,
            lambda i, pi=pi, s2=noise.sigma2: (s2, cfg.seed, pi, i),
            dict(max_iters=cfg.max_iters, baseline=cfg.baseline, threshold_delta=cfg.threshold_delta, diagnostics=diagnostics),
            cfg.frames,
            cfg.workers,
            cfg.batch_size,
            stop,
        )
        n = len(recs)
        correct = [r for r in recs if not r.extra_error]
        pt = PointResult(
            snr_db=float(snr),
            convention=cfg.convention,
            constellation=txc.cons.name,
            ell=cfg.ell,
            frames=n,
            extra_err_count=sum(r.extra_error for r in recs),
            payload_bit_errs=sum(r.payload_bit_errors for r in recs),
            payload_frame_errs=sum(r.payload_bit_errors > 0 for r in recs),
            k=txc.k,
            mean_iters=sum(r.iterations for r in recs) / n,
            mean_list_size=sum(r.list_size for r in recs) / n,
            objective_evals=sum(r.objective_evals for r in recs),
            syndrome_evals=sum(r.syndrome_evals for r in recs),
            angle_correct_frames=len(correct),
        )
        if cfg.baseline:
            pt.baseline_bit_errs = sum(r.baseline_bit_errors for r in recs)
            pt.matches_baseline_on_correct = sum(r.matches_baseline for r in correct)
        if diagnostics:
            diag.append((float(snr), [row for r in recs for row in r.diagnostics]))
        log.info("snr %.3g dB: %d frames, extra FER %.3g, payload BER %.3g", snr, n, pt.extra_fer, pt.payload_ber)
        points.append(pt)
    return SimResult(cfg, points, diag)


@dataclass
class WeightHistogram:
    m: int
    correct: np.ndarray
    erroneous: np.ndarray
    bin_width: int = 16

    def counts(self):
        edges = np.arange(0, self.m + self.bin_width + 1, self.bin_width)
        c, _ = np.histogram(self.correct, edges)
        e, _ = np.histogram(self.erroneous, edges)
        return edges, c, e

    def to_csv(self):
        edges, c, e = self.counts()
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(("bin_lo", "bin_hi", "correct", "erroneous"))
        for lo, hi, cc, ee in zip(edges[:-1], edges[1:], c, e):
            w.writerow((int(lo), int(hi) - 1, int(cc), int(ee)))
        return buf.getvalue()


def histogram_syndrome_weights(cfg, snr_db, frames, bin_width=16):
    """Syndrome weights at the correct angle vs. the other coset angles.

    Uses ``cfg`` for the code, constellation, ell, SNR convention, seed and
    worker count.
    """
    cfg.validate()
    txc = tx_config(cfg)
    sigma2 = sigma_from_snr(snr_db, txc.code.rate, txc.cons.m, cfg.convention).sigma2
    recs = _run_frames(txc, frame_weights, lambda i: (sigma2, cfg.seed, 0, i), {}, frames, cfg.workers, cfg.batch_size)
    correct = np.array([c for c, _ in recs], dtype=np.int64)
    wrong = np.array([w for _, ws in recs for w in ws], dtype=np.int64)
    return WeightHistogram(txc.code.h.n_rows, correct, wrong, bin_width)


def config_fields():
    return {f.name: f for f in fields(SimConfig)}
