"""Receiver-side rotation estimation.

A grid search maximizes the likelihood objective

    F(theta) = sum_t log sum_i exp(-|y_t - s_i e^{j theta}|^2 / sigma2)

over all 2**ell valid angles. Rotations by multiples of 2*pi/q map the
constellation onto itself, so F cannot tell them apart; the remaining
candidates are ranked by the syndrome weight of their hard decisions.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import logsumexp

from .ldpc import syndrome_weight
from .modem import hard_demap
from .rotation import MAX_ELL, TWO_PI, RotationAngle, derotate

TIE_RTOL = 1e-9
_CHUNK_ELEMS = 1 << 22


@dataclass(frozen=True)
class Candidate:
    angle: RotationAngle
    objective: float
    syndrome_weight: int | None = None


@dataclass
class CandidateSet:
    """Candidate angles plus the work counters of the search that built them.

    ``objective_evals`` counts F evaluations (2**ell per brute-force search) and
    ``syndrome_evals`` counts candidate syndrome checks.
    """

    entries: list[Candidate]
    ell: int
    objective_evals: int = 0
    syndrome_evals: int = 0
    chosen: int | None = None
    all_objectives: np.ndarray | None = field(default=None, repr=False)

    def __len__(self):
        return len(self.entries)

    @property
    def size(self):
        return len(self.entries)

    @property
    def grid_indices(self):
        return [c.angle.grid_index for c in self.entries]

    @property
    def chosen_angle(self):
        return None if self.chosen is None else self.entries[self.chosen].angle


def _check_sigma2(sigma2):
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")


def _objective_many(y, points, radians, sigma2):
    y = np.asarray(y, dtype=np.complex128)
    out = np.empty(len(radians))
    per_angle = max(1, y.size * points.size)
    step = max(1, _CHUNK_ELEMS // per_angle)
    for lo in range(0, len(radians), step):
        rot = np.exp(-1j * np.asarray(radians[lo : lo + step]))
        yr = rot[:, None, None] * y[None, :, None]
        d = yr - points[None, None, :]
        metric = -(d.real**2 + d.imag**2) / sigma2
        out[lo : lo + step] = logsumexp(metric, axis=2).sum(axis=1)
    return out


def objective(y, cons, theta, sigma2):
    """Log-likelihood objective F(theta) for a received frame."""
    _check_sigma2(sigma2)
    rad = theta.radians if isinstance(theta, RotationAngle) else float(theta)
    return float(_objective_many(y, cons.points, [rad], sigma2)[0])


def grid_objectives(y, cons, ell, sigma2):
    """F at every grid angle 2*pi*k/2**ell, k = 0..2**ell-1."""
    _check_sigma2(sigma2)
    n = 2**ell
    return _objective_many(y, cons.points, TWO_PI * np.arange(n) / n, sigma2)


def _tie_eps(f_max):
    return TIE_RTOL * max(1.0, abs(f_max))


def _ordered(indices, f):
    f_max = f.max()
    eps = _tie_eps(f_max)
    top = sorted(k for k in indices if f[k] >= f_max - eps)
    rest = sorted((k for k in indices if f[k] < f_max - eps), key=lambda k: (-f[k], k))
    return top + rest


def brute_force_search(y, cons, ell, sigma2, mode="tie", threshold=None):
    """Evaluate F on the whole grid and keep the maximizing angles.

    Parameters
    ----------
    mode : {"tie", "threshold"}
        ``"tie"`` keeps angles within ``1e-9 * max(1, |F_max|)`` of the maximum;
        ``"threshold"`` keeps every angle with ``F >= threshold``.

    Raises
    ------
    ValueError
        On a bad ``ell``, or when threshold mode selects nothing.
    """
    if not 1 <= ell <= MAX_ELL:
        raise ValueError(f"ell must lie in 1..{MAX_ELL}")
    f = grid_objectives(y, cons, ell, sigma2)
    f_max = float(f.max())
    if mode == "tie":
        keep = np.flatnonzero(f >= f_max - _tie_eps(f_max))
    elif mode == "threshold":
        if threshold is None:
            raise ValueError("threshold mode needs a threshold")
        keep = np.flatnonzero(f >= threshold)
        if keep.size == 0:
            raise ValueError(f"no grid angle reaches threshold {threshold!r} (F_max = {f_max!r})")
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    entries = [Candidate(RotationAngle.on_grid(int(k), ell), float(f[k])) for k in _ordered(keep.tolist(), f)]
    return CandidateSet(entries, ell, objective_evals=f.size, all_objectives=f)


def symmetry_coset(theta, cons, ell):
    """Grid angles ``theta + 2*pi*k/q`` (mod 2*pi) for k = 0..q-1.

    Members that fall off the 2**ell grid are dropped.
    """
    n = 2**ell
    q = cons.symmetry_order
    rad = theta.radians if isinstance(theta, RotationAngle) else float(theta)
    base = rad * n / TWO_PI
    out = []
    for k in range(q):
        if (k * n) % q:
            continue
        g = base + k * n // q
        gi = int(np.rint(g))
        if abs(g - gi) * TWO_PI / n > 1e-6:
            continue
        out.append(RotationAngle.on_grid(gi, ell))
    return out


def candidate_list(y, cons, ell, sigma2, threshold_delta=None):
    """Default candidate construction for the receiver.

    Tie-mode winners are united with the symmetry coset of the best angle. With
    ``threshold_delta`` set, every grid angle with ``F >= F_max - threshold_delta``
    is added as well.
    """
    cs = brute_force_search(y, cons, ell, sigma2, mode="tie")
    f = cs.all_objectives
    keep = set(cs.grid_indices)
    keep.update(a.grid_index for a in symmetry_coset(cs.entries[0].angle, cons, ell))
    if threshold_delta is not None:
        if threshold_delta < 0:
            raise ValueError("threshold_delta must be non-negative")
        keep.update(np.flatnonzero(f >= f.max() - threshold_delta).tolist())
    entries = [Candidate(RotationAngle.on_grid(k, ell), float(f[k])) for k in _ordered(sorted(keep), f)]
    return replace(cs, entries=entries)


def disambiguate(y, candidates, h, cons):
    """Pick the candidate whose hard decisions violate the fewest parity checks.

    Every candidate gets its syndrome weight filled in. Ties go to the lowest
    grid index. Returns ``(angle, candidates)``.
    """
    if not candidates.entries:
        raise ValueError("candidate set is empty")
    filled = []
    for cand in candidates.entries:
        bits = hard_demap(derotate(y, cand.angle), cons)
        # zero padding past the code length is not part of the codeword
        w = syndrome_weight(bits[: h.n_cols], h)
        filled.append(replace(cand, syndrome_weight=w))
    best = min(range(len(filled)), key=lambda i: (filled[i].syndrome_weight, filled[i].angle.grid_index))
    out = replace(
        candidates,
        entries=filled,
        syndrome_evals=candidates.syndrome_evals + len(filled),
        chosen=best,
    )
    return filled[best].angle, out
