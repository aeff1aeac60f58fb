"""
Syndrome weights at right and wrong angles
==========================================

Derotating by the wrong member of a symmetry coset scrambles the codeword,
so roughly half of the parity checks fail. At the right angle only the
checks touched by channel errors fail. This script prints the two
distributions for 16QAM side by side at a few SNR values.
"""

import numpy as np

from rotbits import SimConfig, histogram_syndrome_weights

cfg = SimConfig(constellation="16qam", ell=3, frames=200, seed=2)

for snr in (5.0, 7.0, 9.0):
    hist = histogram_syndrome_weights(cfg, snr, frames=200, bin_width=64)
    m = hist.m
    print(f"Eb/N0 = {snr} dB")
    print(f"  correct angle : mean W/M = {hist.correct.mean() / m:.3f}, max = {hist.correct.max() / m:.3f}")
    print(f"  wrong angles  : mean W/M = {hist.erroneous.mean() / m:.3f}, min = {hist.erroneous.min() / m:.3f}")

# the last histogram as CSV, ready for any plotting tool
print()
print(hist.to_csv())

# a crude text rendering
edges, right, wrong = hist.counts()
scale = 60 / max(right.max(), wrong.max())
for lo, a, b in zip(edges[:-1], right, wrong):
    if a or b:
        print(f"{lo:5d} {'#' * int(np.ceil(a * scale)):<30s} {'o' * int(np.ceil(b * scale))}")
