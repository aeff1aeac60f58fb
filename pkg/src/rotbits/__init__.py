"""Carry a few extra bits in the rotation angle of an LDPC-coded 2-D constellation."""

from .channel import NoiseSpec, awgn, sigma_from_snr
from .estimator import (
    Candidate,
    CandidateSet,
    brute_force_search,
    candidate_list,
    disambiguate,
    grid_objectives,
    objective,
    symmetry_coset,
)
from .ldpc import (
    DecodeResult,
    Encoder,
    LdpcCode,
    ParityCheckMatrix,
    build_encoder,
    encode,
    export_matrix,
    four_cycle_count,
    import_matrix,
    peg_code,
    peg_construct,
    sum_product_decode,
    syndrome_weight,
)
from .modem import Constellation, hard_demap, make_constellation, map_bits, soft_demap
from .pipeline import FrameResult, TxConfig, decode_frame, encode_frame
from .rotation import ExtraBits, RotationAngle, angle_of, bits_of_angle, rotate
from .sim import SimConfig, SimResult, histogram_syndrome_weights, run_monte_carlo

__version__ = "0.1.0"
