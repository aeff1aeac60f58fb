import numpy as np
import pytest

from rotbits.channel import awgn, frame_rng
from rotbits.ldpc import encode, peg_code
from rotbits.modem import hard_demap, make_constellation
from rotbits.pipeline import TxConfig, decode_frame, encode_frame, modulate
from rotbits.rotation import ExtraBits, RotationAngle, angle_of, derotate, rotate


@pytest.fixture(scope="module")
def qpsk4(code2304):
    return TxConfig(code2304, make_constellation("qpsk"), 4)


@pytest.fixture(scope="module")
def qam3(code2304):
    return TxConfig(code2304, make_constellation("16qam"), 3)


def test_shapes(qpsk4, qam3):
    assert qpsk4.n_symbols == 1152 and qpsk4.n_pad == 0
    assert qam3.n_symbols == 576


def test_zero_extra_bits_no_rotation(qpsk4, rng):
    u = rng.integers(0, 2, qpsk4.k)
    np.testing.assert_array_equal(encode_frame(u, ExtraBits.from_int(0, 4), qpsk4), modulate(u, qpsk4))


def test_zero_payload_quarter_turn(qpsk4):
    # all-zero codeword maps every symbol to point 0; d=4 of 16 is a quarter turn
    x = encode_frame(np.zeros(qpsk4.k, dtype=np.uint8), ExtraBits.from_int(4, 4), qpsk4)
    expected = (1 + 1j) / np.sqrt(2) * 1j
    assert np.abs(x - expected).max() < 1e-12


@pytest.mark.parametrize("fixture", ["qpsk4", "qam3"])
def test_rotation_preserves_magnitudes(fixture, request, rng):
    cfg = request.getfixturevalue(fixture)
    u = rng.integers(0, 2, cfg.k)
    base = modulate(u, cfg)
    for d in range(2**cfg.ell):
        x = encode_frame(u, ExtraBits.from_int(d, cfg.ell), cfg)
        np.testing.assert_allclose(np.abs(x), np.abs(base), atol=1e-12)
        np.testing.assert_allclose(derotate(x, angle_of(ExtraBits.from_int(d, cfg.ell))), base, atol=1e-12)


def test_wrong_number_of_extra_bits(qpsk4, rng):
    with pytest.raises(ValueError):
        encode_frame(rng.integers(0, 2, qpsk4.k), ExtraBits.from_int(1, 3), qpsk4)


@pytest.mark.parametrize("kind", ["qpsk", "16qam"])
@pytest.mark.parametrize("ell", [1, 2, 3, 4])
def test_noiseless_round_trip(kind, ell, code2304):
    cfg = TxConfig(code2304, make_constellation(kind), ell)
    for f in range(25):
        rng = frame_rng(21, ell, f)
        u = rng.integers(0, 2, cfg.k, dtype=np.uint8)
        v = ExtraBits.from_int(int(rng.integers(2**cfg.ell)), cfg.ell)
        r = decode_frame(encode_frame(u, v, cfg), cfg, 1e-3, u=u, v=v)
        assert r.v_hat == v and r.angle_correct
        np.testing.assert_array_equal(r.u_hat, u)
        assert r.payload_bit_errors == 0
        assert r.spa_iterations == 0 and r.converged


def _forced_error_rate(cfg, offset, frames=10):
    errs = []
    for f in range(frames):
        rng = frame_rng(5, offset, f)
        u = rng.integers(0, 2, cfg.k, dtype=np.uint8)
        v = ExtraBits.from_int(3, 4)
        y = awgn(encode_frame(u, v, cfg), 0.05, rng)
        r = decode_frame(y, cfg, 0.05, force_angle=RotationAngle.on_grid(3 + offset, 4), u=u, v=v)
        assert not r.angle_correct
        assert r.candidate_diagnostics is None
        errs.append(r.payload_bit_errors / cfg.k)
    return float(np.mean(errs))


@pytest.mark.parametrize("kind", ["qpsk", "16qam"])
def test_forced_half_turn_scrambles_payload(kind, code2304):
    cfg = TxConfig(code2304, make_constellation(kind), 4)
    assert abs(_forced_error_rate(cfg, 8) - 0.5) < 0.06


@pytest.mark.parametrize("kind", ["qpsk", "16qam"])
@pytest.mark.parametrize("offset", [2, 4, 12])
def test_forced_coarse_offsets_are_destructive(kind, offset, code2304):
    # a quarter turn of natural QPSK is a fixed relabeling (about 70% wrong bits);
    # a single grid step at ell=4 is small enough for SPA to partly absorb
    cfg = TxConfig(code2304, make_constellation(kind), 4)
    assert _forced_error_rate(cfg, offset) > 0.25


def test_extra_error_iff_wrong_angle(qam3):
    sigma2 = 0.5  # harsh enough for some angle errors
    seen = set()
    for f in range(60):
        rng = frame_rng(9, 0, f)
        u = rng.integers(0, 2, qam3.k, dtype=np.uint8)
        v = ExtraBits.from_int(int(rng.integers(8)), 3)
        r = decode_frame(awgn(encode_frame(u, v, qam3), sigma2, rng), qam3, sigma2, max_iters=5, u=u, v=v)
        assert (r.v_hat != v) == (r.angle != angle_of(v))
        seen.add(r.angle_correct)
    assert seen == {True, False}


def test_receiver_is_rotation_blind(qam3, rng):
    # rotating before or after the noise is the same channel; decoding the same
    # noisy samples under every extra-bit value gives the same payload decision
    u = rng.integers(0, 2, qam3.k, dtype=np.uint8)
    noisy = awgn(modulate(u, qam3), 0.08, rng)
    hard = None
    for d in range(8):
        v = ExtraBits.from_int(d, 3)
        r = decode_frame(rotate(noisy, angle_of(v)), qam3, 0.08, u=u, v=v)
        assert r.angle_correct
        hard = r.hard_bits if hard is None else hard
        np.testing.assert_array_equal(r.hard_bits, hard)


def test_bad_inputs(qpsk4):
    with pytest.raises(ValueError):
        decode_frame(np.zeros(10, dtype=complex), qpsk4, 0.1)
    with pytest.raises(ValueError):
        decode_frame(np.zeros(qpsk4.n_symbols, dtype=complex), qpsk4, 0.0)
    with pytest.raises(ValueError):
        TxConfig(qpsk4.code, qpsk4.cons, 0)


def test_padding_path():
    code = peg_code(18, 9, 3, seed=0)
    cfg = TxConfig(code, make_constellation("16qam"), 2)
    assert cfg.n_pad == 2 and cfg.n_symbols == 5
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = rng.integers(0, 2, cfg.k, dtype=np.uint8)
        x = modulate(u, cfg)
        bits = hard_demap(x, cfg.cons)
        np.testing.assert_array_equal(bits[: code.n], encode(code.encoder, u))
        assert not bits[code.n :].any()
        r = decode_frame(x, cfg, 1e-3, force_angle=RotationAngle(0.0), u=u)
        assert r.payload_bit_errors == 0
