"""Command line front end.

    rotbits sweep --constellation qpsk --ell 4 --snr 1,2,3 --frames 10000 --out fer.csv
    rotbits histogram --constellation 16qam --ell 3 --snr 9 --frames 1000 --out hist.csv
    rotbits make-code --n 2304 --m 1152 --col-degree 3 --out peg2304.alist

A ``--config`` file holds ``key = value`` lines using the long flag names
(``snr = 1,2,3``); flags given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import configparser
import logging
import sys

from .ldpc import export_matrix, peg_code
from .sim import SimConfig, histogram_syndrome_weights, run_monte_carlo


def _floats(text):
    return [float(t) for t in str(text).split(",") if t.strip()]


def _bool(text):
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _optional_int(text):
    return None if str(text).strip().lower() in ("none", "off") else int(text)


# option name -> (SimConfig field, converter)
_OPTIONS = {
    "constellation": ("constellation", str),
    "ell": ("ell", int),
    "snr": ("snr_db", _floats),
    "snr_convention": ("convention", str),
    "frames": ("frames", int),
    "max_errors": ("max_frame_errors", _optional_int),
    "max_iters": ("max_iters", int),
    "seed": ("seed", int),
    "alist": ("alist", str),
    "baseline": ("baseline", _bool),
    "threshold_delta": ("threshold_delta", float),
    "workers": ("workers", int),
    "code_n": ("n_vars", int),
    "code_m": ("n_checks", int),
    "col_degree": ("col_degree", int),
    "code_seed": ("code_seed", int),
}


def read_config_file(path):
    """Parse a ``key = value`` file into a dict keyed like the CLI options."""
    parser = configparser.ConfigParser()
    with open(path) as f:
        parser.read_string("[rotbits]\n" + f.read())
    out = {}
    for key, value in parser["rotbits"].items():
        name = key.replace("-", "_")
        if name not in _OPTIONS and name not in ("out", "diagnostics", "bin_width"):
            raise ValueError(f"{path}: unknown config key {key!r}")
        out[name] = value
    return out


def build_sim_config(args):
    """Merge defaults, config file and command-line flags (in that order)."""
    merged = read_config_file(args.config) if args.config else {}
    for name in _OPTIONS:
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    kwargs = {}
    for name, value in merged.items():
        if name in _OPTIONS:
            field, conv = _OPTIONS[name]
            kwargs[field] = conv(value) if isinstance(value, str) else value
    cfg = SimConfig(**kwargs)
    cfg.validate()
    return cfg, merged


def _add_sim_options(p):
    p.add_argument("--config", help="key = value file mirroring these flags")
    p.add_argument("--constellation", choices=["qpsk", "qpsk-gray", "16qam"])
    p.add_argument("--ell", type=int, help="number of extra bits")
    p.add_argument("--snr", type=_floats, help="comma separated SNR list in dB")
    p.add_argument("--snr-convention", choices=["ebn0", "esn0"])
    p.add_argument("--frames", type=int, help="frames per SNR point")
    p.add_argument("--max-errors", help="stop a point after this many frame errors ('none' disables)")
    p.add_argument("--max-iters", type=int, help="SPA iteration cap")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--alist", help="load the parity-check matrix from an alist file")
    p.add_argument("--code-n", type=int, help="PEG code length")
    p.add_argument("--code-m", type=int, help="PEG number of checks")
    p.add_argument("--col-degree", type=int, help="PEG column degree")
    p.add_argument("--code-seed", type=int, help="PEG seed")
    p.add_argument("--threshold-delta", type=float, help="also keep angles with F >= F_max - delta")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", help="output CSV path (default stdout)")


def _emit(text, path):
    if path:
        with open(path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def cmd_sweep(args):
    cfg, merged = build_sim_config(args)
    diag_path = args.diagnostics or merged.get("diagnostics")
    res = run_monte_carlo(cfg, diagnostics=bool(diag_path))
    _emit(res.to_csv(), args.out or merged.get("out"))
    if diag_path:
        _emit(res.diagnostics_csv(), diag_path)
    return 0


def cmd_histogram(args):
    cfg, merged = build_sim_config(args)
    if len(cfg.snr_db) != 1:
        raise ValueError("histogram takes exactly one --snr value")
    bin_width = args.bin_width if args.bin_width is not None else int(merged.get("bin_width", 16))
    hist = histogram_syndrome_weights(cfg, cfg.snr_db[0], cfg.frames, bin_width=bin_width)
    _emit(hist.to_csv(), args.out or merged.get("out"))
    return 0


def cmd_make_code(args):
    code = peg_code(args.n, args.m, args.col_degree, seed=args.seed)
    export_matrix(code.h, args.out)
    print(f"wrote {args.out}: N={code.n} M={code.h.n_rows} K={code.k} nnz={code.h.nnz}", file=sys.stderr)
    return 0


def make_parser():
    parser = argparse.ArgumentParser(prog="rotbits", description="Extra bits carried by constellation rotation over LDPC-coded frames.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="extra-bit FER / payload BER versus SNR")
    _add_sim_options(p)
    p.add_argument("--baseline", action="store_const", const=True, help="also decode the unrotated frame with the same noise")
    p.add_argument("--diagnostics", help="write per-frame candidate diagnostics CSV here")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("histogram", help="syndrome weights at correct vs erroneous angles")
    _add_sim_options(p)
    p.add_argument("--bin-width", type=int, help="histogram bin width (default 16)")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("make-code", help="PEG-construct a regular code and write it as alist")
    p.add_argument("--n", type=int, default=2304)
    p.add_argument("--m", type=int, default=1152)
    p.add_argument("--col-degree", type=int, default=3)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_code)
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"rotbits: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
