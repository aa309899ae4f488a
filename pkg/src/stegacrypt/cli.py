"""Command-line interface.

Exit codes:
    0  success
    1  usage error (bad flags, bad key, image shape mismatch)
    2  capacity error (record does not fit the cover)
    3  integrity error (no payload found, truncated frame, CRC mismatch)
    4  authentication error (wrong passphrase or key)
    5  I/O or image-format error (missing file, lossy or unsupported image)
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .envelope import Secret
from .errors import (
    AuthenticationError,
    CapacityError,
    CrcMismatch,
    ImageFormatError,
    IntegrityError,
    NoFrameFound,
    StegaCryptError,
    TruncatedFrame,
    UnsupportedFrameVersion,
    UsageError,
)
from .images import load_image, save_png
from .lsb_codec import capacity
from .metrics import compare, format_psnr
from .pipeline import compare_report, retrieve, secure

PASSPHRASE_ENV = "STEGACRYPT_PASSPHRASE"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_INTEGRITY = 3
EXIT_AUTH = 4
EXIT_IO = 5

EXIT_CODES = {
    UsageError: EXIT_USAGE,
    CapacityError: EXIT_CAPACITY,
    IntegrityError: EXIT_INTEGRITY,
    AuthenticationError: EXIT_AUTH,
    ImageFormatError: EXIT_IO,
}


def exit_code_for(exc: BaseException) -> int:
    for cls, code in EXIT_CODES.items():
        if isinstance(exc, cls):
            return code
    if isinstance(exc, OSError):
        return EXIT_IO
    raise exc


def describe(exc: BaseException) -> str:
    if isinstance(exc, NoFrameFound):
        return f"stego layer: no embedded payload found ({exc})"
    if isinstance(exc, (TruncatedFrame, UnsupportedFrameVersion)):
        return f"stego layer: {exc}"
    if isinstance(exc, IntegrityError):
        return f"envelope layer: {exc}"
    if isinstance(exc, AuthenticationError):
        return f"crypto layer: wrong passphrase or key ({exc})"
    if isinstance(exc, OSError) and exc.filename:
        return f"{exc.filename}: {exc.strerror}"
    return str(exc)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_secret_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument(
        "--passphrase",
        help=f"passphrase to derive the key from (default: ${PASSPHRASE_ENV})",
    )
    g.add_argument("--key-hex", help="raw 3DES key: 48 hex characters (24 octets)")


def _resolve_secret(args) -> Secret:
    if args.key_hex is not None:
        return Secret.from_hex(args.key_hex)
    passphrase = args.passphrase
    if passphrase is None:
        passphrase = os.environ.get(PASSPHRASE_ENV)
    if passphrase is None:
        raise UsageError(f"no secret given: use --passphrase, --key-hex or ${PASSPHRASE_ENV}")
    return Secret.from_passphrase(passphrase)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="stegacrypt",
        description="Encrypt a document with 3DES and hide it in the LSBs of a PNG/BMP image.",
        epilog=f"The passphrase may be supplied via the {PASSPHRASE_ENV} environment "
        "variable instead of --passphrase; the flag takes precedence.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("secure", help="encrypt a record and hide it in a cover image")
    p.add_argument("--in", dest="input", required=True, help="record file to secure")
    p.add_argument("--cover", required=True, help="cover image (PNG or BMP)")
    p.add_argument("--out", required=True, help="stego image to write (PNG)")
    _add_secret_flags(p)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_secure)

    p = sub.add_parser("retrieve", help="extract and decrypt a record from a stego image")
    p.add_argument("--in", dest="input", required=True, help="stego image")
    p.add_argument("--out", required=True, help="where to write the recovered record")
    _add_secret_flags(p)
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("capacity", help="print how many payload octets a cover can hold")
    p.add_argument("--cover", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("metrics", help="MSE and PSNR between a cover and a stego image")
    p.add_argument("--cover", required=True)
    p.add_argument("--stego", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="compare combined method, 3DES alone and LSB alone")
    p.add_argument("--in", dest="input", required=True, help="record file")
    p.add_argument("--cover", required=True, help="cover image (PNG or BMP)")
    _add_secret_flags(p)
    p.add_argument("--repeats", type=int, default=3, help="timing repetitions (best is kept)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compare)
    return parser


def _read_record(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _emit(args, data: dict, lines: list[str]) -> None:
    if args.json:
        print(json.dumps(data, indent=2))
    else:
        print("\n".join(lines))


def cmd_secure(args) -> int:
    secret = _resolve_secret(args)
    record = _read_record(args.input)
    cover = load_image(args.cover)
    result = secure(record, secret, cover)
    save_png(args.out, result.stego)
    available = capacity(cover)
    data = {
        "out": args.out,
        "record_octets": len(record),
        "payload_octets": result.payload_octets,
        "capacity_octets": available,
        "capacity_used_fraction": result.capacity_used_fraction,
        "metrics": result.metrics.to_dict(),
    }
    _emit(
        args,
        data,
        [
            f"wrote {args.out}",
            f"payload: {result.payload_octets} of {available} octets "
            f"({result.capacity_used_fraction:.1%} of capacity used)",
            f"psnr: {format_psnr(result.metrics.psnr_db)} dB",
            f"mse: {result.metrics.mse:.6f}",
        ],
    )
    return EXIT_OK


def cmd_retrieve(args) -> int:
    secret = _resolve_secret(args)
    stego = load_image(args.input)
    record = retrieve(stego, secret)
    with open(args.out, "wb") as fh:
        fh.write(record)
    _emit(
        args,
        {"out": args.out, "record_octets": len(record)},
        [f"wrote {args.out} ({len(record)} octets)"],
    )
    return EXIT_OK


def cmd_capacity(args) -> int:
    image = load_image(args.cover)
    cap = capacity(image)
    if args.json:
        print(json.dumps({"capacity_octets": cap}))
    else:
        print(cap)
    return EXIT_OK


def cmd_metrics(args) -> int:
    report = compare(load_image(args.cover), load_image(args.stego))
    _emit(args, report.to_dict(), [report.to_text()])
    return EXIT_OK


def _cell(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.0f}" if value >= 1000 or value.is_integer() else f"{value:.2f}"
    return str(value)


def _json_value(value):
    if isinstance(value, float) and math.isinf(value):
        return None
    return value


def cmd_compare(args) -> int:
    if args.repeats < 1:
        raise UsageError("--repeats must be at least 1")
    secret = _resolve_secret(args)
    rows = compare_report(_read_record(args.input), secret, load_image(args.cover), repeats=args.repeats)
    if args.json:
        out = []
        for row in rows:
            d = row.to_dict()
            for k in ("combined", "tdes_only", "lsb_only"):
                d[k] = _json_value(d[k])
            out.append(d)
        print(json.dumps({"rows": out}, indent=2))
        return EXIT_OK
    header = ("property", "combined", "3DES", "LSB")
    table = [header] + [
        (r.name, _cell(r.combined), _cell(r.tdes_only), _cell(r.lsb_only)) for r in rows
    ]
    widths = [max(len(row[i]) for row in table) for i in range(4)]
    for row in table:
        print("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (StegaCryptError, OSError) as exc:
        print(f"error: {describe(exc)}", file=sys.stderr)
        return exit_code_for(exc)
    except ValueError as exc:
        # malformed arguments that slipped past argparse, e.g. a bad IV length
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
