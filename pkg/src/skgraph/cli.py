"""Command-line front end: encode, decode, stats, features, classify.

Exit codes: 0 on success, 1 on I/O or format errors (one diagnostic line on
stderr), 2 on invalid flags.
"""

from __future__ import annotations

import argparse
import os
import re
import sys
import tempfile
from pathlib import Path

from .codec import decode, decode_with_info, encode
from .errors import SkgError
from .features import FeatureVector, N_FEATURES, KnnClassifier, extract_features
from .minimizer import verify_counts
from .pipeline import bitmap_from_model, model_from_bitmap
from .raster import load_pbm, packed_size, save_pbm
from .smoothing import SmoothingParams


class CliError(Exception):
    """An input problem reported with exit status 1."""


def _write_atomic(path: str, data: bytes) -> None:
    """Write to a temporary file beside ``path`` and rename it into place."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: str) -> bytes:
    return Path(path).read_bytes()


def _radius(text: str):
    if text == "auto":
        return None
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if not v >= 0:
        raise argparse.ArgumentTypeError("radius must be >= 0")
    return v


def _width(text: str):
    if text == "auto":
        return None
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None
    if not v >= 1:
        raise argparse.ArgumentTypeError("width must be >= 1")
    return v


def _params(args) -> SmoothingParams:
    return SmoothingParams(
        spur_length_max=args.spur,
        gap_bridge_max=args.gap,
        node_merge_radius=args.merge,
        mode="lossless" if args.lossless else "lossy",
    )


def _model(path: str, params: SmoothingParams = SmoothingParams()):
    """A minimized model from either a container or a PBM image."""
    data = _read(path)
    if data[:4] == b"SKG1":
        return decode(data)
    return model_from_bitmap(load_pbm(data), params)


def cmd_encode(args) -> int:
    image = load_pbm(_read(args.input))
    m = model_from_bitmap(image, _params(args))
    data = encode(m, base3=args.base3)
    _write_atomic(args.output, data)
    n = packed_size(image)
    print(f"in_bytes={n} out_bytes={len(data)} ratio={n / len(data):.2f}")
    return 0


def cmd_decode(args) -> int:
    m = decode(_read(args.input))
    _write_atomic(args.output, save_pbm(bitmap_from_model(m, args.width)))
    return 0


def cmd_stats(args) -> int:
    m, info = decode_with_info(_read(args.input))
    rep = verify_counts(m)
    steps = info.chain_steps
    bits = info.payload_bytes * 8
    packer = "base3" if info.version & 0x10 else "rle"
    lines = [
        f"size={m.width}x{m.height} line_width={m.avg_line_width:.3f} packer={packer}",
        f"anchors={len(m.anchors)} branches={len(m.branches)} loops={m.n_loops} split_records={info.split_anchors}",
        f"n1={rep.n1_min} n3={rep.n3_min} predicted_branches={rep.predicted} eq3={'ok' if rep.consistent else 'FAIL'}",
        f"chain_steps={steps} payload_bits={bits} baseline_bits={8 * steps}"
        + (f" bits_per_step={bits / steps:.3f}" if steps else ""),
    ]
    print("\n".join(lines))
    return 0


def _format_row(label, v: FeatureVector) -> str:
    return str(v) if label is None else f"{label},{v}"


def cmd_features(args) -> int:
    for path in args.inputs:
        print(_format_row(args.label, extract_features(_model(path))))
    return 0


def _parse_rows(path: str):
    """Rows of ``label,f0,...,f19``; labels are kept as strings."""
    rows = []
    for n, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != N_FEATURES + 1:
            raise CliError(f"{path}:{n}: expected label and {N_FEATURES} values")
        try:
            values = tuple(float(p) for p in parts[1:])
        except ValueError:
            raise CliError(f"{path}:{n}: non-numeric feature value") from None
        rows.append((FeatureVector(values), parts[0]))
    return rows


def cmd_classify(args) -> int:
    training = _parse_rows(args.train)
    if not training:
        raise CliError(f"{args.train}: no training rows")
    if args.k > len(training):
        raise CliError(f"k={args.k} exceeds the {len(training)} training rows")
    clf = KnnClassifier(training, args.k)
    wrong = total = 0
    for path in args.probes:
        if path.endswith(".csv"):
            for v, label in _parse_rows(path):
                guess = clf.predict(v)
                total += 1
                wrong += guess != label
                print(f"{label} {guess}")
        else:
            print(f"{path} {clf.predict(extract_features(_model(path)))}")
    if total:
        print(f"error_rate={wrong / total:.4f} errors={wrong} n={total}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="skgraph", description="Graph-model codec for line images.")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("encode", help="PBM image to SKG1 container")
    e.add_argument("input")
    e.add_argument("output")
    mode = e.add_mutually_exclusive_group()
    mode.add_argument("--lossless", action="store_true", help="only remove crossings")
    mode.add_argument("--lossy", action="store_true", help="full smoothing (default)")
    e.add_argument("--spur", type=_radius, default=None, metavar="R", help="spur length limit (default: auto)")
    e.add_argument("--gap", type=_radius, default=None, metavar="R", help="gap bridging limit (default: auto)")
    e.add_argument("--merge", type=_radius, default=None, metavar="R", help="junction merge radius (default: auto)")
    e.add_argument("--base3", action="store_true", help="pack turns in base 3 instead of run-length tokens")
    e.set_defaults(func=cmd_encode)

    d = sub.add_parser("decode", help="SKG1 container to PBM image")
    d.add_argument("input")
    d.add_argument("output")
    d.add_argument("--width", type=_width, default=None, metavar="W", help="stroke width or 'auto' (stored width)")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("stats", help="report counts and payload size of a container")
    s.add_argument("input")
    s.set_defaults(func=cmd_stats)

    f = sub.add_parser("features", help="print the 20 structural features")
    f.add_argument("inputs", nargs="+", help="PBM images or SKG1 containers")
    f.add_argument("--label", default=None, help="prefix every row with this label")
    f.set_defaults(func=cmd_features)

    c = sub.add_parser("classify", help="k-NN classification against a feature file")
    c.add_argument("probes", nargs="+", help="images, containers, or .csv feature rows with labels")
    c.add_argument("--train", required=True, help="rows of label,f0,...,f19")
    c.add_argument("--k", type=int, default=5)
    c.set_defaults(func=cmd_classify)
    return p


def _kind(exc: Exception) -> str:
    name = type(exc).__name__.removesuffix("Error")
    return re.sub(r"(?<!^)(?=[A-Z])", " ", name).lower() or "error"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k", 1) < 1:
        parser.error("--k must be at least 1")
    try:
        return args.func(args)
    except (SkgError, CliError, OSError) as exc:
        kind = "error" if isinstance(exc, CliError) else _kind(exc)
        print(f"skgraph: {kind}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
