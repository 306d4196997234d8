"""Command-line front door: encode, decode, profile, synth, serve.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import List, Optional

import numpy as np

from . import codec, ingest, profiler
from .dtypes import Dtype, Mode, StreamConfig
from .errors import ApaxError, InternalError, InvalidConfig, InvalidSpec, RangeError


def _jsonable(obj):
    """Deterministic JSON-safe conversion; non-finite floats become null."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def dump_report_json(report: dict) -> str:
    """Byte-stable report serialization (sorted keys, shortest floats)."""
    return json.dumps(_jsonable(report), sort_keys=True, separators=(",", ":"))


def _parse_grid(text: str) -> List[float]:
    start, stop, step = (float(p) for p in text.split(":"))
    if step <= 0 or stop < start:
        raise InvalidSpec(f"bad grid {text!r}")
    out = []
    t = start
    while t <= stop + 1e-9:
        out.append(round(t, 9))
        t += step
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apax", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a raw typed array")
    enc.add_argument("input")
    enc.add_argument("output")
    enc.add_argument("--dtype", required=True, choices=[d.code for d in Dtype])
    enc.add_argument("--mode", default="lossless",
                     choices=["lossless", "fixedrate", "fixedquality"])
    enc.add_argument("--target", type=float, default=0.0,
                     help="bits/sample (fixedrate) or SRR dB (fixedquality)")
    enc.add_argument("--block-size", type=int, default=4096)

    dec = sub.add_parser("decode", help="decode a container to a raw file")
    dec.add_argument("input")
    dec.add_argument("output")

    prof = sub.add_parser("profile", help="profile a raw dataset")
    prof.add_argument("input")
    prof.add_argument("--dtype", required=True, choices=[d.code for d in Dtype])
    prof.add_argument("--json", dest="json_out", help="write the report JSON here")
    prof.add_argument("--grid", default="20:120:5", help="SRR grid start:stop:step")
    prof.add_argument("--block-size", type=int, default=4096)

    syn = sub.add_parser("synth", help="generate a synthetic raw dataset")
    syn.add_argument("spec_json")
    syn.add_argument("output")

    srv = sub.add_parser("serve", help="run the profiler HTTP service")
    srv.add_argument("--port", type=int, default=8807)
    srv.add_argument("--corpus-dir", default=None)
    return p


def _cmd_encode(args) -> int:
    dtype = Dtype.from_code(args.dtype)
    cfg = StreamConfig(dtype=dtype, block_size=args.block_size,
                       mode=Mode.from_name(args.mode), target=args.target)
    cfg.validate()  # usage errors surface before any IO
    x = ingest.read_raw(ingest.RawDatasetSpec(args.input, dtype))
    blob = codec.encode_stream(x, cfg)
    with open(args.output, "wb") as fh:
        fh.write(blob)
    ratio = x.size * dtype.width_bytes / len(blob)
    print(f"ratio: {ratio:.3f}:1")
    if cfg.mode is not Mode.LOSSLESS:
        y = codec.decode_stream(blob)
        d = x.astype(np.float64) - y.astype(np.float64)
        px = float(np.mean(x.astype(np.float64) ** 2))
        pd = float(np.mean(d * d))
        srr = math.inf if pd == 0 else 10.0 * math.log10(px / pd)
        print(f"srr: {srr:.2f} dB")
    return 0


def _cmd_decode(args) -> int:
    with open(args.input, "rb") as fh:
        blob = fh.read()
    cfg, _ = codec.parse_file_header(blob)
    y = codec.decode_stream(blob)
    ingest.write_raw(y, ingest.RawDatasetSpec(args.output, cfg.dtype))
    print(f"decoded {y.size} {cfg.dtype.code} samples")
    return 0


def _cmd_profile(args) -> int:
    dtype = Dtype.from_code(args.dtype)
    grid = _parse_grid(args.grid)
    x = ingest.read_raw(ingest.RawDatasetSpec(args.input, dtype))
    report = profiler.profile(x, dtype, grid, args.block_size, name=args.input)
    if args.json_out:
        with open(args.json_out, "w", encoding="utf-8") as fh:
            fh.write(dump_report_json(report))
    rec = report["recommended"]
    print(f"recommended: SRR {rec['srr_target']:.2f} dB  "
          f"ratio {rec['ratio']:.2f}:1  r {rec['r']:.6f}")
    print(f"{'metric':<26}{'value':>16}")
    for key, val in report["windows"]["metrics"].items():
        sval = f"{val:.6g}" if isinstance(val, float) and math.isfinite(val) else str(val)
        print(f"{key:<26}{sval:>16}")
    return 0


def _cmd_synth(args) -> int:
    spec = ingest.load_synth_spec(args.spec_json)
    x = ingest.synth(spec)
    ingest.write_raw(x, ingest.RawDatasetSpec(args.output, spec.dtype))
    print(f"wrote {x.size} {spec.dtype.code} samples")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(corpus_dir=args.corpus_dir), host="0.0.0.0", port=args.port)
    return 0


_COMMANDS = {
    "encode": _cmd_encode,
    "decode": _cmd_decode,
    "profile": _cmd_profile,
    "synth": _cmd_synth,
    "serve": _cmd_serve,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    try:
        return _COMMANDS[args.command](args)
    except (InvalidConfig, InvalidSpec, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except (ApaxError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
