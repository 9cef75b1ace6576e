"""Command-line front end: construct, encode, decode, unravel, simulate, analyze.

Outputs are JSON (or CSV for simulate --format csv).  Blocks are packed
hex, column-major, one symbol per ceil(bits/4) nibbles.  Exit codes:
0 success / corrected, 2 configuration error, 3 uncorrectable, 4 I/O
error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .gf import ConfigurationError, block_to_hex, field, hex_to_block, parse_element
from .grs import DecodeStatus, encode_systematic
from .urs import (
    CollapsingMap,
    UrsCode,
    construct_urs,
    custom_map,
    power_map,
    subspace_poly,
    unravel,
    urs_from_json,
    urs_to_json,
    view,
)
from .decoders import (
    DecodePolicy,
    Stage,
    decode_cascade,
    decode_collaborative,
    decode_direct,
    decode_fast_chipkill,
    decode_independent,
    decode_stereotyped_plus_one,
    default_policy,
    policy_from_json,
)
from .presets import PRESETS, make_preset
from .reliability import FaultModel, analyze_urs, run_campaign

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCORRECTABLE = 3
EXIT_IO = 4


def _emit(obj, path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_gmap(f, spec: str) -> CollapsingMap:
    kind, _, payload = spec.partition(":")
    if kind == "power":
        return power_map(f, int(payload))
    if kind == "subspace":
        basis = [parse_element(f, x) for x in payload.split(",") if x]
        return subspace_poly(f, basis)
    if kind == "custom":
        coeffs = [parse_element(f, x) for x in payload.split(",") if x]
        return custom_map(f, coeffs)
    raise ConfigurationError(
        f"bad collapsing map spec {spec!r}; use power:L, subspace:0x..,.. or custom:0x..,.."
    )


def _load_code(args) -> UrsCode:
    if getattr(args, "preset", None):
        name = args.preset
        mb = getattr(args, "metadata_bytes", None)
        if mb is not None:
            if name != "ddr5":
                raise ConfigurationError("--metadata-bytes applies to --preset ddr5")
            name = f"ddr5-meta{8 * mb}"
        return make_preset(name)
    if getattr(args, "code", None):
        try:
            with open(args.code) as fh:
                obj = json.load(fh)
        except OSError as e:
            raise IOError(str(e)) from e
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"bad code file: {e}") from e
        return urs_from_json(obj)
    if getattr(args, "field", None):
        f = field(args.field, int(args.poly, 16) if args.poly else None)
        gmap = _parse_gmap(f, args.g)
        labels = (
            [parse_element(f, x) for x in args.labels.split(",")]
            if args.labels
            else None
        )
        return construct_urs(f, gmap, args.n, args.k, args.a, labels)
    raise ConfigurationError("specify a code with --preset, --code, or --field/--g/--n/--k/--a")


def _add_code_opts(p: argparse.ArgumentParser, preset_choices=True) -> None:
    p.add_argument(
        "--preset",
        help="named configuration: " + ", ".join(sorted(PRESETS)) + ", or ddr5 with --metadata-bytes",
    )
    p.add_argument("--code", help="path to a code JSON produced by `construct`")
    p.add_argument("--metadata-bytes", type=int, dest="metadata_bytes", default=None,
                   help="with --preset ddr5: 0, 1, or 2 metadata bytes (picks K = 64+m)")
    p.add_argument("--field", type=int, help="field degree b for GF(2^b)")
    p.add_argument("--poly", help="reduction polynomial as hex (default per degree)")
    p.add_argument("--g", help="collapsing map: power:L | subspace:0x..,0x.. | custom:0x..,..")
    p.add_argument("--n", type=int, help="columns")
    p.add_argument("--k", type=int, help="row data symbols")
    p.add_argument("--a", type=int, default=0, help="remainder rows with k+1 data symbols")
    p.add_argument("--labels", help="comma-separated column labels (hex), default ascending eligible")


def _cmd_construct(args) -> int:
    code = _load_code(args)
    _emit(urs_to_json(code), args.output)
    return EXIT_OK


def _cmd_encode(args) -> int:
    code = _load_code(args)
    f = code.field
    data = hex_to_block(f, args.data)
    if len(data) != code.K:
        raise ConfigurationError(f"data has {len(data)} symbols, code needs K = {code.K}")
    word = encode_systematic(code.big_code, data)
    _emit({"block": block_to_hex(f, word), "shape": [code.N, code.K]}, args.output)
    return EXIT_OK


_DECODERS = ("cascade", "direct", "independent", "collaborative", "fast-chipkill", "plus-one")


def _cmd_decode(args) -> int:
    code = _load_code(args)
    f = code.field
    block = hex_to_block(f, args.block)
    erased = args.erase_column or []
    name = args.decoder
    if name == "cascade":
        policy = None
        if args.policy:
            with open(args.policy) as fh:
                policy = policy_from_json(json.load(fh))
        out = decode_cascade(code, block, policy, erased)
    elif name == "direct":
        out = decode_direct(code, block, erased)
    elif name == "independent":
        out = decode_independent(code, block, args.ell, erased)
    elif name == "collaborative":
        out = decode_collaborative(code, block, args.ell)
    elif name == "fast-chipkill":
        out = decode_fast_chipkill(view(code, args.ell) if args.ell else code, block)
    else:
        out = decode_stereotyped_plus_one(code, block)
    result = out.to_json(f)
    if out.status is DecodeStatus.CORRECTED:
        fixed = list(block)
        for p, v in out.error_vector.items():
            fixed[p] ^= v
        result["corrected_block"] = block_to_hex(f, fixed)
    elif out.status is DecodeStatus.NO_ERROR:
        result["corrected_block"] = block_to_hex(f, block)
    _emit(result, args.output)
    return EXIT_OK if out.ok else EXIT_UNCORRECTABLE


def _cmd_unravel(args) -> int:
    code = _load_code(args)
    vw = view(code, args.ell) if args.ell else code
    f = code.field
    rows = unravel(vw, hex_to_block(f, args.block))
    _emit(
        {
            "ell": vw.ell,
            "rows": [block_to_hex(f, r) for r in rows],
            "row_shapes": [[rc.n, rc.k] for rc in vw.row_codes],
        },
        args.output,
    )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as e:
            raise IOError(str(e)) from e
    if "code" in cfg:
        code = urs_from_json(cfg["code"])
    elif "preset" in cfg:
        code = make_preset(cfg["preset"])
    else:
        code = _load_code(args)
    if "model" in cfg:
        model = FaultModel.from_json(cfg["model"])
    else:
        model = FaultModel(
            args.model,
            seed=args.seed,
            errors=args.errors,
            columns=args.columns,
            width=args.width,
            bursts=args.bursts,
        )
    policy_obj = cfg.get("policy", args.policy)
    if policy_obj in (None, "default"):
        policy = default_policy(code)
    elif isinstance(policy_obj, str):
        with open(policy_obj) as fh:
            policy = policy_from_json(json.load(fh))
    else:
        policy = policy_from_json(policy_obj)
    trials = int(cfg.get("trials", args.trials))
    shards = int(cfg.get("shards", args.shards))
    base = cfg.get("base", args.base)
    fmt = cfg.get("format", args.format)
    report = run_campaign(code, policy, model, trials, shards, base)
    if fmt == "csv":
        text = report.csv_header() + "\n" + report.csv_row() + "\n"
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    else:
        _emit(report.to_json(), args.output)
    return EXIT_OK


def _cmd_analyze(args) -> int:
    code = _load_code(args)
    _emit(analyze_urs(code), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="urscode",
        description="Unraveling Reed-Solomon codes: construction, decoding, reliability",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a code and emit its JSON")
    _add_code_opts(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("encode", help="systematic encode of K data symbols")
    _add_code_opts(p)
    p.add_argument("--data", required=True, help="K symbols as packed hex")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_encode)

    p = sub.add_parser("decode", help="decode a block; exit 3 if uncorrectable")
    _add_code_opts(p)
    p.add_argument("--block", required=True, help="N symbols as packed hex, column-major")
    p.add_argument("--decoder", choices=_DECODERS, default="cascade")
    p.add_argument("--ell", type=int, help="unraveling order for the chosen decoder")
    p.add_argument("--erase-column", type=int, action="append", dest="erase_column",
                   help="declare a column erased (repeatable)")
    p.add_argument("--policy", help="JSON policy file for the cascade")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_decode)

    p = sub.add_parser("unravel", help="emit the interleaved rows of a block")
    _add_code_opts(p)
    p.add_argument("--block", required=True)
    p.add_argument("--ell", type=int)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_unravel)

    p = sub.add_parser("simulate", help="run a fault-injection campaign")
    _add_code_opts(p)
    p.add_argument("--config", help="campaign config JSON (overrides flags)")
    p.add_argument("--model", default="single_column",
                   choices=["random_symbols", "single_column", "multi_column",
                            "column_plus_one", "dq_burst", "erased_column_plus_errors"])
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shards", type=int, default=1)
    p.add_argument("--errors", type=int, default=1)
    p.add_argument("--columns", type=int, default=1)
    p.add_argument("--width", type=int, default=2)
    p.add_argument("--bursts", type=int, default=1)
    p.add_argument("--policy", help="'default' or a JSON policy file")
    p.add_argument("--base", choices=["zero", "random"], default="zero")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="closed-form reliability table for a shape")
    _add_code_opts(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_analyze)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, IOError) as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
