"""Command-line interface: embed, extract, metrics, bench and capacity.

Exit codes: 0 success, 2 usage/params, 3 capacity, 4 format/I-O,
5 extraction integrity.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from .bench import BenchRunner
from .codec import AC_PER_BLOCK, HEADER_BITS, capacity, coefficient_slots, embed, extract
from .data_loader import DataLoader
from .errors import ParamsError, StegoError
from .image_blocks import load_image, save_image
from .metrics import evaluate, psnr
from .models import EmbedConfig, FractionalMapParams, Image, KeyMaterial

logger = logging.getLogger(__name__)

ENV_KEY = "STEGO_KEY"
ENV_X0 = "STEGO_X0"
ENV_NU = "STEGO_NU"
ENV_GAIN = "STEGO_GAIN"


def setup_logging(verbose: bool = False) -> None:
    """Configure stderr logging; secrets are never passed to any logger."""
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _load_config(args: argparse.Namespace) -> Dict[str, Any]:
    if getattr(args, "config", None):
        config = DataLoader.load_config_yaml(args.config)
    else:
        config = dict(DataLoader.CONFIG_DEFAULTS)
    for warning in DataLoader.validate_config(config):
        logger.warning(warning)
    return config


def _secret(value: Optional[str], env_name: str, label: str, required: bool = True) -> Optional[str]:
    if value is None:
        value = os.environ.get(env_name)
    if value is None and required:
        raise ParamsError(f"Missing {label}: pass --{label.replace('_', '-')} or set {env_name}")
    return value


def build_embed_config(args: argparse.Namespace, config: Dict[str, Any]) -> EmbedConfig:
    """Resolve flags, environment and config file into an EmbedConfig."""
    key = KeyMaterial.from_hex(_secret(args.key, ENV_KEY, "key"))
    gain = _secret(args.gain, ENV_GAIN, "gain", required=False)
    params = FractionalMapParams.from_strings(
        _secret(args.x0, ENV_X0, "x0"),
        _secret(args.nu, ENV_NU, "nu"),
        gain if gain is not None else str(config["gain"]),
    )
    quality = args.mu if args.mu is not None else config["mu"]
    mode = args.mode if args.mode is not None else config["mode"]
    return EmbedConfig(key=key, map_params=params, quality=quality, mode=mode)


def _load_stego(path: str, cfg: EmbedConfig):
    if cfg.mode == "coefficient":
        return DataLoader.load_coefficient_record(path)
    return load_image(path)


def _stego_image(path: str) -> Image:
    if DataLoader.is_coefficient_record(path):
        return DataLoader.load_coefficient_record(path).to_image()
    return load_image(path)


def cmd_embed(args: argparse.Namespace) -> int:
    config = _load_config(args)
    cfg = build_embed_config(args, config)
    cover = load_image(args.cover)
    message = DataLoader.load_message(args.message)

    stego = embed(cover, message, cfg)
    if cfg.mode == "coefficient":
        DataLoader.save_coefficient_record(stego, args.out)
    else:
        save_image(stego, args.out)

    print(f"Capacity: {capacity(cover)} bits")
    print(f"Payload: {len(message)} bits (+{HEADER_BITS} header bits)")
    if cfg.mode == "pixel":
        psnr_db, _, _ = psnr(cover, stego)
        print(f"PSNR: {psnr_db:.3f} dB")
    print(f"Stego written to {args.out}")
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    config = _load_config(args)
    cfg = build_embed_config(args, config)
    stego = _load_stego(args.stego, cfg)

    message = extract(stego, cfg)
    DataLoader.save_message(message, args.out)
    print(f"Recovered {len(message)} bits to {args.out}")
    return 0


def cmd_metrics(args: argparse.Namespace) -> int:
    config = _load_config(args)
    epsilon = args.epsilon if args.epsilon is not None else config["epsilon"]
    report = evaluate(load_image(args.cover), _stego_image(args.stego), epsilon)

    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        data = report.to_dict()
        print(f"PSNR:             {data['psnr_db']} dB")
        print(f"MSE:              {report.mse}")
        print(f"Peak (Xi):        {report.xi}")
        print(f"UIQI:             {report.uiqi}")
        print(f"Image fidelity:   {report.image_fidelity}")
        print(f"Relative entropy: {report.relative_entropy} ({report.security}, eps={epsilon:g})")
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    config = _load_config(args)
    cfg = build_embed_config(args, config)
    payload_bits = args.payload_bits if args.payload_bits is not None else config["payload_bits"]
    seed = args.seed if args.seed is not None else config["seed"]
    workers = args.workers if args.workers is not None else config["workers"]
    epsilon = args.epsilon if args.epsilon is not None else config["epsilon"]

    runner = BenchRunner(cfg, payload_bits=payload_bits, seed=seed, workers=workers, epsilon=epsilon)
    print(f"Payload seed: {seed}")
    run = runner.run(args.dataset)
    DataLoader.write_bench_csv(run, args.out)

    print(f"Processed {len(run.rows)} image(s), skipped {len(run.skipped)}")
    for name, reason in run.skipped:
        print(f"  skipped {name}: {reason}")
    for metric, summary in run.summaries.items():
        print(f"  {metric:<17} median={summary.median:.6g} q1={summary.q1:.6g} "
              f"q3={summary.q3:.6g} outliers={len(summary.outliers)}")
    print(f"CSV written to {args.out}")
    return 0


def cmd_capacity(args: argparse.Namespace) -> int:
    cover = load_image(args.cover)
    slots = coefficient_slots(AC_PER_BLOCK * cover.num_blocks)
    bits = capacity(cover)
    print(f"Image: {cover.width}x{cover.height}x{cover.channels}")
    print(f"Blocks: {cover.num_blocks}")
    print(f"Coefficient slots: {slots}")
    print(f"Maximum payload: {bits} bits ({bits // 8} bytes)")
    return 0


def _add_secret_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--key", help=f"128-bit key as 32 hex characters (or ${ENV_KEY})")
    parser.add_argument("--x0", help=f"map initial condition in (0,1) (or ${ENV_X0})")
    parser.add_argument("--nu", help=f"fractional order in (0,1] (or ${ENV_NU})")
    parser.add_argument("--gain", help=f"map nonlinearity gain in (0,4] (or ${ENV_GAIN})")
    parser.add_argument("--mu", type=float, help="quality factor in (50,100), default 75")
    parser.add_argument("--mode", choices=EmbedConfig.MODES, help="stego output mode, default pixel")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracstego",
        description="DCT-domain steganography with a fractional chaotic map",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="enable debug logging")
    parser.add_argument("--config", help="YAML file with non-secret settings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("embed", help="hide a message file in a cover image")
    p.add_argument("--cover", required=True)
    p.add_argument("--message", required=True)
    p.add_argument("--out", required=True)
    _add_secret_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("extract", help="recover a message file from a stego artifact")
    p.add_argument("--stego", required=True)
    p.add_argument("--out", required=True)
    _add_secret_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("metrics", help="compare a cover with a stego image")
    p.add_argument("--cover", required=True)
    p.add_argument("--stego", required=True)
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.add_argument("--epsilon", type=float, help="security threshold for the RE verdict")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("bench", help="benchmark a directory of cover images")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--payload-bits", type=int, help="payload size (default: maximum)")
    p.add_argument("--seed", type=int, help="payload seed (default 0)")
    p.add_argument("--workers", type=int, help="parallel workers (default 1)")
    p.add_argument("--epsilon", type=float, help="security threshold for the RE verdict")
    _add_secret_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("capacity", help="report the embedding capacity of a cover")
    p.add_argument("--cover", required=True)
    p.set_defaults(func=cmd_capacity)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    try:
        return args.func(args)
    except StegoError as e:
        print(f"error[{e.category}]: {e}", file=sys.stderr)
        return e.exit_code
