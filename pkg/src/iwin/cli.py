"""Command-line interface: info, segment, window, dice, phantom, serve.

Each subcommand is a thin composition of library operations. Failures print
the error class name on stderr and exit 1; ``--json`` switches stdout to a
machine-readable document.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .errors import IwinError
from .phantom import PhantomSpec, generate, to_stored_values
from .pgm import parse_pgm, write_pgm
from .store import ingest_bytes
from .suppress import (
    StructuringElement,
    SuppressionParams,
    dice,
    load_external_mask,
    mask_to_pgm_samples,
    suppress_background,
)
from .window import AutoWindowStrategy, apply_window, auto_window


def _load_study(path: str):
    """Read a DICOM or PGM file (sniffed by magic) into ingestion outputs."""
    data = Path(path).read_bytes()
    return ingest_bytes(data)


def _load_mask_file(path: str, img_shape):
    pgm = parse_pgm(Path(path).read_bytes())
    return load_external_mask(img_shape, pgm)


def _parse_threshold(text: str):
    if text == "otsu":
        return "otsu"
    if text.startswith("fixed:"):
        return float(text.split(":", 1)[1])
    raise ValueError(f"threshold must be 'otsu' or 'fixed:V', got {text!r}")


def _parse_keep(text: str):
    if text == "largest":
        return "largest"
    if text.startswith("area:"):
        return float(text.split(":", 1)[1])
    raise ValueError(f"keep must be 'largest' or 'area:FRAC', got {text!r}")


def _suppression_params(args) -> SuppressionParams:
    return SuppressionParams(
        threshold=_parse_threshold(args.threshold),
        close_element=StructuringElement.disk(args.close_radius),
        fill_holes=not args.no_fill_holes,
        keep=_parse_keep(args.keep),
    )


def cmd_info(args) -> int:
    kind, stored, image, photometric, window, warnings = _load_study(args.input)
    doc = {
        "format": kind,
        "width": image.width,
        "height": image.height,
        "bits_allocated": stored.bits_allocated,
        "bits_stored": stored.bits_stored,
        "pixel_representation": stored.pixel_representation,
        "photometric": photometric,
        "value_min": image.value_min,
        "value_max": image.value_max,
        "embedded_window": {"ww": window.width, "wl": window.level} if window else None,
        "warnings": warnings,
    }
    if args.json:
        print(json.dumps(doc))
    else:
        for key, value in doc.items():
            print(f"{key}: {value}")
    return 0


def cmd_segment(args) -> int:
    _, _, image, _, _, _ = _load_study(args.input)
    mask = suppress_background(image, _suppression_params(args))
    Path(args.output).write_bytes(write_pgm(mask_to_pgm_samples(mask)))
    if args.json:
        print(json.dumps({"foreground_pixels": mask.count, "output": args.output}))
    else:
        print(f"wrote mask with {mask.count} foreground pixels to {args.output}")
    return 0


def cmd_window(args) -> int:
    _, _, image, photometric, _, _ = _load_study(args.input)
    strategy = AutoWindowStrategy.parse(args.strategy)
    mask = None
    if args.mask:
        mask = _load_mask_file(args.mask, image.values.shape)
    elif args.auto_segment:
        mask = suppress_background(image)
    settings = auto_window(image, mask, strategy)
    doc = {
        "ww": settings.width,
        "wl": settings.level,
        "strategy": strategy.key(),
        "suppress": mask is not None,
    }
    if args.output:
        display = apply_window(image, settings, photometric, mask)
        Path(args.output).write_bytes(write_pgm(display.samples))
        doc["output"] = args.output
    if args.json:
        print(json.dumps(doc))
    else:
        print(f"ww={settings.width:g} wl={settings.level:g}")
    return 0


def cmd_dice(args) -> int:
    pgm_a = parse_pgm(Path(args.a).read_bytes())
    pgm_b = parse_pgm(Path(args.b).read_bytes())
    mask_a = load_external_mask((pgm_a.height, pgm_a.width), pgm_a)
    mask_b = load_external_mask((pgm_a.height, pgm_a.width), pgm_b)
    score = dice(mask_a, mask_b)
    if args.json:
        print(
            json.dumps(
                {
                    "dice": score.value,
                    "a": score.a_count,
                    "b": score.b_count,
                    "intersection": score.intersection,
                }
            )
        )
    else:
        print(f"{score.value:g}")
    return 0


def cmd_phantom(args) -> int:
    spec = PhantomSpec(
        width=args.width,
        height=args.height,
        disk_radius=args.radius,
        tissue_mean=args.tissue_mean,
        tissue_sigma=args.tissue_sigma,
        background_sigma=args.background_sigma,
        seed=args.seed,
    )
    image, truth = generate(spec)
    Path(args.output).write_bytes(write_pgm(to_stored_values(image)))
    if args.truth:
        Path(args.truth).write_bytes(write_pgm(mask_to_pgm_samples(truth)))
    print(f"wrote {spec.width}x{spec.height} phantom (seed {spec.seed}) to {args.output}")
    return 0


def resolve_serve_config(args):
    """Flags win over IWIN_PORT / IWIN_STORE_DIR, which win over defaults."""
    from .service import ServiceConfig

    port = args.port if args.port is not None else int(os.environ.get("IWIN_PORT", "8000"))
    store_dir = args.store_dir or os.environ.get("IWIN_STORE_DIR") or None
    return ServiceConfig(port=port, store_dir=Path(store_dir) if store_dir else None)


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    config = resolve_serve_config(args)
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=config.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwin", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print image metadata")
    p.add_argument("--input", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("segment", help="run the builtin background suppression")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", default="otsu", help="otsu | fixed:V")
    p.add_argument("--close-radius", type=float, default=2.0)
    p.add_argument("--no-fill-holes", action="store_true")
    p.add_argument("--keep", default="largest", help="largest | area:FRAC")
    p.add_argument("--output", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("window", help="compute (and optionally render) WW/WL")
    p.add_argument("--input", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--mask", help="mask PGM restricting the computation")
    group.add_argument("--auto-segment", action="store_true",
                       help="compute the mask with the builtin pipeline first")
    p.add_argument("--strategy", default="percentile:1,99",
                   help="minmax | percentile:LO,HI | meanstd:K")
    p.add_argument("--output", help="write the windowed 8-bit render to this PGM")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_window)

    p = sub.add_parser("dice", help="overlap score between two mask PGMs")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_dice)

    p = sub.add_parser("phantom", help="generate a synthetic phantom + ground truth")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--truth")
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--radius", type=float, default=80.0)
    p.add_argument("--tissue-mean", type=float, default=800.0)
    p.add_argument("--tissue-sigma", type=float, default=50.0)
    p.add_argument("--background-sigma", type=float, default=30.0)
    p.set_defaults(func=cmd_phantom)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=None, help="default: $IWIN_PORT or 8000")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--store-dir", default=None, help="default: $IWIN_STORE_DIR or none")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IwinError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
