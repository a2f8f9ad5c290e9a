"""Command-line entry point: one subcommand per pipeline stage.

Exit codes: 0 success, 1 domain error (infeasible layout, misaligned
final reading, failed run), 2 usage error.
"""

from __future__ import annotations

import argparse
import importlib.resources
import json
import os
import sys

from . import DEFAULT_IPD_MM, alignment, guidance, merge, ppmio, svgio, syncproto, templates
from .registry import RegistryError, load_registry, lookup, parse_device_specs


class CliError(ValueError):
    """Domain error surfaced to the user with exit code 1."""


def _load_specs(path: str | None):
    if path:
        return load_registry(path)
    data = importlib.resources.files("stereorig.data").joinpath("devices.json")
    return parse_device_specs(data.read_text(encoding="utf-8"))


def _layout_from_args(args) -> alignment.LayoutConfig:
    stack = {"depth": "depth-stacked"}.get(args.stack, args.stack)
    return alignment.LayoutConfig(
        axis=args.layout,
        stacking=stack,
        orientation=args.orientation,
        rotation_b=args.rotate_b,
    )


def _add_layout_flags(p: argparse.ArgumentParser, default_stack: str) -> None:
    p.add_argument("--layout", choices=("horizontal", "vertical"), default="vertical")
    p.add_argument(
        "--stack",
        choices=("coplanar", "depth-stacked", "depth"),
        default=default_stack,
    )
    p.add_argument("--orientation", choices=("portrait", "landscape"), default="portrait")
    p.add_argument("--rotate-b", type=int, choices=(0, 90, 180, 270), default=180)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--specs", metavar="FILE", help="device registry JSON (default: built-in)")
    p.add_argument("--ipd", type=float, default=DEFAULT_IPD_MM, metavar="MM")


def _cmd_base_model(args) -> int:
    specs = _load_specs(args.specs)
    a = lookup(specs, args.a)
    b = lookup(specs, args.b)
    model = alignment.compute_base_model(a, b, _layout_from_args(args), ipd=args.ipd)
    sys.stdout.write(alignment.model_to_json(model))
    return 0


def _cmd_gen_template(args) -> int:
    specs = _load_specs(args.specs)
    spec = lookup(specs, args.device)
    if args.mode == "two":
        base = alignment.compute_base_model(spec, spec, _layout_from_args(args), ipd=args.ipd)
        layout = templates.two_phone_layout(
            spec,
            base,
            velcro_mm=args.velcro,
            cardboard_mm=args.cardboard,
            strap_width=args.strap_width,
            fillet_radius=args.fillet,
        )
    elif args.mode == "three":
        layout = templates.three_phone_layout(spec, ipd=args.ipd)
    else:
        layout = templates.mirror_rig_layout(spec, ipd=args.ipd, fillet_radius=args.fillet)
    svg = svgio.render_svg(layout)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    sys.stderr.write(f"wrote {args.output}\n")
    return 0


def _cmd_align_check(args) -> int:
    pairs = guidance.load_reading_pairs(args.readings)
    status = None
    for i, (a, b) in enumerate(pairs):
        status = guidance.check_alignment(
            a, b, mag_tolerance=args.mag_tol, gyro_tolerance=args.gyro_tol
        )
        texts = guidance.instructions(status)
        tag = "aligned" if status.aligned else "misaligned"
        print(f"[{i}] {tag}: " + "; ".join(texts))
    return 0 if status is not None and status.aligned else 1


def _cmd_grid_overlay(args) -> int:
    specs = _load_specs(args.specs)
    spec = lookup(specs, args.device)
    base = alignment.compute_base_model(spec, spec, _layout_from_args(args), ipd=args.ipd)
    overlay = guidance.grid_overlay(base, spec, pitch_mm=args.pitch)
    print(json.dumps(guidance.overlay_to_dict(overlay), indent=2, sort_keys=True))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(guidance.overlay_to_svg(overlay))
        sys.stderr.write(f"wrote {args.svg}\n")
    return 0


def _cmd_simulate_sync(args) -> int:
    specs = _load_specs(args.specs)
    a = lookup(specs, args.a)
    b = lookup(specs, args.b)
    transport = syncproto.SimulatedTransport(
        base_latency=args.latency, jitter=args.jitter, loss_rate=args.loss
    )
    offsets = (args.offset_a, args.offset_b)
    pairing = syncproto.run_pairing(a, b, transport, seed=args.seed, clock_offsets=offsets)
    entries = list(pairing.transcript)
    state_a, state_b = pairing.state_a, pairing.state_b
    skew = None
    if args.capture is not None and state_a.phase is syncproto.Phase.CONFIGURED:
        cap = syncproto.run_capture_sync(
            (state_a, state_b),
            transport,
            args.capture,
            seed=args.seed + 1,
            clock_offsets=offsets,
        )
        entries.extend(cap.transcript)
        state_a, state_b = cap.state_a, cap.state_b
        skew = cap.skew
        if cap.skew is not None and args.duration > 0:
            frames = syncproto.run_frame_sync(
                (state_a, state_b),
                transport,
                args.duration,
                seed=args.seed + 2,
                clock_offsets=offsets,
            )
            entries.extend(frames.transcript)
            state_a, state_b = frames.state_a, frames.state_b
    sys.stdout.write(syncproto.transcript_text(entries))
    print(f"final: A={state_a.phase.value} B={state_b.phase.value}")
    if skew is not None:
        print(f"capture start skew: {skew:.3f} ms")
    failed = syncproto.Phase.FAILED
    return 1 if state_a.phase is failed or state_b.phase is failed else 0


def _cmd_merge(args) -> int:
    left = merge.load_stream(args.left, "left")
    right = merge.load_stream(args.right, "right")
    result = merge.pair_frames(left, right, args.tol)
    frames = merge.merge_pairs(result.pairs, args.mode)
    os.makedirs(args.output, exist_ok=True)
    entries = []
    for i, frame in enumerate(frames):
        name = f"{args.mode}_{i:04d}.ppm"
        path = os.path.join(args.output, name)
        ppmio.write_ppm(path, frame.pixels)
        entries.append((frame.timestamp, path))
    ppmio.write_manifest(os.path.join(args.output, "pairs.txt"), entries)
    print(
        f"paired {len(result.pairs)} frames "
        f"(dropped {len(result.dropped_left)} left, {len(result.dropped_right)} right) "
        f"-> {args.output}"
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stereorig",
        description="Phone stereo-rig tools: placement, templates, guidance, sync, merge.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("base-model", help="solve device B's placement and print it as JSON")
    _add_common(p)
    p.add_argument("--a", required=True, metavar="MODEL")
    p.add_argument("--b", required=True, metavar="MODEL")
    _add_layout_flags(p, default_stack="coplanar")
    p.set_defaults(func=_cmd_base_model)

    p = sub.add_parser("gen-template", help="write a printable SVG template")
    _add_common(p)
    p.add_argument("--mode", choices=("two", "three", "mirror"), required=True)
    p.add_argument("--device", required=True, metavar="MODEL")
    p.add_argument("--velcro", type=float, default=templates.DEFAULT_VELCRO_MM, metavar="MM")
    p.add_argument(
        "--cardboard", type=float, default=templates.DEFAULT_CARDBOARD_MM, metavar="MM"
    )
    p.add_argument(
        "--strap-width", type=float, default=templates.DEFAULT_STRAP_WIDTH_MM, metavar="MM"
    )
    p.add_argument("--fillet", type=float, default=0.0, metavar="MM")
    _add_layout_flags(p, default_stack="coplanar")
    p.add_argument("-o", "--output", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_gen_template)

    p = sub.add_parser("align-check", help="judge sensor reading pairs from a fixture file")
    p.add_argument("--readings", required=True, metavar="FILE")
    p.add_argument(
        "--mag-tol", type=float, default=guidance.DEFAULT_MAG_TOLERANCE_UT, metavar="UT"
    )
    p.add_argument(
        "--gyro-tol",
        type=float,
        default=guidance.DEFAULT_GYRO_TOLERANCE_DPS,
        metavar="DPS",
    )
    p.set_defaults(func=_cmd_align_check)

    p = sub.add_parser("grid-overlay", help="project a depth-stacked base onto the screen")
    _add_common(p)
    p.add_argument("--device", required=True, metavar="MODEL")
    _add_layout_flags(p, default_stack="depth-stacked")
    p.add_argument("--pitch", type=float, default=guidance.DEFAULT_GRID_PITCH_MM, metavar="MM")
    p.add_argument("--svg", metavar="FILE", help="also write a debug SVG")
    p.set_defaults(func=_cmd_grid_overlay)

    p = sub.add_parser("simulate-sync", help="run the pairing/capture protocol simulation")
    _add_common(p)
    p.add_argument("--a", default="J7-fixture", metavar="MODEL")
    p.add_argument("--b", default="A5-fixture", metavar="MODEL")
    p.add_argument("--latency", type=float, default=10.0, metavar="MS")
    p.add_argument("--jitter", type=float, default=0.0, metavar="MS")
    p.add_argument("--loss", type=float, default=0.0, metavar="P")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--capture", type=float, metavar="MS", help="propose capture after this delay")
    p.add_argument("--duration", type=float, default=0.0, metavar="MS", help="frame-sync length")
    p.add_argument("--offset-a", type=float, default=0.0, metavar="MS")
    p.add_argument("--offset-b", type=float, default=0.0, metavar="MS")
    p.set_defaults(func=_cmd_simulate_sync)

    p = sub.add_parser("merge", help="pair two PPM streams and write merged frames")
    p.add_argument("--left", required=True, metavar="MANIFEST")
    p.add_argument("--right", required=True, metavar="MANIFEST")
    p.add_argument("--mode", choices=("sbs", "anaglyph"), required=True)
    p.add_argument("--tol", type=float, default=20.0, metavar="MS")
    p.add_argument("-o", "--output", required=True, metavar="DIR")
    p.set_defaults(func=_cmd_merge)

    return parser


_DOMAIN_ERRORS = (
    CliError,
    RegistryError,
    alignment.InfeasibleLayoutError,
    templates.TemplateError,
    guidance.GuidanceError,
    merge.MergeError,
    ppmio.PpmError,
    OSError,
    ValueError,
)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
