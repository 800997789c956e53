"""Deterministic offline command line: render, inspect, serve.

Every subcommand except ``serve`` is a pure function of its flags: no wall
clock, no ambient randomness. Summary lines are key=value for scripting.
Exit codes: 0 success, 1 I/O failure, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .arp import note_counts, render_arp, events_to_jsonl
from .lfo import dominant_period, render_lfo, write_waveform_bin, write_waveform_csv
from .midifile import write_smf
from .reservoir import (
    ConfigError,
    NetworkConfig,
    Scales,
    effective_matrices,
    init_network,
    spectral_radius_estimate,
)

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2


def _add_network_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="network weight seed")
    p.add_argument("--neurons", type=int, default=100, help="reservoir size N")
    p.add_argument("--density", type=float, default=1.0, help="recurrent density in (0,1]")
    p.add_argument("--spectral-radius", type=float, default=0.95)
    p.add_argument("--leak-rate", type=float, default=0.1)
    p.add_argument("--input-scale", type=float, default=0.0)
    p.add_argument("--feedback-scale", type=float, default=1.0)
    p.add_argument("--bias-scale", type=float, default=0.2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="remi",
        description="Fixed-weight reservoir networks as MIDI LFO and arpeggiator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lfo-render", help="render an LFO waveform to a file")
    _add_network_flags(p)
    p.add_argument("--steps", type=int, default=1024)
    p.add_argument("--out", default="lfo.csv", help="output path")
    p.add_argument("--format", choices=("csv", "bin"), default="csv")

    p = sub.add_parser("arp-render", help="render an arpeggio to JSON lines or SMF")
    _add_network_flags(p)
    p.add_argument("--steps", type=int, default=64)
    p.add_argument("--notes", default="", help="comma-separated held MIDI pitches")
    p.add_argument("--beta", type=float, default=2.0, help="confidence (0 = uniform)")
    p.add_argument("--rng-seed", type=int, default=0, help="note-draw RNG seed")
    p.add_argument("--gate", type=float, default=0.8)
    p.add_argument("--velocity", type=int, default=100)
    p.add_argument("--max-keys", type=int, default=8, help="key capacity m")
    p.add_argument("--steps-per-beat", type=int, default=4, help="SMF step grid")
    p.add_argument("--out", default="arp.jsonl")
    p.add_argument("--format", choices=("json", "smf"), default="json")

    p = sub.add_parser("inspect", help="report network dimensions, radius, norms")
    _add_network_flags(p)

    p = sub.add_parser("serve", help="run the live control WebSocket service")
    _add_network_flags(p)
    p.add_argument("--port", type=int, default=7421)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--mode", choices=("lfo", "arp"), default="lfo")
    p.add_argument("--max-keys", type=int, default=8)
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--manual-clock", action="store_true",
                   help="no timer; clients drive ticks with step messages")
    return parser


def _scales(args) -> Scales:
    return Scales(
        input_scale=args.input_scale,
        spectral_radius=args.spectral_radius,
        feedback_scale=args.feedback_scale,
        bias_scale=args.bias_scale,
        leak_rate=args.leak_rate,
    )


def _config(args, feedback_dim=1, output_dim=1) -> NetworkConfig:
    return NetworkConfig(
        neurons=args.neurons,
        input_dim=0,
        feedback_dim=feedback_dim,
        output_dim=output_dim,
        recurrent_density=args.density,
        seed=args.seed,
    )


def _usage_error(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def cmd_lfo_render(args) -> int:
    if args.steps < 1:
        return _usage_error("--steps must be >= 1")
    try:
        waveform = render_lfo(_config(args), _scales(args), steps=args.steps)
    except ConfigError as exc:
        return _usage_error(str(exc))
    try:
        if args.format == "csv":
            write_waveform_csv(waveform, args.out)
        else:
            write_waveform_bin(waveform, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    period = dominant_period(waveform) if waveform.size >= 16 else None
    print(
        f"steps={args.steps} min={waveform.min():.9f} max={waveform.max():.9f} "
        f"period={period if period is not None else 'none'}"
    )
    return EXIT_OK


def cmd_arp_render(args) -> int:
    if args.steps < 1:
        return _usage_error("--steps must be >= 1")
    if not args.notes.strip():
        return _usage_error("--notes is empty; pass held pitches like --notes 60,64,67")
    try:
        pitches = [int(s) for s in args.notes.split(",") if s.strip()]
    except ValueError:
        return _usage_error(f"--notes must be comma-separated integers, got {args.notes!r}")
    if len(set(pitches)) > args.max_keys:
        return _usage_error(
            f"{len(set(pitches))} distinct notes exceed --max-keys {args.max_keys}"
        )
    if args.steps_per_beat < 1:
        return _usage_error("--steps-per-beat must be >= 1")
    try:
        events = render_arp(
            _config(args, feedback_dim=args.max_keys, output_dim=args.max_keys),
            _scales(args),
            rng_seed=args.rng_seed,
            pitches=pitches,
            beta=args.beta,
            steps=args.steps,
            gate=args.gate,
            velocity=args.velocity,
        )
    except (ConfigError, ValueError) as exc:
        return _usage_error(str(exc))
    try:
        if args.format == "json":
            with open(args.out, "w") as f:
                f.write(events_to_jsonl(events))
        else:
            write_smf(events, args.steps_per_beat, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    counts = note_counts(events)
    counts_str = ",".join(f"{p}:{c}" for p, c in counts.items())
    print(f"steps={args.steps} events={len(events)} counts={counts_str}")
    return EXIT_OK


def cmd_inspect(args) -> int:
    try:
        net = init_network(_config(args), _scales(args))
    except ConfigError as exc:
        return _usage_error(str(exc))
    w_in, w, w_fb, w_out, b = effective_matrices(net)
    report = {
        "neurons": net.config.neurons,
        "density": net.config.recurrent_density,
        "seed": net.config.seed,
        "base_spectral_radius": net.base_spectral_radius,
        "achieved_spectral_radius": spectral_radius_estimate(w),
        "norms": {
            "w_in": float(np.linalg.norm(w_in)),
            "w": float(np.linalg.norm(w)),
            "w_fb": float(np.linalg.norm(w_fb)),
            "w_out": float(np.linalg.norm(w_out)),
            "b": float(np.linalg.norm(b)),
        },
    }
    print(json.dumps(report, indent=2))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import run_server
    from .service import SessionController

    try:
        controller = SessionController(
            seed=args.seed,
            neurons=args.neurons,
            density=args.density,
            max_keys=args.max_keys,
            rng_seed=args.rng_seed,
            scales=_scales(args),
            mode=args.mode,
        )
    except ConfigError as exc:
        return _usage_error(str(exc))
    run_server(controller, host=args.host, port=args.port, manual_clock=args.manual_clock)
    return EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("REMI_LOG", "WARNING").upper())
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    handlers = {
        "lfo-render": cmd_lfo_render,
        "arp-render": cmd_arp_render,
        "inspect": cmd_inspect,
        "serve": cmd_serve,
    }
    return handlers[args.command](args)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
