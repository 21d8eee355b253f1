"""Command-line entry points: fit, replay, simulate, predict, listen, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .calibration import (
    CalibrationProfile,
    derive_timing_table,
    fit_profile,
    load_profile,
    save_profile,
    synth_profile,
    TimingTable,
)
from .core import PadSpec
from .layout import Layout, default_layout
from .lexicon import Lexicon, builtin_lexicon, load_lexicon, parse_lexicon_lines
from .replay import replay_log
from .sessionlog import gestures_only, read_session_log
from .simulate import StrokeSynthesizer, noise_sweep


def _pad_arg(value: str) -> PadSpec:
    try:
        w, h = value.lower().split("x")
        return PadSpec(width=float(w), height=float(h))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT in mm, got {value!r}: {e}")


def _load_layout(path: str | None) -> Layout:
    return Layout.load(path) if path else default_layout()


def _load_profile_arg(path: str | None, layout: Layout, pad: PadSpec | None = None
                      ) -> CalibrationProfile:
    if path:
        return load_profile(path)
    return synth_profile(layout, pad or PadSpec())


def _load_lexicon_arg(path: str | None) -> Lexicon:
    return load_lexicon(path) if path else builtin_lexicon()


def cmd_fit(args: argparse.Namespace) -> int:
    layout = _load_layout(args.layout)
    entries = read_session_log(args.log)
    records = gestures_only(entries)
    profile, report = fit_profile(records, layout, args.pad)
    save_profile(args.out, profile)
    print(f"fitted {len(profile.models)} key models from {report.retained_records}"
          f"/{report.total_records} records ({report.retention_rate:.1%} retained)")
    for key, thumb, reason in report.omitted_groups:
        print(f"  omitted {key}/{thumb}: {reason}")
    if args.timing_out:
        table = derive_timing_table(records, args.pad)
        table.save(args.timing_out)
        print(f"wrote timing table with {len(table.entries)} entries to {args.timing_out}")
    print(f"wrote profile to {args.out}")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    layout = _load_layout(args.layout)
    profile = _load_profile_arg(args.profile, layout)
    lexicon = None if args.no_predictions else _load_lexicon_arg(args.lexicon)
    entries = read_session_log(args.log)
    report = replay_log(entries, profile, layout, lexicon,
                        predictions=not args.no_predictions)
    for p in report.phrases:
        rates = p.rates or {"uncorrected": 0.0, "corrected": 0.0}
        print(f"  {p.presented!r} -> {p.transcribed!r}  "
              f"{p.wpm:.2f} WPM  uncorrected {rates['uncorrected']:.1%}  "
              f"corrected {rates['corrected']:.1%}")
    if report.phrases:
        print(f"{len(report.phrases)} phrases, mean {report.mean_wpm:.2f} WPM")
    else:
        print(f"no phrase markers; decoded text: {report.committed_text!r}")
    if args.report:
        Path(args.report).write_text(json.dumps(report.to_dict(), indent=2) + "\n")
        print(f"wrote report to {args.report}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    layout = _load_layout(args.layout)
    profile = _load_profile_arg(args.profile, layout)
    synth = StrokeSynthesizer(profile, layout)
    lambdas = args.noise or [0.0, 0.5, 1.0, 2.0]
    seeds = [args.seed + i for i in range(args.runs)]
    if args.phrases:
        text = Path(args.phrases).read_text()
        chars = sum(len(line.strip()) for line in text.splitlines() if line.strip())
        chars = max(chars, 1)
    else:
        chars = args.chars
    results = noise_sweep(synth, lambdas, seeds, chars_per_run=chars)
    print(f"decode accuracy over {chars} characters x {len(seeds)} seeds:")
    for lam in lambdas:
        print(f"  noise {lam:g}: {results[lam]:.1%}")
    if args.report:
        Path(args.report).write_text(json.dumps(
            {str(k): v for k, v in results.items()}, indent=2) + "\n")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    from .expert import corpus_prediction

    layout = _load_layout(args.layout)
    timing = TimingTable.load(args.timing)
    with open(args.corpus, encoding="utf-8") as f:
        lex = parse_lexicon_lines(f)
    corpus = sorted(lex.counts.items())
    stats = corpus_prediction(corpus, timing, layout.thumb_map)
    out = {
        "total_words": stats.total_words,
        "total_chars": stats.total_chars,
        "total_seconds": stats.total_seconds,
        "predicted_wpm": stats.predicted_wpm,
    }
    print(json.dumps(out, indent=2))
    return 0


def cmd_listen(args: argparse.Namespace) -> int:
    from .sessionlog import write_session_log
    from .calibration import GestureLogRecord
    from .tuio import listen_udp

    collected = []

    def on_gesture(g) -> None:
        collected.append(GestureLogRecord(gesture=g))
        print(f"gesture: {len(g.samples)} samples, pointer {g.pointer_id}")

    print(f"listening for TUIO on udp:{args.port} (pad {args.pad.width}x{args.pad.height} mm); "
          "Ctrl-C to stop")
    try:
        stats = listen_udp(args.port, args.pad, on_gesture=on_gesture,
                           max_packets=args.max_packets)
    except KeyboardInterrupt:
        stats = None
    if args.out:
        write_session_log(args.out, collected)
        print(f"wrote {len(collected)} gestures to {args.out}")
    if stats:
        print(f"frames: {stats.frames}, malformed packets: {stats.malformed_packets}, "
              f"duplicates: {stats.duplicate_frames}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import ServiceConfig, build_app, start_tuio_bridge

    layout = _load_layout(args.layout)
    profile = _load_profile_arg(args.profile, layout)
    lexicon = None if args.no_predictions else _load_lexicon_arg(args.lexicon)
    config = ServiceConfig(profile=profile, layout=layout, lexicon=lexicon,
                           predictions_enabled=not args.no_predictions)
    static_dir = args.ui_dir
    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = str(candidate) if candidate.is_dir() else None
    app = build_app(config, static_dir)
    if args.tuio_port is not None:
        start_tuio_bridge(app, config, args.tuio_port)
        print(f"bridging TUIO from udp:{args.tuio_port}")
    print(f"serving on http://{args.host}:{args.port}/ (WebSocket at /ws)")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dusk",
        description="Dual-handed stroke keyboard: calibration, decoding, metrics, live service.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a calibration profile from a session log")
    p.add_argument("log", help="session log (JSONL)")
    p.add_argument("-o", "--out", required=True, help="output profile JSON path")
    p.add_argument("--layout", help="layout JSON (default: built-in QWERTY)")
    p.add_argument("--pad", type=_pad_arg, default=PadSpec(), help="pad size WxH in mm")
    p.add_argument("--timing-out", help="also derive a timing table CSV")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("replay", help="replay a session log and report metrics")
    p.add_argument("log")
    p.add_argument("--profile", help="profile JSON (default: synthetic)")
    p.add_argument("--layout")
    p.add_argument("--lexicon", help="word list (default: built-in)")
    p.add_argument("--no-predictions", action="store_true")
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("simulate", help="synthetic decode-accuracy sweep")
    p.add_argument("--profile")
    p.add_argument("--layout")
    p.add_argument("--noise", type=float, action="append",
                   help="noise factor; repeat for a sweep (default 0 0.5 1 2)")
    p.add_argument("--phrases", help="text file; character count sets the run length")
    p.add_argument("--chars", type=int, default=500, help="characters per run")
    p.add_argument("--runs", type=int, default=3, help="seeds per noise level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", help="write accuracies as JSON")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("predict", help="expert-model WPM prediction for a corpus")
    p.add_argument("--timing", required=True, help="timing table CSV")
    p.add_argument("--corpus", required=True, help="word<TAB>count file")
    p.add_argument("--layout")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("listen", help="receive TUIO over UDP and log gestures")
    p.add_argument("--port", type=int, default=3333)
    p.add_argument("--pad", type=_pad_arg, default=PadSpec())
    p.add_argument("-o", "--out", help="write gestures to this JSONL file")
    p.add_argument("--max-packets", type=int, help="stop after this many packets")
    p.set_defaults(func=cmd_listen)

    p = sub.add_parser("serve", help="run the WebSocket typing service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--profile")
    p.add_argument("--layout")
    p.add_argument("--lexicon")
    p.add_argument("--no-predictions", action="store_true")
    p.add_argument("--ui-dir", help="directory with built UI assets (default: frontend/dist)")
    p.add_argument("--tuio-port", type=int, help="also ingest TUIO from this UDP port")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
