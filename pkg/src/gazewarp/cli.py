"""Operator entry point.

Subcommands:
  generate-session  write a 144-trial benchmark session file
  simulate          synthesize agent traces for a session and replay them
  replay            replay one trace against a scene file, emit events+metrics
  report            fold simulate/replay outputs into CSVs and figures
  serve             run the live session endpoint (and sandbox, if built)

Exit codes: 0 ok, 2 usage, 3 data error, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

from . import reports
from .agent import AgentProfile, synthesize_trace
from .docking import TrialSpec, load_session, make_session, make_trial, save_session, trial_scene
from .errors import GazewarpError, IncompleteTrialError, SchemaError
from .fsm import EngineConfig, Technique, write_event_log
from .replay import load_replay_scene, replay_scene_file, replay_trial
from .scene import scene_to_dict
from .trace import read_trace_file, write_trace_file

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4

_ERROR_CODES = {
    IncompleteTrialError: "incomplete-trial",
    SchemaError: "schema",
}


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise SchemaError("file not found", path=path)
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", path=path) from None


def _load_config(path: str | None) -> EngineConfig:
    if path is None:
        return EngineConfig()
    return EngineConfig.from_dict(_load_json(path))


def _load_profile(path: str | None) -> dict:
    return _load_json(path) if path is not None else {}


def cmd_generate_session(args) -> int:
    entries = make_session(args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        save_session(args.seed, entries, fh)
    print(f"wrote {len(entries)} trials to {out}")
    return EXIT_OK


def _simulate_one(payload: tuple) -> dict:
    index, technique_value, block, spec_doc, profile_doc, config_doc, out_dir = payload
    technique = Technique(technique_value)
    spec = TrialSpec.from_dict(spec_doc)
    config = replace(EngineConfig.from_dict(config_doc), technique=technique)
    profile = AgentProfile.from_dict({**profile_doc, "technique": technique.value})
    frames = synthesize_trace(spec, profile, config)
    trial = make_trial(spec)
    result = replay_trial(frames, trial, config)

    trials_dir = Path(out_dir) / "trials"
    trials_dir.mkdir(parents=True, exist_ok=True)
    stem = f"trial_{index:03d}"
    write_trace_file(frames, str(trials_dir / f"{stem}.trace.jsonl"))
    with open(trials_dir / f"{stem}.events.jsonl", "w", encoding="utf-8") as fh:
        write_event_log(result.events, fh)
    scene_doc = scene_to_dict(trial_scene(trial))
    scene_doc["trial"] = spec.to_dict()
    (trials_dir / f"{stem}.scene.json").write_text(
        json.dumps(scene_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return {
        "trial": index,
        "technique": technique.value,
        "block": block,
        "object_size_deg": spec.object_size_deg,
        "rotation_magnitude_deg": spec.rotation_magnitude_deg,
        "displacement_dir": spec.displacement_dir.value,
        "axis_pair": spec.axis_pair.value,
        "completed_at_ms": result.trial.completed_at_ms,
        **result.metrics.to_dict(),
    }


def cmd_simulate(args) -> int:
    seed, entries = load_session(args.session)
    profile_doc = _load_profile(args.profile)
    config_doc = _load_config(args.config).to_dict()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    payloads = [
        (i, e.technique.value, e.block, e.spec.to_dict(), profile_doc, config_doc, str(out_dir))
        for i, e in enumerate(entries)
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_simulate_one, payloads))
    else:
        rows = [_simulate_one(p) for p in payloads]
    with open(out_dir / "results.jsonl", "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    manifest = {
        "schema": 1,
        "participant_seed": seed,
        "trial_count": len(rows),
        "profile": profile_doc,
        "config": config_doc,
        "session_file": str(args.session),
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    completed = sum(1 for r in rows if r["completed_at_ms"] is not None)
    print(f"simulated {len(rows)} trials ({completed} completed) into {out_dir}")
    return EXIT_OK


def cmd_replay(args) -> int:
    frames = read_trace_file(args.trace, smooth_hand=args.smooth_hand)
    scene, spec = load_replay_scene(args.scene)
    if spec is None:
        raise SchemaError("scene file carries no trial block", path=args.scene, field="trial")
    config = _load_config(args.config)
    result = replay_scene_file(frames, scene, spec, config)
    events_path = Path(args.events)
    events_path.parent.mkdir(parents=True, exist_ok=True)
    with open(events_path, "w", encoding="utf-8") as fh:
        write_event_log(result.events, fh)
    metrics_doc = {
        "completed_at_ms": result.trial.completed_at_ms,
        "frames_consumed": result.frames_consumed,
        **result.metrics.to_dict(),
    }
    metrics_path = Path(args.metrics)
    metrics_path.parent.mkdir(parents=True, exist_ok=True)
    metrics_path.write_text(
        json.dumps(metrics_doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"trial completed at {result.trial.completed_at_ms} ms")
    return EXIT_OK


def cmd_report(args) -> int:
    manifest = reports.write_report(
        Path(args.in_dir) / "results.jsonl", Path(args.out), figures=not args.no_figures
    )
    print(
        f"wrote {manifest['trials_csv']} ({manifest['trial_count']} trials), "
        f"{manifest['aggregate_csv']} ({manifest['condition_cells']} cells), "
        f"{len(manifest['figures'])} figures"
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    from .server import serve

    serve(args.listen, static_dir=args.frontend)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gazewarp",
        description="Benchmark harness for gaze-hand proxy summoning: generate "
        "docking sessions, simulate scripted agents, replay traces, report "
        "metrics, and serve the live session endpoint.",
        epilog="Exit codes: 0 ok, 2 usage, 3 data error, 4 internal error.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-session", help="write a 144-trial session file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate_session)

    p = sub.add_parser("simulate", help="synthesize and replay agent traces for a session")
    p.add_argument("--session", required=True)
    p.add_argument("--profile", default=None, help="agent profile JSON (defaults built in)")
    p.add_argument("--config", default=None, help="engine config JSON (defaults built in)")
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("replay", help="replay one trace file against a scene")
    p.add_argument("--trace", required=True)
    p.add_argument("--scene", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--events", required=True)
    p.add_argument("--metrics", required=True)
    p.add_argument("--smooth-hand", action="store_true", help="1-euro smooth hand positions")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("report", help="per-trial CSV + condition aggregate + figures")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="run the live session endpoint")
    p.add_argument("--listen", default="127.0.0.1:8763")
    p.add_argument("--frontend", default=None, help="static sandbox directory to host at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GazewarpError as exc:
        code = next(
            (name for klass, name in _ERROR_CODES.items() if isinstance(exc, klass)), "data"
        )
        print(f"error[{code}]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"error[missing-file]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error[internal]: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
