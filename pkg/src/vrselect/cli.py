"""Command-line entry points.

Verbs: plan, run, replay, filter, summarize, serve, lexicon, scene.
The summarize verb writes the summary CSV and renders the bar figures
into the same directory.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional

from . import harness, nlu, replay, report
from .scene import ColorKind, PerplexityLevel, Ray, ShapeKind, generate_scene, serialize_scene
from .session import SessionError, TrialPhase, make_adhoc_session, make_plan_session


def _load_lexicon(path: Optional[str]) -> nlu.Lexicon:
    if path:
        return nlu.load_lexicon_file(path)
    return nlu.default_lexicon()


def _cmd_plan(args: argparse.Namespace) -> int:
    plan = harness.build_plan(args.participant, args.order)
    lines = []
    for i, s in enumerate(plan.specs):
        lines.append(
            "%3d %s %s %s n=%d set=%d %s seed=%d target=%s/%s"
            % (
                i,
                s.participant,
                s.technique.value,
                s.perplexity.value,
                s.num_targets,
                s.set_index,
                s.phase.value,
                s.scene_seed,
                s.target_pair[0].value,
                s.target_pair[1].value,
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(plan.specs)} specs to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_scene(args: argparse.Namespace) -> int:
    override = None
    if args.target:
        shape_tok, color_tok = args.target.split("/", 1)
        override = (ShapeKind(shape_tok), ColorKind(color_tok))
    scene = generate_scene(PerplexityLevel(args.level), args.targets, args.seed, override)
    text = serialize_scene(scene)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {len(scene.objects)} objects to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_lexicon(args: argparse.Namespace) -> int:
    text = nlu.dump_lexicon(_load_lexicon(args.lexicon))
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote lexicon to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_replay(args: argparse.Namespace) -> int:
    plan = harness.build_plan(args.participant, args.order)
    if args.script:
        script = replay.parse_script(Path(args.script).read_text(encoding="utf-8"))
    else:
        script = replay.build_auto_script(plan)
    records = replay.replay_script(script, plan, lexicon=_load_lexicon(args.lexicon))
    text = harness.serialize_records(records)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"replayed {len(records)} trials to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_filter(args: argparse.Namespace) -> int:
    records = harness.parse_records(Path(args.records).read_text(encoding="utf-8"))
    completed = [r for r in records if r.outcome is harness.Outcome.COMPLETED]
    kept, removed = harness.filter_outliers(completed, sd_limit=args.sd_limit)
    Path(args.out).write_text(harness.serialize_records(kept), encoding="utf-8")
    print(f"kept {len(kept)} of {len(completed)} completed records ({len(removed)} removed)")
    if args.removed_out:
        Path(args.removed_out).write_text(harness.serialize_records(removed), encoding="utf-8")
    return 0


def _cmd_summarize(args: argparse.Namespace) -> int:
    records = harness.parse_records(Path(args.records).read_text(encoding="utf-8"))
    completed = [r for r in records if r.outcome is harness.Outcome.COMPLETED]
    kept, removed = harness.filter_outliers(completed, sd_limit=args.sd_limit)
    summaries = harness.summarize(kept, removed)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = report.write_summary_csv(summaries, out_dir / "summary.csv")
    figures = report.render_figures(summaries, out_dir)
    print(f"wrote {csv_path}")
    for fig in figures:
        print(f"wrote {fig}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(lexicon=_load_lexicon(args.lexicon), static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_RUN_HELP = """commands:
  start                  begin the countdown (plan mode)
  say <utterance>        submit a selection command
  ray <ox oy oz dx dy dz>  cast a selection ray
  aim <ox oy oz dx dy dz>  freeze the minimap cone (discpim)
  pick <x y>             pick from the frozen minimap (discpim)
  confirm | abort | next   trial controls
  panel | scene | status   inspect state
  quit
"""


def _cmd_run(args: argparse.Namespace) -> int:
    lexicon = _load_lexicon(args.lexicon)
    if args.participant:
        plan = harness.build_plan(args.participant, args.order)
        session = make_plan_session(plan, lexicon=lexicon)
    else:
        session = make_adhoc_session(
            harness.Technique(args.technique),
            PerplexityLevel(args.level),
            args.targets,
            args.seed,
            lexicon=lexicon,
        )
    print(f"session {session.id} ({session.technique.value}); type 'help' for commands")
    while True:
        try:
            line = input("> ").strip()
        except EOFError:
            break
        if not line:
            continue
        cmd, _, rest = line.partition(" ")
        try:
            if cmd == "quit":
                break
            elif cmd == "help":
                print(_RUN_HELP, end="")
            elif cmd == "say":
                delta = session.submit_utterance(rest)
                _print_delta(delta)
            elif cmd == "ray":
                v = [float(p) for p in rest.split()]
                delta = session.submit_ray(Ray((v[0], v[1], v[2]), (v[3], v[4], v[5])))
                _print_delta(delta)
            elif cmd == "aim":
                v = [float(p) for p in rest.split()]
                session.aim_minimap((v[0], v[1], v[2]), (v[3], v[4], v[5]))
                icons = session.minimap_payload()["icons"]
                print(f"minimap frozen with {len(icons)} icons")
            elif cmd == "pick":
                x, y = (float(p) for p in rest.split())
                delta = session.submit_map_pick((x, y))
                _print_delta(delta)
            elif cmd in ("start", "confirm", "abort", "next"):
                delta = session.trial_control(cmd)
                _print_delta(delta)
            elif cmd == "panel":
                payload = session.snapshot_delta().to_payload()["panel"]
                print(payload["recognized_text"])
                for entry in payload["entries"]:
                    print(f"  {entry['id']} {entry['color']} {entry['shape']}")
            elif cmd == "scene":
                sys.stdout.write(serialize_scene(session.scene))
            elif cmd == "status":
                print(session.trial_status())
            else:
                print(f"unknown command {cmd!r}; type 'help'")
        except SessionError as err:
            print(f"error: {type(err).__name__}: {err}")
        except ValueError as err:
            print(f"error: {err}")
        if session.trial_phase() is TrialPhase.FINISHED:
            print("plan finished")
    if session.records and args.records_out:
        Path(args.records_out).write_text(
            harness.serialize_records(session.records), encoding="utf-8"
        )
        print(f"wrote {len(session.records)} records to {args.records_out}")
    return 0


def _print_delta(delta) -> None:
    payload = delta.to_payload()
    changed = ", ".join(f"{c['id']}={'+' if c['selected'] else '-'}" for c in payload["changed"])
    bits = [f"seq={payload['seq']}"]
    if changed:
        bits.append(changed)
    if payload["notice"]:
        bits.append(payload["notice"])
    if payload["tone"]:
        bits.append("*tone*")
    bits.append(f"selected={len(payload['panel']['entries'])}")
    print("  ".join(bits))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vrselect")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("plan", help="print a participant's counterbalanced plan")
    p.add_argument("--participant", required=True)
    p.add_argument("--order", type=int, required=True, help="order index 0..23")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_plan)

    p = sub.add_parser("scene", help="generate and print a scene")
    p.add_argument("--level", default="low", choices=[l.value for l in PerplexityLevel])
    p.add_argument("--targets", type=int, default=1, choices=(1, 2, 4))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--target", help="override target pair as shape/color tokens")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_scene)

    p = sub.add_parser("lexicon", help="dump the lexicon table")
    p.add_argument("--lexicon", help="load this table instead of the built-in one")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_lexicon)

    p = sub.add_parser("run", help="drive a session interactively in the terminal")
    p.add_argument("--technique", default="assistvr", choices=[t.value for t in harness.Technique])
    p.add_argument("--level", default="low", choices=[l.value for l in PerplexityLevel])
    p.add_argument("--targets", type=int, default=1, choices=(1, 2, 4))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--participant", help="run a full plan instead of one ad-hoc scene")
    p.add_argument("--order", type=int, default=0)
    p.add_argument("--lexicon")
    p.add_argument("--records-out")
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("replay", help="replay a script against a plan deterministically")
    p.add_argument("--participant", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--script", help="script file; omitted means the perfect auto script")
    p.add_argument("--lexicon")
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_replay)

    p = sub.add_parser("filter", help="drop per-condition outliers from a records log")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--removed-out")
    p.add_argument("--sd-limit", type=float, default=4.0)
    p.set_defaults(fn=_cmd_filter)

    p = sub.add_parser("summarize", help="write summary.csv and figures for a records log")
    p.add_argument("--records", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--sd-limit", type=float, default=4.0)
    p.set_defaults(fn=_cmd_summarize)

    p = sub.add_parser("serve", help="serve the HTTP and websocket API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--lexicon")
    p.add_argument("--static", help="directory with the built web UI")
    p.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())
