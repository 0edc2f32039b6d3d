"""Command-line entry points: pipeline, simulate, evaluate, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import PipelineConfig
from .imgio import read_image
from .pipeline import analyze_image
from .raster import SUB_HEIGHT, SUB_WIDTH, crop_chip
from .service import BIND_ENV_VAR, DEFAULT_BIND, make_server
from .session import (
    GroundTruthMask,
    Session,
    evaluate_agreement,
    load_choices,
    load_scenario,
    persist_products,
    run_scenario,
)


def _load_config(spec: str | None) -> PipelineConfig:
    if spec is None:
        return PipelineConfig()
    text = spec if spec.lstrip().startswith("{") else Path(spec).read_text()
    d = json.loads(text)
    if not isinstance(d, dict):
        raise ValueError("config must be a JSON object of pipeline parameters")
    return PipelineConfig.from_dict(d)


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def cmd_pipeline(args) -> int:
    try:
        cfg = _load_config(args.config)
    except (OSError, ValueError, TypeError, json.JSONDecodeError) as e:
        return _fail(f"bad config: {e}")
    try:
        img = read_image(args.image)
    except (OSError, ValueError) as e:
        return _fail(f"cannot read image {args.image}: {e}")
    if img.channels != 3:
        return _fail(f"{args.image} is not an RGB image")
    analysis = analyze_image(img, cfg)
    chips = tuple(
        crop_chip(img, (p.x, p.y), SUB_WIDTH, SUB_HEIGHT)[0] for p in analysis.points
    )
    out = Path(args.out)
    try:
        manifest = persist_products(
            out / "steps" / "0", 0, img, analysis, chips, cfg, {"input": str(args.image)}
        )
        full = {f"steps/0/{name}": digest for name, digest in manifest.items()}
        (out / "manifest.json").write_text(json.dumps(full, indent=2, sort_keys=True) + "\n")
    except OSError as e:
        return _fail(f"cannot write products: {e}")
    points = [{"x": p.x, "y": p.y, "score": p.score, "rank": p.rank} for p in analysis.points]
    print(json.dumps(points, indent=2))
    return 0


def cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (OSError, ValueError) as e:
        return _fail(f"bad scenario: {e}")
    choices = None
    if args.choices:
        try:
            choices = load_choices(args.choices)
        except (OSError, ValueError, KeyError) as e:
            return _fail(f"bad choice log {args.choices}: {e}")
    if args.policy == "interactive":
        try:
            session = Session(scenario, out_dir=args.out)
            server = make_server(session, args.bind, args.static)
        except (OSError, ValueError) as e:
            return _fail(str(e))
        host, port = server.server_address[:2]
        print(f"session '{scenario.name}' awaiting choices on http://{host}:{port}/")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.server_close()
        return 0
    try:
        session = run_scenario(scenario, out_dir=args.out, choices=choices)
    except (OSError, ValueError) as e:
        return _fail(str(e))
    snap = session.snapshot()
    summary = {
        "scenario": scenario.name,
        "status": snap.status,
        "steps": len(snap.steps),
        "final_distance_m": snap.pose.distance_m,
        "final_aim_m": [snap.pose.aim_x_m, snap.pose.aim_y_m],
        "out": str(args.out) if args.out else None,
    }
    print(json.dumps(summary, indent=2))
    return 0


def cmd_evaluate(args) -> int:
    try:
        raw = json.loads(Path(args.points).read_text())
        points = [(p["x"], p["y"]) for p in raw]
    except (OSError, ValueError, TypeError, KeyError) as e:
        return _fail(f"cannot read points {args.points}: {e}")
    try:
        truth = GroundTruthMask.from_image(read_image(args.mask))
    except (OSError, ValueError) as e:
        return _fail(f"cannot read mask {args.mask}: {e}")
    try:
        report = evaluate_agreement(points, truth, args.tolerance)
    except ValueError as e:
        return _fail(str(e))
    print(json.dumps(report.to_dict(), indent=2))
    return 0


def cmd_serve(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        session = Session(scenario, out_dir=args.out)
        server = make_server(session, args.bind, args.static)
    except (OSError, ValueError) as e:
        return _fail(str(e))
    host, port = server.server_address[:2]
    print(f"serving session '{scenario.name}' on http://{host}:{port}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoscout",
        description="Interest detection and guided approach over simulated geological scenes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pipeline", help="analyze one RGB image and write all products")
    p.add_argument("image", help="input image (PNG or binary PPM)")
    p.add_argument("--config", help="pipeline parameters: JSON file path or inline object")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("simulate", help="run an exploration scenario")
    p.add_argument("scenario", help="scenario JSON path")
    p.add_argument("--policy", choices=("auto", "interactive"), default="auto")
    p.add_argument("--choices", help="choice log (JSON lines) to replay instead of rank 1")
    p.add_argument("--out", help="session output directory")
    p.add_argument("--bind", help=f"host:port for interactive mode (default ${BIND_ENV_VAR} or {DEFAULT_BIND})")
    p.add_argument("--static", help="static frontend directory for interactive mode")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("evaluate", help="score interest points against a reference mask")
    p.add_argument("--points", required=True, help="points.json from a pipeline/session step")
    p.add_argument("--mask", required=True, help="reference mask image (nonzero = region)")
    p.add_argument("--tolerance", type=float, default=10.0, help="hit radius in pixels")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="serve a session over HTTP for the browser UI")
    p.add_argument("scenario", help="scenario JSON path")
    p.add_argument("--out", required=True, help="session output directory")
    p.add_argument("--bind", help=f"host:port (default ${BIND_ENV_VAR} or {DEFAULT_BIND})")
    p.add_argument("--static", help="static frontend directory")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
