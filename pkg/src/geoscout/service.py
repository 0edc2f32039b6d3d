"""HTTP/JSON control service for a session, plus static frontend hosting.

Endpoints:
  GET  /api/session                    full session summary
  GET  /api/steps/<n>                  one step's products metadata
  GET  /api/steps/<n>/image/<name>     persisted PNG bytes
  POST /api/steps                      run the next analysis step
  POST /api/choice  {"rank": r}        choose a point, approach next waypoint

Mutations are serialized by the session's own lock; GETs read immutable
snapshots, so they never block behind a running step.  Errors come back
as JSON {"error": {"code", "message"}} with a matching HTTP status.
"""

from __future__ import annotations

import json
import os
import re
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlsplit

from .session import Session, SessionConflictError, StepRecord

BIND_ENV_VAR = "GEOSCOUT_BIND"
DEFAULT_BIND = "127.0.0.1:8765"

STEP_PATH = re.compile(r"/api/steps/(\d+)")
IMAGE_PATH = re.compile(r"/api/steps/(\d+)/image/([A-Za-z0-9_.-]+)")

CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "application/javascript",
    ".mjs": "application/javascript",
    ".css": "text/css",
    ".png": "image/png",
    ".json": "application/json",
    ".svg": "image/svg+xml",
    ".map": "application/json",
    ".ico": "image/x-icon",
}


def step_summary(step: StepRecord) -> dict:
    return {
        "index": step.index,
        "distance_m": step.pose.distance_m,
        "zoom": step.pose.zoom,
        "mosaic": {"width": step.product.mosaic_width, "height": step.product.mosaic_height},
        "points": [
            {"x": p.x, "y": p.y, "score": p.score, "rank": p.rank, "color": p.rank_color}
            for p in step.analysis.points
        ],
        "masked": step.analysis.mask is not None,
    }


def session_view(session: Session) -> dict:
    snap = session.snapshot()
    return {
        "scenario": session.scenario.name,
        "status": snap.status,
        "distance_m": snap.pose.distance_m,
        "aim_m": [snap.pose.aim_x_m, snap.pose.aim_y_m],
        "zoom": snap.pose.zoom,
        "waypoint_index": snap.waypoint_index,
        "waypoints_m": list(snap.waypoints_m),
        "steps": [step_summary(s) for s in snap.steps],
        "choices": [
            {"step": c["step"], "rank": c["rank"], "timestamp": c["timestamp"]}
            for c in snap.choices
        ],
    }


def step_detail(session: Session, step: StepRecord) -> dict:
    detail = step_summary(step)
    names = []
    if session.out_dir is not None:
        step_dir = session.out_dir / "steps" / str(step.index)
        if step_dir.is_dir():
            names = sorted(f.name for f in step_dir.iterdir() if f.suffix == ".png")
    detail["images"] = names
    detail["wall_window_m"] = {
        "x0": step.product.wall_x0_m,
        "y0": step.product.wall_y0_m,
        "w": step.product.wall_w_m,
        "h": step.product.wall_h_m,
    }
    return detail


class ExplorerRequestHandler(BaseHTTPRequestHandler):
    """Request handler bound to one session via class attributes."""

    session: Session = None
    static_dir: Path | None = None
    protocol_version = "HTTP/1.1"

    def log_message(self, format, *args):  # noqa: A002 (stdlib signature)
        pass

    # -- helpers --

    def _send_bytes(self, body: bytes, content_type: str, status: int = 200):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Cache-Control", "no-store")
        self.end_headers()
        self.wfile.write(body)

    def _send_json(self, obj, status: int = 200):
        self._send_bytes(json.dumps(obj).encode(), "application/json", status)

    def _send_error_json(self, status: int, code: str, message: str):
        self._send_json({"error": {"code": code, "message": message}}, status)

    def _read_body_json(self):
        length = int(self.headers.get("Content-Length", 0) or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        return json.loads(raw)

    def _get_step(self, index: int) -> StepRecord | None:
        steps = self.session.snapshot().steps
        return steps[index] if 0 <= index < len(steps) else None

    # -- handlers --

    def do_GET(self):
        path = urlsplit(self.path).path
        if path == "/api/session":
            return self._send_json(session_view(self.session))
        m = IMAGE_PATH.fullmatch(path)
        if m:
            return self._serve_step_image(int(m.group(1)), m.group(2))
        m = STEP_PATH.fullmatch(path)
        if m:
            step = self._get_step(int(m.group(1)))
            if step is None:
                return self._send_error_json(404, "not_found", f"no step {m.group(1)}")
            return self._send_json(step_detail(self.session, step))
        if path.startswith("/api/"):
            return self._send_error_json(404, "not_found", f"no such endpoint: {path}")
        return self._serve_static(path)

    def do_POST(self):
        path = urlsplit(self.path).path
        if path == "/api/steps":
            try:
                step = self.session.run_step()
            except SessionConflictError as e:
                return self._send_error_json(409, "conflict", str(e))
            return self._send_json(step_detail(self.session, step))
        if path == "/api/choice":
            try:
                body = self._read_body_json()
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                return self._send_error_json(400, "invalid", f"bad JSON body: {e}")
            if not isinstance(body, dict) or not isinstance(body.get("rank"), int):
                return self._send_error_json(400, "invalid", "body must be {\"rank\": 1..k}")
            try:
                self.session.select_target(body["rank"])
            except SessionConflictError as e:
                return self._send_error_json(409, "conflict", str(e))
            except ValueError as e:
                return self._send_error_json(400, "invalid", str(e))
            return self._send_json(session_view(self.session))
        return self._send_error_json(404, "not_found", f"no such endpoint: {path}")

    def _serve_step_image(self, index: int, name: str):
        step = self._get_step(index)
        if step is None:
            return self._send_error_json(404, "not_found", f"no step {index}")
        if self.session.out_dir is None:
            return self._send_error_json(404, "not_found", "session has no persistence dir")
        path = self.session.out_dir / "steps" / str(index) / name
        if "/" in name or not path.is_file() or path.suffix != ".png":
            return self._send_error_json(404, "not_found", f"no image {name} in step {index}")
        self._send_bytes(path.read_bytes(), "image/png")

    def _serve_static(self, path: str):
        if self.static_dir is None:
            return self._send_error_json(404, "not_found", "no static assets configured")
        rel = "index.html" if path == "/" else path.lstrip("/")
        target = (self.static_dir / rel).resolve()
        root = self.static_dir.resolve()
        if root not in target.parents and target != root:
            return self._send_error_json(404, "not_found", "path escapes static root")
        if not target.is_file():
            return self._send_error_json(404, "not_found", f"no such file: {rel}")
        ctype = CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_bytes(target.read_bytes(), ctype)


def resolve_bind(bind: str | None = None) -> tuple[str, int]:
    """Split host:port, falling back to the env var, then the default."""
    raw = bind or os.environ.get(BIND_ENV_VAR) or DEFAULT_BIND
    host, sep, port = raw.rpartition(":")
    if not sep:
        raise ValueError(f"bind address must be host:port, got {raw!r}")
    return (host or "127.0.0.1", int(port))


def make_server(
    session: Session, bind: str | None = None, static_dir: str | Path | None = None
) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server for a session."""
    handler = type(
        "BoundExplorerHandler",
        (ExplorerRequestHandler,),
        {"session": session, "static_dir": Path(static_dir) if static_dir else None},
    )
    return ThreadingHTTPServer(resolve_bind(bind), handler)
