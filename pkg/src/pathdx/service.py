"""HTTP JSON service over one immutable knowledge base.

Routes: GET /health, GET /kb, GET /diseases, POST /infer, POST /coherency.
Malformed JSON and schema violations answer 400 (with a parse location when
there is one), domain failures 422, anything unexpected 500.  The knowledge
base is loaded once at startup; requests never mutate server state, so the
threading server needs no locks and identical requests get identical bodies.
A static directory (the consultation UI build) can be mounted at /.
"""

from __future__ import annotations

import json
import mimetypes
import traceback
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .api import handle_infer
from .errors import DiagnosisError, SchemaError
from .inference import coherency_report
from .kb_format import export_json
from .kb_model import KnowledgeBase

MAX_BODY = 4 * 1024 * 1024


def make_server(
    kb: KnowledgeBase,
    host: str = "127.0.0.1",
    port: int = 8000,
    static_dir: str | None = None,
) -> ThreadingHTTPServer:
    kb_doc = export_json(kb)
    static_root = Path(static_dir).resolve() if static_dir else None

    class Handler(BaseHTTPRequestHandler):
        server_version = "pathdx"

        def log_message(self, fmt, *args):  # quiet by default; tests run many requests
            pass

        def _send(self, status: int, doc) -> None:
            body = json.dumps(doc).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def _send_file(self, path: Path) -> None:
            data = path.read_bytes()
            ctype = mimetypes.guess_type(str(path))[0] or "application/octet-stream"
            self.send_response(200)
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def _read_json(self):
            length = int(self.headers.get("Content-Length") or 0)
            if length > MAX_BODY:
                self._send(400, {"error": "request body too large"})
                return None
            raw = self.rfile.read(length)
            try:
                return json.loads(raw.decode("utf-8"))
            except UnicodeDecodeError:
                self._send(400, {"error": "request body is not valid UTF-8"})
                return None
            except json.JSONDecodeError as exc:
                self._send(400, {"error": f"malformed JSON: {exc.msg}",
                                 "line": exc.lineno, "column": exc.colno})
                return None

        def do_GET(self):
            try:
                if self.path == "/health":
                    self._send(200, {"status": "ok", "kb": kb.name, "version": kb.version})
                elif self.path == "/kb":
                    self._send(200, kb_doc)
                elif self.path == "/diseases":
                    self._send(200, [{"id": d.id, "label": d.label} for d in kb.diseases])
                elif static_root is not None:
                    self._static(self.path)
                else:
                    self._send(404, {"error": f"no such route: {self.path}"})
            except BrokenPipeError:
                pass
            except Exception:
                self._send(500, {"error": "internal error", "detail": traceback.format_exc(limit=1)})

        def _static(self, path: str) -> None:
            rel = path.split("?", 1)[0].lstrip("/") or "index.html"
            target = (static_root / rel).resolve()
            if static_root in target.parents or target == static_root:
                if target.is_dir():
                    target = target / "index.html"
                if target.is_file():
                    self._send_file(target)
                    return
            self._send(404, {"error": f"no such route: {path}"})

        def do_POST(self):
            try:
                payload = self._read_json()
                if payload is None:
                    return
                if self.path == "/infer":
                    self._send(200, handle_infer(kb, payload))
                elif self.path == "/coherency":
                    self._coherency(payload)
                else:
                    self._send(404, {"error": f"no such route: {self.path}"})
            except SchemaError as exc:
                self._send(400, {"error": str(exc)})
            except DiagnosisError as exc:
                self._send(422, {"error": str(exc)})
            except BrokenPipeError:
                pass
            except Exception:
                self._send(500, {"error": "internal error", "detail": traceback.format_exc(limit=1)})

        def _coherency(self, payload) -> None:
            if not isinstance(payload, dict) or not isinstance(payload.get("disease"), str):
                raise SchemaError("coherency request needs a 'disease' id")
            grid = payload.get("grid", [0.0, 24.0, 72.0, 132.0])
            tol = payload.get("tol", 0.05)
            if not isinstance(grid, list) or not all(
                isinstance(t, (int, float)) and not isinstance(t, bool) for t in grid
            ):
                raise SchemaError("grid must be a list of numbers")
            if not isinstance(tol, (int, float)) or isinstance(tol, bool) or tol < 0:
                raise SchemaError("tol must be a number >= 0")
            rows = coherency_report(kb, payload["disease"], grid=[float(t) for t in grid], tol=float(tol))
            self._send(200, {
                "disease": payload["disease"],
                "tol": tol,
                "rows": [
                    {"symptom_id": r.symptom_id, "t": r.t, "model_p": r.model_p,
                     "direct_p": r.direct_p, "delta": r.delta}
                    for r in rows
                ],
            })

    return ThreadingHTTPServer((host, port), Handler)


def serve_forever(kb: KnowledgeBase, host: str, port: int, static_dir: str | None = None) -> None:
    httpd = make_server(kb, host, port, static_dir)
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        httpd.server_close()
