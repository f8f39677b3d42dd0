"""HTTP front end over a SessionStore.

Thread-per-request stdlib server. Responses are canonical envelopes, static
hypertext, or application/problem+json error reports. Role filtering happens
in the store (schemas are pre-filtered), so no handler here ever holds
content beyond what the requested role may see, except the writer-only raw
log route which checks the role explicitly.
"""

from __future__ import annotations

import json
import logging
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlparse

from .events import LogFormatError
from .model import ModelError
from .profiles import UnknownRoleError
from .replay import ReplayError
from .store import SessionStore, UnknownSessionError

log = logging.getLogger("draftmarks.service")

MAX_LOG_BYTES = 16 * 1024 * 1024


class _Handler(BaseHTTPRequestHandler):
    store: SessionStore  # set by make_server
    protocol_version = "HTTP/1.1"

    # ----------------------------------------------------------- plumbing

    def log_message(self, fmt: str, *args) -> None:
        log.debug("%s " + fmt, self.address_string(), *args)

    def _send(self, status: int, body: bytes, content_type: str) -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _json(self, status: int, payload: dict) -> None:
        self._send(status, json.dumps(payload).encode("utf-8"),
                   "application/json; charset=utf-8")

    def _problem(self, status: int, title: str, detail: str) -> None:
        body = json.dumps({"type": "about:blank", "title": title,
                           "status": status, "detail": detail})
        self._send(status, body.encode("utf-8"),
                   "application/problem+json; charset=utf-8")

    def _role(self, query: dict) -> str:
        values = query.get("role", [])
        if len(values) != 1:
            raise UnknownRoleError("exactly one 'role' query parameter required")
        return values[0]

    # ------------------------------------------------------------- routes

    def do_POST(self) -> None:  # noqa: N802 (stdlib naming)
        try:
            parsed = urlparse(self.path)
            if parsed.path.rstrip("/") != "/v1/sessions":
                self._problem(404, "not found", f"no route {parsed.path}")
                return
            length = int(self.headers.get("Content-Length", 0))
            if length <= 0:
                self._problem(400, "bad request", "empty request body")
                return
            if length > MAX_LOG_BYTES:
                self._problem(413, "payload too large",
                              f"log exceeds {MAX_LOG_BYTES} bytes")
                return
            body = self.rfile.read(length)
            session_id = self.store.ingest(body)
            self._json(201, {"id": session_id})
        except (LogFormatError, ReplayError, ModelError) as exc:
            self._problem(400, "invalid session log", str(exc))
        except Exception:  # pragma: no cover - last-resort guard
            log.exception("unhandled error in POST %s", self.path)
            self._problem(500, "internal error", "unhandled server error")

    def do_GET(self) -> None:  # noqa: N802
        try:
            parsed = urlparse(self.path)
            query = parse_qs(parsed.query)
            parts = [p for p in parsed.path.split("/") if p]
            if parts == ["v1", "healthz"]:
                self._json(200, {"status": "ok"})
                return
            if len(parts) == 4 and parts[:2] == ["v1", "sessions"]:
                session_id, tail = parts[2], parts[3]
                if tail == "schema":
                    envelope = self.store.schema_envelope(
                        session_id, self._role(query))
                    self._send(200, envelope, "application/json; charset=utf-8")
                    return
                if tail == "export":
                    page = self.store.export_html(session_id, self._role(query))
                    self._send(200, page.encode("utf-8"),
                               "text/html; charset=utf-8")
                    return
                if tail == "log":
                    role = query.get("role", [""])[0]
                    if role != "writer":
                        self._problem(403, "forbidden",
                                      "raw logs are writer-only")
                        return
                    self._send(200, self.store.log_bytes(session_id),
                               "text/plain; charset=utf-8")
                    return
            self._problem(404, "not found", f"no route {parsed.path}")
        except UnknownSessionError as exc:
            self._problem(404, "session not found", str(exc))
        except UnknownRoleError as exc:
            self._problem(400, "bad request", str(exc))
        except Exception:  # pragma: no cover - last-resort guard
            log.exception("unhandled error in GET %s", self.path)
            self._problem(500, "internal error", "unhandled server error")

    def do_PUT(self) -> None:  # noqa: N802
        self._problem(405, "method not allowed", "only GET and POST are served")

    do_DELETE = do_PUT
    do_PATCH = do_PUT


def make_server(store: SessionStore, listen: str | None = None) -> ThreadingHTTPServer:
    """Bound but not yet serving; callers run serve_forever themselves."""
    address = listen if listen is not None else store.config.listen
    host, _, port_text = address.rpartition(":")
    if not host or not port_text.isdigit():
        raise ValueError(f"listen address must be host:port, got '{address}'")
    handler = type("BoundHandler", (_Handler,), {"store": store})
    return ThreadingHTTPServer((host, int(port_text)), handler)


def serve(store: SessionStore, listen: str | None = None) -> None:
    server = make_server(store, listen)
    host, port = server.server_address[0], server.server_address[1]
    log.info("serving on %s:%s (store: %s)", host, port, store.root)
    print(f"listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
