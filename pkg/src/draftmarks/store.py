"""Content-addressed session storage.

Layout under the store root:
    sessions/<id>/session.log          raw ingested bytes
    sessions/<id>/history-<fp>.pickle  replayed DocumentHistory
    sessions/<id>/schema-<role>-<fp>.json   cached envelope per config

The id is the sha256 of the log bytes, so re-ingesting an identical log is
a no-op that returns the same id. Cached histories and schemas carry the
first 12 hex chars of the config fingerprint; replay depends on the
deletion threshold, so a config change must miss both caches.
"""

from __future__ import annotations

import hashlib
import os
import pickle
import re
import threading
from pathlib import Path

from .config import EngineConfig
from .events import parse_session_log
from .model import DocumentHistory
from .profiles import StakeholderRole, UnknownRoleError
from .replay import replay_session
from .schema import build_process_schema
from .schema_io import export_static_document, parse_schema, serialize_schema


class UnknownSessionError(Exception):
    pass


_SESSION_ID = re.compile(r"[0-9a-f]{64}")


class SessionStore:
    def __init__(self, root: str | Path, config: EngineConfig | None = None):
        self.root = Path(root)
        self.sessions_dir = self.root / "sessions"
        self.sessions_dir.mkdir(parents=True, exist_ok=True)
        self.config = config or EngineConfig()
        self._locks: dict[str, threading.RLock] = {}
        self._locks_guard = threading.Lock()

    # reentrant: schema_envelope holds it while load_history may re-enter
    def _lock(self, session_id: str) -> threading.RLock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.RLock())

    def _dir(self, session_id: str) -> Path:
        if not _SESSION_ID.fullmatch(session_id):
            raise UnknownSessionError(f"session not found: {session_id}")
        return self.sessions_dir / session_id

    def _history_path(self, session_id: str) -> Path:
        fp = self.config.fingerprint()[:12]
        return self._dir(session_id) / f"history-{fp}.pickle"

    # ------------------------------------------------------------- write

    def ingest(self, log_bytes: bytes) -> str:
        """Validate, replay, persist. Raises before touching disk on bad logs."""
        log = parse_session_log(log_bytes)
        history = replay_session(
            log, deletion_threshold=self.config.deletion_threshold)
        session_id = hashlib.sha256(log_bytes).hexdigest()
        with self._lock(session_id):
            target = self._dir(session_id)
            if (target / "session.log").exists():
                return session_id
            target.mkdir(exist_ok=True)
            _write_atomic(target / "session.log", log_bytes)
            _write_atomic(self._history_path(session_id),
                          pickle.dumps(history))
        return session_id

    # -------------------------------------------------------------- read

    def has(self, session_id: str) -> bool:
        return (self._dir(session_id) / "session.log").exists()

    def list_sessions(self) -> list[str]:
        return sorted(p.name for p in self.sessions_dir.iterdir()
                      if (p / "session.log").exists())

    def log_bytes(self, session_id: str) -> bytes:
        path = self._dir(session_id) / "session.log"
        if not path.exists():
            raise UnknownSessionError(f"session not found: {session_id}")
        return path.read_bytes()

    def load_history(self, session_id: str) -> DocumentHistory:
        path = self._history_path(session_id)
        if not path.exists():
            if not self.has(session_id):
                raise UnknownSessionError(f"session not found: {session_id}")
            # cache missing (hand-copied store, or a new config): rebuild
            history = replay_session(
                parse_session_log(self.log_bytes(session_id)),
                deletion_threshold=self.config.deletion_threshold)
            with self._lock(session_id):
                _write_atomic(path, pickle.dumps(history))
            return history
        return pickle.loads(path.read_bytes())

    def schema_envelope(self, session_id: str, role: str) -> bytes:
        """Cached-or-built canonical envelope for (session, role, config)."""
        try:
            role = StakeholderRole(role).value  # also keeps the path clean
        except ValueError:
            raise UnknownRoleError(f"unknown stakeholder role '{role}'") from None
        fp = self.config.fingerprint()[:12]
        path = self._dir(session_id) / f"schema-{role}-{fp}.json"
        if path.exists():
            return path.read_bytes()
        if not self.has(session_id):
            raise UnknownSessionError(f"session not found: {session_id}")
        with self._lock(session_id):
            if path.exists():
                return path.read_bytes()
            history = self.load_history(session_id)
            schema = build_process_schema(history, role, session_id=session_id,
                                          config=self.config)
            envelope = serialize_schema(schema)
            _write_atomic(path, envelope)
        return envelope

    def export_html(self, session_id: str, role: str) -> str:
        envelope = self.schema_envelope(session_id, role)
        schema = parse_schema(envelope, self.config.profile_overrides)
        return export_static_document(schema)


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
