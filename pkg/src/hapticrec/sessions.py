"""Conversation sessions and their append-only persistence.

A session is the unit of chat state: ordered turns plus the
recommended-device log that later turns (and off-topic turns in
particular) draw candidates from. Each session persists as one JSON-lines
file, one event per line, written append-only; replaying the file
reconstructs the session, so the store survives restarts. With no
directory configured the store is purely in-memory (used by the CLI's
one-shot ``query`` and by tests).
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

from .errors import NotFoundError, StateError

SESSION_FILE_SUFFIX = ".jsonl"


@dataclass
class Turn:
    role: str  # user | agent
    text: str
    timestamp: float

    def to_dict(self) -> dict:
        return {"role": self.role, "text": self.text, "timestamp": self.timestamp}


@dataclass
class ConversationSession:
    id: str
    turns: list[Turn] = field(default_factory=list)
    recommended_log: list[int] = field(default_factory=list)
    created_at: float = 0.0
    updated_at: float = 0.0

    def user_turns(self) -> list[str]:
        return [t.text for t in self.turns if t.role == "user"]

    def log_recommendations(self, device_ids: list[int]) -> list[int]:
        """Append ids not yet logged, preserving first-seen order; returns
        the newly added ids. The log only ever grows."""
        added = []
        seen = set(self.recommended_log)
        for device_id in device_ids:
            if device_id not in seen:
                self.recommended_log.append(device_id)
                seen.add(device_id)
                added.append(device_id)
        return added


class SessionStore:
    """All sessions known to one process, with optional JSONL persistence.

    Writes happen only through ``commit_turn``/``record_error`` so a chat
    turn is atomic at the log level: either both turns plus the
    recommendation event land, or a single error event does.
    """

    def __init__(self, directory: str | None = None):
        self.directory = directory
        self._sessions: dict[str, ConversationSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        if directory:
            os.makedirs(directory, exist_ok=True)
            for name in sorted(os.listdir(directory)):
                if name.endswith(SESSION_FILE_SUFFIX):
                    session = self._replay(os.path.join(directory, name))
                    if session is not None:
                        self._sessions[session.id] = session

    # -- lifecycle -----------------------------------------------------------

    def create(self, session_id: str | None = None) -> ConversationSession:
        session_id = session_id or uuid.uuid4().hex
        now = time.time()
        with self._registry_lock:
            if session_id in self._sessions:
                raise StateError(f"session {session_id!r} already exists")
            session = ConversationSession(
                id=session_id, created_at=now, updated_at=now
            )
            self._sessions[session_id] = session
        self._append(session_id, {"event": "created", "at": now})
        return session

    def get(self, session_id: str) -> ConversationSession:
        with self._registry_lock:
            try:
                return self._sessions[session_id]
            except KeyError:
                raise NotFoundError(f"no session {session_id!r}") from None

    def exists(self, session_id: str) -> bool:
        with self._registry_lock:
            return session_id in self._sessions

    def ids(self) -> list[str]:
        with self._registry_lock:
            return sorted(self._sessions)

    def lock(self, session_id: str) -> threading.Lock:
        """Per-session lock: chat turns on one session serialize, distinct
        sessions proceed concurrently."""
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- turn recording --------------------------------------------------------

    def commit_turn(
        self,
        session_id: str,
        user_text: str,
        agent_text: str,
        recommended_ids: list[int],
    ) -> None:
        session = self.get(session_id)
        now = time.time()
        session.turns.append(Turn("user", user_text, now))
        session.turns.append(Turn("agent", agent_text, now))
        session.log_recommendations(recommended_ids)
        session.updated_at = now
        self._append(
            session_id,
            {"event": "turn", "role": "user", "text": user_text, "at": now},
            {"event": "turn", "role": "agent", "text": agent_text, "at": now},
            {"event": "recommended", "ids": list(recommended_ids), "at": now},
        )

    def record_error(self, session_id: str, message: str) -> None:
        """A failed turn leaves the turn list untouched; only an error
        event lands in the log."""
        if not self.exists(session_id):
            return
        self._append(
            session_id, {"event": "error", "message": message, "at": time.time()}
        )

    # -- persistence ------------------------------------------------------------

    def _path(self, session_id: str) -> str:
        return os.path.join(self.directory, session_id + SESSION_FILE_SUFFIX)

    def _append(self, session_id: str, *events: dict) -> None:
        if not self.directory:
            return
        with open(self._path(session_id), "a", encoding="utf-8") as f:
            for event in events:
                f.write(json.dumps(event, sort_keys=True, ensure_ascii=False) + "\n")

    def _replay(self, path: str) -> ConversationSession | None:
        session_id = os.path.basename(path)[: -len(SESSION_FILE_SUFFIX)]
        session = ConversationSession(id=session_id)
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                event = json.loads(line)
                kind = event.get("event")
                at = float(event.get("at", 0.0))
                if kind == "created":
                    session.created_at = at
                elif kind == "turn":
                    session.turns.append(Turn(event["role"], event["text"], at))
                elif kind == "recommended":
                    session.log_recommendations([int(i) for i in event["ids"]])
                session.updated_at = max(session.updated_at, at)
        return session
