"""Session store: lifecycle, the grow-only recommended log, and JSONL
replay across restarts."""

import pytest

from hapticrec.errors import NotFoundError, StateError
from hapticrec.sessions import ConversationSession, SessionStore


def test_create_and_get(sessions):
    session = sessions.create()
    assert sessions.exists(session.id)
    assert sessions.get(session.id) is session
    assert sessions.ids() == [session.id]


def test_create_explicit_id_conflicts(sessions):
    sessions.create("s1")
    with pytest.raises(StateError, match="already exists"):
        sessions.create("s1")


def test_get_unknown_session(sessions):
    with pytest.raises(NotFoundError):
        sessions.get("missing")


def test_recommended_log_grows_without_duplicates():
    session = ConversationSession(id="x")
    assert session.log_recommendations([3, 1, 3]) == [3, 1]
    assert session.log_recommendations([1, 2]) == [2]
    assert session.recommended_log == [3, 1, 2]


def test_commit_turn_appends_both_roles(sessions):
    session = sessions.create("s1")
    sessions.commit_turn("s1", "need a device", "try this one", [4, 2])
    assert [(t.role, t.text) for t in session.turns] == [
        ("user", "need a device"),
        ("agent", "try this one"),
    ]
    assert session.recommended_log == [4, 2]
    assert session.user_turns() == ["need a device"]


def test_replay_reconstructs_sessions(tmp_path):
    directory = str(tmp_path / "sessions")
    first = SessionStore(directory)
    first.create("alpha")
    first.commit_turn("alpha", "u1", "a1", [7])
    first.commit_turn("alpha", "u2", "a2", [7, 9])
    first.record_error("alpha", "provider blew up")
    first.create("beta")

    second = SessionStore(directory)
    assert second.ids() == ["alpha", "beta"]
    alpha = second.get("alpha")
    assert [t.text for t in alpha.turns] == ["u1", "a1", "u2", "a2"]
    assert alpha.recommended_log == [7, 9]
    # error events never materialize as turns
    assert len(alpha.turns) == 4


def test_in_memory_store_needs_no_directory():
    store = SessionStore(None)
    store.create("ephemeral")
    store.commit_turn("ephemeral", "u", "a", [])
    assert store.get("ephemeral").user_turns() == ["u"]


def test_lock_is_stable_per_session(sessions):
    sessions.create("s1")
    assert sessions.lock("s1") is sessions.lock("s1")
    assert sessions.lock("s1") is not sessions.lock("s2")
