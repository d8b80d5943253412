"""Command-line interface: serve, ingest, review, query, export/import,
db stats.

State layout: ``--data-dir`` (or HAPTICREC_DATA_DIR) points at a
directory holding ``corpus.json``, ``reviews/`` and ``sessions/``.
Without it everything runs ephemerally on the packaged fixture corpus,
which is exactly what the one-shot ``query`` command wants.
"""

from __future__ import annotations

import sys

import click

from . import __version__
from .config import AppConfig, load_config
from .errors import HapticRecError
from .ingestion import DOCUMENT_KINDS
from .runtime import AppState, build_state
from .sessions import SessionStore
from .store import SOURCE_KINDS


def _fail(exc: HapticRecError) -> None:
    click.echo(f"error[{exc.api_code}]: {exc}", err=True)
    sys.exit(1)


def _build(ctx: click.Context, **overrides) -> AppState:
    config: AppConfig = ctx.obj["config"]
    for key, value in overrides.items():
        if value is not None:
            setattr(config, key, value)
    try:
        return build_state(config)
    except HapticRecError as exc:
        _fail(exc)
        raise  # unreachable; keeps type checkers honest


@click.group()
@click.version_option(__version__)
@click.option("--config", "config_path", type=click.Path(), default=None,
              help="JSON config file; HAPTICREC_* env vars override it.")
@click.option("--data-dir", type=click.Path(), default=None,
              help="Directory for corpus, reviews and session logs.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, data_dir: str | None):
    """Grounded force feedback device recommendation engine."""
    try:
        config = load_config(config_path)
    except HapticRecError as exc:
        _fail(exc)
        raise
    if data_dir is not None:
        config.data_dir = data_dir
    ctx.obj = {"config": config}


@main.command()
@click.option("--addr", default=None, help="host:port to bind (default 127.0.0.1:8080).")
@click.option("--corpus", default=None, type=click.Path(), help="Corpus JSON to serve.")
@click.pass_context
def serve(ctx: click.Context, addr: str | None, corpus: str | None):
    """Run the HTTP API server."""
    import uvicorn

    from .service import create_app

    state = _build(ctx, addr=addr, corpus_path=corpus)
    host, port = state.config.host_port()
    click.echo(f"serving {state.store.device_count()} devices on {host}:{port}")
    uvicorn.run(create_app(state), host=host, port=port, log_level="info")


@main.command()
@click.argument("path", type=click.Path(exists=True))
@click.option("--kind", type=click.Choice(("auto",) + DOCUMENT_KINDS), default="auto",
              help="Document parser; auto picks by file extension.")
@click.option("--source-kind", type=click.Choice(SOURCE_KINDS), default="commercial")
@click.pass_context
def ingest(ctx: click.Context, path: str, kind: str, source_kind: str):
    """Parse a document and stage a draft device for review."""
    state = _build(ctx)
    if kind == "auto":
        kind = "html" if path.lower().endswith((".html", ".htm")) else "plain_text"
    try:
        item = state.pipeline.ingest_file(path, kind, source_kind)
    except HapticRecError as exc:
        _fail(exc)
        raise
    click.echo(
        f"staged review {item.id}: {item.draft.name!r} "
        f"({len(item.blocks)} blocks, {len(item.draft.taxonomy)} attributes)"
    )
    if not state.config.data_dir:
        click.echo("note: no --data-dir set, staged review is ephemeral", err=True)
    click.echo(f"approve with: hapticrec review approve {item.id}")


@main.group()
def review():
    """List or resolve staged review items."""


@review.command("list")
@click.pass_context
def review_list(ctx: click.Context):
    state = _build(ctx)
    items = state.pipeline.reviews()
    if not items:
        click.echo("no review items")
        return
    for item in items:
        click.echo(
            f"{item.id}  {item.decision:<9} {item.draft.name}  "
            f"[{item.draft.source_kind}] {item.draft.source_links[0]}"
        )


@review.command("approve")
@click.argument("item_id")
@click.pass_context
def review_approve(ctx: click.Context, item_id: str):
    state = _build(ctx)
    try:
        record = state.pipeline.resolve_review(item_id, "approved")
        saved = state.save_corpus()
    except HapticRecError as exc:
        _fail(exc)
        raise
    click.echo(f"approved device {record.id}: {record.name}")
    if saved:
        click.echo(f"corpus saved to {saved}")


@review.command("correct")
@click.argument("item_id")
@click.option("--set", "edits", multiple=True, metavar="ATTR=VALUE",
              help="Attribute override; repeatable.")
@click.pass_context
def review_correct(ctx: click.Context, item_id: str, edits: tuple[str, ...]):
    state = _build(ctx)
    parsed = {}
    for edit in edits:
        attr, sep, value = edit.partition("=")
        if not sep or not attr:
            click.echo(f"error[bad_request]: --set needs ATTR=VALUE, got {edit!r}", err=True)
            sys.exit(1)
        parsed[attr.strip()] = value.strip()
    try:
        record = state.pipeline.resolve_review(item_id, "corrected", parsed)
        saved = state.save_corpus()
    except HapticRecError as exc:
        _fail(exc)
        raise
    click.echo(f"corrected device {record.id}: {record.name}")
    if saved:
        click.echo(f"corpus saved to {saved}")


@main.command()
@click.argument("prompt")
@click.option("--session", "session_id", default=None,
              help="Persistent session id; omit for a one-shot session.")
@click.pass_context
def query(ctx: click.Context, prompt: str, session_id: str | None):
    """Run one chat turn and print the recommendation."""
    state = _build(ctx)
    sessions = state.sessions
    if session_id is None:
        # One-shot: never leave session files behind.
        sessions = SessionStore()
        state.agent.sessions = sessions
        session = sessions.create()
    elif sessions.exists(session_id):
        session = sessions.get(session_id)
    else:
        session = sessions.create(session_id)
    try:
        response = state.agent.chat_turn(session.id, prompt)
    except HapticRecError as exc:
        _fail(exc)
        raise

    text = response.text
    for rec in response.recommendations:
        text = text.replace(f"[device:{rec.device_id}] {rec.name}", rec.name)
        text = text.replace(f"[device:{rec.device_id}]", rec.name)
    click.echo(text)
    click.echo("")
    if not response.recommendations:
        click.echo("recommendations: none")
        return
    click.echo("recommendations:")
    for i, rec in enumerate(response.recommendations, start=1):
        click.echo(
            f"  {i}. {rec.name} (id {rec.device_id}) "
            f"score={rec.rank_score:.6f} spec={rec.n_pos}/{rec.n_all} "
            f"cosine={rec.cosine:.6f}"
        )
        click.echo(f"     links: {' '.join(rec.links)}")


@main.command("export")
@click.argument("path", type=click.Path())
@click.pass_context
def export_corpus(ctx: click.Context, path: str):
    """Write the corpus as canonical JSON ('-' for stdout)."""
    state = _build(ctx)
    text = state.store.export_json()
    if path == "-":
        click.echo(text, nl=False)
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    click.echo(f"exported {state.store.device_count()} devices to {path}")


@main.command("import")
@click.argument("path", type=click.Path(exists=True))
@click.pass_context
def import_corpus(ctx: click.Context, path: str):
    """Replace the corpus from a JSON export."""
    state = _build(ctx)
    try:
        with open(path, encoding="utf-8") as f:
            count = state.store.import_json(f.read())
        saved = state.save_corpus()
    except HapticRecError as exc:
        _fail(exc)
        raise
    click.echo(f"imported {count} devices from {path}")
    if saved:
        click.echo(f"corpus saved to {saved}")


@main.command("db")
@click.argument("action", type=click.Choice(["stats"]))
@click.pass_context
def db(ctx: click.Context, action: str):
    """Database administration (currently: stats)."""
    state = _build(ctx)
    if action == "stats":
        store = state.store
        counts = store.schema.group_counts()
        embedded = sum(
            1 for i in store.device_ids() if store.get_embedding(i) is not None
        )
        pending = sum(1 for r in state.pipeline.reviews() if r.decision == "pending")
        click.echo(f"devices: {store.device_count()}")
        click.echo(f"embedded: {embedded}")
        click.echo(
            "schema attributes: "
            f"{counts['machine']} machine, {counts['usage']} usage, "
            f"{counts['context']} context"
        )
        click.echo(f"pending reviews: {pending}")
        click.echo(f"sessions: {len(state.sessions.ids())}")


if __name__ == "__main__":
    main()
