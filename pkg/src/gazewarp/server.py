"""WebSocket transport for the session protocol plus static sandbox hosting.

One connection = one session. Messages are JSON objects, one per WebSocket
text message, in order. If frames arrive faster than the engine loop drains
them, queued frames coalesce to the newest and the drop count is reported in
the next snapshot. A heartbeat goes out after one second of outbound silence.
"""

from __future__ import annotations

import asyncio
import json
import os

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.staticfiles import StaticFiles

from .session import HEARTBEAT_INTERVAL_S, Session, hello_message, session_tick


def create_app(static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="gazewarp session endpoint")

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        await ws.send_json(hello_message())
        session = Session()
        queue: asyncio.Queue[str | None] = asyncio.Queue()

        async def reader():
            try:
                while True:
                    queue.put_nowait(await ws.receive_text())
            except (WebSocketDisconnect, RuntimeError):
                queue.put_nowait(None)

        reader_task = asyncio.create_task(reader())
        try:
            while True:
                try:
                    raw = await asyncio.wait_for(queue.get(), timeout=HEARTBEAT_INTERVAL_S)
                except asyncio.TimeoutError:
                    await ws.send_json({"type": "heartbeat"})
                    continue
                if raw is None:
                    break
                batch = [raw]
                while not queue.empty():
                    extra = queue.get_nowait()
                    if extra is None:
                        batch.append(None)
                        break
                    batch.append(extra)
                closed = False
                for message, dropped in _coalesce_frames(batch):
                    if message is None:
                        closed = True
                        break
                    if dropped:
                        session.note_dropped(dropped)
                    for reply in session_tick(session, message):
                        await ws.send_json(reply)
                if closed:
                    break
        finally:
            reader_task.cancel()

    if static_dir is not None and os.path.isdir(static_dir):
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="sandbox")

    return app


def _coalesce_frames(batch: list[str | None]):
    """Parse a drained batch, collapsing runs of frame messages to the newest.

    Yields (message dict | None, frames dropped before it). A None message
    marks disconnection. Unparseable entries yield an error sentinel handled
    by session_tick as a bad message.
    """
    parsed: list[dict | None] = []
    for raw in batch:
        if raw is None:
            parsed.append(None)
            continue
        try:
            parsed.append(json.loads(raw))
        except json.JSONDecodeError:
            parsed.append({"type": "__unparseable__"})
    i = 0
    while i < len(parsed):
        message = parsed[i]
        if message is None:
            yield None, 0
            return
        if isinstance(message, dict) and message.get("type") == "frame":
            run_end = i
            while (
                run_end + 1 < len(parsed)
                and isinstance(parsed[run_end + 1], dict)
                and parsed[run_end + 1].get("type") == "frame"
            ):
                run_end += 1
            yield parsed[run_end], run_end - i
            i = run_end + 1
        else:
            if message.get("type") == "__unparseable__":
                yield {"type": None}, 0  # session_tick answers bad-message
            else:
                yield message, 0
            i += 1


def serve(listen: str, static_dir: str | None = None) -> None:
    """Blocking entry point for the CLI `serve` subcommand."""
    import uvicorn

    host, _, port = listen.rpartition(":")
    host = host or "127.0.0.1"
    app = create_app(static_dir)
    uvicorn.run(app, host=host, port=int(port), log_level="warning")
