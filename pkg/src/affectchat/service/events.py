"""Per-session event streams with monotonically increasing ids.

Events are buffered in a bounded ring per session so a dropped client can
reconnect and resume from its last seen id (``Last-Event-ID`` header or
``since`` query parameter); live subscribers get events via asyncio queues.
"""

from __future__ import annotations

import asyncio
import json
from collections import deque
from dataclasses import dataclass

BUFFER_SIZE = 1000


@dataclass(frozen=True)
class StreamEvent:
    event_id: int
    kind: str
    payload: dict

    def to_sse(self) -> str:
        # Envelope keys win over payload keys of the same name.
        data = json.dumps({**self.payload, "id": self.event_id, "kind": self.kind}, sort_keys=True)
        return f"id: {self.event_id}\nevent: {self.kind}\ndata: {data}\n\n"


class _SessionStream:
    def __init__(self) -> None:
        self.next_id = 1
        self.buffer: deque[StreamEvent] = deque(maxlen=BUFFER_SIZE)
        self.subscribers: set[asyncio.Queue[StreamEvent]] = set()


class EventBus:
    """Fan-out of orchestrator events to SSE subscribers, with replay."""

    def __init__(self) -> None:
        self._streams: dict[str, _SessionStream] = {}

    def _stream(self, session_id: str) -> _SessionStream:
        return self._streams.setdefault(session_id, _SessionStream())

    def publish(self, session_id: str, kind: str, payload: dict) -> StreamEvent:
        stream = self._stream(session_id)
        event = StreamEvent(event_id=stream.next_id, kind=kind, payload=payload)
        stream.next_id += 1
        stream.buffer.append(event)
        for queue in list(stream.subscribers):
            queue.put_nowait(event)
        return event

    def backlog(self, session_id: str, since: int = 0) -> list[StreamEvent]:
        return [e for e in self._stream(session_id).buffer if e.event_id > since]

    def subscribe(self, session_id: str) -> asyncio.Queue[StreamEvent]:
        queue: asyncio.Queue[StreamEvent] = asyncio.Queue()
        self._stream(session_id).subscribers.add(queue)
        return queue

    def unsubscribe(self, session_id: str, queue: asyncio.Queue[StreamEvent]) -> None:
        self._stream(session_id).subscribers.discard(queue)

    async def stream_sse(
        self,
        session_id: str,
        since: int = 0,
        max_events: int | None = None,
        keepalive_s: float = 15.0,
    ):
        """Yield SSE-formatted events: backlog first, then live."""
        sent = 0
        last_id = since
        queue = self.subscribe(session_id)
        try:
            for event in self.backlog(session_id, since):
                last_id = event.event_id
                yield event.to_sse()
                sent += 1
                if max_events is not None and sent >= max_events:
                    return
            while True:
                try:
                    event = await asyncio.wait_for(queue.get(), timeout=keepalive_s)
                except asyncio.TimeoutError:
                    yield ": keepalive\n\n"
                    continue
                if event.event_id <= last_id:
                    continue
                last_id = event.event_id
                yield event.to_sse()
                sent += 1
                if max_events is not None and sent >= max_events:
                    return
        finally:
            self.unsubscribe(session_id, queue)
