from .app import create_app
from .events import EventBus, StreamEvent

__all__ = ["create_app", "EventBus", "StreamEvent"]
