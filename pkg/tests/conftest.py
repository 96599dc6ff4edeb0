"""Shared test infrastructure: simulated-time event loop and common fixtures."""

from __future__ import annotations

import asyncio
import heapq
import json
from pathlib import Path

import pytest

from affectchat.dialogue import PromptTemplateSet
from affectchat.planner import load_action_table
from affectchat.sentiment import ValenceLexicon

DATA_DIR = Path(__file__).parent / "data"


class VirtualTimeLoop(asyncio.SelectorEventLoop):
    """Event loop whose clock jumps straight to the next scheduled timer.

    Coroutines that only await sleeps and each other run in deterministic
    zero wall-time; ``loop.time()`` reports the simulated seconds.
    """

    def __init__(self) -> None:
        super().__init__()
        self._virtual_now = 0.0

    def time(self) -> float:
        return self._virtual_now

    def _run_once(self) -> None:
        while self._scheduled and self._scheduled[0]._cancelled:
            handle = heapq.heappop(self._scheduled)
            handle._scheduled = False
        if self._scheduled and not self._ready:
            when = self._scheduled[0]._when
            if when > self._virtual_now:
                self._virtual_now = when
        super()._run_once()


def run_virtual(coro):
    """Drive a coroutine to completion on a fresh virtual-time loop."""
    loop = VirtualTimeLoop()
    try:
        return loop.run_until_complete(coro)
    finally:
        loop.close()


def run_real(coro):
    """Drive a coroutine on a normal loop (for tests that don't need sleeps)."""
    return asyncio.run(coro)


@pytest.fixture(scope="session")
def lexicon() -> ValenceLexicon:
    return ValenceLexicon.bundled()


@pytest.fixture(scope="session")
def action_table():
    from affectchat.config import bundled_data_path

    return load_action_table(bundled_data_path("action_table.json"))


@pytest.fixture(scope="session")
def templates() -> PromptTemplateSet:
    return PromptTemplateSet.bundled()


@pytest.fixture(scope="session")
def backbone_fixture() -> dict:
    with open(DATA_DIR / "backbone_fixture.json", encoding="utf-8") as fh:
        return json.load(fh)
