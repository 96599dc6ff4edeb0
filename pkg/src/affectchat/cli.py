"""Command-line entry points: serve the API, replay traces, run demos, evaluate.

`replay` and `demo` are thin HTTP clients: given ``--base-url`` they talk to
a running server, otherwise they mount the app in-process and speak to it
over an ASGI transport, so the exercised surface is the service API either
way.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

import click
import httpx

from .config import AppConfig, load_config
from .evalsuite import MalformedCorpusError, load_corpus, run_metrics


@click.group()
def main() -> None:
    """Emotion-aware dialogue service and evaluation tools."""


def _load_config(config_path: str | None) -> AppConfig:
    return load_config(config_path)


def _client(base_url: str | None, config: AppConfig) -> httpx.AsyncClient:
    if base_url:
        return httpx.AsyncClient(base_url=base_url, timeout=120.0)
    from .service import create_app

    app = create_app(config)
    return httpx.AsyncClient(transport=httpx.ASGITransport(app=app), base_url="http://affectchat.local", timeout=120.0)


def _print_exchange(exchange: dict) -> None:
    emotion = exchange.get("emotion") or {}
    label = emotion.get("label", "-")
    flags = []
    if exchange.get("reprompt"):
        flags.append("reprompt")
    elif exchange.get("degraded"):
        flags.append("degraded")
    suffix = f" [{', '.join(flags)}]" if flags else ""
    click.echo(f"you    > {exchange['user_text']}")
    click.echo(f"robot  > {exchange['response_text']}{suffix}")
    latency = exchange["latency"]
    actions = ", ".join(a["action_id"] for a in exchange.get("actions", [])) or "-"
    click.echo(
        f"         emotion={label}  actions=[{actions}]  "
        f"total={latency['total_ms']:.0f}ms  overlap_saved={latency['overlap_saved_ms']:.0f}ms"
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="JSON config file.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8470, show_default=True)
def serve(config_path: str | None, host: str, port: int) -> None:
    """Start the dialogue service."""
    import uvicorn

    from .service import create_app

    app = create_app(_load_config(config_path))
    uvicorn.run(app, host=host, port=port)


@main.command()
@click.option("--trace", "trace_path", type=click.Path(exists=True), required=True, help="Speech trace (JSONL).")
@click.option("--session", "session_id", default=None, help="Existing session id; created when omitted.")
@click.option("--base-url", default=None, help="Running service to talk to; in-process app when omitted.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--frame-ref", default=None, help="Camera frame handle forwarded to the vision port.")
def replay(
    trace_path: str,
    session_id: str | None,
    base_url: str | None,
    config_path: str | None,
    frame_ref: str | None,
) -> None:
    """Batch-run a recorded interaction through the pipeline."""
    config = _load_config(config_path)
    trace = Path(trace_path).resolve()
    trace_ref = trace.name
    if not base_url:
        config.trace_dir = str(trace.parent)

    async def run() -> None:
        async with _client(base_url, config) as client:
            sid = session_id
            if sid is None:
                created = await client.post("/sessions", json={"display_name": "replay"})
                created.raise_for_status()
                sid = created.json()["session_id"]
                click.echo(f"session: {sid}")
            payload: dict = {"trace_ref": str(trace) if base_url else trace_ref}
            if frame_ref:
                payload["frame_ref"] = frame_ref
            response = await client.post(f"/sessions/{sid}/utterance", json=payload)
            response.raise_for_status()
            for exchange in response.json()["exchanges"]:
                _print_exchange(exchange)

    asyncio.run(run())


@main.command()
@click.option("--script", "script_path", type=click.Path(exists=True), required=True, help="Demo script (JSON).")
@click.option("--base-url", default=None, help="Running service to talk to; in-process app when omitted.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
def demo(script_path: str, base_url: str | None, config_path: str | None) -> None:
    """Scripted end-to-end run with mock ports.

    Script schema: {"user": {"display_name", "traits"},
    "turns": [{"text", "frame_ref"?} ...]}.
    """
    config = _load_config(config_path)
    with open(script_path, encoding="utf-8") as fh:
        script = json.load(fh)

    async def run() -> None:
        async with _client(base_url, config) as client:
            user = script.get("user", {})
            created = await client.post(
                "/sessions",
                json={
                    "display_name": user.get("display_name", "guest"),
                    "traits": user.get("traits", ""),
                    "user_id": user.get("user_id"),
                },
            )
            created.raise_for_status()
            sid = created.json()["session_id"]
            click.echo(f"session: {sid}")
            for turn in script.get("turns", []):
                response = await client.post(f"/sessions/{sid}/utterance", json=turn)
                response.raise_for_status()
                for exchange in response.json()["exchanges"]:
                    _print_exchange(exchange)
            state = await client.get(f"/sessions/{sid}/state")
            state.raise_for_status()
            body = state.json()
            click.echo(f"turns persisted: {len(body['history'])}")

    asyncio.run(run())


@main.group()
def eval() -> None:
    """Dialogue-quality evaluation over transcript corpora."""


@eval.command("run")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), required=True, help="JSONL corpus.")
@click.option(
    "--metrics",
    default="bleu,mauve,ppl,embedsim,accuracy",
    show_default=True,
    help="Comma-separated subset of bleu,mauve,ppl,embedsim,accuracy.",
)
@click.option("--report", "report_path", type=click.Path(), default=None, help="Write the JSON report here.")
@click.option("--seed", default=0, show_default=True)
def eval_run(corpus_path: str, metrics: str, report_path: str | None, seed: int) -> None:
    """Compute the requested metrics and emit a report."""
    requested = [m.strip() for m in metrics.split(",") if m.strip()]
    try:
        corpus = load_corpus(corpus_path)
        report = run_metrics(corpus, requested, seed=seed)
    except (MalformedCorpusError, ValueError) as exc:
        raise click.ClickException(str(exc)) from exc
    for name in requested:
        entry = report.metrics[name]
        click.echo(f"{name:>9}: {entry['value']:.6f}")
    if report_path:
        Path(report_path).write_text(report.to_json() + "\n", encoding="utf-8")
        click.echo(f"report written to {report_path}")


if __name__ == "__main__":
    main()
