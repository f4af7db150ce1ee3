"""Command line client.

Every command except ``serve`` talks to the HTTP API. By default the app is
mounted in-process (no socket, no network), which keeps offline runs exact;
pass --service-url to aim the same commands at a running server instead.

Exit codes: 0 on success, 1 when the service reports a failure, 2 for usage
errors.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Awaitable, Callable

import httpx

from .config import BACKEND_KINDS, DEFAULT_MODEL, DEFAULT_PORT, AppConfig
from .planner import DEFAULT_TOKEN_BUDGET, PlannerConfig


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tabletalk")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--service-url", default=None, help="talk to a running server instead of in-process")
        p.add_argument("--backend", choices=BACKEND_KINDS, default="scripted")
        p.add_argument("--script", type=Path, default=None, help="rule file for the scripted backend")
        p.add_argument("--cassette", type=Path, default=None, help="recording file for the replay backend")
        p.add_argument("--model", default=DEFAULT_MODEL)
        p.add_argument("--base-url", default=None, help="chat-completions endpoint for the http backend")
        p.add_argument("--budget", type=int, default=DEFAULT_TOKEN_BUDGET, help="prompt token budget")

    p_profile = sub.add_parser("profile", help="print the background profile of a CSV")
    add_common(p_profile)
    p_profile.add_argument("csv", type=Path)
    p_profile.add_argument("--name", default=None)

    p_ask = sub.add_parser("ask", help="answer a question about a CSV")
    add_common(p_ask)
    p_ask.add_argument("csv", type=Path)
    p_ask.add_argument("question")
    p_ask.add_argument("--name", default=None)
    p_ask.add_argument(
        "--show-plan",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="print the executed plan steps before the answer",
    )

    p_bench = sub.add_parser("bench", help="benchmark suites")
    bench_sub = p_bench.add_subparsers(dest="bench_command", required=True)
    p_run = bench_sub.add_parser("run", help="run a suite manifest and report accuracy")
    add_common(p_run)
    p_run.add_argument("manifest", type=Path)
    p_run.add_argument("--json-out", type=Path, default=Path("bench_report.json"))

    p_check = sub.add_parser("check", help="grade a predicted answer against a truth")
    add_common(p_check)
    p_check.add_argument("--predicted", required=True, help='value JSON, e.g. {"kind":"number","value":3}')
    p_check.add_argument("--truth", required=True, help='truth JSON, e.g. {"kind":"number","value":3.0001}')
    p_check.add_argument("--margin", type=float, default=None)
    p_check.add_argument("--order-insensitive", action="store_true")

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    add_common(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=DEFAULT_PORT)

    return parser


def config_from_args(args: argparse.Namespace) -> AppConfig:
    planner = replace(PlannerConfig(model_name=args.model), token_budget=args.budget)
    return AppConfig(
        backend_kind=args.backend,
        script_path=args.script,
        cassette_path=args.cassette,
        model=args.model,
        base_url=args.base_url,
        planner=planner,
        port=getattr(args, "port", DEFAULT_PORT),
    )


async def _with_client(args: argparse.Namespace, fn: Callable[[httpx.AsyncClient], Awaitable[int]]) -> int:
    if args.service_url:
        async with httpx.AsyncClient(base_url=args.service_url, timeout=60.0) as client:
            return await fn(client)
    from .service import create_app

    transport = httpx.ASGITransport(app=create_app(config_from_args(args)))
    async with httpx.AsyncClient(transport=transport, base_url="http://tabletalk.local", timeout=60.0) as client:
        return await fn(client)


def _fail(payload: dict) -> int:
    failure = payload.get("failure", {})
    kind = failure.get("kind", "error")
    detail = failure.get("detail", json.dumps(payload))
    print(f"{kind}: {detail}", file=sys.stderr)
    return 1


async def _upload(client: httpx.AsyncClient, csv_path: Path, name: str | None) -> tuple[int, dict]:
    data = csv_path.read_bytes()
    headers = {"X-Dataset-Name": name or csv_path.stem}
    response = await client.post(
        "/datasets",
        files={"file": (csv_path.name, data, "text/csv")},
        headers=headers,
    )
    return response.status_code, response.json()


async def _cmd_profile(args: argparse.Namespace) -> int:
    async def go(client: httpx.AsyncClient) -> int:
        status, body = await _upload(client, args.csv, args.name)
        if status != 201:
            return _fail(body)
        response = await client.get(
            f"/datasets/{body['id']}/profile", params={"budget": args.budget}
        )
        if response.status_code != 200:
            return _fail(response.json())
        print(response.json()["profile"], end="")
        return 0

    return await _with_client(args, go)


async def _cmd_ask(args: argparse.Namespace) -> int:
    async def go(client: httpx.AsyncClient) -> int:
        status, body = await _upload(client, args.csv, args.name)
        if status != 201:
            return _fail(body)
        response = await client.post(
            "/query", json={"dataset_id": body["id"], "question": args.question}
        )
        payload = response.json()
        if response.status_code != 200:
            return _fail(payload)
        if args.show_plan:
            for step in payload["plan"]:
                print(f"{step['index']}: {step['op']} -> {step['result']}")
        print(f"Answer: {payload['answer_text']}")
        return 0

    return await _with_client(args, go)


async def _cmd_bench_run(args: argparse.Namespace) -> int:
    from .bench.report import render_text, report_from_json

    async def go(client: httpx.AsyncClient) -> int:
        response = await client.post(
            "/bench/run", json={"manifest_path": str(args.manifest.resolve())}
        )
        payload = response.json()
        if response.status_code != 200:
            return _fail(payload)
        print(render_text(report_from_json(payload)), end="")
        args.json_out.write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"per-case report written to {args.json_out}")
        return 0

    return await _with_client(args, go)


async def _cmd_check(args: argparse.Namespace) -> int:
    try:
        predicted = json.loads(args.predicted)
        truth = json.loads(args.truth)
    except ValueError as exc:
        print(f"validation-error: {exc}", file=sys.stderr)
        return 1
    if args.margin is not None:
        truth = {**truth, "margin": args.margin}

    async def go(client: httpx.AsyncClient) -> int:
        response = await client.post(
            "/check",
            json={
                "predicted": predicted,
                "truth": truth,
                "order_insensitive": args.order_insensitive,
            },
        )
        payload = response.json()
        if response.status_code != 200:
            return _fail(payload)
        if payload["correct"]:
            print("correct")
        else:
            print(f"incorrect: {payload['reason']}")
        return 0

    return await _with_client(args, go)


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(config_from_args(args)), host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "question", None) is not None and not args.question.strip():
            parser.error("question must not be empty")
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    if args.command == "serve":
        return _cmd_serve(args)
    try:
        if args.command == "profile":
            return asyncio.run(_cmd_profile(args))
        if args.command == "ask":
            return asyncio.run(_cmd_ask(args))
        if args.command == "bench":
            return asyncio.run(_cmd_bench_run(args))
        if args.command == "check":
            return asyncio.run(_cmd_check(args))
    except OSError as exc:
        print(f"io-error: {exc}", file=sys.stderr)
        return 1
    except httpx.HTTPError as exc:
        print(f"connection-error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError(f"unhandled command {args.command!r}")


def run() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    run()
