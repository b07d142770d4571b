"""Command-line client for the simulator service.

All subcommands speak HTTP to the service layer.  By default they spin up
the app in-process (no socket); ``--server URL`` targets a running
instance instead, and ``serve`` starts one.

Exit codes: 0 success / verdict true, 2 parse error or malformed input,
3 execution error, 4 verification verdict false.  Human-readable messages
go to standard error; artifacts go to files (or stdout for reports).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_EXECUTION = 3
EXIT_VERDICT = 4

_ERROR_KIND_EXITS = {"parse": EXIT_INPUT, "malformed": EXIT_INPUT, "execution": EXIT_EXECUTION}


class _ClientError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


class _InProcessClient:
    """Minimal sync facade over the ASGI app: no socket, one event loop
    per request (the CLI makes at most a couple of calls per invocation)."""

    def __init__(self) -> None:
        from .service.app import create_app

        self._transport = httpx.ASGITransport(app=create_app())

    def request(self, method: str, path: str, json: dict | None = None) -> httpx.Response:
        import asyncio

        async def go() -> httpx.Response:
            async with httpx.AsyncClient(
                transport=self._transport, base_url="http://quditsim.local"
            ) as client:
                return await client.request(method, path, json=json)

        return asyncio.run(go())

    def __enter__(self) -> "_InProcessClient":
        return self

    def __exit__(self, *exc) -> None:
        pass


def _make_client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=120.0)
    return _InProcessClient()


def _call(client: httpx.Client, method: str, path: str, payload: dict | None = None) -> dict:
    try:
        response = client.request(method, path, json=payload)
    except httpx.HTTPError as exc:
        raise _ClientError(f"service request failed: {exc}", EXIT_EXECUTION) from exc
    if response.status_code == 200:
        return response.json()
    if response.status_code == 422:
        raise _ClientError(f"malformed request: {response.text}", EXIT_INPUT)
    try:
        detail = response.json().get("detail", {})
    except ValueError:
        detail = {}
    if isinstance(detail, dict) and "kind" in detail:
        kind = detail["kind"]
        message = detail.get("message", response.text)
        raise _ClientError(message, _ERROR_KIND_EXITS.get(kind, EXIT_EXECUTION))
    raise _ClientError(
        f"service error {response.status_code}: {response.text}", EXIT_EXECUTION
    )


def _write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _read_json(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise _ClientError(f"{what} file not found: {path}", EXIT_INPUT) from None
    except json.JSONDecodeError as exc:
        raise _ClientError(f"{what} file {path} is not valid JSON: {exc}", EXIT_INPUT) from None


def _emit_report(payload: dict, path: str | None) -> None:
    if path:
        _write_json(path, payload)
    else:
        json.dump(payload, sys.stdout, indent=2)
        sys.stdout.write("\n")


# ============================================================
#  Subcommands
# ============================================================


def _cmd_list(args) -> int:
    with _make_client(args.server) as client:
        rows = _call(client, "GET", "/protocols")["builtins"]
    header = ("name", "photons", "local dims", "emitters", "interference")
    widths = [len(h) for h in header]
    table = []
    for row in rows:
        cells = (
            row["name"],
            str(row["photons"]),
            str(row["local_dims"]),
            str(row["emitters"]),
            "yes" if row["interference"] else "no",
        )
        widths = [max(w, len(c)) for w, c in zip(widths, cells)]
        table.append(cells)
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    print(fmt.format(*header))
    print(fmt.format(*("-" * w for w in widths)))
    for cells in table:
        print(fmt.format(*cells))
    return EXIT_OK


def _parse_forced(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise _ClientError(
            f"--force wants comma-separated integers, got {text!r}", EXIT_INPUT
        ) from None


def _cmd_run(args) -> int:
    if (args.builtin is None) == (args.file is None):
        raise _ClientError("give exactly one of --builtin and --file", EXIT_INPUT)
    if (args.force is None) == (args.seed is None):
        raise _ClientError("give exactly one of --force and --seed", EXIT_INPUT)
    request: dict = {"dim": args.dim, "n": args.n}
    if args.builtin is not None:
        request["builtin"] = args.builtin
    else:
        try:
            request["source"] = Path(args.file).read_text(encoding="utf-8")
        except OSError as exc:
            raise _ClientError(f"cannot read protocol file: {exc}", EXIT_INPUT) from None
    if args.force is not None:
        request["forced"] = _parse_forced(args.force)
    else:
        request["seed"] = args.seed

    with _make_client(args.server) as client:
        result = _call(client, "POST", "/run", request)

    if args.out:
        _write_json(args.out, result["state"])
    if args.record:
        record = {
            "q": result["state"]["q"],
            "photon_order": result["photon_order"],
            "outcomes": result["outcomes"],
            "probability": result["probability"],
        }
        _write_json(args.record, record)
    outcomes = ", ".join(f"{k}={v}" for k, v in result["outcomes"].items())
    print(
        f"ran {'builtin ' + args.builtin if args.builtin else args.file}: "
        f"{len(result['photon_order'])} photons, outcomes {{{outcomes}}}, "
        f"branch probability {result['probability']:.6g}",
        file=sys.stderr,
    )
    return EXIT_OK


def _verdict_exit(verdict: bool) -> int:
    return EXIT_OK if verdict else EXIT_VERDICT


def _cmd_verify_ame(args) -> int:
    request = {"state": _read_json(args.state, "state"), "tol": args.tol}
    with _make_client(args.server) as client:
        report = _call(client, "POST", "/verify/ame", request)
    _emit_report(report, args.report)
    print(
        f"ame verdict: {report['verdict']} "
        f"(n={report['n']}, q={report['q']}, subsets={len(report['subsets'])})",
        file=sys.stderr,
    )
    return _verdict_exit(report["verdict"])


def _cmd_verify_graph(args) -> int:
    request = {
        "state": _read_json(args.state, "state"),
        "graph": _read_json(args.graph, "graph"),
        "tol": args.tol,
    }
    with _make_client(args.server) as client:
        report = _call(client, "POST", "/verify/graph", request)
    _emit_report(report, args.report)
    print(
        f"graph verdict: {report['verdict']} "
        f"(overlap magnitude {report['overlap_magnitude']:.12f})",
        file=sys.stderr,
    )
    return _verdict_exit(report["verdict"])


def _cmd_verify_equiv(args) -> int:
    request = {
        "a": _read_json(args.a, "state"),
        "b": _read_json(args.b, "state"),
        "tol": args.tol,
    }
    with _make_client(args.server) as client:
        report = _call(client, "POST", "/verify/equiv", request)
    _emit_report(report, args.report)
    print(
        f"equiv verdict: {report['verdict']} "
        f"(overlap magnitude {report['overlap_magnitude']:.12f})",
        file=sys.stderr,
    )
    return _verdict_exit(report["verdict"])


def _cmd_verify_kl(args) -> int:
    request = {"code": args.code, "strict": args.strict, "tol": args.tol}
    with _make_client(args.server) as client:
        report = _call(client, "POST", "/verify/kl", request)
    _emit_report(report, args.report)
    print(
        f"kl verdict: {report['verdict']} "
        f"(weight limit {report['weight_limit']}, "
        f"{report['operators_checked']} operators, "
        f"max deviation {report['max_deviation']:.3e})",
        file=sys.stderr,
    )
    return _verdict_exit(report["verdict"])


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("quditsim.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


# ============================================================
#  Argument wiring
# ============================================================


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quditsim",
        description="simulate emitter-based photonic protocols and certify their outputs",
    )
    parser.add_argument(
        "--server",
        default=None,
        help="URL of a running service (default: run the service in-process)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="show the builtin protocol catalog")
    p_list.set_defaults(handler=_cmd_list)

    p_run = sub.add_parser("run", help="execute a builtin or a protocol file")
    p_run.add_argument("--builtin", help="builtin protocol name (see: list)")
    p_run.add_argument("--file", help="protocol source file")
    p_run.add_argument("--dim", type=int, default=None, help="local dimension q")
    p_run.add_argument("--n", type=int, default=None, help="chain length for linear-cz/linear-cz2")
    p_run.add_argument("--force", help="comma-separated outcomes, one per measurement")
    p_run.add_argument("--seed", type=int, help="sample outcomes with this RNG seed")
    p_run.add_argument("--out", help="write the final state JSON here")
    p_run.add_argument("--record", help="write the run record JSON here")
    p_run.set_defaults(handler=_cmd_run)

    p_verify = sub.add_parser("verify", help="certify a state or code")
    v_sub = p_verify.add_subparsers(dest="verify_command", required=True)

    def add_common(p):
        p.add_argument("--tol", type=float, default=1e-9, help="certification tolerance")
        p.add_argument("--report", help="write the report JSON here (default: stdout)")

    p_ame = v_sub.add_parser("ame", help="subset-purity scan for absolute maximal entanglement")
    p_ame.add_argument("state", help="state JSON file")
    add_common(p_ame)
    p_ame.set_defaults(handler=_cmd_verify_ame)

    p_graph = v_sub.add_parser("graph", help="global-phase equivalence to a graph state")
    p_graph.add_argument("state", help="state JSON file")
    p_graph.add_argument("--graph", required=True, help="graph JSON file")
    add_common(p_graph)
    p_graph.set_defaults(handler=_cmd_verify_graph)

    p_equiv = v_sub.add_parser("equiv", help="global-phase equivalence of two states")
    p_equiv.add_argument("a", help="first state JSON file")
    p_equiv.add_argument("b", help="second state JSON file")
    add_common(p_equiv)
    p_equiv.set_defaults(handler=_cmd_verify_equiv)

    p_kl = v_sub.add_parser("kl", help="Knill-Laflamme scan of a code")
    p_kl.add_argument("--code", required=True, help="named code (qecc312)")
    p_kl.add_argument(
        "--strict",
        action="store_true",
        help="scan error products up to weight d instead of d-1",
    )
    add_common(p_kl)
    p_kl.set_defaults(handler=_cmd_verify_kl)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(handler=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
