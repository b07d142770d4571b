"""FastAPI service exposing the simulator and its verifiers.

Error contract: structurally bad JSON comes back as FastAPI's usual 422;
domain errors come back as 400 with a typed detail object whose ``kind``
is ``parse`` (protocol text or builtin resolution), ``execution``
(measurement/run failures), or ``malformed`` (bad state, graph, or code
payloads).  Verdicts are data, not errors: a failed certification is a
200 response with ``verdict: false``.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..algebra import overlap
from ..engine import ProtocolExecutionError, ProtocolValidationError, run
from ..graphs import PhaseExtractionError, build_graph_state, phase_polynomial_of
from ..parser import ProtocolParseError, parse_protocol
from ..protocols import BUILTINS, builtin
from ..verify import (
    CodeSpec,
    codeword_transform_check,
    equiv_global_phase,
    is_ame,
    kl_check,
    qecc312_code,
)
from .models import (
    AmeReportPayload,
    AmeVerifyRequest,
    BuiltinListResponse,
    BuiltinRow,
    EquivRequest,
    EquivResponse,
    GraphStateRequest,
    GraphVerifyRequest,
    GraphVerifyResponse,
    KlReportPayload,
    KlVerifyRequest,
    RunRequest,
    RunResponse,
    StatePayload,
)


def _error(status: int, kind: str, message: str, line: int | None = None) -> JSONResponse:
    detail = {"kind": kind, "message": message}
    if line is not None:
        detail["line"] = line
    return JSONResponse(status_code=status, content={"detail": detail})


def create_app() -> FastAPI:
    app = FastAPI(title="quditsim", version=__version__)

    @app.exception_handler(ProtocolParseError)
    async def _parse_error(request: Request, exc: ProtocolParseError):
        return _error(400, "parse", str(exc), exc.line)

    @app.exception_handler(ProtocolValidationError)
    async def _validation_error(request: Request, exc: ProtocolValidationError):
        return _error(400, "parse", str(exc))

    @app.exception_handler(ProtocolExecutionError)
    async def _execution_error(request: Request, exc: ProtocolExecutionError):
        return _error(400, "execution", str(exc))

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        # Bad domain data that passed schema validation (unknown builtin,
        # denormalized state vector, inconsistent graph, ...).
        return _error(400, "malformed", str(exc))

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/protocols", response_model=BuiltinListResponse)
    async def protocols() -> BuiltinListResponse:
        return BuiltinListResponse(
            builtins=[BuiltinRow(**info.__dict__) for info in BUILTINS]
        )

    @app.post("/run", response_model=RunResponse)
    async def run_protocol(req: RunRequest) -> RunResponse:
        if (req.builtin is None) == (req.source is None):
            raise ProtocolParseError("exactly one of builtin and source must be given")
        if req.builtin is not None:
            try:
                protocol = builtin(req.builtin, q=req.dim, n=req.n)
            except ValueError as exc:
                raise ProtocolParseError(str(exc)) from exc
        else:
            protocol = parse_protocol(req.source)
            if req.dim is not None and req.dim != protocol.q:
                raise ProtocolParseError(
                    f"dim {req.dim} contradicts the protocol's dim {protocol.q}"
                )
        record = run(protocol, forced=req.forced, seed=req.seed)
        return RunResponse(
            state=StatePayload.from_state(record.state),
            outcomes=record.outcomes,
            probability=record.probability,
            photon_order=list(record.photon_order),
        )

    @app.post("/graph/state", response_model=StatePayload)
    async def graph_state(req: GraphStateRequest) -> StatePayload:
        return StatePayload.from_state(build_graph_state(req.graph.to_graph()))

    @app.post("/verify/ame", response_model=AmeReportPayload)
    async def verify_ame(req: AmeVerifyRequest) -> AmeReportPayload:
        report = is_ame(req.state.to_state(), tol=req.tol)
        return AmeReportPayload(**report.to_dict())

    @app.post("/verify/graph", response_model=GraphVerifyResponse)
    async def verify_graph(req: GraphVerifyRequest) -> GraphVerifyResponse:
        state = req.state.to_state()
        target = build_graph_state(req.graph.to_graph())
        try:
            ov = abs(overlap(state, target))
        except ValueError as exc:
            raise ValueError(f"state does not match the graph's register: {exc}") from exc
        response = GraphVerifyResponse(
            verdict=ov >= 1.0 - req.tol, overlap_magnitude=ov, tol=req.tol
        )
        try:
            poly = phase_polynomial_of(state, tol=req.tol)
            response.pairs = list(poly.pairs)
            response.linear = list(poly.linear)
        except PhaseExtractionError:
            pass  # non-flat states simply omit the polynomial diagnostics
        return response

    @app.post("/verify/equiv", response_model=EquivResponse)
    async def verify_equiv(req: EquivRequest) -> EquivResponse:
        a, b = req.a.to_state(), req.b.to_state()
        ov = abs(overlap(a, b))
        return EquivResponse(
            verdict=equiv_global_phase(a, b, tol=req.tol),
            overlap_magnitude=ov,
            tol=req.tol,
        )

    @app.post("/verify/kl", response_model=KlReportPayload)
    async def verify_kl(req: KlVerifyRequest) -> KlReportPayload:
        if (req.code is None) == (req.codewords is None):
            raise ValueError("exactly one of code and codewords must be given")
        transform_check: bool | None = None
        if req.code is not None:
            if req.code != "qecc312":
                raise ValueError(f"unknown code {req.code!r}; known: qecc312")
            code = qecc312_code()
            transform_check = codeword_transform_check(code, tol=req.tol)
        else:
            cw = req.codewords
            code = CodeSpec(
                cw.n, cw.k, cw.d, cw.q, tuple(w.to_state() for w in cw.codewords)
            )
        report = kl_check(code, strict=req.strict, tol=req.tol)
        payload = KlReportPayload(**report.to_dict())
        payload.transform_check = transform_check
        if transform_check is False:
            payload.verdict = False
        return payload

    return app


app = create_app()
