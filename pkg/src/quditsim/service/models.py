"""Request/response schemas for the simulator service.

States and graphs travel in the same JSON shapes the CLI writes to disk,
so a file produced by `quditsim run --out` can be posted back verbatim.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

from ..algebra import RegisterState, state_from_dict, state_to_dict
from ..graphs import WeightedGraph


class SitePayload(BaseModel):
    kind: Literal["emitter", "photon"]
    label: str


class StatePayload(BaseModel):
    """A register state: local dimension, sites, and [re, im] amplitude pairs."""

    q: int
    sites: list[SitePayload]
    amps: list[tuple[float, float]]

    @classmethod
    def from_state(cls, state: RegisterState) -> "StatePayload":
        return cls(**state_to_dict(state))

    def to_state(self) -> RegisterState:
        return state_from_dict(self.model_dump())


class GraphPayload(BaseModel):
    """Weighted graph as (a, b, weight) edge triples over n vertices."""

    q: int
    n: int
    edges: list[tuple[int, int, int]]

    @classmethod
    def from_graph(cls, graph: WeightedGraph) -> "GraphPayload":
        return cls(**graph.to_dict())

    def to_graph(self) -> WeightedGraph:
        return WeightedGraph.from_dict(self.model_dump())


class BuiltinRow(BaseModel):
    name: str
    photons: str
    local_dims: str
    emitters: int
    interference: bool
    default_dim: int
    takes_length: bool
    target: str


class BuiltinListResponse(BaseModel):
    builtins: list[BuiltinRow]


class RunRequest(BaseModel):
    """Execute a builtin (by name) or protocol source text.

    Exactly one of ``builtin``/``source`` and exactly one of
    ``forced``/``seed`` must be given.
    """

    builtin: str | None = None
    source: str | None = None
    dim: int | None = None
    n: int | None = None
    forced: list[int] | None = None
    seed: int | None = None


class RunResponse(BaseModel):
    state: StatePayload
    outcomes: dict[str, int]
    probability: float
    photon_order: list[str]


class GraphStateRequest(BaseModel):
    graph: GraphPayload


class AmeVerifyRequest(BaseModel):
    state: StatePayload
    tol: float = Field(default=1e-9, gt=0)


class AmeSubsetPayload(BaseModel):
    sites: list[int]
    purity: float
    target: float
    deviation: float


class AmeReportPayload(BaseModel):
    n: int
    q: int
    tol: float
    verdict: bool
    worst: AmeSubsetPayload | None
    subsets: list[AmeSubsetPayload]


class GraphVerifyRequest(BaseModel):
    state: StatePayload
    graph: GraphPayload
    tol: float = Field(default=1e-9, gt=0)


class GraphVerifyResponse(BaseModel):
    verdict: bool
    overlap_magnitude: float
    tol: float
    # Recovered exponent polynomial when the state has flat magnitudes:
    # pair terms (a, b, w) and per-site linear coefficients.
    pairs: list[tuple[int, int, int]] | None = None
    linear: list[int] | None = None


class EquivRequest(BaseModel):
    a: StatePayload
    b: StatePayload
    tol: float = Field(default=1e-9, gt=0)


class EquivResponse(BaseModel):
    verdict: bool
    overlap_magnitude: float
    tol: float


class CodewordsPayload(BaseModel):
    n: int
    k: int
    d: int
    q: int
    codewords: list[StatePayload]


class KlVerifyRequest(BaseModel):
    """Scan a named code or an explicit codeword set."""

    code: str | None = None
    codewords: CodewordsPayload | None = None
    strict: bool = False
    tol: float = Field(default=1e-9, gt=0)


class KlRecordPayload(BaseModel):
    op: str
    sites: list[int]
    exponents: list[tuple[int, int]]
    f_re: float
    f_im: float
    deviation: float
    ok: bool


class KlReportPayload(BaseModel):
    verdict: bool
    weight_limit: int
    strict: bool
    tol: float
    max_deviation: float
    operators_checked: int
    transform_check: bool | None = None
    records: list[KlRecordPayload]


class ErrorDetail(BaseModel):
    kind: Literal["parse", "execution", "malformed"]
    message: str
    line: int | None = None
