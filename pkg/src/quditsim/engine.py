"""Deterministic execution of emitter-to-photon generation protocols.

A protocol is a straight-line instruction sequence over named sites:
emitters exist from the start, photons come into existence when an
emitter pumps them, and each emitter is measured exactly once (in the
Fourier-conjugate sense: a plain Z-basis readout after the protocol's own
basis-change gates).  Measurement outcomes feed feed-forward Z corrections
whose exponents are integer-linear expressions in the outcome variables.

Running a protocol yields the photonic register only, presented in the
protocol's declared photon order, together with the realized outcomes and
the Born probability of that branch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from .algebra import (
    EMITTER,
    PHOTON,
    RegisterState,
    Site,
    apply_cz,
    apply_hadamard,
    apply_hadamard_dag,
    apply_x,
    apply_z,
    digit_distribution,
    reorder_to_labels,
    zero_state,
)

# Forced outcomes below this Born probability are rejected as impossible.
MIN_BRANCH_PROBABILITY = 1e-12


class ProtocolValidationError(ValueError):
    """The instruction sequence is structurally ill-formed."""


class ProtocolExecutionError(RuntimeError):
    """The protocol could not be executed with the given run options."""


# ============================================================
#  Instructions
# ============================================================


@dataclass(frozen=True)
class GateH:
    target: str


@dataclass(frozen=True)
class GateHdag:
    target: str


@dataclass(frozen=True)
class GateX:
    target: str
    alpha: int


@dataclass(frozen=True)
class GateZ:
    target: str
    beta: int


@dataclass(frozen=True)
class GateCZ:
    target_a: str
    target_b: str
    beta: int


@dataclass(frozen=True)
class Pump:
    emitter: str
    photon: str


@dataclass(frozen=True)
class MeasureZ:
    emitter: str
    outcome: str


@dataclass(frozen=True)
class Correct:
    """Feed-forward Z**beta with beta = constant + sum coeff * outcome (mod q)."""

    target: str
    terms: tuple[tuple[int, str], ...]  # (coefficient, outcome variable)
    constant: int = 0


Instruction = Union[GateH, GateHdag, GateX, GateZ, GateCZ, Pump, MeasureZ, Correct]


# ============================================================
#  Protocols
# ============================================================


@dataclass(frozen=True)
class Protocol:
    """A complete generation protocol.

    ``photon_order`` is the presentation order of the emitted photons in
    the final register; it must name each pumped photon exactly once.
    """

    q: int
    emitters: tuple[str, ...]
    instructions: tuple[Instruction, ...]
    photon_order: tuple[str, ...]
    name: str | None = None

    def photons(self) -> tuple[str, ...]:
        """Photon labels in pump order."""
        return tuple(ins.photon for ins in self.instructions if isinstance(ins, Pump))

    def measurement_count(self) -> int:
        return sum(1 for ins in self.instructions if isinstance(ins, MeasureZ))

    def validate(self) -> None:
        """Raise :class:`ProtocolValidationError` on any structural defect."""
        if not isinstance(self.q, int) or isinstance(self.q, bool) or self.q < 2:
            raise ProtocolValidationError(f"local dimension must be >= 2, got {self.q!r}")
        if not self.emitters:
            raise ProtocolValidationError("protocol declares no emitters")
        if len(set(self.emitters)) != len(self.emitters):
            raise ProtocolValidationError(f"duplicate emitter labels: {self.emitters}")

        live = set(self.emitters)
        photons: list[str] = []
        measured: set[str] = set()
        bound_vars: set[str] = set()

        def need_live(label: str, what: str) -> None:
            if label in live:
                return
            if label in measured:
                raise ProtocolValidationError(
                    f"{what} targets emitter {label!r} after its measurement"
                )
            raise ProtocolValidationError(f"{what} targets unknown site {label!r}")

        for ins in self.instructions:
            if isinstance(ins, (GateH, GateHdag, GateX, GateZ)):
                need_live(ins.target, type(ins).__name__)
            elif isinstance(ins, GateCZ):
                need_live(ins.target_a, "GateCZ")
                need_live(ins.target_b, "GateCZ")
                if ins.target_a == ins.target_b:
                    raise ProtocolValidationError(
                        f"GateCZ needs two distinct sites, got {ins.target_a!r} twice"
                    )
            elif isinstance(ins, Pump):
                need_live(ins.emitter, "Pump")
                if ins.emitter not in self.emitters:
                    raise ProtocolValidationError(
                        f"Pump source {ins.emitter!r} is not an emitter"
                    )
                if ins.photon in live or ins.photon in measured:
                    raise ProtocolValidationError(
                        f"photon label {ins.photon!r} is already in use"
                    )
                live.add(ins.photon)
                photons.append(ins.photon)
            elif isinstance(ins, MeasureZ):
                if ins.emitter not in self.emitters:
                    raise ProtocolValidationError(
                        f"MeasureZ target {ins.emitter!r} is not an emitter"
                    )
                need_live(ins.emitter, "MeasureZ")
                if ins.outcome in bound_vars:
                    raise ProtocolValidationError(
                        f"outcome variable {ins.outcome!r} bound twice"
                    )
                live.discard(ins.emitter)
                measured.add(ins.emitter)
                bound_vars.add(ins.outcome)
            elif isinstance(ins, Correct):
                need_live(ins.target, "Correct")
                for _, var in ins.terms:
                    if var not in bound_vars:
                        raise ProtocolValidationError(
                            f"Correct uses unbound outcome variable {var!r}"
                        )
            else:
                raise ProtocolValidationError(f"unknown instruction {ins!r}")

        unmeasured = [e for e in self.emitters if e not in measured]
        if unmeasured:
            raise ProtocolValidationError(
                f"emitters never measured: {unmeasured} (the final register must be photonic)"
            )
        if sorted(self.photon_order) != sorted(photons):
            raise ProtocolValidationError(
                f"photon order {list(self.photon_order)} does not match pumped photons {photons}"
            )


# ============================================================
#  Primitive operations
# ============================================================


def pump(state: RegisterState, emitter: str, photon: str) -> RegisterState:
    """Entangling emission: copy the emitter digit onto a fresh photon.

    Acts as the isometry sum_i c_i |i>_e |rest> -> sum_i c_i |i>_e |i>_p
    |rest>, with the new photon site appended to the register.
    """
    e_ax = state.site_index(emitter)
    if state.sites[e_ax].kind != EMITTER:
        raise ValueError(f"pump source {emitter!r} is not an emitter")
    for s in state.sites:
        if s.label == photon:
            raise ValueError(f"photon label {photon!r} already present")
    q, n = state.q, state.n
    t = np.moveaxis(state.tensor(), e_ax, 0)
    out = np.zeros((q,) + t.shape[1:] + (q,), dtype=np.complex128)
    for d in range(q):
        out[d, ..., d] = t[d]
    out = np.moveaxis(out, 0, e_ax)
    sites = state.sites + (Site(PHOTON, photon),)
    return RegisterState(q, sites, out.reshape(-1))


def measure_z(
    state: RegisterState,
    emitter: str,
    *,
    forced: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[int, RegisterState, float]:
    """Projective digit readout of one emitter, which leaves the register.

    Exactly one of ``forced`` (postselect that outcome) and ``rng`` (sample
    from the Born distribution) must be given.  Returns (outcome,
    collapsed state, branch probability).  A forced outcome must carry
    probability above ``MIN_BRANCH_PROBABILITY``.
    """
    e_ax = state.site_index(emitter)
    if state.sites[e_ax].kind != EMITTER:
        raise ValueError(f"site {emitter!r} is not an emitter")
    if (forced is None) == (rng is None):
        raise ValueError("exactly one of forced= and rng= must be given")
    q = state.q
    probs = digit_distribution(state, e_ax)
    if forced is not None:
        outcome = int(forced)
        if not 0 <= outcome < q:
            raise ValueError(f"forced outcome {outcome} out of range for q={q}")
        p = float(probs[outcome])
        if p <= MIN_BRANCH_PROBABILITY:
            raise ProtocolExecutionError(
                f"forced outcome {outcome} on {emitter!r} has probability {p:.3e}"
            )
    else:
        weights = probs / probs.sum()
        outcome = int(rng.choice(q, p=weights))
        p = float(probs[outcome])
    sub = np.take(state.tensor(), outcome, axis=e_ax)
    sub = sub / np.sqrt(p)
    sites = state.sites[:e_ax] + state.sites[e_ax + 1 :]
    return outcome, RegisterState(q, sites, sub.reshape(-1)), p


# ============================================================
#  Running protocols
# ============================================================


@dataclass(frozen=True)
class RunRecord:
    """Result of one protocol execution.

    ``state`` holds photons only, in the protocol's declared order;
    ``probability`` is the Born probability of the realized outcome branch.
    """

    state: RegisterState
    outcomes: dict[str, int]
    probability: float
    photon_order: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "q": self.state.q,
            "photon_order": list(self.photon_order),
            "outcomes": dict(self.outcomes),
            "probability": self.probability,
        }


def run(
    protocol: Protocol,
    *,
    forced: Sequence[int] | None = None,
    seed: int | None = None,
) -> RunRecord:
    """Execute a protocol on exact state vectors.

    Exactly one outcome mode must be chosen: ``forced`` postselects the
    given outcome per measurement (in instruction order), ``seed`` samples
    every measurement from the Born distribution with a deterministic
    generator.  Identical seeds give identical records.
    """
    protocol.validate()
    if (forced is None) == (seed is None):
        raise ProtocolExecutionError(
            "exactly one of forced= and seed= must be given"
        )
    rng = np.random.default_rng(seed) if seed is not None else None
    forced_it: Iterator[int] | None = None
    if forced is not None:
        forced = [int(o) for o in forced]
        if len(forced) != protocol.measurement_count():
            raise ProtocolExecutionError(
                f"protocol has {protocol.measurement_count()} measurements, "
                f"got {len(forced)} forced outcomes"
            )
        forced_it = iter(forced)

    state = zero_state(protocol.q, [Site(EMITTER, e) for e in protocol.emitters])
    outcomes: dict[str, int] = {}
    probability = 1.0

    for ins in protocol.instructions:
        if isinstance(ins, GateH):
            state = apply_hadamard(state, state.site_index(ins.target))
        elif isinstance(ins, GateHdag):
            state = apply_hadamard_dag(state, state.site_index(ins.target))
        elif isinstance(ins, GateX):
            state = apply_x(state, state.site_index(ins.target), ins.alpha)
        elif isinstance(ins, GateZ):
            state = apply_z(state, state.site_index(ins.target), ins.beta)
        elif isinstance(ins, GateCZ):
            state = apply_cz(
                state,
                state.site_index(ins.target_a),
                state.site_index(ins.target_b),
                ins.beta,
            )
        elif isinstance(ins, Pump):
            state = pump(state, ins.emitter, ins.photon)
        elif isinstance(ins, MeasureZ):
            if forced_it is not None:
                outcome, state, p = measure_z(
                    state, ins.emitter, forced=next(forced_it)
                )
            else:
                outcome, state, p = measure_z(state, ins.emitter, rng=rng)
            outcomes[ins.outcome] = outcome
            probability *= p
        elif isinstance(ins, Correct):
            beta = ins.constant + sum(c * outcomes[v] for c, v in ins.terms)
            state = apply_z(state, state.site_index(ins.target), beta)
        else:  # pragma: no cover - validate() already rejects these
            raise ProtocolExecutionError(f"unknown instruction {ins!r}")

    state = reorder_to_labels(state, protocol.photon_order)
    return RunRecord(state, outcomes, probability, protocol.photon_order)
