"""Built-in generation protocols.

Each entry produces a :class:`~quditsim.engine.Protocol` over one, two, or
three emitters.  The catalog covers the weighted linear chains, the
absolutely-maximally-entangled targets on 4 to 7 sites, and the three
codeword generators of the [[3,1,2]] three-level code.

Conventions baked into the transcriptions:

* emitters are labeled e1, e2, e3 and always start in |0>; protocols that
  need another initial emitter state open with an X gate,
* photons are labeled p1, p2, ... in pump order,
* feed-forward corrections are Z powers linear in the outcome variables;
  the plain-CZ protocols use coefficient q-1, the inverse-Fourier chain
  uses coefficient 1 (its pre-measurement phases carry the opposite sign),
* the declared photon order is the order in which the final state is
  presented, which for ame5-two-emitter differs from pump order so that
  the output is literally the five-cycle graph state.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import (
    Correct,
    GateCZ,
    GateH,
    GateHdag,
    GateX,
    GateZ,
    MeasureZ,
    Protocol,
    Pump,
)


@dataclass(frozen=True)
class BuiltinInfo:
    """Catalog row for one built-in protocol."""

    name: str
    photons: str          # photon count, possibly symbolic ("n")
    local_dims: str       # allowed local dimensions, human readable
    emitters: int
    interference: bool    # needs a photon-emitter entangling gate
    default_dim: int      # smallest allowed q
    takes_length: bool    # chain protocols are parameterized by n
    target: str           # verification family: graph | ame | codeword


BUILTINS: tuple[BuiltinInfo, ...] = (
    BuiltinInfo("linear-cz", "n >= 2", "q >= 2", 1, False, 2, True, "graph"),
    BuiltinInfo("linear-cz2", "n >= 2", "q >= 2", 1, False, 2, True, "graph"),
    BuiltinInfo("ame43-a", "4", "q = 3", 2, False, 3, False, "ame"),
    BuiltinInfo("ame43-b", "4", "q = 3", 2, False, 3, False, "ame"),
    BuiltinInfo("ame5-one-emitter", "5", "q >= 2", 1, True, 2, False, "ame"),
    BuiltinInfo("ame5-two-emitter", "5", "q >= 2", 2, False, 2, False, "ame"),
    BuiltinInfo("ame6-a", "6", "q >= 2", 2, True, 2, False, "ame"),
    BuiltinInfo("ame6-b", "6", "q >= 2", 3, False, 2, False, "ame"),
    BuiltinInfo("ame7-3", "7", "q = 3", 2, True, 3, False, "ame"),
    BuiltinInfo("qecc312-psi0", "3", "q = 3", 1, False, 3, False, "codeword"),
    BuiltinInfo("qecc312-psi1", "3", "q = 3", 1, False, 3, False, "codeword"),
    BuiltinInfo("qecc312-psi2", "3", "q = 3", 1, False, 3, False, "codeword"),
)

_BY_NAME = {info.name: info for info in BUILTINS}

# Protocols pinned to three-level systems.
_QUTRIT_ONLY = frozenset(
    name for name, info in _BY_NAME.items() if info.local_dims == "q = 3"
)


def builtin_names() -> list[str]:
    return [info.name for info in BUILTINS]


def builtin_info(name: str) -> BuiltinInfo:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin {name!r}; known: {', '.join(builtin_names())}"
        ) from None


# ============================================================
#  Transcriptions
# ============================================================


def _linear_chain(n: int, q: int, inverse: bool) -> Protocol:
    """Photonic path graph from one emitter.

    Plain variant: H, then n rounds of (pump, H); edge weight 1.  Inverse
    variant: H, then n rounds of (pump, Hdag); edge weight q-1, and the
    final correction coefficient flips sign accordingly.
    """
    e = "e1"
    ins: list = [GateH(e)]
    basis_gate = GateHdag if inverse else GateH
    for t in range(1, n + 1):
        ins.append(Pump(e, f"p{t}"))
        ins.append(basis_gate(e))
    coeff = 1 if inverse else (q - 1)
    ins.append(MeasureZ(e, "o1"))
    ins.append(Correct(f"p{n}", ((coeff, "o1"),)))
    order = tuple(f"p{t}" for t in range(1, n + 1))
    return Protocol(q, (e,), tuple(ins), order)


def _ame43(variant: str) -> Protocol:
    """Two-emitter four-photon AME generators over three-level systems.

    The two variants differ in the middle round: variant a flips the
    second emitter with an inverse Fourier gate before re-entangling with
    CZ, variant b keeps plain Fourier gates and re-entangles with CZ^2.
    """
    q = 3
    e1, e2 = "e1", "e2"
    ins: list = [GateH(e1), GateH(e2), GateCZ(e1, e2, 1), Pump(e1, "p1"), Pump(e2, "p2")]
    if variant == "a":
        ins += [GateH(e1), GateHdag(e2), GateCZ(e1, e2, 1)]
    else:
        ins += [GateH(e1), GateH(e2), GateCZ(e1, e2, 2)]
    ins += [
        Pump(e1, "p3"),
        Pump(e2, "p4"),
        GateH(e1),
        GateH(e2),
        MeasureZ(e1, "o1"),
        MeasureZ(e2, "o2"),
        Correct("p3", ((2, "o1"),)),
        Correct("p4", ((2, "o2"),)),
    ]
    return Protocol(q, (e1, e2), tuple(ins), ("p1", "p2", "p3", "p4"))


def _ame5_one_emitter(q: int) -> Protocol:
    """Five-cycle from a single emitter plus one photon-emitter CZ.

    The emitter walks a four-photon chain, then the cycle is closed by
    re-entangling the first photon with the emitter before the last pump.
    """
    e = "e1"
    ins: list = [GateH(e)]
    for t in range(1, 5):
        ins.append(Pump(e, f"p{t}"))
        ins.append(GateH(e))
    ins += [
        GateCZ("p1", e, 1),
        Pump(e, "p5"),
        GateH(e),
        MeasureZ(e, "o1"),
        Correct("p5", ((q - 1, "o1"),)),
    ]
    return Protocol(q, (e,), tuple(ins), ("p1", "p2", "p3", "p4", "p5"))


def _ame5_two_emitter(q: int) -> Protocol:
    """Five-cycle from two emitters with no photon-emitter gate.

    Photon order (p1 p2 p5 p4 p3) presents the output as the standard
    five-cycle: in pump order the cycle reads p1-p2-p5-p4-p3-p1.
    """
    e1, e2 = "e1", "e2"
    ins = (
        GateH(e1),
        GateH(e2),
        GateCZ(e1, e2, 1),
        Pump(e1, "p1"),
        Pump(e2, "p2"),
        GateH(e1),
        GateH(e2),
        Pump(e1, "p3"),
        GateH(e1),
        GateCZ(e1, e2, 1),
        Pump(e1, "p4"),
        Pump(e2, "p5"),
        GateH(e1),
        GateH(e2),
        MeasureZ(e1, "o1"),
        MeasureZ(e2, "o2"),
        Correct("p4", ((q - 1, "o1"),)),
        Correct("p5", ((q - 1, "o2"),)),
    )
    return Protocol(q, (e1, e2), ins, ("p1", "p2", "p5", "p4", "p3"))


def _ame6_a(q: int) -> Protocol:
    """Six-photon AME graph from two emitters and three photon CZs."""
    e1, e2 = "e1", "e2"
    ins = (
        GateH(e1),
        GateH(e2),
        GateCZ(e1, e2, 1),
        Pump(e1, "p1"),
        Pump(e2, "p2"),
        GateH(e1),
        GateH(e2),
        GateCZ("p1", e2, 1),
        GateCZ(e1, e2, 1),
        Pump(e1, "p3"),
        Pump(e2, "p4"),
        GateH(e1),
        GateH(e2),
        GateCZ("p4", e1, 1),
        GateCZ("p2", e2, 1),
        GateCZ(e1, e2, 1),
        Pump(e1, "p5"),
        Pump(e2, "p6"),
        GateH(e1),
        GateH(e2),
        MeasureZ(e1, "o1"),
        MeasureZ(e2, "o2"),
        Correct("p5", ((q - 1, "o1"),)),
        Correct("p6", ((q - 1, "o2"),)),
    )
    return Protocol(q, (e1, e2), ins, ("p1", "p2", "p3", "p4", "p5", "p6"))


def _ame6_b(q: int) -> Protocol:
    """Six-photon AME graph from three emitters, no photon gates."""
    e1, e2, e3 = "e1", "e2", "e3"
    all_pairs = ((e1, e2), (e2, e3), (e1, e3))
    ins: list = [GateH(e) for e in (e1, e2, e3)]
    ins += [GateCZ(a, b, 1) for a, b in all_pairs]
    ins += [Pump(e1, "p1"), Pump(e2, "p2"), Pump(e3, "p3")]
    ins += [GateH(e) for e in (e1, e2, e3)]
    ins += [GateCZ(a, b, 1) for a, b in all_pairs]
    ins += [Pump(e1, "p4"), Pump(e2, "p5"), Pump(e3, "p6")]
    ins += [GateH(e) for e in (e1, e2, e3)]
    ins += [MeasureZ(e1, "o1"), MeasureZ(e2, "o2"), MeasureZ(e3, "o3")]
    ins += [
        Correct("p4", ((q - 1, "o1"),)),
        Correct("p5", ((q - 1, "o2"),)),
        Correct("p6", ((q - 1, "o3"),)),
    ]
    return Protocol(q, (e1, e2, e3), tuple(ins), ("p1", "p2", "p3", "p4", "p5", "p6"))


def _ame7_3() -> Protocol:
    """Seven-photon three-level AME graph from two emitters."""
    q = 3
    e1, e2 = "e1", "e2"
    ins = (
        GateH(e1),
        GateH(e2),
        GateCZ(e1, e2, 2),
        Pump(e1, "p1"),
        Pump(e2, "p2"),
        GateH(e1),
        GateH(e2),
        GateCZ("p1", e2, 1),
        GateCZ(e1, e2, 1),
        Pump(e1, "p3"),
        Pump(e2, "p4"),
        GateH(e1),
        GateH(e2),
        GateCZ("p4", e1, 1),
        GateCZ(e1, e2, 1),
        Pump(e2, "p5"),
        GateHdag(e2),
        GateCZ("p4", e2, 1),
        GateCZ("p2", e2, 1),
        Pump(e1, "p6"),
        Pump(e2, "p7"),
        GateH(e1),
        GateH(e2),
        MeasureZ(e1, "o1"),
        MeasureZ(e2, "o2"),
        Correct("p6", ((2, "o1"),)),
        Correct("p7", ((2, "o2"),)),
    )
    return Protocol(q, (e1, e2), ins, ("p1", "p2", "p3", "p4", "p5", "p6", "p7"))


def _qecc_psi(m: int) -> Protocol:
    """Codeword generator for the [[3,1,2]] three-level code.

    The emitter is prepared in |2m mod 3> with an X gate, walks a
    three-photon Fourier chain with a Z insertion of power m before the
    last pump, and the photons are presented newest first, which makes the
    output the Fourier-transformed codeword with no extra permutation.
    """
    q = 3
    e = "e1"
    ins: list = []
    if m:
        ins.append(GateX(e, (2 * m) % 3))
    ins += [GateH(e), Pump(e, "p1"), GateH(e), Pump(e, "p2"), GateH(e)]
    if m:
        ins.append(GateZ(e, m))
    ins += [
        Pump(e, "p3"),
        GateH(e),
        MeasureZ(e, "o1"),
        Correct("p3", ((2, "o1"),)),
    ]
    return Protocol(q, (e,), tuple(ins), ("p3", "p2", "p1"))


# ============================================================
#  Catalog entry point
# ============================================================


def builtin(name: str, q: int | None = None, n: int | None = None) -> Protocol:
    """Instantiate a built-in protocol.

    Parameters
    ----------
    name : str
        Catalog name (see :func:`builtin_names`).
    q : int, optional
        Local dimension; defaults to the smallest the protocol allows.
    n : int, optional
        Chain length, required by the linear-chain protocols only.
    """
    info = builtin_info(name)
    if q is None:
        q = info.default_dim
    if not isinstance(q, (int, bool)) or isinstance(q, bool) or q < 2:
        raise ValueError(f"local dimension must be an integer >= 2, got {q!r}")
    if name in _QUTRIT_ONLY and q != 3:
        raise ValueError(f"{name} is defined for q = 3, got q = {q}")
    if info.takes_length:
        if n is None:
            raise ValueError(f"{name} needs a chain length n")
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ValueError(f"chain length must be a positive integer, got {n!r}")
    elif n is not None:
        raise ValueError(f"{name} does not take a chain length")

    if name == "linear-cz":
        proto = _linear_chain(n, q, inverse=False)
    elif name == "linear-cz2":
        proto = _linear_chain(n, q, inverse=True)
    elif name in ("ame43-a", "ame43-b"):
        proto = _ame43(name[-1])
    elif name == "ame5-one-emitter":
        proto = _ame5_one_emitter(q)
    elif name == "ame5-two-emitter":
        proto = _ame5_two_emitter(q)
    elif name == "ame6-a":
        proto = _ame6_a(q)
    elif name == "ame6-b":
        proto = _ame6_b(q)
    elif name == "ame7-3":
        proto = _ame7_3()
    elif name.startswith("qecc312-psi"):
        proto = _qecc_psi(int(name[-1]))
    else:  # pragma: no cover - builtin_info already filtered
        raise ValueError(f"unknown builtin {name!r}")
    proto = Protocol(proto.q, proto.emitters, proto.instructions, proto.photon_order, name)
    proto.validate()
    return proto
