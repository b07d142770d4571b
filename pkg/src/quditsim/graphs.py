"""Weighted graphs on q-level sites, graph states, and phase recovery.

A weighted graph carries an integer adjacency matrix whose entries matter
only mod q.  Its graph state puts every site in the Fourier-uniform state
and applies CZ**w across each weighted edge, giving flat amplitudes
q**(-n/2) * omega**(sum_{a<b} w_ab d_a d_b).

``phase_polynomial_of`` runs the other way: given a state with flat
magnitudes, it recovers the quadratic + linear exponent polynomial (the
all-zeros component fixes the phase gauge) and verifies it against every
amplitude, so a successful extraction is a proof of graph-state form up to
local Z rotations (the linear part).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import (
    PHOTON,
    RegisterState,
    Site,
    apply_cz,
    apply_hadamard,
    omega_powers,
    zero_state,
)


class PhaseExtractionError(ValueError):
    """The state is not of flat-magnitude quadratic-phase form."""


# ============================================================
#  Weighted graphs
# ============================================================


class WeightedGraph:
    """Symmetric zero-diagonal adjacency over Z_q.

    Parameters
    ----------
    q : int
        Local dimension; edge weights are stored reduced mod q.
    gamma : array_like
        n x n integer adjacency matrix, symmetric with zero diagonal.
    """

    __slots__ = ("q", "gamma")

    def __init__(self, q: int, gamma: np.ndarray) -> None:
        if not isinstance(q, (int, np.integer)) or isinstance(q, bool) or q < 2:
            raise ValueError(f"local dimension must be an integer >= 2, got {q!r}")
        g = np.array(gamma, dtype=np.int64)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {g.shape}")
        if np.any(g != g.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(g) != 0):
            raise ValueError("adjacency diagonal must be zero (no self-loops)")
        object.__setattr__(self, "q", int(q))
        object.__setattr__(self, "gamma", g % int(q))

    def __setattr__(self, name, value):
        raise AttributeError("WeightedGraph is immutable")

    @property
    def n(self) -> int:
        return self.gamma.shape[0]

    @classmethod
    def from_edges(cls, q: int, n: int, edges) -> "WeightedGraph":
        """Build from ``(a, b, weight)`` triples (or ``(a, b)`` for weight 1)."""
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise ValueError(f"vertex count must be a positive integer, got {n!r}")
        g = np.zeros((n, n), dtype=np.int64)
        for edge in edges:
            if len(edge) == 2:
                a, b, w = edge[0], edge[1], 1
            elif len(edge) == 3:
                a, b, w = edge
            else:
                raise ValueError(f"edge must be (a, b) or (a, b, w), got {edge!r}")
            a, b, w = int(a), int(b), int(w)
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a}, {b}) out of range for {n} vertices")
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if g[a, b] != 0:
                raise ValueError(f"duplicate edge ({a}, {b})")
            g[a, b] = w % q
            g[b, a] = w % q
        return cls(q, g)

    def edges(self) -> list[tuple[int, int, int]]:
        """Sorted ``(a, b, weight)`` triples with a < b and nonzero weight."""
        out = []
        n = self.n
        for a in range(n):
            for b in range(a + 1, n):
                w = int(self.gamma[a, b])
                if w:
                    out.append((a, b, w))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return self.q == other.q and self.n == other.n and bool(
            np.array_equal(self.gamma, other.gamma)
        )

    def __hash__(self):
        return hash((self.q, self.n, tuple(self.edges())))

    def __repr__(self) -> str:
        return f"WeightedGraph(q={self.q}, n={self.n}, edges={self.edges()})"

    def to_dict(self) -> dict:
        return {"q": self.q, "n": self.n, "edges": [list(e) for e in self.edges()]}

    @classmethod
    def from_dict(cls, payload: dict) -> "WeightedGraph":
        if not isinstance(payload, dict):
            raise ValueError("graph payload must be an object")
        missing = {"q", "n", "edges"} - payload.keys()
        if missing:
            raise ValueError(f"graph payload missing keys: {sorted(missing)}")
        q, n, edges = payload["q"], payload["n"], payload["edges"]
        if not isinstance(q, int) or isinstance(q, bool):
            raise ValueError(f"graph payload q must be an integer, got {q!r}")
        if not isinstance(n, int) or isinstance(n, bool):
            raise ValueError(f"graph payload n must be an integer, got {n!r}")
        if not isinstance(edges, list):
            raise ValueError("graph payload edges must be a list")
        for e in edges:
            if not isinstance(e, (list, tuple)) or len(e) not in (2, 3):
                raise ValueError(f"malformed edge entry: {e!r}")
        return cls.from_edges(q, n, edges)


def build_graph_state(graph: WeightedGraph, labels=None) -> RegisterState:
    """Photonic graph state of a weighted graph.

    Every vertex starts in H|0> and each edge (a, b, w) contributes one
    CZ**w.  The CZ factors commute, so application order is irrelevant.
    """
    n = graph.n
    if labels is None:
        labels = [f"v{i + 1}" for i in range(n)]
    labels = list(labels)
    if len(labels) != n:
        raise ValueError(f"expected {n} labels, got {len(labels)}")
    state = zero_state(graph.q, [Site(PHOTON, l) for l in labels])
    for v in range(n):
        state = apply_hadamard(state, v)
    for a, b, w in graph.edges():
        state = apply_cz(state, a, b, w)
    return state


# ============================================================
#  Phase polynomials
# ============================================================


@dataclass(frozen=True)
class PhasePolynomial:
    """Exponent polynomial of a flat-magnitude state over Z_q.

    Amplitude at digits d is q**(-n/2) * omega**(constant
    + sum_a linear[a] d_a + sum_{(a,b,w)} w d_a d_b), with pair terms kept
    as sorted (a, b, w) triples, a < b, w nonzero mod q.
    """

    q: int
    n: int
    pairs: tuple[tuple[int, int, int], ...]
    linear: tuple[int, ...]
    constant: int = 0

    @property
    def is_plain_graph(self) -> bool:
        """True when only pair terms are present (pure graph state)."""
        return self.constant % self.q == 0 and all(c % self.q == 0 for c in self.linear)

    def pair_weight(self, a: int, b: int) -> int:
        a, b = min(a, b), max(a, b)
        for x, y, w in self.pairs:
            if (x, y) == (a, b):
                return w
        return 0

    def graph(self) -> WeightedGraph:
        """Weighted graph of the quadratic part (linear terms dropped)."""
        return WeightedGraph.from_edges(self.q, self.n, self.pairs)

    def relabel(self, perm) -> "PhasePolynomial":
        """Apply a vertex relabeling: old site a becomes perm[a]."""
        perm = tuple(int(p) for p in perm)
        if sorted(perm) != list(range(self.n)):
            raise ValueError(f"{perm} is not a permutation of 0..{self.n - 1}")
        pairs = []
        for a, b, w in self.pairs:
            x, y = perm[a], perm[b]
            pairs.append((min(x, y), max(x, y), w))
        linear = [0] * self.n
        for a, c in enumerate(self.linear):
            linear[perm[a]] = c
        return PhasePolynomial(
            self.q, self.n, tuple(sorted(pairs)), tuple(linear), self.constant
        )

    def exponents(self) -> np.ndarray:
        """Exponent (mod q) of every basis component, in index order."""
        q, n = self.q, self.n
        digits = np.stack(
            np.unravel_index(np.arange(q ** n), (q,) * n), axis=1
        ).astype(np.int64)
        e = np.full(q ** n, self.constant, dtype=np.int64)
        e += digits @ np.asarray(self.linear, dtype=np.int64)
        for a, b, w in self.pairs:
            e += w * digits[:, a] * digits[:, b]
        return e % q

    def state(self, labels=None) -> RegisterState:
        """The flat-magnitude state with these phase exponents."""
        if labels is None:
            labels = [f"v{i + 1}" for i in range(self.n)]
        sites = [Site(PHOTON, l) for l in labels]
        amps = omega_powers(self.q, self.exponents()) / np.sqrt(float(self.q) ** self.n)
        return RegisterState(self.q, sites, amps)


def phase_polynomial_of(state: RegisterState, tol: float = 1e-9) -> PhasePolynomial:
    """Recover the quadratic phase polynomial of a flat-magnitude state.

    The all-zeros component's phase is gauged to zero.  Linear
    coefficients are read off single-digit components, pair weights off
    two-digit components, and the resulting polynomial is then checked
    against every amplitude.

    Raises
    ------
    PhaseExtractionError
        If magnitudes are not uniformly q**(-n/2), or some amplitude's
        phase deviates from the quadratic model by more than ``tol``.
    """
    q, n = state.q, state.n
    if n == 0:
        return PhasePolynomial(q, 0, (), ())
    amps = state.amps
    flat_mag = float(q) ** (-n / 2.0)
    dev = np.max(np.abs(np.abs(amps) - flat_mag))
    if dev > tol:
        raise PhaseExtractionError(
            f"magnitudes are not flat: worst deviation {dev:.3e} from q^(-n/2)"
        )
    unit = amps / amps[0]

    def exponent_at(flat_index: int) -> int:
        ang = float(np.angle(unit[flat_index]))
        k = int(round(ang * q / (2.0 * np.pi))) % q
        return k

    weight = [q ** (n - 1 - s) for s in range(n)]  # digit 1 at site s
    linear = tuple(exponent_at(weight[a]) for a in range(n))
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            k = exponent_at(weight[a] + weight[b])
            w = (k - linear[a] - linear[b]) % q
            if w:
                pairs.append((a, b, w))
    poly = PhasePolynomial(q, n, tuple(pairs), linear, 0)

    predicted = omega_powers(q, poly.exponents())
    worst = float(np.max(np.abs(unit - predicted)))
    if worst > tol:
        raise PhaseExtractionError(
            f"phases are not quadratic: worst residual {worst:.3e}"
        )
    return poly


# ============================================================
#  Built-in target graphs
# ============================================================

# Adjacency transcriptions for the states the built-in protocols produce,
# in the presentation order of their photons (vertex k = k-th photon out).
_AME43_A = ((0, 1, 1), (0, 2, 1), (1, 3, 2), (2, 3, 1))
_AME43_B = ((0, 1, 1), (0, 2, 1), (1, 3, 1), (2, 3, 2))
_AME5 = ((0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (0, 4, 1))
_AME6_A = (
    (0, 1, 1), (0, 2, 1), (0, 3, 1), (1, 3, 1), (2, 3, 1),
    (2, 4, 1), (3, 4, 1), (3, 5, 1), (1, 5, 1), (4, 5, 1),
)
_AME6_B = (
    (0, 1, 1), (1, 2, 1), (0, 2, 1),
    (3, 4, 1), (4, 5, 1), (3, 5, 1),
    (0, 3, 1), (1, 4, 1), (2, 5, 1),
)
_AME7_3 = (
    (0, 1, 2), (0, 2, 1), (1, 3, 1), (0, 3, 1), (2, 3, 1), (2, 5, 1),
    (3, 4, 1), (3, 5, 1), (4, 5, 1), (4, 6, 2), (3, 6, 1), (1, 6, 1),
)

_FIXED_TARGETS = {
    "ame43-a": (3, 4, _AME43_A),
    "ame43-b": (3, 4, _AME43_B),
    "ame5": (None, 5, _AME5),
    "ame6-a": (None, 6, _AME6_A),
    "ame6-b": (None, 6, _AME6_B),
    "ame7-3": (3, 7, _AME7_3),
}


def builtin_target_graph(name: str, q: int, n: int | None = None) -> WeightedGraph:
    """Target graph of a named built-in protocol family.

    ``linear-cz`` / ``linear-cz2`` need the chain length ``n``; the chain
    edge weight is 1 for the plain CZ chain and q-1 for the inverse-phase
    chain (which is weight 2 in the three-level case the name comes from).
    """
    if name in ("linear-cz", "linear-cz2"):
        if n is None:
            raise ValueError(f"{name} needs a chain length n")
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise ValueError(f"chain length must be a positive integer, got {n!r}")
        w = 1 if name == "linear-cz" else (q - 1) % q
        edges = [(i, i + 1, w) for i in range(int(n) - 1)]
        return WeightedGraph.from_edges(q, int(n), edges)
    if name in _FIXED_TARGETS:
        fixed_q, size, edges = _FIXED_TARGETS[name]
        if fixed_q is not None and q != fixed_q:
            raise ValueError(f"{name} is defined for q = {fixed_q}, got q = {q}")
        if n is not None and n != size:
            raise ValueError(f"{name} has {size} vertices, got n = {n}")
        return WeightedGraph.from_edges(q, size, edges)
    raise ValueError(f"unknown target graph {name!r}")
