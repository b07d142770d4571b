"""Exact dense state vectors for registers of q-level sites.

A register is an ordered collection of sites, each tagged ``emitter`` or
``photon``, all sharing a single local dimension ``q``.  Amplitudes live in
a flat complex128 vector of length ``q**n`` indexed big-endian: site 0 is
the most significant digit, so basis index ``sum(d[s] * q**(n-1-s))``
corresponds to digits ``(d[0], ..., d[n-1])``.

Phases are never accumulated as floating-point angles.  Every gate phase is
an integer exponent of the primitive root ``omega = exp(2j*pi/q)``; the
exponent is reduced mod q first and a single complex exponential is taken,
so chained gates agree with the algebraic result to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Tolerances used throughout: matrix identities hold to near machine
# precision, state-level comparisons allow a little slack for longer
# gate sequences.
MATRIX_ATOL = 1e-12
STATE_ATOL = 1e-9

EMITTER = "emitter"
PHOTON = "photon"
_SITE_KINDS = (EMITTER, PHOTON)

# Norm this close to 1 is treated as exactly normalized (no rescale), so
# serialization round-trips reproduce amplitudes bit for bit.
_NORM_SNAP = 1e-12


# ============================================================
#  Sites
# ============================================================


@dataclass(frozen=True)
class Site:
    """One q-level system in a register: an emitter or a photon."""

    kind: str
    label: str

    def __post_init__(self) -> None:
        if self.kind not in _SITE_KINDS:
            raise ValueError(f"site kind must be one of {_SITE_KINDS}, got {self.kind!r}")
        if not isinstance(self.label, str) or not self.label:
            raise ValueError("site label must be a non-empty string")


def emitter_site(label: str) -> Site:
    return Site(EMITTER, label)


def photon_site(label: str) -> Site:
    return Site(PHOTON, label)


# ============================================================
#  Primitive root of unity and exact phase arithmetic
# ============================================================


def _check_dim(q: int) -> int:
    if not isinstance(q, (int, np.integer)) or isinstance(q, bool) or q < 2:
        raise ValueError(f"local dimension must be an integer >= 2, got {q!r}")
    return int(q)


def phase_root(q: int) -> complex:
    """The primitive q-th root of unity omega = exp(2j*pi/q)."""
    q = _check_dim(q)
    return complex(np.exp(2j * np.pi / q))


def omega_power(q: int, exponent: int) -> complex:
    """omega**exponent computed from the exponent reduced mod q.

    The reduction happens in integer arithmetic, so large or negative
    exponents lose no precision.
    """
    q = _check_dim(q)
    return complex(np.exp(2j * np.pi * (int(exponent) % q) / q))


def omega_powers(q: int, exponents: np.ndarray) -> np.ndarray:
    """Elementwise omega**k for an integer array of exponents."""
    q = _check_dim(q)
    ks = np.asarray(exponents, dtype=np.int64) % q
    return np.exp(2j * np.pi * ks / q)


# ============================================================
#  Single-site operator matrices
# ============================================================


def x_matrix(q: int, alpha: int = 1) -> np.ndarray:
    """Generalized shift X**alpha with X|i> = |i+1 mod q>."""
    q = _check_dim(q)
    a = int(alpha) % q
    m = np.zeros((q, q), dtype=np.complex128)
    cols = np.arange(q)
    m[(cols + a) % q, cols] = 1.0
    return m


def z_matrix(q: int, beta: int = 1) -> np.ndarray:
    """Generalized clock Z**beta with Z|i> = omega**i |i>."""
    q = _check_dim(q)
    return np.diag(omega_powers(q, int(beta) * np.arange(q)))


def hadamard_matrix(q: int) -> np.ndarray:
    """Discrete Fourier gate: H|i> = q**-0.5 sum_j omega**(i j) |j>.

    Symmetric, so H[j, i] = omega**(i j) / sqrt(q).
    """
    q = _check_dim(q)
    grid = np.outer(np.arange(q), np.arange(q))
    return omega_powers(q, grid) / np.sqrt(q)


def hadamard_dag_matrix(q: int) -> np.ndarray:
    """Inverse Fourier gate: Hdag|i> = q**-0.5 sum_j omega**((q-1) i j) |j>."""
    q = _check_dim(q)
    grid = (q - 1) * np.outer(np.arange(q), np.arange(q))
    return omega_powers(q, grid) / np.sqrt(q)


@dataclass(frozen=True)
class LocalOperator:
    """A single-site operator: its dimension and dense matrix."""

    dim: int
    matrix: np.ndarray


_OPERATOR_KINDS = ("X", "Z", "H", "HDAG")


def operator_matrix(kind: str, q: int, power: int = 1) -> LocalOperator:
    """Named single-site operator as a :class:`LocalOperator`.

    Parameters
    ----------
    kind : str
        One of ``"X"``, ``"Z"``, ``"H"``, ``"HDAG"``.
    q : int
        Local dimension.
    power : int, optional
        Exponent for X and Z (taken mod q).  H and HDAG reject power != 1.
    """
    q = _check_dim(q)
    if kind == "X":
        return LocalOperator(q, x_matrix(q, power))
    if kind == "Z":
        return LocalOperator(q, z_matrix(q, power))
    if kind in ("H", "HDAG"):
        if power != 1:
            raise ValueError(f"{kind} takes no power (got {power})")
        m = hadamard_matrix(q) if kind == "H" else hadamard_dag_matrix(q)
        return LocalOperator(q, m)
    raise ValueError(f"unknown operator kind {kind!r}; expected one of {_OPERATOR_KINDS}")


# ============================================================
#  Register states
# ============================================================


class RegisterState:
    """Normalized pure state of an ordered register of q-level sites.

    Parameters
    ----------
    q : int
        Local dimension shared by all sites.
    sites : sequence of Site
        Ordered site descriptors; labels must be unique.  May be empty
        (a fully measured register is the scalar state).
    amps : array_like
        Complex amplitudes, length q**n, big-endian digit order.  Any
        nonzero vector is accepted and normalized; vectors already of
        unit norm are stored untouched.
    """

    __slots__ = ("q", "sites", "amps")

    def __init__(self, q: int, sites: Sequence[Site], amps: np.ndarray) -> None:
        q = _check_dim(q)
        sites = tuple(sites)
        for s in sites:
            if not isinstance(s, Site):
                raise TypeError(f"sites must be Site instances, got {type(s).__name__}")
        labels = [s.label for s in sites]
        if len(set(labels)) != len(labels):
            raise ValueError(f"site labels must be unique, got {labels}")
        vec = np.array(amps, dtype=np.complex128).reshape(-1)
        if vec.shape != (q ** len(sites),):
            raise ValueError(
                f"amplitude vector has length {vec.size}, expected {q ** len(sites)}"
            )
        nrm = float(np.linalg.norm(vec))
        if nrm <= 0.0 or not np.isfinite(nrm):
            raise ValueError("amplitude vector must be nonzero and finite")
        if abs(nrm - 1.0) > _NORM_SNAP:
            vec = vec / nrm
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "amps", vec)

    def __setattr__(self, name, value):  # value semantics
        raise AttributeError("RegisterState is immutable")

    # ---- basic introspection -------------------------------------------

    @property
    def n(self) -> int:
        return len(self.sites)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.sites)

    def site_index(self, label: str) -> int:
        for i, s in enumerate(self.sites):
            if s.label == label:
                return i
        raise KeyError(f"no site labeled {label!r} in register {self.labels}")

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per site."""
        return self.amps.reshape((self.q,) * self.n)

    def __repr__(self) -> str:
        kinds = ",".join(f"{s.label}:{s.kind[0]}" for s in self.sites)
        return f"RegisterState(q={self.q}, sites=[{kinds}], dim={self.amps.size})"


def _with_amps(state: RegisterState, tensor: np.ndarray) -> RegisterState:
    return RegisterState(state.q, state.sites, tensor.reshape(-1))


def basis_index(q: int, digits: Sequence[int]) -> int:
    """Flat index of the basis ket with the given digits (big-endian)."""
    q = _check_dim(q)
    idx = 0
    for d in digits:
        d = int(d)
        if not 0 <= d < q:
            raise ValueError(f"digit {d} out of range for q={q}")
        idx = idx * q + d
    return idx


def digits_of(q: int, index: int, n: int) -> tuple[int, ...]:
    """Digits (big-endian) of a flat basis index."""
    q = _check_dim(q)
    if not 0 <= index < q ** n:
        raise ValueError(f"index {index} out of range for {n} sites of dimension {q}")
    out = []
    for s in range(n):
        out.append((index // q ** (n - 1 - s)) % q)
    return tuple(out)


def zero_state(q: int, sites: Sequence[Site]) -> RegisterState:
    """|0...0> on the given sites."""
    sites = tuple(sites)
    vec = np.zeros(q ** len(sites), dtype=np.complex128)
    vec[0] = 1.0
    return RegisterState(q, sites, vec)


def basis_state(q: int, sites: Sequence[Site], digits: Sequence[int]) -> RegisterState:
    """Computational basis ket |d0 d1 ... >."""
    sites = tuple(sites)
    if len(digits) != len(sites):
        raise ValueError("one digit per site required")
    vec = np.zeros(q ** len(sites), dtype=np.complex128)
    vec[basis_index(q, digits)] = 1.0
    return RegisterState(q, sites, vec)


def overlap(a: RegisterState, b: RegisterState) -> complex:
    """Inner product <a|b>.  Registers must share q and site count."""
    if a.q != b.q or a.n != b.n:
        raise ValueError(
            f"incompatible registers: ({a.q},{a.n}) sites vs ({b.q},{b.n})"
        )
    return complex(np.vdot(a.amps, b.amps))


def digit_distribution(state: RegisterState, site: int) -> np.ndarray:
    """Born probabilities of the q digit values at one site."""
    site = _check_site(state, site)
    probs = np.abs(state.tensor()) ** 2
    axes = tuple(k for k in range(state.n) if k != site)
    return probs.sum(axis=axes)


# ============================================================
#  Gate application
# ============================================================


def _check_site(state: RegisterState, site: int) -> int:
    if not isinstance(site, (int, np.integer)) or isinstance(site, bool):
        raise TypeError(f"site index must be an integer, got {site!r}")
    if not 0 <= site < state.n:
        raise IndexError(f"site {site} out of range for {state.n}-site register")
    return int(site)


def apply_x(state: RegisterState, site: int, alpha: int = 1) -> RegisterState:
    """X**alpha at one site: digit i -> i + alpha (mod q)."""
    site = _check_site(state, site)
    a = int(alpha) % state.q
    if a == 0:
        return state
    # Shifting the digit by +a moves the amplitude block up along that axis.
    return _with_amps(state, np.roll(state.tensor(), a, axis=site))


def apply_z(state: RegisterState, site: int, beta: int = 1) -> RegisterState:
    """Z**beta at one site: phase omega**(beta * digit)."""
    site = _check_site(state, site)
    b = int(beta) % state.q
    if b == 0:
        return state
    q, n = state.q, state.n
    phases = omega_powers(q, b * np.arange(q))
    shape = [1] * n
    shape[site] = q
    return _with_amps(state, state.tensor() * phases.reshape(shape))


def apply_local(state: RegisterState, site: int, matrix: np.ndarray) -> RegisterState:
    """Apply an arbitrary q x q matrix at one site."""
    site = _check_site(state, site)
    m = np.asarray(matrix, dtype=np.complex128)
    if m.shape != (state.q, state.q):
        raise ValueError(f"matrix shape {m.shape} does not match local dimension {state.q}")
    t = np.tensordot(m, state.tensor(), axes=(1, site))
    return _with_amps(state, np.moveaxis(t, 0, site))


def apply_hadamard(state: RegisterState, site: int) -> RegisterState:
    """Fourier gate at one site (normalization folded in)."""
    return apply_local(state, site, hadamard_matrix(state.q))


def apply_hadamard_dag(state: RegisterState, site: int) -> RegisterState:
    """Inverse Fourier gate at one site."""
    return apply_local(state, site, hadamard_dag_matrix(state.q))


def apply_cz(state: RegisterState, site_a: int, site_b: int, beta: int = 1) -> RegisterState:
    """Controlled phase CZ**beta: |i, j> -> omega**(beta i j) |i, j>.

    Symmetric in its two (distinct) sites; beta is taken mod q, and
    beta = 0 acts as the identity.
    """
    site_a = _check_site(state, site_a)
    site_b = _check_site(state, site_b)
    if site_a == site_b:
        raise ValueError(f"CZ requires two distinct sites, got {site_a} twice")
    b = int(beta) % state.q
    if b == 0:
        return state
    q, n = state.q, state.n
    ia = np.arange(q).reshape([q if k == site_a else 1 for k in range(n)])
    ib = np.arange(q).reshape([q if k == site_b else 1 for k in range(n)])
    table = omega_powers(q, b * ia * ib)
    return _with_amps(state, state.tensor() * table)


def permute_sites(state: RegisterState, order: Sequence[int]) -> RegisterState:
    """Reorder the register: new position k holds old site ``order[k]``."""
    order = tuple(int(i) for i in order)
    if sorted(order) != list(range(state.n)):
        raise ValueError(f"order {order} is not a permutation of 0..{state.n - 1}")
    if order == tuple(range(state.n)):
        return state
    sites = tuple(state.sites[i] for i in order)
    amps = np.transpose(state.tensor(), order).reshape(-1)
    return RegisterState(state.q, sites, amps)


def reorder_to_labels(state: RegisterState, labels: Sequence[str]) -> RegisterState:
    """Permute the register into the given label order."""
    labels = tuple(labels)
    if len(labels) != state.n:
        raise ValueError(f"expected {state.n} labels, got {len(labels)}")
    return permute_sites(state, [state.site_index(l) for l in labels])


# ============================================================
#  JSON-friendly serialization
# ============================================================


def state_to_dict(state: RegisterState) -> dict:
    """Plain-dict form of a state: q, sites, and [re, im] amplitude pairs.

    Python float repr round-trips exactly, so dumping this dict with the
    stdlib json module and reloading reproduces every amplitude bit for bit.
    """
    return {
        "q": state.q,
        "sites": [{"kind": s.kind, "label": s.label} for s in state.sites],
        "amps": [[float(a.real), float(a.imag)] for a in state.amps],
    }


def state_from_dict(payload: dict) -> RegisterState:
    """Inverse of :func:`state_to_dict`, with structural validation."""
    if not isinstance(payload, dict):
        raise ValueError("state payload must be an object")
    missing = {"q", "sites", "amps"} - payload.keys()
    if missing:
        raise ValueError(f"state payload missing keys: {sorted(missing)}")
    q = payload["q"]
    if not isinstance(q, int) or isinstance(q, bool) or q < 2:
        raise ValueError(f"state payload q must be an integer >= 2, got {q!r}")
    raw_sites = payload["sites"]
    if not isinstance(raw_sites, list):
        raise ValueError("state payload sites must be a list")
    sites = []
    for entry in raw_sites:
        if not isinstance(entry, dict) or "kind" not in entry or "label" not in entry:
            raise ValueError(f"malformed site entry: {entry!r}")
        sites.append(Site(entry["kind"], entry["label"]))
    raw_amps = payload["amps"]
    if not isinstance(raw_amps, list) or len(raw_amps) != q ** len(sites):
        raise ValueError(
            f"state payload needs {q ** len(sites)} amplitude pairs, "
            f"got {len(raw_amps) if isinstance(raw_amps, list) else type(raw_amps).__name__}"
        )
    vec = np.empty(len(raw_amps), dtype=np.complex128)
    for i, pair in enumerate(raw_amps):
        if (
            not isinstance(pair, (list, tuple))
            or len(pair) != 2
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in pair)
        ):
            raise ValueError(f"amplitude {i} must be a [re, im] pair, got {pair!r}")
        vec[i] = complex(pair[0], pair[1])
    nrm = np.linalg.norm(vec)
    if not np.isfinite(nrm) or abs(nrm - 1.0) > 1e-6:
        raise ValueError(f"state payload is not normalized (norm {nrm})")
    return RegisterState(q, sites, vec)
