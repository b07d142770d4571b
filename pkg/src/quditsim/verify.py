"""Certification of simulator outputs.

Three certificate families:

* absolutely maximally entangled (AME) states: every subsystem of at most
  floor(n/2) sites must be maximally mixed, checked through subset
  purities Tr(rho_S^2) = q**(-|S|),
* graph-state form: global-phase equivalence against a target graph,
* quantum error correcting codes: the Knill-Laflamme condition
  <psi_m| E'E |psi_m'> = f(E'E) delta_mm' scanned over all error products
  up to a weight cutoff (d-1 by default, with the full weight-d scan as a
  strict mode), plus the Fourier-transform relation between the canonical
  [[3,1,2]] three-level codewords and their generation protocols.

Purity scans deliberately avoid diagonalization: Tr(rho^2) is a Frobenius
norm, so each subset costs one rectangular matmul.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .algebra import (
    PHOTON,
    RegisterState,
    Site,
    apply_hadamard,
    apply_x,
    apply_z,
    overlap,
)
from .engine import run
from .protocols import builtin

DEFAULT_TOL = 1e-9


# ============================================================
#  Reduced density matrices
# ============================================================


@dataclass(frozen=True)
class DensityMatrix:
    """Reduced state on a subset of register sites.

    ``positions`` are the subset's indices in the original register (in
    register order); ``sites`` the corresponding descriptors.
    """

    q: int
    positions: tuple[int, ...]
    sites: tuple[Site, ...]
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = self.matrix
        d = self.q ** len(self.positions)
        if m.shape != (d, d):
            raise ValueError(f"density matrix shape {m.shape}, expected {(d, d)}")
        if np.max(np.abs(m - m.conj().T)) > 1e-10:
            raise ValueError("density matrix is not hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-9 or abs(np.trace(m).imag) > 1e-9:
            raise ValueError(f"density matrix trace {np.trace(m)} != 1")


def partial_trace(state: RegisterState, keep) -> DensityMatrix:
    """Reduced density matrix on the kept sites (traced over the rest).

    ``keep`` is a nonempty collection of distinct site indices; the result
    is presented in register order regardless of the order given.
    """
    keep = [int(k) for k in keep]
    if not keep:
        raise ValueError("keep must name at least one site")
    if len(set(keep)) != len(keep):
        raise ValueError(f"duplicate site indices in keep: {keep}")
    for k in keep:
        if not 0 <= k < state.n:
            raise IndexError(f"site {k} out of range for {state.n}-site register")
    keep = sorted(keep)
    rest = [k for k in range(state.n) if k not in keep]
    q = state.q
    dk = q ** len(keep)
    m = np.transpose(state.tensor(), keep + rest).reshape(dk, -1)
    rho = m @ m.conj().T
    return DensityMatrix(
        q, tuple(keep), tuple(state.sites[k] for k in keep), rho
    )


def purity(rho: DensityMatrix) -> float:
    """Tr(rho^2), computed as the squared Frobenius norm."""
    return float(np.vdot(rho.matrix, rho.matrix).real)


def entropy(rho: DensityMatrix) -> float:
    """Von Neumann entropy in base-q units (log_q), so a maximally mixed
    k-site marginal has entropy k."""
    evals = np.linalg.eigvalsh(rho.matrix)
    if evals.min() < -1e-9:
        raise ValueError(f"density matrix has negative eigenvalue {evals.min():.3e}")
    evals = np.clip(evals, 0.0, None)
    nz = evals[evals > 0.0]
    return float(-(nz * np.log(nz)).sum() / np.log(rho.q))


# ============================================================
#  AME certification
# ============================================================


@dataclass(frozen=True)
class SubsetRecord:
    """Purity of one subsystem against the maximally mixed target."""

    subset: tuple[int, ...]
    purity: float
    target: float
    deviation: float  # worst entrywise distance of rho from uniform

    def to_dict(self) -> dict:
        return {
            "sites": list(self.subset),
            "purity": self.purity,
            "target": self.target,
            "deviation": self.deviation,
        }


@dataclass(frozen=True)
class AmeReport:
    """Subset-purity scan over all subsystems up to half the register."""

    n: int
    q: int
    tol: float
    verdict: bool
    records: tuple[SubsetRecord, ...]
    worst: SubsetRecord | None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "tol": self.tol,
            "verdict": self.verdict,
            "worst": self.worst.to_dict() if self.worst else None,
            "subsets": [r.to_dict() for r in self.records],
        }


def is_ame(state: RegisterState, tol: float = DEFAULT_TOL) -> AmeReport:
    """Scan every subset of size 1..floor(n/2) for maximal mixedness.

    The verdict is true iff every such subset's purity is within ``tol``
    of q**(-|S|).  Records also carry the worst entrywise deviation of
    each reduced matrix from uniform, as a diagnostic.
    """
    n, q = state.n, state.q
    records = []
    verdict = True
    worst: SubsetRecord | None = None
    for size in range(1, n // 2 + 1):
        target = float(q) ** (-size)
        for subset in combinations(range(n), size):
            rho = partial_trace(state, subset)
            pur = purity(rho)
            uniform = np.eye(q ** size) * target
            dev = float(np.max(np.abs(rho.matrix - uniform)))
            rec = SubsetRecord(subset, pur, target, dev)
            records.append(rec)
            if abs(pur - target) > tol:
                verdict = False
            if worst is None or abs(pur - target) > abs(worst.purity - worst.target):
                worst = rec
    return AmeReport(n, q, tol, verdict, tuple(records), worst)


def equiv_global_phase(a: RegisterState, b: RegisterState, tol: float = DEFAULT_TOL) -> bool:
    """True iff the two states differ only by a global phase.

    For unit vectors that is |<a|b>| = 1; we allow ``tol`` slack.
    """
    return bool(abs(overlap(a, b)) >= 1.0 - tol)


# ============================================================
#  Knill-Laflamme scans
# ============================================================


@dataclass(frozen=True)
class CodeSpec:
    """An ((n, q**k, d))_q code given by an orthonormal codeword list.

    Construction checks shapes only; orthonormality is certified by the
    identity record of :func:`kl_check`, so a corrupted codeword set
    produces a false verdict there instead of failing to construct.
    """

    n: int
    k: int
    d: int
    q: int
    codewords: tuple[RegisterState, ...]

    def __post_init__(self) -> None:
        for p, v in (("n", self.n), ("k", self.k), ("d", self.d), ("q", self.q)):
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ValueError(f"code parameter {p} must be a positive integer, got {v!r}")
        if self.q < 2:
            raise ValueError(f"code needs q >= 2, got {self.q}")
        if len(self.codewords) != self.q ** self.k:
            raise ValueError(
                f"a q={self.q}, k={self.k} code needs {self.q ** self.k} codewords, "
                f"got {len(self.codewords)}"
            )
        for w in self.codewords:
            if w.q != self.q or w.n != self.n:
                raise ValueError(
                    f"codeword register ({w.q}, {w.n} sites) does not match "
                    f"code parameters ({self.q}, {self.n} sites)"
                )

    def validate_orthonormal(self, tol: float = DEFAULT_TOL) -> None:
        for i, a in enumerate(self.codewords):
            for j, b in enumerate(self.codewords):
                target = 1.0 if i == j else 0.0
                if abs(overlap(a, b) - target) > tol:
                    raise ValueError(
                        f"codewords {i}, {j} have overlap {overlap(a, b):.3e}, "
                        f"expected {target}"
                    )


@dataclass(frozen=True)
class KlRecord:
    """Gram scan result for one error operator.

    ``exponents`` maps each acted site to its (x_power, z_power); the
    operator is the product over sites of X**x Z**z.  ``f`` is the common
    diagonal value the Gram matrix must take, ``deviation`` the worst
    entrywise distance of the Gram matrix from f * identity.
    """

    sites: tuple[int, ...]
    exponents: tuple[tuple[int, int], ...]
    f: complex
    deviation: float
    ok: bool

    def op_label(self) -> str:
        if not self.sites:
            return "I"
        parts = []
        for s, (a, b) in zip(self.sites, self.exponents):
            term = ""
            if a:
                term += f"X{a if a > 1 else ''}"
            if b:
                term += f"Z{b if b > 1 else ''}"
            parts.append(f"{term}@{s}")
        return " ".join(parts)

    def to_dict(self) -> dict:
        return {
            "op": self.op_label(),
            "sites": list(self.sites),
            "exponents": [list(e) for e in self.exponents],
            "f_re": self.f.real,
            "f_im": self.f.imag,
            "deviation": self.deviation,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class KlReport:
    verdict: bool
    weight_limit: int
    strict: bool
    tol: float
    max_deviation: float
    records: tuple[KlRecord, ...]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "weight_limit": self.weight_limit,
            "strict": self.strict,
            "tol": self.tol,
            "max_deviation": self.max_deviation,
            "operators_checked": len(self.records),
            "records": [r.to_dict() for r in self.records],
        }


def _apply_error(state: RegisterState, sites, exponents) -> RegisterState:
    # Per site the operator is X**a Z**b (Z acts first on the ket).
    for s, (a, b) in zip(sites, exponents):
        if b:
            state = apply_z(state, s, b)
        if a:
            state = apply_x(state, s, a)
    return state


def kl_check(code: CodeSpec, strict: bool = False, tol: float = DEFAULT_TOL) -> KlReport:
    """Knill-Laflamme scan over error products up to a weight cutoff.

    For each operator O of weight <= d-1 (or <= d with ``strict=True``,
    where a distance-d code is expected to fail), the Gram matrix
    G[m, m'] = <psi_m | O | psi_m'> must equal G[0, 0] * identity.  The
    weight-0 identity record doubles as the orthonormality check.
    """
    weight_limit = code.d if strict else code.d - 1
    n, q = code.n, code.q
    nonidentity = [(a, b) for a in range(q) for b in range(q) if (a, b) != (0, 0)]
    size = len(code.codewords)
    records = []
    verdict = True
    max_dev = 0.0
    for weight in range(0, weight_limit + 1):
        for sites in combinations(range(n), weight):
            for exps in product(nonidentity, repeat=weight):
                images = [_apply_error(w, sites, exps) for w in code.codewords]
                gram = np.empty((size, size), dtype=np.complex128)
                for m in range(size):
                    for mp in range(size):
                        gram[m, mp] = overlap(code.codewords[m], images[mp])
                f = complex(gram[0, 0])
                dev = float(np.max(np.abs(gram - f * np.eye(size))))
                ok = dev <= tol
                records.append(KlRecord(sites, exps, f, dev, ok))
                verdict = verdict and ok
                max_dev = max(max_dev, dev)
    return KlReport(verdict, weight_limit, strict, tol, max_dev, tuple(records))


# ============================================================
#  The [[3,1,2]] three-level code
# ============================================================


def qecc312_code() -> CodeSpec:
    """Canonical codewords of the [[3,1,2]] three-level code.

    psi_m = 3**-0.5 sum_j |j + m, j, j + 2m>  (digits mod 3); the logical
    shift M = X (x) 1 (x) X^2 cycles psi_0 -> psi_1 -> psi_2.
    """
    q, n = 3, 3
    sites = tuple(Site(PHOTON, f"s{i + 1}") for i in range(n))
    words = []
    for m in range(3):
        vec = np.zeros(q ** n, dtype=np.complex128)
        for j in range(q):
            digits = ((j + m) % q, j, (j + 2 * m) % q)
            vec[digits[0] * q * q + digits[1] * q + digits[2]] = 1.0
        words.append(RegisterState(q, sites, vec))
    return CodeSpec(3, 1, 2, 3, tuple(words))


def logical_shift(state: RegisterState) -> RegisterState:
    """The [[3,1,2]] logical operator M = X (x) 1 (x) X^2."""
    return apply_x(apply_x(state, 0, 1), 2, 2)


def codeword_transform_check(code: CodeSpec, tol: float = DEFAULT_TOL) -> bool:
    """Check the generation protocols against the canonical codewords.

    Verifies, for the [[3,1,2]] three-level code: psi_1 = M psi_0 and
    psi_2 = M^2 psi_0; and that each generator protocol's output equals
    (H (x) 1 (x) H) psi_m up to a global phase.  The m = 0 output is also
    the weight-1 three-site path graph state (checked via the transform).
    """
    if (code.n, code.k, code.d, code.q) != (3, 1, 2, 3):
        raise ValueError(
            f"transform check is defined for the ((3, 3, 2))_3 code, "
            f"got (({code.n}, {code.q ** code.k}, {code.d}))_{code.q}"
        )
    psi0, psi1, psi2 = code.codewords
    ok = equiv_global_phase(logical_shift(psi0), psi1, tol)
    ok = ok and equiv_global_phase(logical_shift(logical_shift(psi0)), psi2, tol)
    for m, word in enumerate(code.codewords):
        transformed = apply_hadamard(apply_hadamard(word, 0), 2)
        record = run(builtin(f"qecc312-psi{m}"), forced=[0])
        ok = ok and equiv_global_phase(record.state, transformed, tol)
    return ok
