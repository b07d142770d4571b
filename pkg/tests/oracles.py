"""Brute-force reference implementations for cross-checking the simulator.

Everything here works by explicit digit loops over flat index arrays, on
purpose: no reshapes, no tensordot, no axis bookkeeping shared with the
package.  Slow and obvious beats fast and clever for an oracle.

Index convention (shared contract): site 0 is the most significant digit,
so flat index = sum(d[s] * q**(n-1-s)).
"""

import cmath

import numpy as np


def oracle_digits(q, index, n):
    """Big-endian digits of a flat index."""
    out = []
    for s in range(n):
        out.append((index // q ** (n - 1 - s)) % q)
    return tuple(out)


def oracle_index(q, digits):
    idx = 0
    for d in digits:
        idx = idx * q + d
    return idx


def oracle_phase(q, exponent):
    return cmath.exp(2j * cmath.pi * (exponent % q) / q)


def oracle_apply_x(amps, q, n, site, alpha):
    """Digit remap: amplitude of digits d moves to digits with d[site]+alpha."""
    out = np.zeros_like(np.asarray(amps, dtype=complex))
    for idx in range(q ** n):
        d = list(oracle_digits(q, idx, n))
        d[site] = (d[site] + alpha) % q
        out[oracle_index(q, d)] = amps[idx]
    return out


def oracle_apply_z(amps, q, n, site, beta):
    out = np.zeros(q ** n, dtype=complex)
    for idx in range(q ** n):
        d = oracle_digits(q, idx, n)
        out[idx] = amps[idx] * oracle_phase(q, beta * d[site])
    return out


def oracle_apply_cz(amps, q, n, site_a, site_b, beta):
    out = np.zeros(q ** n, dtype=complex)
    for idx in range(q ** n):
        d = oracle_digits(q, idx, n)
        out[idx] = amps[idx] * oracle_phase(q, beta * d[site_a] * d[site_b])
    return out


def oracle_apply_matrix(amps, q, n, site, matrix):
    """Single-site matrix by summing over the target digit."""
    out = np.zeros(q ** n, dtype=complex)
    for idx in range(q ** n):
        d = list(oracle_digits(q, idx, n))
        acc = 0.0 + 0.0j
        for c in range(q):
            src = list(d)
            src[site] = c
            acc += matrix[d[site], c] * amps[oracle_index(q, src)]
        out[idx] = acc
    return out


def oracle_full_operator(q, n, site_matrices):
    """Dense q**n operator from per-site matrices (identity elsewhere)."""
    op = np.eye(1, dtype=complex)
    for s in range(n):
        m = site_matrices.get(s, np.eye(q, dtype=complex))
        op = np.kron(op, m)
    return op


def oracle_pump(amps, q, n, emitter_site):
    """Copy the emitter digit onto a new trailing site."""
    out = np.zeros(q ** (n + 1), dtype=complex)
    for idx in range(q ** n):
        d = oracle_digits(q, idx, n)
        out[oracle_index(q, d + (d[emitter_site],))] = amps[idx]
    return out


def oracle_partial_trace(amps, q, n, keep):
    """rho[r, c] = sum over traced digits of psi(r, t) conj(psi(c, t))."""
    keep = sorted(keep)
    rest = [s for s in range(n) if s not in keep]
    dk = q ** len(keep)
    rho = np.zeros((dk, dk), dtype=complex)

    def embed(kept_digits, rest_digits):
        d = [0] * n
        for s, v in zip(keep, kept_digits):
            d[s] = v
        for s, v in zip(rest, rest_digits):
            d[s] = v
        return oracle_index(q, d)

    for r in range(dk):
        rd = oracle_digits(q, r, len(keep))
        for c in range(dk):
            cd = oracle_digits(q, c, len(keep))
            acc = 0.0 + 0.0j
            for t in range(q ** len(rest)):
                td = oracle_digits(q, t, len(rest))
                acc += amps[embed(rd, td)] * np.conj(amps[embed(cd, td)])
            rho[r, c] = acc
    return rho


def random_state_vector(q, n, rng):
    """Normalized complex vector with independent gaussian entries."""
    vec = rng.normal(size=q ** n) + 1j * rng.normal(size=q ** n)
    return vec / np.linalg.norm(vec)
