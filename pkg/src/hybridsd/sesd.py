"""Exact finite-alphabet least squares via Schnorr-Euchner sphere decoding.

Solves min_x ||d - R x||^2 over x in A^M for upper-triangular R and a
finite alphabet A (complex phase symbols or real quantizer labels).
Depth-first from the last layer, candidates at each layer ordered by
distance to the unconstrained per-layer center, branches pruned against
the best objective found so far. The first leaf is the Babai point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_triangular

from .errors import SingularDiagonal, TooLarge
from .matrixkit import cholesky_upper

DIAG_FLOOR_RTOL = 1e-10
BRUTE_FORCE_GUARD = 2**20


@dataclass(frozen=True)
class SesdProblem:
    """Upper-triangular system and the candidate alphabet."""

    r: np.ndarray
    d: np.ndarray
    alphabet: np.ndarray


@dataclass(frozen=True)
class SesdResult:
    x_opt: np.ndarray
    objective: float
    nodes_visited: int


class TriangularForm(NamedTuple):
    """Reduced system plus the additive constant linking back to the
    original objective: ||a - Bx||^2 + mu ||Bx||^2 = ||d - Rx||^2 + offset."""

    r: np.ndarray
    d: np.ndarray
    offset: float


def _validate(p: SesdProblem) -> tuple[list, list, list]:
    r = np.asarray(p.r)
    d = np.asarray(p.d).ravel()
    alphabet = np.asarray(p.alphabet).ravel()
    m = d.size
    if r.shape != (m, m):
        raise ValueError(f"R shape {r.shape} does not match d length {m}")
    if alphabet.size == 0:
        raise ValueError("alphabet is empty")
    if m > 1 and np.any(r[np.tril_indices(m, -1)] != 0):
        raise ValueError("R must be structurally upper triangular")
    floor = DIAG_FLOOR_RTOL * float(np.max(np.abs(r)))
    if np.any(np.abs(np.diag(r)) < floor):
        raise SingularDiagonal("triangular diagonal below numeric floor; ridge the Gram matrix")
    return r.tolist(), d.tolist(), alphabet.tolist()


def _objective(p: SesdProblem, x: np.ndarray) -> float:
    resid = np.asarray(p.d).ravel() - np.asarray(p.r) @ np.asarray(x).ravel()
    return float(np.real(np.vdot(resid, resid)))


def sesd_solve(p: SesdProblem, initial=None) -> SesdResult:
    """Global minimizer over the alphabet; exact, with radius pruning.

    `initial` optionally seeds the search radius with a known candidate
    vector; the result is then never worse than that candidate.
    """
    rr, dd, alpha = _validate(p)
    m_dim = len(dd)
    q = len(alpha)
    rdiag = [rr[i][i] for i in range(m_dim)]

    best_obj = np.inf
    best_x = None
    if initial is not None:
        best_x = list(np.asarray(initial).ravel())
        if len(best_x) != m_dim:
            raise ValueError("initial vector length mismatch")
        best_obj = _objective(p, np.asarray(best_x))

    def se_order(center):
        keyed = []
        for i in range(q):
            t = center - alpha[i]
            keyed.append((t.real * t.real + t.imag * t.imag, i))
        keyed.sort()
        return [i for _, i in keyed]

    x = [0.0] * m_dim
    order = [None] * m_dim
    pos = [0] * m_dim
    above = [0.0] * m_dim  # accumulated distance of layers > m on the current path
    resid = [0.0] * m_dim  # d_m minus the contribution of layers > m
    nodes = 0

    m = m_dim - 1
    resid[m] = dd[m]
    above[m] = 0.0
    order[m] = se_order(dd[m] / rdiag[m])
    pos[m] = 0
    while True:
        if pos[m] < q:
            a = alpha[order[m][pos[m]]]
            pos[m] += 1
            t = resid[m] - rdiag[m] * a
            dist = above[m] + t.real * t.real + t.imag * t.imag
            if dist >= best_obj:
                pos[m] = q  # ordered candidates: the rest are no closer
                continue
            nodes += 1
            if m == 0:
                x[0] = a
                best_obj = dist
                best_x = list(x)
                pos[m] = q
                continue
            x[m] = a
            m -= 1
            above[m] = dist
            acc = dd[m]
            row = rr[m]
            for j in range(m + 1, m_dim):
                acc = acc - row[j] * x[j]
            resid[m] = acc
            order[m] = se_order(acc / rdiag[m])
            pos[m] = 0
        else:
            m += 1
            if m >= m_dim:
                break

    x_opt = np.asarray(best_x)
    return SesdResult(x_opt=x_opt, objective=_objective(p, x_opt), nodes_visited=nodes)


def brute_force_solve(p: SesdProblem) -> SesdResult:
    """Exhaustive-search oracle; lexicographically first vector on ties."""
    r = np.asarray(p.r)
    d = np.asarray(p.d).ravel()
    alphabet = np.asarray(p.alphabet).ravel()
    m = d.size
    q = alphabet.size
    total = q**m
    if total > BRUTE_FORCE_GUARD:
        raise TooLarge(f"{q}^{m} candidates exceed the enumeration guard")

    best_obj = np.inf
    best_x = None
    chunk = 65536
    weights = q ** np.arange(m - 1, -1, -1, dtype=np.int64)  # x[0] most significant
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (idx[:, None] // weights[None, :]) % q
        cand = alphabet[digits]  # (chunk, m)
        resid = d[None, :] - cand @ r.T
        cost = np.sum(np.abs(resid) ** 2, axis=1)
        j = int(np.argmin(cost))
        if cost[j] < best_obj:
            best_obj = float(cost[j])
            best_x = cand[j].copy()
    return SesdResult(x_opt=best_x, objective=_objective(p, best_x), nodes_visited=total)


def reduce_to_triangular(b_mat, a_vec, mu: float = 0.0) -> TriangularForm:
    """Rewrite ||a - Bx||^2 + mu ||Bx||^2 as ||d - Rx||^2 + offset.

    R is the upper Cholesky factor of (1+mu) B^H B and d = R^-H B^H a;
    offset = a^H a - d^H d.
    """
    b = np.asarray(b_mat)
    a = np.asarray(a_vec).ravel()
    if mu < 0:
        raise ValueError(f"mu must be nonnegative, got {mu}")
    gram = (1.0 + mu) * (b.conj().T @ b)
    r = cholesky_upper(gram)
    d = solve_triangular(r, b.conj().T @ a, lower=False, trans="C")
    offset = float(np.real(np.vdot(a, a) - np.vdot(d, d)))
    return TriangularForm(r=r, d=d, offset=offset)


def selftest(n_instances: int = 200, seed: int = 0) -> tuple[int, int]:
    """Oracle-equivalence sweep over random complex and real instances.

    Returns (passes, failures); used by the CLI self-test.
    """
    from .alphabets import build_phase_alphabet, build_quant_labels

    rng = np.random.default_rng(seed)
    passes = 0
    fails = 0
    for trial in range(n_instances):
        if trial % 2 == 0:
            bits = int(rng.integers(1, 4))
            alphabet = build_phase_alphabet(bits).symbols
            m = int(rng.integers(1, 5))
            r = np.triu(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
            d = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        else:
            bits = int(rng.integers(1, 3))
            alphabet = build_quant_labels(bits, 1.0).real_labels
            m = int(rng.integers(1, 7))
            r = np.triu(rng.standard_normal((m, m)))
            d = 2.0 * rng.standard_normal(m)
        r[np.diag_indices(m)] = np.sign(np.real(np.diag(r)) + 0.5) * (np.abs(np.diag(r)) + 0.5)
        prob = SesdProblem(r=r, d=d, alphabet=alphabet)
        got = sesd_solve(prob)
        want = brute_force_solve(prob)
        if abs(got.objective - want.objective) <= 1e-12 * (1.0 + want.objective):
            passes += 1
        else:
            fails += 1
    return passes, fails
