"""Exact population propagation for Pauli generators.

P(t) = P_th + sum_i sum_l b_{i,l} t^l e^{lambda_i t} V_i, built from an
eigen- or Jordan-chain decomposition of the generator.  Near an exceptional
point the numerical eigenvalues split by roundoff; eigenvalues closer than
lep_tol * ||M|| are clustered and generalized eigenvectors constructed for
the cluster, so the t^l e^{lambda t} structure is recovered instead of a
nearly-parallel (ill-conditioned) eigenbasis.

`exp_oracle` is an independent brute-force matrix exponential (squaring a
truncated Taylor series) used to validate the decomposition path.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditioningError, InputError, NormalizationError

COND_LIMIT = 1e12
DEFAULT_LEP_TOL = 1e-7


@dataclass(frozen=True)
class PropagatorDecomposition:
    """Generalized spectral data of a generator: one (eigenvalue, chain)
    entry per Jordan chain; `basis` stacks all chain vectors column-wise."""

    matrix: np.ndarray
    eigenvalues: np.ndarray          # one per chain
    block_sizes: np.ndarray          # chain lengths, summing to N
    basis: np.ndarray                # N x N, chain vectors in block order
    basis_inv: np.ndarray
    condition_number: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    populations: np.ndarray          # shape (len(times), N)
    initial_state: np.ndarray
    metadata: dict = field(default_factory=dict)


def _cluster(eigs, tol_abs):
    """Group sorted eigenvalues into clusters of mutual distance <= tol_abs."""
    order = np.argsort(eigs.real + 1e-300 * eigs.imag)
    groups = [[order[0]]]
    for idx in order[1:]:
        if abs(eigs[idx] - eigs[groups[-1][-1]]) <= tol_abs:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def decompose(m: np.ndarray, lep_tol: float = DEFAULT_LEP_TOL) -> PropagatorDecomposition:
    """Eigen-decomposition with Jordan-chain fallback for clustered
    eigenvalues (within lep_tol * ||M||)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[0]
    norm = np.linalg.norm(m, ord=2)
    if norm == 0.0:
        return PropagatorDecomposition(
            matrix=m, eigenvalues=np.zeros(n, dtype=complex),
            block_sizes=np.ones(n, dtype=int), basis=np.eye(n),
            basis_inv=np.eye(n), condition_number=1.0,
        )
    eigs, vecs = np.linalg.eig(m)
    tol_abs = lep_tol * norm
    groups = _cluster(eigs, tol_abs)

    chain_eigs, chain_sizes, columns = [], [], []
    for grp in groups:
        if len(grp) == 1:
            i = grp[0]
            chain_eigs.append(eigs[i])
            chain_sizes.append(1)
            columns.append(vecs[:, i])
            continue
        lam = complex(np.mean(eigs[grp]))
        a = m.astype(complex) - lam * np.eye(n)
        # geometric multiplicity from the rank of (M - lambda I)
        sv = np.linalg.svd(a, compute_uv=False)
        geo = int(np.sum(sv <= tol_abs * 10.0))
        geo = max(geo, 1)
        if geo >= len(grp):
            # semisimple cluster: keep the raw eigenvectors
            for i in grp:
                chain_eigs.append(eigs[i])
                chain_sizes.append(1)
                columns.append(vecs[:, i])
            continue
        # defective: build one chain per independent eigenvector, extending
        # with least-squares solves of (M - lambda) v_{l+1} = v_l
        _, _, vt = np.linalg.svd(a)
        eigvs = vt[-geo:].conj()  # null-space basis, rows -> vectors
        total = len(grp)
        per, extra = divmod(total - geo, geo)
        for j in range(geo):
            length = 1 + per + (1 if j < extra else 0)
            v = eigvs[j] / np.linalg.norm(eigvs[j])
            chain = [v]
            for _ in range(length - 1):
                nxt, *_ = np.linalg.lstsq(a, chain[-1], rcond=None)
                chain.append(nxt)
            chain_eigs.append(lam)
            chain_sizes.append(length)
            columns.extend(chain)

    basis = np.column_stack(columns)
    cond = np.linalg.cond(basis)
    if cond > COND_LIMIT:
        raise ConditioningError(
            f"chain basis condition number {cond:.3g} exceeds {COND_LIMIT:g}; "
            "use exp_oracle for this generator"
        )
    basis_inv = np.linalg.inv(basis)
    dec = PropagatorDecomposition(
        matrix=m, eigenvalues=np.asarray(chain_eigs),
        block_sizes=np.asarray(chain_sizes, dtype=int), basis=basis,
        basis_inv=basis_inv, condition_number=float(cond),
    )
    _check_reconstruction(dec, norm)
    return dec


def _jordan_matrix(dec: PropagatorDecomposition) -> np.ndarray:
    j = np.zeros((dec.n, dec.n), dtype=complex)
    pos = 0
    for lam, size in zip(dec.eigenvalues, dec.block_sizes):
        for i in range(size):
            j[pos + i, pos + i] = lam
            if i + 1 < size:
                j[pos + i, pos + i + 1] = 1.0
        pos += size
    return j


def _check_reconstruction(dec, norm):
    rebuilt = dec.basis @ _jordan_matrix(dec) @ dec.basis_inv
    err = np.max(np.abs(rebuilt - dec.matrix))
    if err > 1e-10 * max(norm, 1.0):
        raise ConditioningError(
            f"Jordan reconstruction error {err:.3g} exceeds 1e-10 * ||M||"
        )


def _exp_jordan(dec: PropagatorDecomposition, t: float) -> np.ndarray:
    """e^{Jt} for the block-bidiagonal chain matrix."""
    out = np.zeros((dec.n, dec.n), dtype=complex)
    pos = 0
    for lam, size in zip(dec.eigenvalues, dec.block_sizes):
        phase = np.exp(lam * t)
        fact = 1.0
        for off in range(size):
            if off > 0:
                fact *= off
            for i in range(size - off):
                out[pos + i, pos + i + off] = phase * t**off / fact
        pos += size
    return out


def propagate(dec: PropagatorDecomposition, p0, times) -> Trajectory:
    """Populations P(t) = Q e^{Jt} Q^{-1} P0 on the given time grid."""
    p0 = np.asarray(p0, dtype=float)
    times = np.asarray(times, dtype=float)
    if p0.shape != (dec.n,):
        raise InputError(f"initial state must have length {dec.n}")
    if abs(p0.sum() - 1.0) > 1e-9 or np.any(p0 < -1e-9):
        raise InputError("initial state must lie in the probability simplex")
    if np.any(times < 0):
        raise InputError("times must be nonnegative")
    coeffs = dec.basis_inv @ p0
    pops = np.empty((len(times), dec.n))
    for it, t in enumerate(times):
        p = dec.basis @ (_exp_jordan(dec, t) @ coeffs)
        pops[it] = p.real
    return Trajectory(times=times, populations=pops, initial_state=p0)


def exp_oracle(m: np.ndarray, t: float) -> np.ndarray:
    """Matrix exponential e^{Mt} by scaling-and-squaring of the Taylor
    series; independent of the spectral path."""
    if t < 0:
        raise InputError("t must be nonnegative")
    a = np.asarray(m, dtype=float) * t
    norm = np.max(np.abs(a))
    s = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0 else 0
    a = a / 2**s
    n = a.shape[0]
    term = np.eye(n)
    out = np.eye(n)
    for k in range(1, 30):
        term = term @ a / k
        out = out + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(s):
        out = out @ out
    return out


def slowest_timescale(dec: PropagatorDecomposition) -> float:
    """1 / |max Re lambda| over the nonzero eigenvalues."""
    scale = np.max(np.abs(dec.eigenvalues)) if dec.n else 0.0
    if scale == 0.0:
        return np.inf
    nz = [lam.real for lam in dec.eigenvalues if abs(lam) > 1e-10 * scale]
    if not nz:
        return np.inf
    return 1.0 / abs(max(nz))


def observables(traj: Trajectory, p_th, dec: PropagatorDecomposition) -> dict:
    """Distance of the highest level to equilibrium, its exponential-rescaled
    normalized form, and the slowest dissipative time scale."""
    p_th = np.asarray(p_th, dtype=float)
    t_slow = slowest_timescale(dec)
    delta = traj.populations[:, -1] - p_th[-1]
    d0 = traj.initial_state[-1] - p_th[-1]
    if d0 == 0.0:
        raise NormalizationError(
            "initial distance to equilibrium vanishes for the highest level"
        )
    rescaled = delta * np.exp(traj.times / t_slow) / d0
    return {"delta_p_plus": delta, "rescaled": rescaled, "t_slow": t_slow}
