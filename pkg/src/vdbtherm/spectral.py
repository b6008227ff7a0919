"""Pauli generator spectrum and thermalization-regime analysis.

For three levels the generator M has eigenvalues {0, lambda_-, lambda_+}
with lambda_pm = -omega_dis/2 +- sqrt(gamma)/2, where omega_dis is the sum
of all six rates and gamma a closed-form discriminant.  The sign of gamma
classifies the dynamics: exponential decay (gamma > 0), oscillatory decay
(gamma < 0), or a Liouvillian exceptional point on the dividing line.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NoRootError
from .model import (
    MINUS,
    PLUS,
    ZERO,
    CLOCKWISE_PAIRS,
    System,
    SystemSpec,
    build_system,
    vdb_energy_scale,
)
from .rates import RateSet, compute_rate_set, cycle_affinity, rate_decomposition

DEFAULT_EPS_REL = 1e-8


class Regime(enum.Enum):
    EXPONENTIAL = "exponential"
    LEP = "lep"
    OSCILLATORY = "oscillatory"


@dataclass(frozen=True)
class RateMatrix:
    """Pauli generator: off-diagonal M_kl = a_kl, columns summing to zero."""

    entries: np.ndarray

    def __post_init__(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError("rate matrix must be square")
        col = np.abs(m.sum(axis=0))
        if np.any(col > 1e-14 * max(np.max(np.abs(m)), 1.0)):
            raise DimensionError("rate matrix columns must sum to zero")

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def build_rate_matrix(rate_set: RateSet) -> RateMatrix:
    a = rate_set.rates
    m = a.copy()
    np.fill_diagonal(m, 0.0)
    for l in range(m.shape[0]):
        m[l, l] = -np.sum(m[:, l])
    return RateMatrix(entries=m)


def dissipative_frequency(m: RateMatrix) -> float:
    off = m.entries.copy()
    np.fill_diagonal(off, 0.0)
    return float(off.sum())


def discriminant_gamma(m: RateMatrix) -> float:
    """Closed-form eigenvalue discriminant for the 3-level generator."""
    if m.n != 3:
        raise DimensionError("closed-form discriminant requires exactly 3 levels")
    a = m.entries
    amo, amp = a[MINUS, ZERO], a[MINUS, PLUS]
    aom, aop = a[ZERO, MINUS], a[ZERO, PLUS]
    apm, apo = a[PLUS, MINUS], a[PLUS, ZERO]
    omega = amo + amp + aom + aop + apm + apo
    pair_sum = (
        amo * amp + amp * aom + amo * aop + aom * aop + amo * apm
        + aop * apm + amp * apo + aom * apo + apm * apo
    )
    return float(omega * omega - 4.0 * pair_sum)


def eigenvalues_3level(m: RateMatrix):
    omega = dissipative_frequency(m)
    gamma = discriminant_gamma(m)
    root = np.sqrt(complex(gamma))
    return np.array([0.0, -0.5 * omega + 0.5 * root, -0.5 * omega - 0.5 * root])


@dataclass(frozen=True)
class RegimeReport:
    omega_dis: float
    gamma: float
    eigenvalues: np.ndarray
    regime: Regime
    oscillation_count: float
    onset_condition: dict | None = None
    thermalization_residuals: np.ndarray | None = None


def classify_regime(m: RateMatrix, eps_rel: float = DEFAULT_EPS_REL) -> RegimeReport:
    """Classify the thermalization dynamics by the sign of the discriminant,
    with a band of width eps_rel * omega_dis^2 treated as the exceptional
    point (absorbing quadrature noise in the rates)."""
    omega = dissipative_frequency(m)
    gamma = discriminant_gamma(m)
    band = eps_rel * omega * omega
    if gamma < -band:
        regime = Regime.OSCILLATORY
        osc = float(np.sqrt(-gamma) / omega)
    elif gamma > band:
        regime = Regime.EXPONENTIAL
        osc = 0.0
    else:
        regime = Regime.LEP
        osc = 0.0
    return RegimeReport(
        omega_dis=omega,
        gamma=gamma,
        eigenvalues=eigenvalues_3level(m),
        regime=regime,
        oscillation_count=osc,
    )


def thermalization_residuals(rate_set: RateSet, beta: float,
                             energies: np.ndarray) -> np.ndarray:
    """Residuals of the three stationarity conditions, written through the
    detailed-balance defect factors I_kl = a_kl e^{-beta E_l} / (a_lk e^{-beta E_k}),
    normalized by omega_dis.  All three vanish iff the Boltzmann vector is
    stationary."""
    a = rate_set.rates

    def defect(k, l):
        num = a[k, l] * np.exp(-beta * (energies[l] - energies[k]))
        return num / a[l, k] if a[l, k] != 0.0 else np.nan

    rows = []
    for j in range(3):
        others = [i for i in range(3) if i != j]
        r = sum(a[i, j] * (defect(j, i) - 1.0) for i in others)
        rows.append(r)
    omega = float(np.sum(a))
    return np.asarray(rows) / omega if omega > 0 else np.asarray(rows)


def oscillation_condition(rate_set: RateSet, beta: float,
                          energies: np.ndarray) -> dict:
    """Balance inequality between cycle affinity and dissipation:
    oscillations require |c| > omega^2 |omega_DB - omega| / (4 sum_kl e^{beta(E_k-E_l)})."""
    a = rate_set.rates
    omega = float(np.sum(a))
    omega_db = sum(
        a[k, l] * (1.0 + np.exp(beta * (energies[k] - energies[l])))
        for k, l in CLOCKWISE_PAIRS
    )
    exp_sum = 3.0 + sum(
        np.exp(beta * (energies[i] - energies[j]))
        for i in range(3) for j in range(3) if i != j
    )
    lhs = abs(cycle_affinity(rate_set))
    rhs = omega * omega * abs(omega_db - omega) / (4.0 * exp_sum)
    # floor at roundoff scale (both sides are cubic in the rates)
    return {"lhs": lhs, "rhs": rhs, "holds": bool(lhs > rhs + 1e-13 * omega**3)}


@dataclass(frozen=True)
class HighTBoundReport:
    e_vdb: float
    gap_term: float
    e_low_energy: float
    satisfied: bool


def high_T_bound(system: System, tol: float = 1e-10) -> HighTBoundReport:
    """Energy-scale form of the necessary high-temperature oscillation
    condition: oscillations at beta -> 0 are guaranteed once

        E_VDB > ((E_- - E_0)^2 + (E_- - E_+)(E_0 - E_+)) / E_+  +  E_low-energy

    where E_low-energy collects the low-band and subleading-tail integrals.
    All integrals are evaluated directly at the beta = 0 limit of the
    regulated integrands (the divergent symmetric piece drops out)."""
    e = system.spectrum.energies
    v = system.interaction
    spec = system.spec
    dec = rate_decomposition(0.0, system, tol=tol)
    a1, b, btilde = dec.A1, dec.B, dec.B_tilde_plus

    # correction kernel turning B_i - B_j into the monotone majorant dB'_ij
    from .rates import _g_weight, _quad_tail, TAIL_EXPONENT  # noqa: F401
    from .rates import _integrand_pieces

    m_, hbar, absu2, _, _, pref0 = _integrand_pieces(system)

    def kernel(energy):
        return _g_weight(energy, system) * absu2 * hbar**2 * (
            1.0 / np.sqrt(e[PLUS]) - 1.0 / np.sqrt(energy)
        )

    k_val, _ = _quad_tail(kernel, 0.0, e[PLUS], tol / 3.0)
    k_val *= pref0

    def db_prime(i, j):
        return b[i] - b[j] + (e[j] - e[i]) * k_val

    quad_form = (
        db_prime(MINUS, ZERO) ** 2
        + db_prime(MINUS, PLUS) * db_prime(ZERO, PLUS)
        + btilde * (btilde + (b[PLUS] - b[ZERO]) + (b[PLUS] - b[MINUS]))
    )
    e_vdb = vdb_energy_scale(spec, v)
    gap_term = ((e[MINUS] - e[ZERO]) ** 2
                + (e[MINUS] - e[PLUS]) * (e[ZERO] - e[PLUS])) / e[PLUS]
    if a1 == 0.0:
        return HighTBoundReport(e_vdb=0.0, gap_term=float(gap_term),
                                e_low_energy=np.inf, satisfied=False)
    e_low = e_vdb / (3.0 * a1 * a1) * quad_form - gap_term
    satisfied = e_vdb > gap_term + e_low
    return HighTBoundReport(e_vdb=float(e_vdb), gap_term=float(gap_term),
                            e_low_energy=float(e_low), satisfied=bool(satisfied))


def gamma_at_temperature(temperature: float, system: System,
                         tol: float = 1e-9) -> float:
    rs = compute_rate_set(1.0 / temperature, system, tol=tol)
    return discriminant_gamma(build_rate_matrix(rs))


def find_T_EP(spec: SystemSpec, t_bracket=(0.5, 50.0), tol: float = 1e-6,
              scan_points: int = 24, rate_tol: float = 1e-9) -> float:
    """Locate the exceptional-point temperature by bisection on gamma(T).

    The bracket is first scanned on a coarse grid; if gamma changes sign more
    than once, the lowest crossing is used and a warning is issued.
    """
    system = build_system(spec)
    t_lo, t_hi = t_bracket
    grid = np.linspace(t_lo, t_hi, scan_points)
    g = np.array([gamma_at_temperature(t, system, tol=rate_tol) for t in grid])
    sign_changes = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    if len(sign_changes) == 0:
        raise NoRootError(f"gamma does not change sign on T in {t_bracket}")
    if len(sign_changes) > 1:
        warnings.warn("multiple gamma sign changes on bracket; returning the lowest")
    i = sign_changes[0]
    a_t, b_t = grid[i], grid[i + 1]
    ga = g[i]
    while (b_t - a_t) > tol * b_t:
        mid = 0.5 * (a_t + b_t)
        gm = gamma_at_temperature(mid, system, tol=rate_tol)
        if np.sign(gm) == np.sign(ga):
            a_t, ga = mid, gm
        else:
            b_t = mid
    return 0.5 * (a_t + b_t)


def low_T_diagnostics(spec: SystemSpec, beta_list, rate_tol: float = 1e-9):
    """Low-temperature behavior of the rates: up/down ratios, the normalized
    generator, its distance from (energy-ordered) triangular form, and the
    sign of the discriminant, for each requested beta."""
    if any(b2 <= b1 for b1, b2 in zip(beta_list, beta_list[1:])):
        raise DimensionError("beta_list must be strictly ascending")
    system = build_system(spec)
    rows = []
    for beta in beta_list:
        rs = compute_rate_set(beta, system, tol=rate_tol)
        a = rs.rates
        m = build_rate_matrix(rs)
        omega = dissipative_frequency(m)
        norm = m.entries / omega
        # up/down ratios a_kl / a_lk for E_k > E_l
        ratios = {
            "zero_minus": a[ZERO, MINUS] / a[MINUS, ZERO],
            "plus_minus": a[PLUS, MINUS] / a[MINUS, PLUS],
            "plus_zero": a[PLUS, ZERO] / a[ZERO, PLUS],
        }
        # strictly-lower-triangular part in the (-, 0, +) energy ordering
        # measures the surviving up-rate weight
        tri_dist = float(np.max(np.abs(np.tril(norm, -1))))
        rows.append({
            "beta": beta,
            "ratios": ratios,
            "normalized_matrix": norm,
            "triangular_distance": tri_dist,
            "gamma_sign": float(np.sign(discriminant_gamma(m))),
        })
    return rows


def regime_report(rate_set: RateSet, beta: float, system: System,
                  eps_rel: float = DEFAULT_EPS_REL) -> RegimeReport:
    """Full report: regime classification plus the balance condition and the
    stationarity residuals."""
    m = build_rate_matrix(rate_set)
    base = classify_regime(m, eps_rel)
    e = system.spectrum.energies
    return RegimeReport(
        omega_dis=base.omega_dis,
        gamma=base.gamma,
        eigenvalues=base.eigenvalues,
        regime=base.regime,
        oscillation_count=base.oscillation_count,
        onset_condition=oscillation_condition(rate_set, beta, e),
        thermalization_residuals=thermalization_residuals(rate_set, beta, e),
    )
