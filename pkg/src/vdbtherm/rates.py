"""Thermal transition rates by quadrature over the gas energy.

The working integral for the rate l -> k is

    a_kl = (4 pi m nu / Z_P) * Int_{max(E_k,E_l)}^inf dE
           exp(-beta (E - E_l)) |T_kl(E)|^2 / (sqrt(E-E_k) sqrt(E-E_l))

with Z_P = sqrt(2 pi m / beta) the 1D free-particle partition function.
Inverse-square-root endpoint behavior is removed by the substitution
E = E_edge + s^2 (or E_edge - s^2 at an upper edge); the Boltzmann tail is
truncated where the weight has dropped by e^-50.  Each panel goes through
adaptive Gauss-Kronrod quadrature with an embedded error estimate.

A deliberately different integration strategy -- uniform midpoint sums on a
stretched momentum grid with two Richardson extrapolation levels -- is kept
as an oracle (`momentum_oracle_rate`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import QuadratureError, RangeError, InputError
from .model import (
    MINUS,
    PLUS,
    ZERO,
    ALL_PAIRS,
    System,
    pair_parity,
)
from .scattering import t_element_sq, t_denominator

BETA_MIN, BETA_MAX = 1e-6, 1e6
TAIL_EXPONENT = 50.0  # truncate the Boltzmann tail at exp(-50)
DEFAULT_TOL = 1e-9


def _check_beta(beta: float) -> None:
    if not (BETA_MIN <= beta <= BETA_MAX):
        raise RangeError(f"beta={beta} outside supported range [{BETA_MIN}, {BETA_MAX}]")


@dataclass(frozen=True)
class RateSet:
    """Six thermal rates a_kl (stored as a 3x3 array with zero diagonal),
    with the per-rate quadrature error report."""

    rates: np.ndarray
    beta: float
    quadrature_report: np.ndarray

    def rate(self, k: int, l: int) -> float:
        return float(self.rates[k, l])


def transition_rate(k: int, l: int, beta: float, system: System,
                    tol: float = DEFAULT_TOL) -> float:
    """Single thermal rate l -> k at inverse temperature beta."""
    value, _ = _rate_with_error(k, l, beta, system, tol)
    return value


def compute_rate_set(beta: float, system: System, tol: float = DEFAULT_TOL) -> RateSet:
    """All six rates at inverse temperature beta."""
    rates = np.zeros((3, 3))
    errs = np.zeros((3, 3))
    for k, l in ALL_PAIRS:
        rates[k, l], errs[k, l] = _rate_with_error(k, l, beta, system, tol)
    return RateSet(rates=rates, beta=beta, quadrature_report=errs)


def _rate_with_error(k, l, beta, system, tol):
    if k == l:
        raise InputError("rates defined for distinct levels only")
    _check_beta(beta)
    if system.interaction.abs_u_sq == 0.0:
        return 0.0, 0.0  # |T_kl|^2 vanishes identically
    spec = system.spec
    e = system.spectrum.energies
    z_p = np.sqrt(2.0 * np.pi * spec.mass / beta)
    pref = 4.0 * np.pi * spec.mass * spec.gas_density / z_p
    el, ek = e[l], e[k]

    def f(energy):
        return (
            np.exp(-beta * (energy - el))
            * t_element_sq(energy, k, l, system)
            / np.sqrt((energy - ek) * (energy - el))
        )

    eps = tol / 3.0
    total, err = 0.0, 0.0
    s_tail = np.sqrt(TAIL_EXPONENT / beta)
    if {k, l} == {MINUS, ZERO}:
        e_mid = 0.5 * (e[ZERO] + e[PLUS])
        # left panel of the low band: E = E_0 + s^2 cancels 1/sqrt(E - E_0)
        def g_left(s):
            energy = e[ZERO] + s * s
            return (
                2.0
                * np.exp(-beta * (energy - el))
                * t_element_sq(energy, k, l, system)
                / np.sqrt(energy - e[MINUS])
            )

        v, q_err = quad(g_left, 0.0, np.sqrt(e_mid - e[ZERO]), epsabs=1e-300,
                        epsrel=eps, limit=200)
        total += v
        err += q_err
        # right panel of the low band: E = E_+ - s^2 smooths the branch kink
        v, q_err = quad(lambda s: 2.0 * s * f(e[PLUS] - s * s), 0.0,
                        np.sqrt(e[PLUS] - e_mid), epsabs=1e-300, epsrel=eps, limit=200)
        total += v
        err += q_err
        # tail above E_+
        v, q_err = quad(lambda s: 2.0 * s * f(e[PLUS] + s * s), 0.0, s_tail,
                        epsabs=1e-300, epsrel=eps, limit=200)
        total += v
        err += q_err
    else:
        other = ({k, l} - {PLUS}).pop()

        def g_tail(s):
            energy = e[PLUS] + s * s
            return (
                2.0
                * np.exp(-beta * (energy - el))
                * t_element_sq(energy, k, l, system)
                / np.sqrt(energy - e[other])
            )

        total, err = quad(g_tail, 0.0, s_tail, epsabs=1e-300, epsrel=eps, limit=200)

    value = pref * total
    abs_err = pref * err
    if abs_err > tol * max(abs(value), 1e-300):
        raise QuadratureError(
            f"rate ({k},{l}) quadrature error {abs_err:g} exceeds tol",
            estimate=value,
            error_bound=abs_err,
        )
    return value, abs_err


# ---------------------------------------------------------------------------
# momentum-grid oracle


def _midpoint_richardson(g, a: float, b: float, n0: int) -> float:
    """Composite midpoint sums at n0, 2*n0, 4*n0 points, extrapolated twice
    (h^2 rule -> h^6)."""
    sums = []
    for n in (n0, 2 * n0, 4 * n0):
        h = (b - a) / n
        t = a + h * (np.arange(n) + 0.5)
        sums.append(h * np.sum(g(t)))
    r1a = (4.0 * sums[1] - sums[0]) / 3.0
    r1b = (4.0 * sums[2] - sums[1]) / 3.0
    return (16.0 * r1b - r1a) / 15.0


def momentum_oracle_rate(k: int, l: int, beta: float, system: System,
                         n0: int = 768) -> float:
    """Oracle rate via the momentum-space integral with the energy delta
    resolved analytically:

        a_kl = (8 pi m nu / Z_P) Int_{p_min}^{p_cut} dp
               exp(-beta p^2 / 2m) |T_kl(E(p))|^2 / sqrt(2m (E(p) - E_k))

    evaluated by brute-force midpoint Riemann sums on uniform grids in a
    locally stretched momentum variable, Richardson-extrapolated.
    """
    _check_beta(beta)
    if system.interaction.abs_u_sq == 0.0:
        return 0.0
    spec = system.spec
    m = spec.mass
    e = system.spectrum.energies
    z_p = np.sqrt(2.0 * np.pi * m / beta)
    pref = 8.0 * np.pi * m * spec.gas_density / z_p
    el, ek = e[l], e[k]
    e_lo = max(ek, el)
    e_cut = e_lo + TAIL_EXPONENT / beta

    def big_f(p):
        energy = p * p / (2.0 * m) + el
        return (
            np.exp(-beta * p * p / (2.0 * m))
            * t_element_sq(energy, k, l, system)
            / np.sqrt(2.0 * m * (energy - ek))
        )

    p_of = lambda en: np.sqrt(2.0 * m * max(en - el, 0.0))
    p_cut = p_of(e_cut)
    p_star = p_of(e[PLUS])  # branch kink of |T|^2, if it sits above threshold

    total = 0.0
    if l == PLUS:
        # smooth everywhere: E - E_k >= E_+ - E_k > 0, and E - E_+ = p^2/2m
        total += _midpoint_richardson(big_f, 0.0, p_cut, n0)
    elif k == PLUS:
        # threshold singularity and kink coincide at p_star
        g = lambda t: big_f(p_star + t * t) * 2.0 * t
        total += _midpoint_richardson(g, 0.0, np.sqrt(p_cut - p_star), n0)
    else:
        # pair {-, 0}: low band below p_star, then the tail
        p_min = p_of(ek)
        p_mid = 0.5 * (p_min + p_star)
        if p_min > 0.0:  # up transition: integrable 1/sqrt at p_min
            g = lambda t: big_f(p_min + t * t) * 2.0 * t
            total += _midpoint_richardson(g, 0.0, np.sqrt(p_mid - p_min), n0)
        else:
            total += _midpoint_richardson(big_f, 0.0, p_mid, n0)
        g_up = lambda t: big_f(p_star - t * t) * 2.0 * t
        total += _midpoint_richardson(g_up, 0.0, np.sqrt(p_star - p_mid), n0)
        g_tail = lambda t: big_f(p_star + t * t) * 2.0 * t
        total += _midpoint_richardson(g_tail, 0.0, np.sqrt(p_cut - p_star), n0)
    return pref * total


# ---------------------------------------------------------------------------
# decomposition into direction-symmetric and direction-odd pieces


@dataclass(frozen=True)
class RateDecomposition:
    """Temperature-weighted integrals of the direction decomposition.

    A0, A1        Int_{E_+}^inf exp(-beta E) a0/a1(E) dE
    B             three values B_n indexed by the uninvolved level n
    B_tilde_plus  the single low-band integral (pair {-, 0})
    a1_eff, c0    cycle-scaled odd amplitude and its positive companion,
                  chosen so that the cycle affinity is exactly
                  c = a1_eff * (a1_eff^2 + c0)
    """

    beta: float
    A0: float
    A1: float
    B: np.ndarray
    B_tilde_plus: float
    a1_eff: float
    c0: float
    c: float
    energies: np.ndarray

    def symmetric_part(self, n: int) -> float:
        """sqrt(beta) (A0 + B_n + [B~_+ if n = +]), without the exp(beta E_l)
        source factor; equal for both directions of the pair missing n."""
        extra = self.B_tilde_plus if n == PLUS else 0.0
        return float(np.sqrt(self.beta) * (self.A0 + self.B[n] + extra))

    def odd_part(self) -> float:
        return float(np.sqrt(self.beta) * self.A1)

    def reassemble(self, k: int, l: int) -> float:
        """Rebuild the full rate a_kl from the decomposition."""
        n = 3 - k - l
        sign = -1.0 if pair_parity(k, l) else 1.0
        boltz = np.exp(self.beta * self.energies[l])
        return float(boltz * (self.symmetric_part(n) + sign * self.odd_part()))


def _integrand_pieces(system: System):
    spec = system.spec
    v = system.interaction
    m, hbar = spec.mass, spec.hbar
    w = v.w
    absu2 = v.abs_u_sq
    re_u3 = v.re_cyclic
    im_u3 = v.im_cyclic
    c2 = absu2 * w * w + absu2 * absu2 - 2.0 * w * re_u3
    pref0 = 4.0 * np.pi * m * spec.gas_density / np.sqrt(2.0 * np.pi * m)
    return m, hbar, absu2, im_u3, c2, pref0


def _g_weight(energy, system):
    """2 hbar^2 sqrt((E-E_-)(E-E_0)(E-E_+)) / |D_T|^2, E >= E_+."""
    e = system.spectrum.energies
    hbar = system.spec.hbar
    d2 = np.abs(t_denominator(energy, system)) ** 2
    prod = (energy - e[MINUS]) * (energy - e[ZERO]) * np.maximum(energy - e[PLUS], 0.0)
    return 2.0 * hbar**2 * np.sqrt(prod) / d2


def _quad_tail(g, beta, e_plus, eps):
    """Integrate g(E) e^{-beta E} over (E_+, inf) via E = E_+ + s^2."""
    def h(s):
        energy = e_plus + s * s
        return 2.0 * s * np.exp(-beta * energy) * g(energy)

    upper = np.inf if beta == 0.0 else np.sqrt(TAIL_EXPONENT / beta)
    val, err = quad(h, 0.0, upper, epsabs=1e-300, epsrel=eps, limit=250)
    return val, err


def rate_decomposition(beta: float, system: System, tol: float = 1e-10) -> RateDecomposition:
    """Temperature-weighted direction decomposition of the six rates.

    beta = 0 is allowed for every piece except A0 (whose integral diverges
    there and is never needed in that limit); A0 is reported as nan then.
    """
    if beta != 0.0:
        _check_beta(beta)
    m, hbar, absu2, im_u3, c2, pref0 = _integrand_pieces(system)
    e = system.spectrum.energies
    eps = tol / 3.0

    def a0_ig(energy):
        return _g_weight(energy, system) * (
            2.0 * absu2 * hbar**2 * np.sqrt(energy) + m * c2 / np.sqrt(energy)
        )

    def a1_ig(energy):
        return _g_weight(energy, system) * 2.0 * np.sqrt(2.0 * m) * hbar * im_u3

    def b_ig(energy, n):
        root_n = np.sqrt(energy - e[n])
        root_e = np.sqrt(energy)
        if n == PLUS:
            # combine with the sqrt(E - E_+) inside the G weight analytically
            d2 = np.abs(t_denominator(energy, system)) ** 2
            g_over = 2.0 * hbar**2 * np.sqrt((energy - e[MINUS]) * (energy - e[ZERO])) / d2
            return g_over * (
                2.0 * absu2 * hbar**2 * (energy - e[PLUS] - root_n * root_e)
                + m * c2 * (1.0 - root_n / root_e)
            )
        return _g_weight(energy, system) * (
            2.0 * absu2 * hbar**2 * (root_n - root_e)
            + m * c2 * (1.0 / root_n - 1.0 / root_e)
        )

    a0_val = np.nan
    if beta != 0.0:
        a0_val, _ = _quad_tail(a0_ig, beta, e[PLUS], eps)
        a0_val *= pref0
    a1_val, _ = _quad_tail(a1_ig, beta, e[PLUS], eps)
    a1_val *= pref0
    b_vals = np.zeros(3)
    for n in range(3):
        b_vals[n], _ = _quad_tail(lambda en, n=n: b_ig(en, n), beta, e[PLUS], eps)
        b_vals[n] *= pref0

    # low-band integral (pair {-, 0}), split at the midpoint so both the
    # lower 1/sqrt edge and the upper branch kink are substituted away
    def btilde_ig(energy):
        from .scattering import _ttilde_sq_low, _invariants

        w_, absu2_, re_u3_, _, c2_ = _invariants(system)
        d2 = np.abs(t_denominator(energy, system)) ** 2
        tt = _ttilde_sq_low(energy, e, hbar, m, w_, absu2_, re_u3_, c2_)
        return tt / d2 / np.sqrt((energy - e[MINUS]) * (energy - e[ZERO]))

    e_mid = 0.5 * (e[ZERO] + e[PLUS])
    bt1, _ = quad(
        lambda s: 2.0 * s * np.exp(-beta * (e[ZERO] + s * s)) * btilde_ig(e[ZERO] + s * s),
        0.0, np.sqrt(e_mid - e[ZERO]), epsabs=1e-300, epsrel=eps, limit=200,
    )
    bt2, _ = quad(
        lambda s: 2.0 * s * np.exp(-beta * (e[PLUS] - s * s)) * btilde_ig(e[PLUS] - s * s),
        0.0, np.sqrt(e[PLUS] - e_mid), epsabs=1e-300, epsrel=eps, limit=200,
    )
    btilde = pref0 * (bt1 + bt2)

    if beta != 0.0:
        sqb = np.sqrt(beta)
        s1 = sqb * a1_val
        s_sym = [sqb * (a0_val + b_vals[n] + (btilde if n == PLUS else 0.0)) for n in range(3)]
        trace_boltz = np.exp(beta * np.sum(e))
        pair_sum = s_sym[0] * s_sym[1] + s_sym[0] * s_sym[2] + s_sym[1] * s_sym[2]
        a1_eff = np.cbrt(2.0 * trace_boltz) * s1
        c0 = np.cbrt(2.0 * trace_boltz) ** 2 * pair_sum
        c_val = a1_eff * (a1_eff**2 + c0)
    else:
        a1_eff = c0 = c_val = np.nan

    dec = RateDecomposition(
        beta=beta, A0=float(a0_val), A1=float(a1_val), B=b_vals,
        B_tilde_plus=float(btilde), a1_eff=float(a1_eff), c0=float(c0),
        c=float(c_val), energies=e.copy(),
    )
    if beta != 0.0:
        _verify_reassembly(dec, beta, system, tol=1e-8)
    return dec


def _verify_reassembly(dec: RateDecomposition, beta, system, tol):
    for k, l in ALL_PAIRS:
        direct = transition_rate(k, l, beta, system, tol=1e-10)
        rebuilt = dec.reassemble(k, l)
        if abs(direct - rebuilt) > tol * max(abs(direct), 1e-300):
            raise QuadratureError(
                f"decomposition does not reassemble rate ({k},{l}): "
                f"{rebuilt} vs {direct}"
            )


def cycle_affinity(rate_set: RateSet) -> float:
    """Clockwise minus counterclockwise cycle product,
    c = a_{-+} a_{+0} a_{0-}  -  a_{-0} a_{0+} a_{+-}."""
    a = rate_set.rates
    return float(
        a[MINUS, PLUS] * a[PLUS, ZERO] * a[ZERO, MINUS]
        - a[MINUS, ZERO] * a[ZERO, PLUS] * a[PLUS, MINUS]
    )
