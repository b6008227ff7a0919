"""Closed-form on-shell T-matrix for the delta-coupled ring scattering a 1D
gas particle, in the short-separation limit.

All elements are evaluated at total energy E (gas energy + energy of the
incoming level).  Branch convention below the top level: sqrt(E - E_+) =
+i sqrt(E_+ - E), inherited from the +i*epsilon prescription; numpy's
principal complex sqrt implements exactly this.

The linear-system route (solving (1 - D1 v) for the scattering wavefunction)
is kept as a permanent oracle for the closed forms.
"""
from __future__ import annotations

import numpy as np

from .errors import BranchError, PoleOnContourError
from .model import MINUS, ZERO, PLUS, System, pair_parity

#: abort threshold for |D_T| on the integration contour
POLE_FLOOR = 1e-14


def _invariants(system: System):
    """Scalar combinations of (w, u) entering every closed form."""
    v = system.interaction
    w = v.w
    absu2 = v.abs_u_sq
    re_u3 = v.re_cyclic
    im_u3 = v.im_cyclic
    # |u* w - u^2|^2 expanded in gauge-invariant pieces
    c2 = absu2 * w * w + absu2 * absu2 - 2.0 * w * re_u3
    return w, absu2, re_u3, im_u3, c2


def t_denominator(energy, system: System):
    """Denominator D_T(E) shared by every T-matrix element.

    Accepts a scalar or an ndarray of energies; complex result.  Raises
    PoleOnContourError if |D_T| dips below the safety floor anywhere.
    """
    spec = system.spec
    m, hbar = spec.mass, spec.hbar
    w, absu2, re_u3, _, _ = _invariants(system)
    e = system.spectrum.energies
    energy = np.asarray(energy, dtype=float)
    r = np.sqrt(energy[..., None] - e + 0j)  # principal branch: +i sqrt below E_+
    r0, r1, r2 = r[..., 0], r[..., 1], r[..., 2]
    d = (
        1j * np.pi * m * np.sqrt(2 * m) * (-2.0 * re_u3 + 3.0 * absu2 * w - w**3)
        + 2 * np.pi * m * hbar * (absu2 - w * w) * (r0 + r1 + r2)
        + 2j * np.pi * hbar**2 * np.sqrt(2 * m) * w * (r0 * r1 + r0 * r2 + r1 * r2)
        + 4 * np.pi * hbar**3 * r0 * r1 * r2
    )
    if np.min(np.abs(d)) < POLE_FLOOR:
        raise PoleOnContourError(
            "D_T vanishes on the contour; resonance pathology for these parameters"
        )
    return d if d.ndim else complex(d)


def t_element_sq(energy, k: int, l: int, system: System):
    """|T_kl(E)|^2 for the transition l -> k, scalar or vectorized in E.

    Admissible domains: E >= E_+ for every pair; the window E_0 < E < E_+
    only for the pair within {-, 0}.
    """
    if k == l:
        raise BranchError("diagonal elements are not scattering transitions")
    e = system.spectrum.energies
    energy = np.asarray(energy, dtype=float)
    lo = max(e[k], e[l])
    if np.any(energy < lo - 1e-12 * max(1.0, abs(lo))):
        raise BranchError(f"E below threshold max(E_k, E_l) for pair ({k},{l})")
    low_band = energy < e[PLUS]
    if np.any(low_band) and {k, l} != {MINUS, ZERO}:
        raise BranchError("E_0 < E < E_+ admissible only for the (-, 0) pair")

    hbar, m = system.spec.hbar, system.spec.mass
    w, absu2, re_u3, im_u3, c2 = _invariants(system)
    n = 3 - k - l
    d2 = np.abs(t_denominator(energy, system)) ** 2

    if energy.ndim == 0:
        if low_band:
            tt = _ttilde_sq_low(float(energy), e, hbar, m, w, absu2, re_u3, c2)
        else:
            tt = _ttilde_sq_high(energy, e, k, l, n, hbar, m, absu2, im_u3, c2)
        return float(tt / d2)

    tt = np.empty_like(energy)
    hi = ~low_band
    if np.any(hi):
        tt[hi] = _ttilde_sq_high(energy[hi], e, k, l, n, hbar, m, absu2, im_u3, c2)
    if np.any(low_band):
        tt[low_band] = _ttilde_sq_low(energy[low_band], e, hbar, m, w, absu2, re_u3, c2)
    return tt / d2


def _ttilde_sq_high(energy, e, k, l, n, hbar, m, absu2, im_u3, c2):
    sign = -1.0 if pair_parity(k, l) else 1.0
    return (
        2.0
        * hbar**2
        * (energy - e[k])
        * (energy - e[l])
        * (
            2.0 * absu2 * hbar**2 * (energy - e[n])
            + m * c2
            + sign * 2.0 * hbar * np.sqrt(2 * m) * np.sqrt(energy - e[n]) * im_u3
        )
    )


def _ttilde_sq_low(energy, e, hbar, m, w, absu2, re_u3, c2):
    # direction-symmetric on this branch: |T~_{-0}|^2 = |T~_{0-}|^2
    rho = np.sqrt(e[PLUS] - energy)
    return (
        2.0
        * hbar**2
        * (energy - e[MINUS])
        * (energy - e[ZERO])
        * (
            2.0 * absu2 * hbar**2 * rho * rho
            + m * c2
            + 2.0 * hbar * np.sqrt(2 * m) * rho * (absu2 * w - re_u3)
        )
    )


def microreversibility_defect(energy, k: int, l: int, system: System):
    """|T_kl(E)|^2 - |T_lk(E)|^2 for E > E_+, by closed form.

    The closed form is cross-checked against direct subtraction on every
    call (1e-10 relative); scalar or vectorized in E.
    """
    e = system.spectrum.energies
    energy = np.asarray(energy, dtype=float)
    if np.any(energy <= e[PLUS]):
        raise BranchError("defect defined only above the top level E_+")
    hbar, m = system.spec.hbar, system.spec.mass
    im_u3 = system.interaction.im_cyclic
    n = 3 - k - l
    sign = -1.0 if pair_parity(k, l) else 1.0
    d2 = np.abs(t_denominator(energy, system)) ** 2
    closed = (
        sign
        * (2.0 * hbar) ** 3
        * np.sqrt(2 * m)
        * (energy - e[k])
        * (energy - e[l])
        * np.sqrt(energy - e[n])
        * im_u3
        / d2
    )
    direct = t_element_sq(energy, k, l, system) - t_element_sq(energy, l, k, system)
    scale = np.maximum(np.abs(closed), 1e-300)
    if np.max(np.abs(direct - closed) / scale) > 1e-10 and np.max(np.abs(closed)) > 1e-280:
        raise BranchError("defect closed form disagrees with direct subtraction")
    return closed if closed.ndim else float(closed)


def lippmann_schwinger_t(energy: float, system: System) -> np.ndarray:
    """Oracle: full 3x3 T(E) by solving the scattering linear system
    T = D2 ((1 - D1 v)^{-1} - 1) in the energy eigenbasis."""
    spec = system.spec
    m, hbar = spec.mass, spec.hbar
    e = system.spectrum.energies
    r = np.sqrt(energy - e + 0j)
    d1 = np.diag(-1j / (2.0 * hbar) * np.sqrt(2 * m) / r)
    d2 = np.diag(1j / np.pi * r / np.sqrt(2 * m))
    return d2 @ (np.linalg.inv(np.eye(3) - d1 @ system.interaction.v) - np.eye(3))
