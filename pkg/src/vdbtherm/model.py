"""Three-dot ring model: Hamiltonian, spectrum, and the interaction matrix
in the energy eigenbasis.

Conventions
-----------
* Level indices 0, 1, 2 correspond to the labels (-, 0, +), i.e. ascending
  energy.  Population vectors are ordered (P_minus, P_zero, P_plus).
* Natural units hbar = k_B = m = 1 by default, but every formula carries the
  constants so non-unit values work.
* Eigenvector gauge: the first component of magnitude above 1e-12 of each
  eigenvector is made real positive, so the interaction matrix is
  reproducible bit-for-bit across runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, ZeroCouplingError, InputError

MINUS, ZERO, PLUS = 0, 1, 2
LEVEL_NAMES = ("-", "0", "+")

#: ordered (k, l) pairs, clockwise triple first:  a_kl is the rate l -> k
CLOCKWISE_PAIRS = ((ZERO, MINUS), (PLUS, ZERO), (MINUS, PLUS))
COUNTERCLOCKWISE_PAIRS = ((MINUS, ZERO), (ZERO, PLUS), (PLUS, MINUS))
ALL_PAIRS = CLOCKWISE_PAIRS + COUNTERCLOCKWISE_PAIRS


def pair_parity(k: int, l: int) -> int:
    """0 for the clockwise pairs (0,-), (+,0), (-,+); 1 otherwise."""
    if k == l:
        raise InputError("pair requires two distinct levels")
    return 0 if (k, l) in CLOCKWISE_PAIRS else 1


@dataclass(frozen=True)
class SystemSpec:
    """Physical parameters of the ring + 1D gas.

    tau          tunneling constant (energy), nonzero
    phi          magnetic flux quanta (dimensionless)
    potentials   site potentials (V1, V2, V3), units energy*length
    mass         gas particle mass
    hbar, k_boltzmann   scale constants, > 0
    gas_density  1D gas density nu, > 0
    """

    tau: float = 1.85
    phi: float = 0.575
    potentials: tuple = (6.0, 1.5, 4.0)
    mass: float = 1.0
    hbar: float = 1.0
    k_boltzmann: float = 1.0
    gas_density: float = 1.0

    def __post_init__(self):
        if self.tau == 0:
            raise InputError("tau must be nonzero")
        if self.mass <= 0 or self.hbar <= 0 or self.k_boltzmann <= 0:
            raise InputError("mass, hbar and k_B must be positive")
        if self.gas_density <= 0:
            raise InputError("gas density must be positive")
        if len(self.potentials) != 3:
            raise InputError("exactly three site potentials required")
        object.__setattr__(self, "potentials", tuple(float(p) for p in self.potentials))

    def hamiltonian(self) -> np.ndarray:
        """3x3 ring Hamiltonian with Peierls phases exp(+-i 2 pi phi / 3)."""
        ph = np.exp(-2j * np.pi * self.phi / 3.0)
        t = self.tau
        return np.array(
            [
                [0.0, t * ph, t * np.conj(ph)],
                [t * np.conj(ph), 0.0, t * ph],
                [t * ph, t * np.conj(ph), 0.0],
            ]
        )


@dataclass(frozen=True)
class Spectrum:
    """Sorted ring spectrum: energies strictly ascending (E-, E0, E+),
    eigenvectors orthonormal columns in the fixed gauge."""

    energies: np.ndarray
    eigenvectors: np.ndarray

    @property
    def e_minus(self):
        return self.energies[MINUS]

    @property
    def e_zero(self):
        return self.energies[ZERO]

    @property
    def e_plus(self):
        return self.energies[PLUS]


def diagonalize_ring(spec: SystemSpec) -> Spectrum:
    """Diagonalize the ring Hamiltonian and label levels by ascending energy.

    Raises DegeneracyError when any two levels are closer than 1e-10*|tau|.
    """
    h = spec.hamiltonian()
    energies, vectors = np.linalg.eigh(h)  # ascending by construction
    gap_floor = 1e-10 * abs(spec.tau)
    if np.min(np.diff(energies)) < gap_floor:
        raise DegeneracyError(
            f"degenerate ring spectrum {energies} (gap floor {gap_floor:g})"
        )
    vectors = _fix_gauge(vectors)
    return Spectrum(energies=energies, eigenvectors=vectors)


def _fix_gauge(vectors: np.ndarray) -> np.ndarray:
    """Rotate each eigenvector phase so its first nonzero component is real
    positive."""
    out = vectors.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-12))
        out[:, j] = col * np.exp(-1j * np.angle(col[idx]))
    return out


@dataclass(frozen=True)
class InteractionMatrix:
    """Site potentials rotated to the energy eigenbasis.

    w         common diagonal element, (V1+V2+V3)/3
    u         phased sum (V1 + V2 e^{i 2pi/3} + V3 e^{-i 2pi/3})/3
    v         full 3x3 Hermitian matrix in the (-, 0, +) basis
    cyclic    gauge-invariant cycle product v_{-0} v_{0+} v_{+-}

    ``cyclic`` equals u^3 or conj(u)^3 depending on how the energy sort
    permutes the ring's plane-wave modes; its imaginary part is the one that
    sets the orientation of all direction-sensitive scattering formulas.
    """

    w: float
    u: complex
    v: np.ndarray
    cyclic: complex = field(default=0j)

    @property
    def abs_u_sq(self) -> float:
        return abs(self.u) ** 2

    @property
    def im_cyclic(self) -> float:
        """Oriented Im(u^3): the microreversibility-breaking invariant."""
        return float(np.imag(self.cyclic))

    @property
    def re_cyclic(self) -> float:
        return float(np.real(self.cyclic))


def interaction_matrix(spec: SystemSpec, spectrum: Spectrum) -> InteractionMatrix:
    """Build the interaction matrix both from the closed form in (w, u) and
    from an explicit basis change; the two must agree to 1e-12 relative."""
    v1, v2, v3 = spec.potentials
    w = (v1 + v2 + v3) / 3.0
    u = (v1 + v2 * np.exp(2j * np.pi / 3) + v3 * np.exp(-2j * np.pi / 3)) / 3.0

    q = spectrum.eigenvectors
    v = q.conj().T @ np.diag(spec.potentials) @ q

    scale = max(abs(w), abs(u), 1e-300)
    if np.max(np.abs(np.diag(v) - w)) > 1e-12 * scale:
        raise InputError("interaction matrix diagonal disagrees with (V1+V2+V3)/3")
    off = [abs(v[k, l]) for k, l in ALL_PAIRS]
    if np.max(np.abs(np.asarray(off) - abs(u))) > 1e-12 * scale:
        raise InputError("off-diagonal couplings disagree with |u|")

    cyclic = complex(v[MINUS, ZERO] * v[ZERO, PLUS] * v[PLUS, MINUS])
    # cross-check against the (w, u) closed form, orientation-resolved
    u3 = u**3
    # absolute floor covers roundoff in the triple product when u is small
    tol = 1e-10 * abs(u3) + 1e-12 * scale**2 * (abs(u) + 1e-12 * scale)
    if not (abs(cyclic - u3) <= tol or abs(cyclic - np.conj(u3)) <= tol):
        raise InputError("cycle product inconsistent with u^3 closed form")
    # snap analytic zeros lost to roundoff, so "no coupling" and "no
    # direction" are exact states rather than 1e-16 residues
    if abs(u) <= 1e-14 * scale:
        u = 0j
        cyclic = 0j
    elif abs(cyclic.imag) <= 1e-13 * scale**3:
        cyclic = complex(cyclic.real, 0.0)
    return InteractionMatrix(w=float(w), u=complex(u), v=v, cyclic=cyclic)


def vdb_energy_scale(spec: SystemSpec, v: InteractionMatrix) -> float:
    """Energy scale of detailed-balance violation,
    (2 sqrt(6 m) Im[v_{-0} v_{0+} v_{+-}] / (hbar |u|^2))^2."""
    if v.abs_u_sq == 0.0:
        raise ZeroCouplingError("u = 0: off-diagonal couplings vanish")
    num = 2.0 * np.sqrt(6.0 * spec.mass) * v.im_cyclic
    return float((num / (spec.hbar * v.abs_u_sq)) ** 2)


@dataclass(frozen=True)
class System:
    """Convenience bundle: spec + derived spectrum and interaction matrix."""

    spec: SystemSpec
    spectrum: Spectrum
    interaction: InteractionMatrix


def build_system(spec: SystemSpec) -> System:
    spectrum = diagonalize_ring(spec)
    return System(spec=spec, spectrum=spectrum, interaction=interaction_matrix(spec, spectrum))


def boltzmann_vector(energies: np.ndarray, beta: float) -> np.ndarray:
    """Normalized Boltzmann populations exp(-beta E_k)/Z, ordered (-, 0, +)."""
    x = -beta * (np.asarray(energies) - np.min(energies))  # shift avoids underflow
    p = np.exp(x)
    return p / p.sum()
