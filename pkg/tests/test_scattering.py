import numpy as np
import pytest

from vdbtherm.errors import BranchError
from vdbtherm.model import MINUS, ZERO, PLUS, ALL_PAIRS, SystemSpec, build_system
from vdbtherm.scattering import (
    lippmann_schwinger_t,
    microreversibility_defect,
    t_denominator,
    t_element_sq,
)
from conftest import random_spec


def energy_grid(system, n=25):
    e = system.spectrum.energies
    return np.concatenate([
        np.linspace(e[ZERO] + 1e-4, e[PLUS] - 1e-4, n // 2),   # low band
        np.geomspace(e[PLUS] + 1e-4, e[PLUS] + 200.0, n),       # above E_+
    ])


def test_closed_form_matches_linear_solve(paper_system):
    e = paper_system.spectrum.energies
    for energy in energy_grid(paper_system):
        t_ls = lippmann_schwinger_t(energy, paper_system)
        for k, l in ALL_PAIRS:
            if energy < e[PLUS] and {k, l} != {MINUS, ZERO}:
                continue
            closed = t_element_sq(energy, k, l, paper_system)
            direct = abs(t_ls[k, l]) ** 2
            assert closed == pytest.approx(direct, rel=1e-10)


def test_closed_form_matches_linear_solve_random(rng):
    for _ in range(8):
        system = build_system(random_spec(rng))
        e = system.spectrum.energies
        for energy in (e[PLUS] + 0.3, e[PLUS] + 7.0, 0.5 * (e[ZERO] + e[PLUS])):
            t_ls = lippmann_schwinger_t(energy, system)
            for k, l in ALL_PAIRS:
                if energy < e[PLUS] and {k, l} != {MINUS, ZERO}:
                    continue
                assert t_element_sq(energy, k, l, system) == pytest.approx(
                    abs(t_ls[k, l]) ** 2, rel=1e-9
                )


def test_branch_admissibility(paper_system):
    e = paper_system.spectrum.energies
    with pytest.raises(BranchError):
        t_element_sq(e[MINUS] - 1.0, ZERO, MINUS, paper_system)
    with pytest.raises(BranchError):
        # low band not admissible for pairs involving the top level
        t_element_sq(0.5 * (e[ZERO] + e[PLUS]), PLUS, MINUS, paper_system)
    with pytest.raises(BranchError):
        t_element_sq(e[PLUS] + 1.0, ZERO, ZERO, paper_system)


def test_vectorized_matches_scalar(paper_system):
    es = energy_grid(paper_system)[-10:]
    for k, l in ALL_PAIRS:
        vec = t_element_sq(es, k, l, paper_system)
        scal = np.array([t_element_sq(float(e), k, l, paper_system) for e in es])
        assert np.array_equal(vec, scal)


def test_denominator_nonzero_on_contour(paper_system):
    es = energy_grid(paper_system, n=60)
    d = t_denominator(es, paper_system)
    assert np.all(np.abs(d) > 1e-10)


def test_defect_antisymmetric_and_closed_form(paper_system):
    e = paper_system.spectrum.energies
    for energy in np.geomspace(e[PLUS] + 1e-3, e[PLUS] + 100, 20):
        for k, l in ALL_PAIRS:
            d_kl = microreversibility_defect(energy, k, l, paper_system)
            d_lk = microreversibility_defect(energy, l, k, paper_system)
            assert d_kl == pytest.approx(-d_lk, rel=1e-12, abs=1e-300)
            # closed form vs direct subtraction of the two |T|^2 branches
            direct = (t_element_sq(energy, k, l, paper_system)
                      - t_element_sq(energy, l, k, paper_system))
            assert d_kl == pytest.approx(direct, rel=1e-10, abs=1e-18)


def test_defect_requires_high_branch(paper_system):
    e = paper_system.spectrum.energies
    with pytest.raises(BranchError):
        microreversibility_defect(0.5 * (e[ZERO] + e[PLUS]), ZERO, MINUS, paper_system)


def test_defect_vanishes_without_vdb():
    system = build_system(SystemSpec(potentials=(2.0, 5.0, 2.0)))
    e = system.spectrum.energies
    for energy in (e[PLUS] + 0.5, e[PLUS] + 20.0):
        for k, l in ALL_PAIRS:
            assert microreversibility_defect(energy, k, l, system) == pytest.approx(
                0.0, abs=1e-15
            )


def test_defect_sign_flips_with_orientation():
    # swapping V2 and V3 mirrors the ring, flipping the cycle orientation
    a = build_system(SystemSpec(potentials=(6.0, 1.5, 4.0)))
    b = build_system(SystemSpec(potentials=(6.0, 4.0, 1.5)))
    energy = a.spectrum.energies[PLUS] + 3.0
    # spectra coincide (potentials do not enter the ring Hamiltonian)
    assert np.allclose(a.spectrum.energies, b.spectrum.energies)
    da = microreversibility_defect(energy, ZERO, MINUS, a)
    db = microreversibility_defect(energy, ZERO, MINUS, b)
    assert da == pytest.approx(-db, rel=1e-10)


def test_low_band_continuity_at_top_threshold(paper_system):
    # |T_{-0}|^2 is continuous across E_+ (branch changes, value does not)
    e = paper_system.spectrum.energies
    below = t_element_sq(e[PLUS] - 1e-9, MINUS, ZERO, paper_system)
    above = t_element_sq(e[PLUS] + 1e-9, MINUS, ZERO, paper_system)
    assert below == pytest.approx(above, rel=1e-4)
