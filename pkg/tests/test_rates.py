import numpy as np
import pytest

from vdbtherm.errors import InputError, QuadratureError, RangeError
from vdbtherm.model import (
    MINUS,
    ZERO,
    PLUS,
    ALL_PAIRS,
    SystemSpec,
    boltzmann_vector,
    build_system,
)
from vdbtherm.rates import (
    compute_rate_set,
    cycle_affinity,
    momentum_oracle_rate,
    rate_decomposition,
    transition_rate,
)
from conftest import random_spec


@pytest.fixture(scope="module")
def rate_sets(paper_system):
    return {t: compute_rate_set(1.0 / t, paper_system) for t in (0.5, 3.0, 50.0)}


def test_rates_positive(rate_sets):
    for rs in rate_sets.values():
        for k, l in ALL_PAIRS:
            assert rs.rates[k, l] > 0
        assert np.all(np.diag(rs.rates) == 0)


def test_quadrature_report_within_tol(rate_sets):
    for rs in rate_sets.values():
        for k, l in ALL_PAIRS:
            assert rs.quadrature_report[k, l] <= 1e-9 * rs.rates[k, l]


def test_beta_range_guard(paper_system):
    with pytest.raises(RangeError):
        transition_rate(ZERO, MINUS, 1e-7, paper_system)
    with pytest.raises(RangeError):
        transition_rate(ZERO, MINUS, 1e7, paper_system)


def test_same_level_rejected(paper_system):
    with pytest.raises(InputError):
        transition_rate(ZERO, ZERO, 1.0, paper_system)


@pytest.mark.filterwarnings("ignore::UserWarning")
@pytest.mark.filterwarnings("ignore:.*maximum number.*")
@pytest.mark.filterwarnings("ignore:.*roundoff error.*")
def test_unreachable_tolerance_raises(paper_system):
    with pytest.raises(QuadratureError) as exc:
        compute_rate_set(1.0, paper_system, tol=1e-16)
    assert exc.value.estimate is not None
    assert exc.value.error_bound > 0


def test_zero_coupling_rates_vanish():
    system = build_system(SystemSpec(potentials=(3.0, 3.0, 3.0)))
    rs = compute_rate_set(0.5, system)
    assert np.all(rs.rates == 0.0)


def test_momentum_oracle_agreement(rate_sets, paper_system):
    for t, rs in rate_sets.items():
        for k, l in ALL_PAIRS:
            oracle = momentum_oracle_rate(k, l, 1.0 / t, paper_system)
            assert oracle == pytest.approx(rs.rates[k, l], rel=1e-7)


def test_momentum_oracle_agreement_random(rng):
    for _ in range(6):
        system = build_system(random_spec(rng))
        beta = 1.0 / rng.uniform(0.5, 50.0)
        for k, l in ((ZERO, MINUS), (MINUS, PLUS), (PLUS, ZERO)):
            direct = transition_rate(k, l, beta, system)
            oracle = momentum_oracle_rate(k, l, beta, system)
            assert oracle == pytest.approx(direct, rel=1e-7)


def test_boltzmann_stationary(rate_sets, paper_system):
    e = paper_system.spectrum.energies
    for t, rs in rate_sets.items():
        beta = 1.0 / t
        p = boltzmann_vector(e, beta)
        m = rs.rates.copy()
        for i in range(3):
            m[i, i] = -np.sum(rs.rates[:, i])
        resid = np.max(np.abs(m @ p)) / np.max(rs.rates)
        assert resid < 1e-7


def test_detailed_balance_violated(rate_sets, paper_system):
    # with three distinct potentials the Kolmogorov cycle criterion fails
    for rs in rate_sets.values():
        assert cycle_affinity(rs) != pytest.approx(0.0, abs=1e-30)


def test_db_holds_with_two_equal_potentials():
    system = build_system(SystemSpec(potentials=(1.5, 1.5, 4.0)))
    e = system.spectrum.energies
    beta = 1.0 / 3.0
    rs = compute_rate_set(beta, system)
    for k, l in ALL_PAIRS:
        lhs = rs.rates[k, l] * np.exp(-beta * e[l])
        rhs = rs.rates[l, k] * np.exp(-beta * e[k])
        assert lhs == pytest.approx(rhs, rel=1e-8)
    assert abs(cycle_affinity(rs)) < 1e-12 * np.max(rs.rates) ** 3


def test_decomposition_reassembles(paper_system):
    # rate_decomposition self-checks reassembly at 1e-8; verify tighter here
    for t in (1.0, 10.0):
        beta = 1.0 / t
        dec = rate_decomposition(beta, paper_system)
        for k, l in ALL_PAIRS:
            direct = transition_rate(k, l, beta, paper_system, tol=1e-10)
            assert dec.reassemble(k, l) == pytest.approx(direct, rel=1e-9)


def test_cycle_identity(paper_system):
    # c = a1_eff (a1_eff^2 + c0) must equal the direct cycle affinity
    for t in (1.0, 8.0, 50.0):
        beta = 1.0 / t
        dec = rate_decomposition(beta, paper_system)
        direct = cycle_affinity(compute_rate_set(beta, paper_system, tol=1e-10))
        assert dec.c == pytest.approx(direct, rel=1e-8)
        assert dec.c0 >= 0.0
        assert dec.c == pytest.approx(dec.a1_eff * (dec.a1_eff**2 + dec.c0), rel=1e-12)


def test_decomposition_beta_zero(paper_system):
    dec = rate_decomposition(0.0, paper_system)
    assert np.isnan(dec.A0)
    assert np.isfinite(dec.A1)
    assert np.all(np.isfinite(dec.B))
    assert np.isfinite(dec.B_tilde_plus)
    # symmetric integrals shrink with the uninvolved level's energy removed
    assert dec.B_tilde_plus > 0


def test_odd_part_sign_tracks_orientation():
    beta = 1.0 / 10.0
    a = rate_decomposition(beta, build_system(SystemSpec(potentials=(6.0, 1.5, 4.0))))
    b = rate_decomposition(beta, build_system(SystemSpec(potentials=(6.0, 4.0, 1.5))))
    assert a.A1 == pytest.approx(-b.A1, rel=1e-8)
