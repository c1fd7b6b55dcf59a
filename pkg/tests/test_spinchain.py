import math

import numpy as np
import pytest

from bkmcurv.errors import BoundaryError, ConfigError, PrecisionError, SizeError
from bkmcurv.potentials import ClosedForm1, ClosedForm2, psi2_value, psi3_value
from bkmcurv.spinchain import (
    MAX_SITES,
    FdSpec,
    ObservablePair,
    SpinChainSpec,
    build_observables,
    fd_jet_with_error,
    psi_exact,
    psi_fd_jet,
    spectrum,
)

GRID = [(float(t), float(x)) for t in range(-2, 3) for x in range(-2, 3)]
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Z = np.diag([1.0, -1.0])


def test_single_site_observables():
    obs = build_observables(SpinChainSpec(1))
    assert np.array_equal(obs.o_int, np.zeros((2, 2)))
    assert np.array_equal(obs.o_field, SIGMA_X)


def test_two_site_interaction():
    assert np.array_equal(np.diag(build_observables(SpinChainSpec(2)).o_int), [1, -1, -1, 1])


def test_three_site_ring_interaction():
    d = np.diag(build_observables(SpinChainSpec(3, "periodic")).o_int)
    assert sorted(d) == [-1] * 6 + [3] * 2
    assert d[0] == 3 and d[7] == 3


def test_bit_zero_is_site_one():
    # flipping site 1 of the all-up state flips bit 0
    obs = build_observables(SpinChainSpec(3))
    assert obs.o_field[0, 1] == 1 and obs.o_field[0, 2] == 1 and obs.o_field[0, 4] == 1


@pytest.mark.parametrize("n,bc", [(2, "open"), (4, "open"), (4, "periodic"), (5, "periodic")])
def test_observable_invariants(n, bc):
    obs = build_observables(SpinChainSpec(n, bc))
    assert np.array_equal(obs.o_int, obs.o_int.T)
    assert np.array_equal(obs.o_field, obs.o_field.T)
    assert np.array_equal(obs.o_int, np.diag(np.diag(obs.o_int)))
    assert np.all((obs.o_field != 0).sum(axis=1) == n)
    assert set(np.unique(obs.o_field)) <= {0.0, 1.0}
    assert obs.is_independent()


def test_kron_construction_agrees():
    # sigma_z sigma_z on sites 1,2 of a 2-site chain with site 1 as the least significant bit
    obs = build_observables(SpinChainSpec(2))
    assert np.array_equal(obs.o_int, np.kron(SIGMA_Z, SIGMA_Z))
    assert np.array_equal(obs.o_field, np.kron(SIGMA_X, np.eye(2)) + np.kron(np.eye(2), SIGMA_X))


def test_dependent_pair_detected():
    obs = build_observables(SpinChainSpec(2))
    assert not ObservablePair(obs.o_field, 2 * obs.o_field).is_independent()


@pytest.mark.parametrize("n", [0, MAX_SITES + 1])
def test_size_errors(n):
    with pytest.raises(SizeError):
        SpinChainSpec(n)


@pytest.mark.parametrize("n", [1, 2])
def test_periodic_needs_three_sites(n):
    with pytest.raises(BoundaryError):
        SpinChainSpec(n, "periodic")


def test_unknown_boundary():
    with pytest.raises(ConfigError):
        SpinChainSpec(3, "twisted")


def test_two_site_chain_matches_closed_form():
    chain = SpinChainSpec(2, "open")
    assert max(abs(psi_exact(chain, p) - psi2_value(*p)) for p in GRID) <= 1e-10


def test_three_site_ring_matches_corrected_closed_form():
    chain = SpinChainSpec(3, "periodic")
    assert max(abs(psi_exact(chain, p) - psi3_value(*p)) for p in GRID) <= 1e-10
    assert abs(psi_exact(chain, (0.0, 0.0)) - psi3_value(0.0, 0.0, as_printed=True)) == pytest.approx(math.log(8 / 6))


@pytest.mark.parametrize("theta", [-1.0, 0.4, 2.0])
def test_three_site_ring_zero_field(theta):
    want = math.log(2 * math.exp(3 * theta) + 6 * math.exp(-theta))
    assert psi_exact(SpinChainSpec(3, "periodic"), (theta, 0.0)) == pytest.approx(want, rel=1e-13)


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_trace_at_origin(n):
    assert psi_exact(SpinChainSpec(n), (0.0, 0.0)) == pytest.approx(n * math.log(2), rel=1e-14)


@pytest.mark.parametrize("n", [2, 4, 5])
def test_extensivity_without_coupling(n):
    x = 0.7
    assert psi_exact(SpinChainSpec(n), (0.0, x)) == pytest.approx(n * math.log(2 * math.cosh(x)), abs=1e-10)


@pytest.mark.parametrize("spec", [SpinChainSpec(3, "open"), SpinChainSpec(4, "periodic"), SpinChainSpec(5, "periodic")])
def test_spectrum_symmetries(spec):
    rng = np.random.default_rng(5)
    for t, x in rng.uniform(-2, 2, (5, 2)):
        assert np.allclose(spectrum(spec, (t, x)), spectrum(spec, (t, -x)), atol=1e-12)
        assert abs(psi_exact(spec, (t, x)) - psi_exact(spec, (t, -x))) <= 1e-12
        bipartite = spec.boundary == "open" or spec.n_sites % 2 == 0
        if bipartite:
            assert abs(psi_exact(spec, (t, x)) - psi_exact(spec, (-t, x))) <= 1e-12


def test_spectrum_is_ascending():
    lam = spectrum(SpinChainSpec(4), (0.3, 0.9))
    assert np.all(np.diff(lam) >= 0)


def test_fd_jet_matches_closed2():
    jet = psi_fd_jet(SpinChainSpec(2, "open"), (0.8, 0.6))
    assert np.allclose(jet.c, ClosedForm2().jet((0.8, 0.6)).c, rtol=1e-6, atol=0)


def test_fd_jet_single_qubit_with_longitudinal_field():
    pair = ObservablePair(SIGMA_Z, SIGMA_X)
    at = (0.5, -0.9)
    assert np.allclose(psi_fd_jet(pair, at).c, ClosedForm1().jet(at).c, rtol=1e-6, atol=0)


def test_fd_jet_mirror_at_zero_coupling():
    chain = SpinChainSpec(3, "periodic")
    a = psi_fd_jet(chain, (0.0, 0.5))
    b = psi_fd_jet(chain, (0.0, -0.5))
    assert a[(0, 1)] == pytest.approx(-b[(0, 1)], rel=1e-10)
    assert a[(0, 2)] == pytest.approx(b[(0, 2)], rel=1e-10)


def test_fd_convexity():
    chain = SpinChainSpec(3, "periodic")
    for at in [(0.5, 0.5), (-1.0, 0.3), (1.5, -1.2)]:
        c = psi_fd_jet(chain, at).c
        assert np.all(np.linalg.eigvalsh([[2 * c[3], c[4]], [c[4], 2 * c[5]]]) > 0)


def test_fd_error_estimate_is_small_and_deterministic():
    chain = SpinChainSpec(2)
    j1, e1 = fd_jet_with_error(chain, (0.8, 0.6))
    j2, e2 = fd_jet_with_error(chain, (0.8, 0.6))
    assert np.array_equal(j1.c, j2.c) and np.array_equal(e1.c, e2.c)
    assert np.all(e1.c[3:] < 1e-6)


def test_precision_error_for_unreachable_tolerance():
    with pytest.raises(PrecisionError) as info:
        psi_fd_jet(SpinChainSpec(2), (0.8, 0.6), FdSpec(rel_tol=1e-12))
    assert info.value.worst["relative_error"] > 1e-12


@pytest.mark.parametrize("kwargs", [dict(base_step=0.0), dict(richardson_levels=0), dict(rel_tol=0.0)])
def test_fd_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        FdSpec(**kwargs)
