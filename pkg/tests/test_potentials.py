import math

import mpmath
import numpy as np
import pytest

from bkmcurv.errors import ConfigError, DomainError
from bkmcurv.geometry import r1_closed_form, scalar_curvature
from bkmcurv.jet2 import INDEX
from bkmcurv.potentials import (
    ClosedForm1,
    ClosedForm2,
    ClosedForm3,
    ExactDiag,
    Frame,
    ThermoLimit,
    psi1_value,
    psi2_value,
    psi3_value,
    psi_jet,
)
from bkmcurv.quadrature import QuadratureSpec
from bkmcurv.spinchain import SpinChainSpec

ANALYTIC = [ClosedForm1(), ClosedForm2(), ClosedForm3(), ThermoLimit()]
POINTS = [(0.3, 0.7), (-1.2, 0.4), (2.0, -1.5), (0.05, 2.2)]
X_ODD = np.array([b % 2 for _, b in INDEX])
T_ODD = np.array([a % 2 for a, _ in INDEX])


def test_closed1_at_origin():
    j = psi_jet(ClosedForm1(), (0.0, 0.0))
    assert j.value == pytest.approx(math.log(2))
    assert j[(2, 0)] == pytest.approx(0.5) and j[(0, 2)] == pytest.approx(0.5)
    for ab in [(1, 0), (0, 1), (1, 1), (3, 0), (2, 1), (1, 2), (0, 3)]:
        assert j[ab] == 0


def test_closed2_values():
    assert psi_jet(ClosedForm2(), (0.0, 0.0)).value == pytest.approx(math.log(4))
    assert psi_jet(ClosedForm2(), (1.0, 0.0)).value == pytest.approx(math.log(4 * math.cosh(1)), rel=1e-15)
    # ln 4 + ln cosh 1, frozen
    assert psi_jet(ClosedForm2(), (1.0, 0.0)).value == pytest.approx(1.8200751916029179, rel=1e-15)


def test_closed3_origin_printed_and_corrected():
    assert ClosedForm3().value((0.0, 0.0)) == pytest.approx(math.log(8))
    assert ClosedForm3(as_printed=True).value((0.0, 0.0)) == pytest.approx(math.log(6))


@pytest.mark.parametrize("theta", [0.3, 1.0, 2.5])
def test_thermo_on_zero_field_axis(theta):
    want = math.log(2 * math.cosh(theta))
    assert ThermoLimit().jet((theta, 0.0)).value == pytest.approx(want, abs=1e-12)
    assert ThermoLimit().ray_jet((theta, 0.0)).value == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("x", [0.4, 1.3])
def test_thermo_at_zero_coupling_is_single_site(x):
    a = ThermoLimit().jet((0.0, x))
    b = ClosedForm1().jet((0.0, x))
    for ab in [(0, 0), (0, 1), (0, 2), (0, 3)]:
        assert a[ab] == pytest.approx(b[ab], rel=1e-12, abs=1e-14)


def test_thermo_node_doubling_at_one_one():
    a = ThermoLimit().jet((1.0, 1.0)).c
    b = ThermoLimit(QuadratureSpec(nodes_per_panel=128)).jet((1.0, 1.0)).c
    assert np.allclose(a, b, rtol=1e-11, atol=0)


@pytest.mark.parametrize("model", ANALYTIC, ids=lambda m: m.name)
@pytest.mark.parametrize("at", POINTS)
def test_scalar_references(model, at):
    ref = {"closed1": psi1_value, "closed2": psi2_value, "closed3": psi3_value}.get(model.name)
    if ref is not None:
        assert model.value(at) == pytest.approx(ref(*at), rel=1e-14)


@pytest.mark.parametrize("model", ANALYTIC, ids=lambda m: m.name)
@pytest.mark.parametrize("at", POINTS)
def test_mirror_in_field(model, at):
    a = model.jet(at).c
    b = model.jet((at[0], -at[1])).c
    assert np.allclose(a, np.where(X_ODD, -b, b), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("model", [ClosedForm2(), ThermoLimit()], ids=lambda m: m.name)
@pytest.mark.parametrize("at", POINTS)
def test_mirror_in_coupling_for_bipartite_models(model, at):
    a = model.jet(at).c
    b = model.jet((-at[0], at[1])).c
    assert np.allclose(a, np.where(T_ODD, -b, b), rtol=1e-12, atol=1e-12)


def test_closed3_is_not_coupling_symmetric():
    assert abs(ClosedForm3().value((1.0, 0.5)) - ClosedForm3().value((-1.0, 0.5))) > 0.1


@pytest.mark.parametrize("model", ANALYTIC, ids=lambda m: m.name)
@pytest.mark.parametrize("at", POINTS + [(-3.0, 2.0), (1.0, 1.0)])
def test_ray_and_natural_frames_give_same_curvature(model, at):
    nat = scalar_curvature(model.jet(at)).scalar_r
    ray = scalar_curvature(model.ray_jet(at), basis=Frame.ray(at).basis)
    assert ray.scalar_r == pytest.approx(nat, rel=1e-9)
    assert model.ray_jet(at).value == pytest.approx(model.jet(at).value, rel=1e-14)


def _mp_curvature(f, at, dps=50):
    """Scalar curvature from 50-digit derivatives of ``f`` (determinant formula)."""
    with mpmath.workdps(dps):
        p = (mpmath.mpf(at[0]), mpmath.mpf(at[1]))
        d = {ab: mpmath.diff(f, p, ab) for ab in [(2, 0), (1, 1), (0, 2), (3, 0), (2, 1), (1, 2), (0, 3)]}
        m = mpmath.matrix([[d[(2, 0)], d[(1, 1)], d[(0, 2)]],
                           [d[(3, 0)], d[(2, 1)], d[(1, 2)]],
                           [d[(2, 1)], d[(1, 2)], d[(0, 3)]]])
        det_g = d[(2, 0)] * d[(0, 2)] - d[(1, 1)] ** 2
        return float(mpmath.det(m) / (2 * det_g**2))


def _mp_psi2(t, x):
    return mpmath.log(2 * mpmath.cosh(t) + 2 * mpmath.cosh(mpmath.sqrt(t * t + 4 * x * x)))


def _mp_psi3(t, x):
    return mpmath.log(4 * mpmath.exp(-t) * mpmath.cosh(x)
                      + 2 * mpmath.exp(t - x) * mpmath.cosh(2 * mpmath.sqrt(t * t + t * x + x * x))
                      + 2 * mpmath.exp(t + x) * mpmath.cosh(2 * mpmath.sqrt(t * t - t * x + x * x)))


@pytest.mark.parametrize("at", [(20.0, 20.0), (-8.0, 3.0), (5.0, 10.0), (20.0, 2.0)])
def test_ray_frame_at_low_temperature_closed1(at):
    got = scalar_curvature(ClosedForm1().ray_jet(at)).scalar_r
    assert got == pytest.approx(r1_closed_form(math.hypot(*at)), rel=1e-10)


@pytest.mark.parametrize("model,f", [(ClosedForm2(), _mp_psi2), (ClosedForm3(), _mp_psi3)], ids=["closed2", "closed3"])
@pytest.mark.parametrize("at", [(20.0, 20.0), (-8.0, 3.0), (5.0, 10.0), (20.0, 2.0)])
def test_ray_frame_at_low_temperature_against_mpmath(model, f, at):
    got = scalar_curvature(model.ray_jet(at)).scalar_r
    assert got == pytest.approx(_mp_curvature(f, at), rel=1e-8)


@pytest.mark.parametrize("model", ANALYTIC, ids=lambda m: m.name)
def test_ray_frame_reports_natural_metric(model):
    at = (0.9, -0.4)
    nat = scalar_curvature(model.jet(at))
    ray = scalar_curvature(model.ray_jet(at), basis=Frame.ray(at).basis)
    for name in ("g11", "g12", "g22", "gamma_111", "gamma_112", "gamma_122", "gamma_222"):
        assert getattr(ray, name) == pytest.approx(getattr(nat, name), rel=1e-10, abs=1e-13)


@pytest.mark.parametrize("model", ANALYTIC, ids=lambda m: m.name)
def test_convexity(model):
    rng = np.random.default_rng(3)
    for at in rng.uniform(-3, 3, (10, 2)):
        c = model.jet(tuple(at)).c
        h = np.array([[2 * c[3], c[4]], [c[4], 2 * c[5]]])
        assert np.all(np.linalg.eigvalsh(h) > 0)


def test_ray_frame_undefined_at_origin():
    with pytest.raises(DomainError):
        Frame.ray((0.0, 0.0))


def test_frame_origin_must_match_point():
    with pytest.raises(ConfigError):
        ClosedForm2().jet((1.0, 1.0), Frame.natural((1.0, 2.0)))


def test_exact_diag_only_natural_frame():
    m = ExactDiag(SpinChainSpec(2, "open"))
    with pytest.raises(ConfigError):
        m.jet((1.0, 1.0), Frame.ray((1.0, 1.0)))


@pytest.mark.parametrize("n,bc", [(1, "open"), (2, "open"), (3, "periodic"), (5, "open")])
def test_exact_diag_trace_at_origin(n, bc):
    assert ExactDiag(SpinChainSpec(n, bc)).value((0.0, 0.0)) == pytest.approx(n * math.log(2), rel=1e-14)


def test_exact_diag_matches_closed2_jet():
    a = ExactDiag(SpinChainSpec(2, "open")).jet((0.8, 0.6)).c
    b = ClosedForm2().jet((0.8, 0.6)).c
    assert np.allclose(a, b, rtol=1e-6, atol=0)


def test_periodic_three_ring_requires_three_sites():
    with pytest.raises(ConfigError):
        SpinChainSpec(2, "periodic")
