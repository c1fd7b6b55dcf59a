import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bkmcurv import jet2
from bkmcurv.errors import DomainError
from bkmcurv.jet2 import INDEX, Jet2


def coeffs(jet):
    return dict(zip(INDEX, jet.c.tolist()))


def nonzero(jet):
    return {ab: v for ab, v in coeffs(jet).items() if v != 0}


jets = st.lists(st.floats(-2, 2, allow_nan=False), min_size=10, max_size=10).map(lambda c: Jet2(np.array(c)))


def close(a, b, rtol=1e-13):
    scale = max(1.0, np.abs(a.c).max(), np.abs(b.c).max())
    return np.allclose(a.c, b.c, rtol=0, atol=rtol * scale * 10)


# -- construction ------------------------------------------------------------

@pytest.mark.parametrize("v", [2.0, 0.0, -1.5])
def test_const(v):
    j = jet2.const(v)
    assert j.value == v
    assert np.all(j.c[1:] == 0)


def test_var_examples():
    assert nonzero(jet2.var(0.7, "theta")) == {(0, 0): 0.7, (1, 0): 1.0}
    assert nonzero(jet2.var(0.0, "x")) == {(0, 1): 1.0}
    assert nonzero(jet2.var(3.0, "x")) == {(0, 0): 3.0, (0, 1): 1.0}
    with pytest.raises(ValueError):
        jet2.var(1.0, "y")


def test_linear_examples():
    assert nonzero(jet2.add(jet2.const(1), jet2.const(2))) == {(0, 0): 3.0}
    u = Jet2(np.arange(10.0))
    assert not np.any(jet2.sub(u, u).c)
    assert nonzero(jet2.scale(jet2.var(1, "theta"), 2)) == {(0, 0): 2.0, (1, 0): 2.0}


def test_mul_examples():
    p = jet2.mul(jet2.var(2, "theta"), jet2.var(3, "x"))
    assert nonzero(p) == {(0, 0): 6.0, (1, 0): 3.0, (0, 1): 2.0, (1, 1): 1.0}
    t = jet2.var(1, "theta")
    cube = jet2.mul(t, jet2.mul(t, t))
    assert nonzero(cube) == {(0, 0): 1.0, (1, 0): 3.0, (2, 0): 3.0, (3, 0): 1.0}
    u = Jet2(np.linspace(-1, 1, 10))
    assert np.array_equal(jet2.mul(u, jet2.const(1)).c, u.c)


def test_compose_examples():
    u = Jet2(np.linspace(-1, 1, 10))
    assert np.array_equal(jet2.compose(u.value, 1.0, 0.0, 0.0, u).c, u.c)
    e = jet2.exp(jet2.var(0, "theta"))
    assert nonzero(e) == pytest.approx({(0, 0): 1, (1, 0): 1, (2, 0): 0.5, (3, 0): 1 / 6})
    assert nonzero(jet2.cosh(jet2.var(0, "x"))) == {(0, 0): 1.0, (0, 2): 0.5}


def test_sqrt_of_radius_squared():
    t, x = jet2.var(3, "theta"), jet2.var(4, "x")
    r = jet2.sqrt(t * t + x * x)
    assert r.value == pytest.approx(5)
    assert r[(1, 0)] == pytest.approx(3 / 5)
    assert r[(0, 1)] == pytest.approx(4 / 5)


def test_ln_2cosh_series():
    j = jet2.ln(jet2.scale(jet2.cosh(jet2.var(0, "x")), 2))
    assert j.value == pytest.approx(math.log(2))
    assert j[(0, 2)] == pytest.approx(0.5)
    others = [v for ab, v in coeffs(j).items() if ab not in ((0, 0), (0, 2))]
    assert np.allclose(others, 0, atol=1e-15)


def test_derivative_restores_factorials():
    e = jet2.exp(jet2.var(0, "theta") + jet2.var(0, "x"))
    for a, b in INDEX:
        assert e.derivative(a, b) == pytest.approx(1.0)


def test_domain_errors_carry_value():
    with pytest.raises(DomainError) as info:
        jet2.ln(jet2.const(-1.0))
    assert info.value.value == -1.0
    with pytest.raises(DomainError):
        jet2.sqrt(jet2.const(1e-13))
    with pytest.raises(DomainError):
        jet2.recip(jet2.const(0.0))


def test_rejects_bad_shape():
    with pytest.raises(ValueError):
        Jet2(np.zeros(9))


def test_batched_jets_match_scalar_jets():
    v = np.array([0.3, -1.0, 2.5])
    batched = jet2.ln2cosh(jet2.var(v, "theta") * jet2.var(v, "x"))
    for i, vi in enumerate(v):
        single = jet2.ln2cosh(jet2.var(vi, "theta") * jet2.var(vi, "x"))
        assert np.allclose(batched.c[:, i], single.c, rtol=1e-15, atol=0)


# -- algebraic properties --------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(jets, jets, jets)
def test_ring_axioms(u, v, w):
    assert close(u + v, v + u)
    assert close((u + v) + w, u + (v + w))
    assert close(u * v, v * u)
    assert close((u * v) * w, u * (v * w))
    assert close(u * (v + w), u * v + u * w)


@settings(max_examples=60, deadline=None)
@given(jets, jets)
def test_leibniz_first_order_exact(u, v):
    p = jet2.mul(u, v)
    assert p[(1, 0)] == u[(1, 0)] * v[(0, 0)] + u[(0, 0)] * v[(1, 0)]


@settings(max_examples=60, deadline=None)
@given(jets.filter(lambda j: abs(j.value) <= 2))
def test_exp_ln_round_trip(u):
    back = jet2.ln(jet2.exp(u))
    assert np.allclose(back.c, u.c, rtol=1e-12, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(jets.filter(lambda j: j.value > 0.2))
def test_sqrt_square_round_trip(u):
    s = jet2.sqrt(u)
    assert np.allclose((s * s).c, u.c, rtol=1e-12, atol=1e-12)


# -- analytic primitives against mpmath -------------------------------------

def _mp_jet(f, at):
    """Taylor coefficients of a two-variable mpmath function by high-precision differentiation."""
    with mpmath.workdps(40):
        return np.array([float(mpmath.diff(f, (mpmath.mpf(at[0]), mpmath.mpf(at[1])), (a, b)))
                         / (math.factorial(a) * math.factorial(b)) for a, b in INDEX])


def test_single_qubit_potential_against_mpmath():
    rng = np.random.default_rng(7)
    count = 0
    while count < 20:
        at = rng.uniform(-2.5, 2.5, 2)
        if np.hypot(*at) <= 0.1:
            continue
        count += 1
        z, x = jet2.var(at[0], "theta"), jet2.var(at[1], "x")
        got = jet2.ln(2.0 * jet2.cosh(jet2.sqrt(z * z + x * x))).c
        want = _mp_jet(lambda a, b: mpmath.log(2 * mpmath.cosh(mpmath.sqrt(a * a + b * b))), at)
        assert np.allclose(got, want, rtol=1e-10, atol=1e-13)


@pytest.mark.parametrize("u", [-30.0, -4.5, -4.0, -1.0, 0.0, 1e-8, 3.9, 4.0, 4.1, 25.0, 400.0])
def test_cosh_sqrt_derivatives(u):
    got = jet2.cosh_sqrt_derivatives(u)
    with mpmath.workdps(40):
        f = lambda s: mpmath.re(mpmath.cosh(mpmath.sqrt(s)))
        for m in range(4):
            want = float(mpmath.diff(f, mpmath.mpf(u), m))
            assert float(got[m]) == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_ln2cosh_is_finite_for_huge_arguments():
    big = jet2.ln2cosh(jet2.var(800.0, "theta"))
    assert big.value == pytest.approx(800.0)
    assert big[(1, 0)] == 1.0
    assert np.all(np.isfinite(big.c))
    neg = jet2.ln2cosh(jet2.var(-800.0, "theta"))
    assert neg[(1, 0)] == -1.0
