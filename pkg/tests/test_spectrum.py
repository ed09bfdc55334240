import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from conftest import THRESHOLD, potentials
from lowlying.errors import PreconditionError
from lowlying.potential import Potential, constant, make_piecewise, moment, square_barrier, square_well, step_dipole
from lowlying.spectrum import (
    count_negative,
    half_bound_state,
    mismatch,
    negative_eigenvalues,
    regge_eigenvalues,
    resonance_set,
    theta_eta,
    theta_eta_of,
)


def well_roots(c: float) -> list[float]:
    """Decay rates of square_well(c) from the even/odd transcendental equations."""
    out = []
    grid = np.linspace(1e-9, math.sqrt(c) - 1e-12, 20001)

    def even(k):
        return k * math.sin(k) - math.sqrt(c - k * k) * math.cos(k)

    def odd(k):
        return k * math.cos(k) + math.sqrt(c - k * k) * math.sin(k)

    for f in (even, odd):
        vals = [f(k) for k in grid]
        for i in range(len(grid) - 1):
            if vals[i] * vals[i + 1] < 0:
                k = brentq(f, grid[i], grid[i + 1], xtol=1e-15)
                out.append(math.sqrt(c - k * k))
    return sorted(out, reverse=True)


def test_mismatch_examples():
    assert mismatch(Potential.zero(), 1.0) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert mismatch(Potential.zero(), 0.0) == 0.0
    assert abs(mismatch(square_well(THRESHOLD), 0.0)) < 1e-15
    with pytest.raises(PreconditionError, match="mismatch"):
        mismatch(Potential.zero(), -1.0)


def test_count_examples():
    assert count_negative(Potential.zero()) == 0
    assert count_negative(square_well(10.0)) == 3
    assert count_negative(square_barrier(5.0)) == 0
    assert count_negative(square_well(THRESHOLD)) == 1
    assert count_negative(square_well(THRESHOLD + 0.05)) == 2
    assert count_negative(square_well(THRESHOLD - 0.05)) == 1


@pytest.mark.parametrize("c", [2.0, 10.0, 40.0, THRESHOLD - 0.05, THRESHOLD + 0.05, 100.0])
def test_square_well_matches_transcendental_roots(c):
    res = negative_eigenvalues(square_well(c))
    expected = well_roots(c)
    assert [r.node_index for r in res] == list(range(len(expected)))
    assert [r.omega for r in res] == pytest.approx(expected, rel=1e-11)


def test_ground_state_of_well_10():
    res = negative_eigenvalues(square_well(10.0))
    k = brentq(lambda k: k * math.tan(k) - math.sqrt(10 - k * k), 0.5, 1.5, xtol=1e-15)
    assert k == pytest.approx(1.1862608165, abs=1e-9)
    assert res[0].omega == pytest.approx(math.sqrt(10 - k * k), rel=1e-13)
    assert res[0].eigenvalue == pytest.approx(-8.59278527523, rel=1e-11)


def test_empty_and_threshold_cases():
    assert negative_eigenvalues(Potential.zero()) == []
    assert regge_eigenvalues(Potential.zero()) == []
    res = negative_eigenvalues(square_well(THRESHOLD))
    assert len(res) == 1
    assert len(regge_eigenvalues(square_well(THRESHOLD))) == 1
    with pytest.raises(PreconditionError, match="tol"):
        negative_eigenvalues(square_well(1.0), tol=0.0)


def test_regge_requires_unit_support():
    with pytest.raises(PreconditionError, match="regge"):
        regge_eigenvalues(square_well(1.0, half_width=2.0))


@pytest.mark.parametrize("V", [square_well(10.0), square_well(40.0), step_dipole(20.0), step_dipole(60.0),
                               make_piecewise([-1, -0.3, 0.2, 1], [-30.0, 45.0, -12.0])])
def test_regge_bijection(V):
    omegas = [r.omega for r in negative_eigenvalues(V)]
    assert regge_eigenvalues(V) == pytest.approx(omegas, abs=1e-10)


@settings(max_examples=40)
@given(potentials())
def test_random_spectral_invariants(q):
    res = negative_eigenvalues(q)
    assert len(res) == count_negative(q)
    omegas = [r.omega for r in res]
    assert omegas == sorted(omegas, reverse=True)
    assert len(set(omegas)) == len(omegas)
    for k, r in enumerate(res):
        assert r.node_index == k
        assert r.omega ** 2 <= max(0.0, -q.min()) + 1e-9
        assert r.mismatch_residual <= 1e-10
        v = r.eigenfunction
        assert v.integral_sq() == pytest.approx(1.0, abs=1e-8)
        assert max(v.continuity_defects(), default=0.0) <= 1e-9
        assert v.left_tail()[0] > 0
    assert regge_eigenvalues(q) == pytest.approx(omegas, abs=1e-10)


@given(potentials())
def test_mismatch_positive_above_well_depth(q):
    w0 = math.sqrt(max(0.0, -q.min()))
    for w in (w0 * (1 + 1e-9) + 1e-9, w0 + 1.0, 2 * w0 + 3.0):
        assert mismatch(q, w) > 0


def test_eigenfunction_solves_equation():
    q = make_piecewise([-1, -0.2, 0.4, 1], [-20.0, 5.0, -35.0])
    for r in negative_eigenvalues(q):
        v = r.eigenfunction
        # second differences inside pieces reproduce v'' = (q + omega^2) v
        for x in (-0.6, 0.1, 0.7, -3.0, 2.5):
            h = 1e-4
            d2 = (v(x + h) - 2 * v(x) + v(x - h)) / h ** 2
            assert d2 == pytest.approx((float(q(x)) + r.omega ** 2) * v(x), rel=1e-5, abs=1e-6)
        # tails are exact exponentials
        a = v(-1.0)
        assert v(-2.0) == pytest.approx(a * math.exp(-r.omega), rel=1e-13)
        b = v(1.0)
        assert v(3.0) == pytest.approx(b * math.exp(-2 * r.omega), rel=1e-13)
        # tail integrals a^2 / (2 omega)
        assert v.integral_sq(-math.inf, -1.0) == pytest.approx(a * a / (2 * r.omega), rel=1e-13)


def test_half_bound_state_examples():
    hb = half_bound_state(Potential.zero())
    assert hb.theta == 1.0
    hb = half_bound_state(square_well(THRESHOLD))
    assert hb.v_minus == 1.0
    assert hb.theta == pytest.approx(-1.0, abs=1e-14)
    # constant outside the support
    assert hb.solution.derivative(-3.0) == 0.0 and hb.solution.derivative(4.0) == 0.0
    assert abs(hb.solution.derivative(1.0)) < 1e-9
    assert half_bound_state(square_well(10.0)) is None


def test_theta_eta_examples():
    V = square_well(THRESHOLD)
    theta, eta = theta_eta(V, constant(-1.0))
    assert theta == pytest.approx(-1.0, abs=1e-14)
    assert eta == pytest.approx(1.0, rel=1e-13)
    assert theta_eta(V, Potential.zero())[1] == 0.0
    with pytest.raises(PreconditionError, match="theta_eta"):
        theta_eta(square_well(10.0), constant(-1.0))


@given(potentials(vmax=5.0), st.floats(0.01, 100.0))
def test_theta_eta_scale_invariance(U, c):
    hb = half_bound_state(square_well(9 * THRESHOLD))
    t0, e0 = theta_eta_of(hb, U)
    t1, e1 = theta_eta_of(hb.scaled(c), U)
    assert t1 == pytest.approx(t0, rel=1e-12)
    assert e1 == pytest.approx(e0, rel=1e-12, abs=1e-12)


def test_resonance_set_examples():
    V = square_well(10.0)
    pts = resonance_set(V, 0.0, 1.0)
    assert pts == pytest.approx([math.pi ** 2 / 40, math.pi ** 2 / 10], abs=1e-8)
    assert resonance_set(square_barrier(5.0), 0.0, 1.0) == []
    assert resonance_set(V, 0.0, 0.2) == []
    # alpha = 0 is resonant for every V
    assert 0.0 in resonance_set(V, -0.1, 0.1)
    # negative couplings of a well are couplings of a barrier: no resonances
    assert resonance_set(V, -1.0, -1e-3) == []
    with pytest.raises(PreconditionError):
        resonance_set(V, 1.0, 0.0)
    with pytest.raises(PreconditionError):
        resonance_set(Potential.zero(), 0.0, 1.0)


def test_resonance_set_of_barrier_matches_scan():
    # brute-force oracle: mismatch(alpha V, 0) never vanishes on a fine grid
    V = square_barrier(5.0)
    vals = [mismatch(a * V, 0.0) for a in np.linspace(1e-3, 1.0, 500)]
    assert min(vals) > 0
    # a barrier at negative coupling is a well: resonances at -n^2 pi^2 / 20
    assert resonance_set(V, -1.0, 0.0) == pytest.approx([-(math.pi ** 2) / 20], abs=1e-8)
    assert resonance_set(V, -2.0, -0.5) == pytest.approx([-(math.pi ** 2) / 5], abs=1e-8)


@pytest.mark.parametrize("V", [square_well(10.0), square_well(2.0), step_dipole(20.0),
                               make_piecewise([-1, 0.1, 1], [-6.0, 3.0])])
def test_resonance_count_reconciliation(V):
    pts = resonance_set(V, 0.0, 1.0)
    birth = 1 if (moment(V, 0) <= 0 and not V.is_zero()) else 0
    assert count_negative(V) == len(pts) + birth
    for a in pts:
        assert abs(mismatch(a * V, 0.0)) < 1e-8
