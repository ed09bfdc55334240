import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import potentials
from lowlying.errors import PreconditionError
from lowlying.potential import Potential, square_well
from lowlying.propagator import ScaledMatrix, State, piece_propagator, propagate, propagate_nodes


def test_free_piece():
    m = piece_propagator(0.0, 2.5)
    np.testing.assert_allclose(m.matrix(), [[1.0, 2.5], [0.0, 1.0]], rtol=1e-15)


def test_hyperbolic_piece():
    m = piece_propagator(1.0, math.log(4.0))
    np.testing.assert_allclose(m.matrix(), [[17 / 8, 15 / 8], [15 / 8, 17 / 8]], rtol=1e-14)
    assert m.det() == pytest.approx(1.0, abs=1e-14)


def test_quarter_oscillation():
    m = piece_propagator(-1.0, math.pi / 2)
    np.testing.assert_allclose(m.matrix(), [[0.0, 1.0], [-1.0, 0.0]], atol=1e-15)


@pytest.mark.parametrize("s", [1e-9, -1e-9, 2e-8, -2e-8, 1e-30])
def test_taylor_regime_is_accurate(s):
    mu = cmath.sqrt(s)
    exact = np.array([[cmath.cosh(mu).real, (cmath.sinh(mu) / mu).real],
                      [(mu * cmath.sinh(mu)).real, cmath.cosh(mu).real]])
    np.testing.assert_allclose(piece_propagator(s, 1.0).matrix(), exact, rtol=1e-14, atol=1e-24)


def test_stiff_piece_does_not_overflow():
    m = piece_propagator(25.0, 300.0)
    assert np.max(np.abs(m.m)) == 1.0
    # largest entry is mu sinh(mu L) = 5 exp(1500) / 2 to double precision
    assert m.logscale == pytest.approx(1500.0 + math.log(2.5), rel=1e-14)
    assert math.isfinite(m.logscale)


def test_negative_length_rejected():
    with pytest.raises(PreconditionError, match="piece_propagator"):
        piece_propagator(1.0, -0.1)


def test_free_exponential():
    st = propagate(Potential.zero(), -1.0, -1.0, 1.0, State.make(1.0, 1.0))
    assert (st.u, st.du) == pytest.approx((1 / math.sqrt(2), 1 / math.sqrt(2)), rel=1e-15)
    assert st.logscale == pytest.approx(2.0 + math.log(math.sqrt(2)), rel=1e-15)
    assert st.values() == pytest.approx((math.e ** 2, math.e ** 2), rel=1e-14)


def test_square_well_zero_energy():
    k = math.sqrt(10.0)
    st = propagate(square_well(10.0), 0.0, -1.0, 1.0, State.make(1.0, 0.0))
    assert st.values() == pytest.approx((math.cos(2 * k), -k * math.sin(2 * k)), rel=1e-13)


def test_identity_and_order():
    init = State.make(0.3, -2.0)
    assert propagate(square_well(3.0), -1.0, 0.5, 0.5, init) == init
    with pytest.raises(PreconditionError, match="propagate"):
        propagate(square_well(3.0), -1.0, 1.0, 0.0, init)
    with pytest.raises(PreconditionError):
        State.make(0.0, 0.0)


def test_node_examples():
    st, n = propagate_nodes(Potential.zero(), 0.0, State.make(1.0, 0.0))
    assert n == 0 and (st.u, st.du) == (1.0, 0.0)
    assert propagate_nodes(square_well(10.0), 0.0, State.make(1.0, 0.0))[1] == 2
    w = 2.9313453012618353
    assert propagate_nodes(square_well(10.0), -w * w, State.make(1.0, w))[1] == 0


def test_zero_on_breakpoint_counts_once():
    # cos(k(x+1)) with k = pi/2 vanishes exactly at x = 0, a breakpoint
    q = Potential((-1.0, 0.0, 1.0), (-math.pi ** 2 / 4, -math.pi ** 2 / 4))
    assert propagate_nodes(q, 0.0, State.make(1.0, 0.0))[1] == 1


@given(st.lists(st.tuples(st.floats(-50, 50), st.floats(0, 1)), min_size=1, max_size=6))
def test_wronskian(pieces):
    m = ScaledMatrix.identity()
    for s, L in pieces:
        # growing pieces kept short so that det(m) stays above rounding
        m = m @ piece_propagator(s, L if s <= 0 else 0.1 * L)
    assert abs(math.expm1(m.log_abs_det())) <= 1e-10
    assert 0.5 <= np.max(np.abs(m.m)) <= 2.0


@given(potentials(), st.floats(-60, 60), st.floats(0.05, 0.95), st.floats(-3, 3), st.floats(-3, 3))
def test_composition_and_reversibility(P, lam, frac, u0, du0):
    if math.hypot(u0, du0) < 1e-3:
        u0 = 1.0
    a, c = P.support
    b = a + frac * (c - a)
    init = State.make(u0, du0)
    whole = propagate(P, lam, a, c, init)
    split = propagate(P, lam, b, c, propagate(P, lam, a, b, init))
    assert whole.logscale == pytest.approx(split.logscale, abs=1e-9)
    assert (whole.u, whole.du) == pytest.approx((split.u, split.du), abs=1e-10)
    # backward: invert the composed per-piece propagators
    from lowlying.propagator import segments

    m = ScaledMatrix.identity()
    for x0, x1, v in segments(P, a, c):
        m = piece_propagator(v - lam, x1 - x0) @ m
    # the round trip loses about exp(2 * logscale) * eps
    if m.logscale < 5:
        back = m.inverse().apply(m.apply(init))
        assert back.values() == pytest.approx(init.values(), rel=1e-9, abs=1e-9 * math.hypot(u0, du0))


@given(potentials(), st.lists(st.floats(-60, 200), min_size=2, max_size=20))
def test_node_count_monotone_in_energy(P, lams):
    counts = [propagate_nodes(P, lam, State.make(1.0, 0.0))[1] for lam in sorted(lams)]
    assert counts == sorted(counts)
