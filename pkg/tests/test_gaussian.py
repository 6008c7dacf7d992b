import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from clearnet import (
    FinancialNetwork,
    PreconditionError,
    gaussian_max_clearing,
    gaussian_reduction,
    max_fixpoint,
    solve_Gplus,
    verify_clearing_pair,
)
from clearnet.errors import InternalError
from clearnet.gaussian import ReducedSystem, eliminate, full_payment_check

from netgen import random_network, two_bank


def test_full_payment_check_two_bank():
    holds, i, _ = full_payment_check(ReducedSystem.from_network(two_bank()))
    assert not holds and i == 1


def test_full_payment_check_ample_cash():
    net = random_network(np.random.default_rng(20), 5, charges="uniform")
    rich = FinancialNetwork(net.totals, net.liabilities, net.holdings, net.alpha, net.alpha, net.alpha)
    holds, i, H = full_payment_check(ReducedSystem.from_network(rich))
    assert holds and i is None
    np.testing.assert_allclose(H, solve_Gplus(rich, rich.totals))


def test_eliminate_two_bank_by_hand():
    red = eliminate(ReducedSystem.from_network(two_bank()), 1)
    assert red.index == (0,)
    np.testing.assert_allclose(red.relative, [[0.5]])
    np.testing.assert_allclose(red.cash, [0.5])
    rec = red.log[0]
    assert rec.bank == 1 and rec.scale == pytest.approx(0.5) and not rec.degenerate


def test_eliminate_refuses_solvent_bank():
    with pytest.raises(InternalError):
        eliminate(ReducedSystem.from_network(two_bank()), 0)
    with pytest.raises(IndexError):
        eliminate(ReducedSystem.from_network(two_bank()), 5)


def test_eliminate_zero_holding_column_keeps_theta():
    rng = np.random.default_rng(21)
    base = random_network(rng, 4, charges="uniform")
    T = base.holdings.copy()
    T[:, 2] = 0.0
    net = FinancialNetwork(base.cash, base.liabilities, T, base.alpha, base.alpha, base.alpha)
    red = eliminate(ReducedSystem.from_network(net), 2, check=False)
    keep = [0, 1, 3]
    np.testing.assert_array_equal(red.holdings, T[np.ix_(keep, keep)])


def test_degenerate_branch_keeps_matrices():
    sys = ReducedSystem(np.array([1.0, 2.0]), np.array([[1.0, 0.0], [0.5, 0.5]]), np.zeros((2, 2)),
                        np.array([1.0, 4.0]), 1.0, (0, 1))
    red = eliminate(sys, 0, check=False)
    assert red.log[0].degenerate
    np.testing.assert_array_equal(red.relative, [[0.5]])
    np.testing.assert_array_equal(red.cash, [2.0])


def test_gaussian_two_bank():
    res = gaussian_reduction(two_bank())
    np.testing.assert_allclose(res.pair.p, [1 / 3, 1 / 6])
    np.testing.assert_array_equal(res.pair.V, 0)
    assert res.eliminated == (1, 0)


def test_gaussian_ample_cash_no_eliminations():
    base = random_network(np.random.default_rng(22), 5, charges="uniform")
    net = FinancialNetwork(base.totals + 1, base.liabilities, base.holdings, base.alpha, base.alpha,
                           base.alpha)
    res = gaussian_reduction(net)
    assert res.eliminated == ()
    np.testing.assert_allclose(res.pair.p, net.totals)


def test_gaussian_chain_two_eliminations():
    L = [[0, 1, 0], [0, 0, 2], [2, 0, 0]]
    net = FinancialNetwork([10, 0, 0], L, np.zeros((3, 3)), .5, .5, .5)
    res = gaussian_reduction(net)
    assert len(res.eliminated) == 2
    ref = max_fixpoint(net, 1)
    np.testing.assert_allclose(res.pair.p, ref.p, atol=1e-12)
    np.testing.assert_allclose(res.pair.V, ref.V, atol=1e-12)
    assert res.pair.V[0] > 0


@pytest.mark.parametrize("charges", [(.5, .6, .5), (.5, .5, .4)])
def test_gaussian_needs_uniform_charges(charges):
    with pytest.raises(PreconditionError, match="alpha = beta = gamma"):
        gaussian_reduction(FinancialNetwork([0.5, 0], [[0, 2], [3, 0]], np.zeros((2, 2)), *charges))


def test_gaussian_needs_strictly_substochastic_holdings():
    net = FinancialNetwork([1, 1, 1], [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
                           [[0, 1, 0], [0, 0, .5], [0, 0, 0]], .5, .5, .5)
    with pytest.raises(PreconditionError, match="Theta"):
        gaussian_reduction(net)


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2**31), st.sampled_from([1.0, 5.0, 15.0]))
def test_gaussian_equals_max_fixpoint(n, seed, cash):
    rng = np.random.default_rng(seed)
    net = random_network(rng, n, charges="uniform", cash_scale=cash)
    res = gaussian_reduction(net, cross_check=False)
    ref = max_fixpoint(net, 1)
    np.testing.assert_allclose(res.pair.p, ref.p, atol=1e-7)
    np.testing.assert_allclose(res.pair.V, ref.V, atol=1e-7)
    assert len(res.eliminated) <= n
    assert sorted(res.eliminated) == list(ref.default_set)
    assert max(res.max_row_sums) <= 1 + 1e-12
    assert max(res.holdings_norms) < 1
    assert verify_clearing_pair(net, res.pair, 1e-8).overall
    assert np.array_equal(gaussian_max_clearing(net).p, res.pair.p)
