"""Random test networks."""

from __future__ import annotations

import numpy as np

from clearnet import FinancialNetwork


def random_network(rng, n, theta_cap=0.9, density=0.6, charges=None, cash_scale=5.0,
                   with_holdings=True):
    """Random valid network.

    ``charges`` is a triple (alpha, beta, gamma), the string "uniform" for one
    shared random value, or None for three independent draws.
    """
    L = rng.uniform(0.0, 10.0, (n, n)) * (rng.random((n, n)) < density)
    np.fill_diagonal(L, 0.0)
    if with_holdings:
        T = rng.random((n, n)) * (rng.random((n, n)) < density)
        np.fill_diagonal(T, 0.0)
        rows = T.sum(axis=1)
        T = T / np.where(rows > 0, rows, 1.0)[:, None] * rng.uniform(0.0, theta_cap, (n, 1))
    else:
        T = np.zeros((n, n))
    if charges is None:
        abc = tuple(1.0 - rng.random(3))
    elif charges == "uniform":
        a = 1.0 - rng.random()
        abc = (a, a, a)
    else:
        abc = charges
    e = rng.uniform(0.0, cash_scale, n)
    return FinancialNetwork(e, L, T, *abc)


def two_bank():
    """Two banks owing each other, one with a little cash, half recovery."""
    return FinancialNetwork([0.5, 0.0], [[0, 2], [3, 0]], np.zeros((2, 2)), 0.5, 0.5, 0.5)


def singletons(n, alpha=0.4):
    """Ring of unit debts with e = l, no cross-holdings, beta = alpha and gamma = 1.

    Since alpha (l + Pi' l) = 2 alpha < 1 = l, every regime vector has exactly one
    clearing vector and they are all different. n = 2 gives the mutual-debt pair.
    """
    L = np.zeros((n, n))
    for i in range(n):
        L[i, (i + 1) % n] = 1.0
    return FinancialNetwork(np.ones(n), L, np.zeros((n, n)), alpha, alpha, 1.0)


def random_singletons(rng, n):
    """Same construction with random debts; alpha set to 90% of the admissible cap."""
    L = rng.uniform(0.5, 3.0, (n, n))
    np.fill_diagonal(L, 0.0)
    l = L.sum(axis=1)
    Pi = L / l[:, None]
    alpha = 0.9 * float(np.min(l / (l + Pi.T @ l)))
    return FinancialNetwork(l.copy(), L, np.zeros((n, n)), alpha, alpha, 1.0)
