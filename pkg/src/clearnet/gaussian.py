"""Gaussian-type elimination for the maximal clearing pair.

Valid when all three recovery fractions coincide and ``||Theta||_inf < 1``. A bank
that cannot pay in full even at the most favourable point ``(l, H(l))`` defaults in
the maximal pair: its equity is zero and its payment is an affine function of the
others, so it can be substituted out. Each substitution yields a system of the same
form with one bank fewer; once every remaining bank passes the full-payment test
the answer is ``(l, H(l))`` for the residue and the eliminated payments follow by
back-substitution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .equity import solve_Gplus
from .errors import InternalError, PreconditionError
from .fixpoint import max_fixpoint
from .network import DEFAULT_TOL, ClearingPair, FinancialNetwork, clearing_pair

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EliminationRecord:
    bank: int                 # original index of the eliminated bank
    diagonal: float           # its own entry of the relative liabilities matrix
    cash: float
    liability: float
    R: np.ndarray             # its relative liabilities towards the remaining banks
    T: np.ndarray             # remaining banks' relative liabilities towards it
    M: np.ndarray             # remaining banks' shares held by it
    scale: float              # alpha / (1 - alpha * diagonal); nan on the degenerate branch
    remaining: tuple[int, ...]
    degenerate: bool = False


@dataclass(frozen=True)
class ReducedSystem:
    cash: np.ndarray
    relative: np.ndarray
    holdings: np.ndarray
    totals: np.ndarray
    alpha: float
    index: tuple[int, ...]
    log: tuple[EliminationRecord, ...] = ()

    @property
    def m(self) -> int:
        return len(self.index)

    @classmethod
    def from_network(cls, net: FinancialNetwork) -> "ReducedSystem":
        return cls(net.cash.copy(), net.relative.copy(), net.holdings.copy(),
                   net.totals.copy(), net.alpha, tuple(range(net.n)))

    def max_row_sum(self) -> float:
        return float(self.relative.sum(axis=1).max()) if self.m else 0.0

    def holdings_norm(self) -> float:
        return float(self.holdings.sum(axis=1).max()) if self.m else 0.0


def full_payment_check(sys: ReducedSystem, tol: float = DEFAULT_TOL):
    """Does every bank cover ``l`` at ``(l, H(l))``? Returns ``(holds, first_violator, H(l))``."""
    if sys.m == 0:
        return True, None, np.zeros(0)
    l = sys.totals
    H = solve_Gplus(sys, l, tol)
    x = sys.cash + sys.relative.T @ l + sys.holdings.T @ H
    short = np.flatnonzero(x < l - tol)
    if short.size == 0:
        return True, None, H
    return False, int(short[0]), H


def eliminate(sys: ReducedSystem, i: int, tol: float = DEFAULT_TOL, check: bool = True) -> ReducedSystem:
    """Substitute out local bank ``i`` (which must fail the full-payment test)."""
    if not 0 <= i < sys.m:
        raise IndexError(f"bank {i} out of range for a system of size {sys.m}")
    if check:
        holds, _, H = full_payment_check(sys, tol)
        x = sys.cash + sys.relative.T @ sys.totals + sys.holdings.T @ H
        if x[i] >= sys.totals[i] - tol:
            raise InternalError(f"bank {sys.index[i]} pays in full at (l, H(l)); cannot eliminate")

    keep = np.array([k for k in range(sys.m) if k != i], dtype=int)
    alpha = sys.alpha
    pii = float(sys.relative[i, i])
    R = sys.relative[i, keep]
    T = sys.relative[keep, i]
    M = sys.holdings[keep, i]
    e1 = float(sys.cash[i])
    pi_sub = sys.relative[np.ix_(keep, keep)]
    theta_sub = sys.holdings[np.ix_(keep, keep)]

    degenerate = alpha == 1.0 and pii == 1.0
    if degenerate:
        log.warning("degenerate elimination branch taken for bank %d", sys.index[i])
        scale = float("nan")
        relative, holdings = pi_sub.copy(), theta_sub.copy()
        cash = sys.cash[keep] + e1 * R
    else:
        scale = alpha / (1.0 - alpha * pii)
        relative = pi_sub + scale * np.outer(T, R)
        holdings = theta_sub + scale * np.outer(M, R)
        cash = sys.cash[keep] + scale * e1 * R

    remaining = tuple(sys.index[k] for k in keep)
    record = EliminationRecord(sys.index[i], pii, e1, float(sys.totals[i]), R.copy(), T.copy(),
                               M.copy(), scale, remaining, degenerate)
    return ReducedSystem(cash, relative, holdings, sys.totals[keep].copy(), alpha,
                         remaining, sys.log + (record,))


@dataclass
class GaussianResult:
    pair: ClearingPair
    log: tuple[EliminationRecord, ...]
    max_row_sums: list[float] = field(default_factory=list)
    holdings_norms: list[float] = field(default_factory=list)

    @property
    def eliminated(self) -> tuple[int, ...]:
        return tuple(r.bank for r in self.log)

    @property
    def degenerate_taken(self) -> bool:
        return any(r.degenerate for r in self.log)


def gaussian_reduction(net: FinancialNetwork, tol: float = DEFAULT_TOL,
                       cross_check: bool = True) -> GaussianResult:
    if not net.uniform_charges:
        raise PreconditionError(
            f"Gaussian method requires alpha = beta = gamma (got {net.alpha}, {net.beta}, {net.gamma})")
    if not net.strictly_substochastic_holdings:
        raise PreconditionError(
            f"Gaussian method requires ||Theta||_inf < 1 (got {net.holdings_norm:.6g})")

    sys = ReducedSystem.from_network(net)
    row_sums, norms = [sys.max_row_sum()], [sys.holdings_norm()]
    for _ in range(net.n + 1):
        holds, violator, H = full_payment_check(sys, tol)
        if holds:
            break
        sys = eliminate(sys, violator, tol, check=False)
        row_sums.append(sys.max_row_sum())
        norms.append(sys.holdings_norm())
    else:
        raise InternalError("more eliminations than banks")

    p = np.zeros(net.n)
    V = np.zeros(net.n)
    idx = list(sys.index)
    p[idx] = sys.totals
    V[idx] = H
    for rec in reversed(sys.log):
        rest = list(rec.remaining)
        if rec.degenerate:
            p[rec.bank] = rec.liability
        else:
            p[rec.bank] = rec.scale * (rec.cash + rec.T @ p[rest] + rec.M @ V[rest])
        V[rec.bank] = 0.0

    pair = clearing_pair(net, p, V, tol)
    if cross_check:
        ref = max_fixpoint(net, 1, tol)
        gap = max(np.max(np.abs(ref.p - p)), np.max(np.abs(ref.V - V)))
        if gap > 10 * tol:
            raise InternalError(f"Gaussian result deviates from the maximal fixpoint by {gap:.3g}")
    return GaussianResult(pair, sys.log, row_sums, norms)


def gaussian_max_clearing(net: FinancialNetwork, tol: float = DEFAULT_TOL,
                          cross_check: bool = True) -> ClearingPair:
    return gaussian_reduction(net, tol, cross_check).pair
