"""Mixed integer-linear programs whose optima are the extremal clearing pairs.

Variables are stacked as ``(a, p, V)``, each of length ``n``; ``a`` is binary and
marks full payment. With ``x = e + Pi' p + Theta' V`` and
``y = alpha e + beta Pi' p + gamma Theta' V``:

P1 (maximise ``f``)::

    p <= y + a*l,   a*l <= x,   V <= x - a*l,   V <= kappa*a

P2 (minimise ``f``)::

    p >= y - kappa1*a,   p >= a*l,   (1-a)*l + kappa1*a >= y,   V >= x - l - kappa*(1-a)

``f(a, p, V) = f1.a + f2.p + f3.V`` with strictly positive weights.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..equity import compute_bounds, solve_Gplus
from ..errors import InternalError, ValidationError
from ..fixpoint import min_fixpoint
from ..network import (
    ClearingPair,
    FinancialNetwork,
    assets_x,
    assets_y,
    clearing_pair,
    verify_clearing_pair,
)
from .branch_bound import INT_TOL, MilpInstance, MilpSolution, solve_milp

LEMMA_TOL = 1e-6
BOUNDARY_TOL = 1e-7


@dataclass(frozen=True)
class ObjectiveWeights:
    f1: np.ndarray
    f2: np.ndarray
    f3: np.ndarray

    def __post_init__(self):
        for name in ("f1", "f2", "f3"):
            v = np.atleast_1d(np.asarray(getattr(self, name), dtype=float))
            if not np.all(np.isfinite(v)) or np.any(v <= 0):
                raise ValidationError(f"objective weights {name} must be strictly positive")
            object.__setattr__(self, name, v)

    @classmethod
    def uniform(cls, n: int, f1: float = 1.0, f2: float = 1.0, f3: float = 1.0) -> "ObjectiveWeights":
        return cls(np.full(n, f1), np.full(n, f2), np.full(n, f3))

    def vector(self, n: int) -> np.ndarray:
        return np.concatenate([np.broadcast_to(w, (n,)) for w in (self.f1, self.f2, self.f3)])


def _names(n):
    return [f"A{i}" for i in range(n)] + [f"P{i}" for i in range(n)] + [f"V{i}" for i in range(n)]


def build_P1(net: FinancialNetwork, weights: ObjectiveWeights | None = None) -> MilpInstance:
    n = net.n
    weights = weights or ObjectiveWeights.uniform(n)
    bounds = compute_bounds(net)
    P, Q, I = net.relative.T, net.holdings.T, np.eye(n)
    l, e = net.totals, net.cash
    Dl = np.diag(l)
    Z = np.zeros((n, n))
    blocks = [
        # p - beta P p - gamma Q V - l*a <= alpha e
        (np.hstack([-Dl, I - net.beta * P, -net.gamma * Q]), net.alpha * e, "LIM"),
        # l*a - P p - Q V <= e
        (np.hstack([Dl, -P, -Q]), e, "SOL"),
        # l*a - P p + (I - Q) V <= e
        (np.hstack([Dl, -P, I - Q]), e, "EQV"),
        # V - kappa a <= 0
        (np.hstack([-bounds.kappa * I, Z, I]), np.zeros(n), "BIG"),
    ]
    inst = _assemble(net, weights, blocks, "max", "P1", bounds)
    # any integer-feasible V satisfies V <= (x - l)^+ with p <= l, so V <= H(l)
    cap = solve_Gplus(net, l)
    inst.upper[2 * n:] = np.minimum(inst.upper[2 * n:], cap + 1e-9 * (1.0 + cap))
    return inst


def build_P2(net: FinancialNetwork, weights: ObjectiveWeights | None = None) -> MilpInstance:
    n = net.n
    weights = weights or ObjectiveWeights.uniform(n)
    bounds = compute_bounds(net)
    P, Q, I = net.relative.T, net.holdings.T, np.eye(n)
    l, e = net.totals, net.cash
    k, k1 = bounds.kappa, bounds.kappa1
    Z = np.zeros((n, n))
    blocks = [
        # beta P p - p + gamma Q V - kappa1 a <= -alpha e
        (np.hstack([-k1 * I, net.beta * P - I, net.gamma * Q]), -net.alpha * e, "DEF"),
        # l*a - p <= 0
        (np.hstack([np.diag(l), -I, Z]), np.zeros(n), "FUL"),
        # beta P p + gamma Q V - (kappa1 - l)*a <= l - alpha e
        (np.hstack([-np.diag(k1 - l), net.beta * P, net.gamma * Q]), l - net.alpha * e, "CAP"),
        # P p + (Q - I) V + kappa a <= l + kappa - e
        (np.hstack([k * I, P, Q - I]), l + k - e, "EQV"),
    ]
    return _assemble(net, weights, blocks, "min", "P2", bounds)


def _assemble(net, weights, blocks, sense, kind, bounds):
    n = net.n
    A = np.vstack([b[0] for b in blocks])
    rhs = np.concatenate([b[1] for b in blocks])
    rows = [f"{tag}{i}" for _, _, tag in blocks for i in range(n)]
    lower = np.zeros(3 * n)
    upper = np.concatenate([np.ones(n), net.totals, np.full(n, bounds.kappa)])
    integer = np.zeros(3 * n, dtype=bool)
    integer[:n] = True
    return MilpInstance(weights.vector(n), A, rhs, lower, upper, integer, sense,
                        _names(n), rows, kind, n, {"kappa": bounds.kappa, "kappa1": bounds.kappa1})


def p1_lemma_checks(net: FinancialNetwork, sol: MilpSolution, tol: float = LEMMA_TOL) -> dict[str, bool]:
    """Full-payment marker identity ``a = 1{p = l}`` at a P1 optimum."""
    full = np.abs(sol.p - net.totals) <= tol
    return {"a_marks_full_payment": bool(np.array_equal(sol.a.astype(bool), full))}


def p2_lemma_checks(net: FinancialNetwork, sol: MilpSolution, tol: float = LEMMA_TOL) -> dict[str, bool]:
    """Structure of a P2 optimum: payments, equities and the marker ``a = 1{y > l}``."""
    a, p, V = sol.a, sol.p, sol.V
    l = net.totals
    x = assets_x(net, p, V)
    y = assets_y(net, p, V)
    boundary = np.abs(y - l) <= tol
    return {
        "payment_split": bool(np.all(np.abs(p - ((1 - a) * y + a * l)) <= tol)),
        "equity_split": bool(np.all(np.abs(V - a * np.maximum(x - l, 0.0)) <= tol)),
        "a_marks_surplus": bool(np.all(boundary | (a.astype(bool) == (y > l)))),
        "payment_is_capped_y": bool(np.all(np.abs(p - np.minimum(y, l)) <= tol)),
    }


def _solve(inst, node_limit):
    sol = solve_milp(inst, node_limit=node_limit)
    if sol.status != "optimal":
        raise InternalError(f"{inst.kind} solve ended with status {sol.status!r}")
    return sol


def maximal_pair_via_milp(net: FinancialNetwork, weights: ObjectiveWeights | None = None,
                          node_limit: int = 10**6, tol: float = 1e-7,
                          return_solution: bool = False):
    """Maximal clearing pair as the optimum of P1."""
    sol = _solve(build_P1(net, weights), node_limit)
    sol.lemma_checks = p1_lemma_checks(net, sol)
    if not all(sol.lemma_checks.values()):
        raise InternalError(f"P1 optimum violates the full-payment marker identity: a={sol.a}, p={sol.p}")
    p = np.clip(sol.p, 0.0, net.totals)
    pair = clearing_pair(net, p, np.maximum(sol.V, 0.0), tol)
    report = verify_clearing_pair(net, pair, tol)
    if not report.overall:
        raise InternalError("P1 optimum is not a clearing pair: " + "; ".join(report.failures()))
    return (pair, sol) if return_solution else pair


def minimal_pair_via_milp(net: FinancialNetwork, weights: ObjectiveWeights | None = None,
                          node_limit: int = 10**6, tol: float = 1e-7,
                          return_solution: bool = False):
    """Optimum of P2 and a flag telling whether it is the minimal clearing pair.

    The flag is set when no bank sits exactly on ``y = l``; then the P2 payments
    equal the minimal fixpoint of ``F_0``, which is asserted. Otherwise the P2
    payments are only a lower bound.
    """
    sol = _solve(build_P2(net, weights), node_limit)
    sol.lemma_checks = p2_lemma_checks(net, sol)
    if not all(sol.lemma_checks.values()):
        failed = [k for k, ok in sol.lemma_checks.items() if not ok]
        raise InternalError(f"P2 optimum violates {failed}")
    p = np.clip(sol.p, 0.0, net.totals)
    V = np.maximum(sol.V, 0.0)
    y = assets_y(net, p, V)
    flag = bool(np.all(np.abs(y - net.totals) > BOUNDARY_TOL))
    pair = clearing_pair(net, p, V, tol)
    if flag:
        ref = min_fixpoint(net, 0)
        gap = float(np.max(np.abs(ref.p - p)))
        if gap > LEMMA_TOL:
            raise InternalError(f"P2 payments differ from the minimal fixpoint by {gap:.3g}")
    return (pair, flag, sol) if return_solution else (pair, flag)
