"""Dense bounded-variable primal simplex.

Solves ``min/max c x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and
``lower <= x <= upper`` where every variable has at least one finite bound.
Nonbasic variables sit at one of their bounds; a two-phase method with one
artificial per infeasible row finds a first basis.

Pricing rules: ``"bland"`` (the default; smallest eligible index enters, smallest basic index
leaves on ties) and ``"hybrid"`` (largest reduced cost, falling back to Bland's
rule after a run of degenerate pivots and staying there until the objective
moves again). Both terminate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve
from scipy.linalg.blas import dger

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 50
DEGENERATE_RUN = 20


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded | iteration-limit
    x: np.ndarray | None
    objective: float
    iterations: int


class _Tableau:
    def __init__(self, A, b, cost, lower, upper, basis, at_upper):
        self.A = A                      # original (row-flipped) constraint matrix incl. slacks/artificials
        self.b = b
        self.cost = cost
        self.lower = lower
        self.upper = upper
        self.basis = basis
        self.at_upper = at_upper
        self.m, self.N = A.shape
        self.is_basic = np.zeros(self.N, dtype=bool)
        self.is_basic[basis] = True
        self.blocked = np.zeros(self.N, dtype=bool)
        self.pivots = 0
        if np.array_equal(A[:, basis], np.eye(self.m)):
            # slack/artificial start: the basis is the identity
            self.T = np.array(A, dtype=float, order="F")
            self.xB = b - A @ self.nonbasic_values()
        else:
            self.refactor()

    def nonbasic_values(self):
        x = np.where(self.at_upper, self.upper, self.lower)
        x[self.is_basic] = 0.0
        return x

    def refactor(self):
        B = self.A[:, self.basis]
        xn = self.nonbasic_values()
        lu = lu_factor(B, check_finite=False)
        # basic columns of the tableau are unit vectors; solve only the others
        T = np.zeros((self.m, self.N), order="F")
        nb = np.flatnonzero(~self.is_basic)
        T[:, nb] = lu_solve(lu, self.A[:, nb], check_finite=False)
        T[np.arange(self.m), self.basis] = 1.0
        self.T = T
        self.xB = lu_solve(lu, self.b - self.A @ xn, check_finite=False)

    def values(self):
        x = self.nonbasic_values()
        x[self.basis] = self.xB
        return x

    def run(self, rule: str, max_iter: int) -> str:
        stalled = 0
        d = self.cost - self.cost[self.basis] @ self.T
        for _ in range(max_iter):
            movable = ~self.is_basic & ~self.blocked & (self.upper > self.lower)
            up = movable & ~self.at_upper & (d < -OPT_TOL)
            down = movable & self.at_upper & (d > OPT_TOL)
            cand = np.flatnonzero(up | down)
            if cand.size == 0:
                return "optimal"
            if rule == "bland" or stalled >= DEGENERATE_RUN:
                j = int(cand[0])
            else:
                j = int(cand[np.argmax(np.abs(d[cand]))])
            s = 1.0 if up[j] else -1.0

            col = s * self.T[:, j]
            t_best = self.upper[j] - self.lower[j]
            leave, leave_to_upper = -1, False
            lo_B = self.lower[self.basis]
            hi_B = self.upper[self.basis]
            dec = col > PIVOT_TOL
            inc = col < -PIVOT_TOL
            ratios = np.full(self.m, np.inf)
            ratios[dec] = np.maximum(self.xB[dec] - lo_B[dec], 0.0) / col[dec]
            fin = inc & np.isfinite(hi_B)
            ratios[fin] = np.maximum(hi_B[fin] - self.xB[fin], 0.0) / -col[fin]
            r_min = ratios.min() if self.m else np.inf
            if r_min < t_best:
                ties = np.flatnonzero(ratios <= r_min + 1e-12)
                # Bland: smallest variable index leaves
                r = int(ties[np.argmin(np.asarray(self.basis)[ties])])
                t_best, leave, leave_to_upper = ratios[r], r, bool(inc[r])
            if not np.isfinite(t_best):
                return "unbounded"

            stalled = stalled + 1 if t_best <= 1e-12 else 0
            self.xB -= t_best * col
            if leave < 0:
                self.at_upper[j] = not self.at_upper[j]
                continue
            entering_value = (self.upper[j] if self.at_upper[j] else self.lower[j]) + s * t_best
            self._pivot(leave, j, entering_value, leave_to_upper)
            if self.pivots % REFACTOR_EVERY == 0:
                d = self.cost - self.cost[self.basis] @ self.T
            else:
                d = d - d[j] * self.T[leave]
        return "iteration-limit"

    def _pivot(self, r, j, entering_value, leave_to_upper):
        out = self.basis[r]
        piv = self.T[r, j]
        self.T[r] /= piv
        colj = self.T[:, j].copy()
        colj[r] = 0.0
        self.T = dger(-1.0, colj, self.T[r].copy(), a=self.T, overwrite_a=True)
        self.basis[r] = j
        self.is_basic[j] = True
        self.is_basic[out] = False
        self.at_upper[out] = leave_to_upper
        self.at_upper[j] = False
        self.xB[r] = entering_value
        self.pivots += 1
        if self.pivots % REFACTOR_EVERY == 0:
            self.refactor()


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, lower=None, upper=None,
             sense: str = "min", rule: str = "bland", max_iter: int | None = None) -> LPResult:
    c = np.asarray(c, dtype=float)
    nv = c.size
    A_ub = np.zeros((0, nv)) if A_ub is None else np.asarray(A_ub, dtype=float).reshape(-1, nv)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float)
    A_eq = np.zeros((0, nv)) if A_eq is None else np.asarray(A_eq, dtype=float).reshape(-1, nv)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float)
    lower = np.zeros(nv) if lower is None else np.asarray(lower, dtype=float)
    upper = np.full(nv, np.inf) if upper is None else np.asarray(upper, dtype=float)
    if np.any(lower > upper + FEAS_TOL):
        return LPResult("infeasible", None, np.nan, 0)
    upper = np.maximum(upper, lower)
    if np.any(~np.isfinite(lower) & ~np.isfinite(upper)):
        raise ValueError("free variables are not supported")
    if sense not in ("min", "max"):
        raise ValueError(f"sense must be 'min' or 'max', got {sense!r}")
    cost = c if sense == "min" else -c

    mu, me = A_ub.shape[0], A_eq.shape[0]
    m = mu + me
    start_upper = ~np.isfinite(lower) | (np.isfinite(upper) & (cost < 0))
    x0 = np.where(start_upper, upper, lower)
    A = np.vstack([A_ub, A_eq])
    b = np.concatenate([b_ub, b_eq])
    resid = b - A @ x0

    # slack for inequality rows; artificial where the slack cannot absorb the residual
    needs_art = np.concatenate([resid[:mu] < 0, np.ones(me, dtype=bool)])
    sign = np.where(resid < 0, -1.0, 1.0)
    n_art = int(needs_art.sum())
    N = nv + mu + n_art
    full = np.zeros((m, N))
    full[:, :nv] = A
    full[np.arange(mu), nv + np.arange(mu)] = 1.0
    art_cols = nv + mu + np.arange(n_art)
    art_rows = np.flatnonzero(needs_art)
    full[art_rows, art_cols] = sign[art_rows]
    full *= sign[:, None]
    rhs = b * sign

    lo = np.concatenate([lower, np.zeros(mu + n_art)])
    hi = np.concatenate([upper, np.full(mu, np.inf), np.full(n_art, np.inf)])
    basis = np.empty(m, dtype=int)
    slack_rows = np.flatnonzero(~needs_art)
    basis[slack_rows] = nv + slack_rows
    basis[art_rows] = art_cols
    at_upper = np.concatenate([start_upper, np.zeros(mu + n_art, dtype=bool)])

    max_iter = max_iter or 50 * (m + N) + 1000
    tab = _Tableau(full, rhs, np.zeros(N), lo, hi, basis, at_upper)
    iters = 0
    if n_art:
        tab.cost = np.zeros(N)
        tab.cost[art_cols] = 1.0
        status = tab.run(rule, max_iter)
        iters = tab.pivots
        if status != "optimal":
            return LPResult(status, None, np.nan, iters)
        infeas = float(tab.values()[art_cols].sum())
        if infeas > FEAS_TOL * max(1.0, np.abs(rhs).max(initial=0.0)):
            return LPResult("infeasible", None, np.nan, iters)
        # artificials are pinned at zero from here on
        tab.upper = tab.upper.copy()
        tab.upper[art_cols] = 0.0
        tab.blocked[art_cols] = True
    tab.cost = np.concatenate([cost, np.zeros(mu + n_art)])
    status = tab.run(rule, max_iter)
    iters = tab.pivots
    if status != "optimal":
        return LPResult(status, None, np.nan, iters)
    tab.refactor()
    x = np.clip(tab.values()[:nv], lower, upper)
    return LPResult("optimal", x, float(c @ x), iters)

