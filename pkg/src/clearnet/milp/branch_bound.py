"""Best-first branch and bound over binary variables."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .simplex import solve_lp

INT_TOL = 1e-6
NODE_LIMIT = 10**6


@dataclass
class MilpInstance:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    integer: np.ndarray
    sense: str = "max"
    col_names: list[str] = field(default_factory=list)
    row_names: list[str] = field(default_factory=list)
    kind: str = ""
    n_banks: int = 0
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        nv = self.c.size
        if self.A_ub.shape != (self.b_ub.size, nv):
            raise ValueError("constraint matrix shape does not match objective/rhs")
        if not (np.all(np.isfinite(self.A_ub)) and np.all(np.isfinite(self.b_ub))):
            raise ValueError("constraint coefficients must be finite")
        if not self.col_names:
            self.col_names = [f"X{j}" for j in range(nv)]
        if not self.row_names:
            self.row_names = [f"R{i}" for i in range(self.b_ub.size)]

    def max_violation(self, x) -> float:
        x = np.asarray(x, dtype=float)
        rows = np.max(self.A_ub @ x - self.b_ub, initial=0.0)
        bnds = max(np.max(self.lower - x, initial=0.0), np.max(x - self.upper, initial=0.0))
        return float(max(rows, bnds, 0.0))


@dataclass
class MilpSolution:
    status: str  # optimal | infeasible | unbounded | node-limit
    x: np.ndarray | None
    objective: float
    nodes: int
    n_banks: int = 0
    lemma_checks: dict[str, bool] = field(default_factory=dict)

    def _block(self, k):
        if self.x is None:
            return None
        n = self.n_banks
        return self.x[k * n:(k + 1) * n]

    @property
    def a(self):
        return self._block(0)

    @property
    def p(self):
        return self._block(1)

    @property
    def V(self):
        return self._block(2)


def tighten_bounds(A, b, lo, hi, integer, rounds: int = 10):
    """Feasibility-based bound tightening over the rows ``A x <= b``.

    Each row bounds every variable it contains by the row's minimal activity over
    the other variables. Integer bounds are rounded inward. Returns the tightened
    ``(lo, hi)`` or ``None`` when the box becomes empty.
    """
    lo, hi = np.array(lo, dtype=float), np.array(hi, dtype=float)
    r, c = np.nonzero(np.abs(A) > 1e-12)
    v = A[r, c]
    pos = v > 0
    m = A.shape[0]
    for _ in range(rounds):
        term = np.where(pos, v * lo[c], v * hi[c])
        inf_term = ~np.isfinite(term)
        n_inf = np.bincount(r, weights=inf_term, minlength=m)
        finite_sum = np.bincount(r, weights=np.where(inf_term, 0.0, term), minlength=m)
        # minimal activity of the row without this entry
        rest = np.where(inf_term, finite_sum[r], finite_sum[r] - term)
        usable = (n_inf[r] == 0) | ((n_inf[r] == 1) & inf_term)
        bound = (b[r] - rest) / v
        new_hi = np.full_like(hi, np.inf)
        new_lo = np.full_like(lo, -np.inf)
        k = usable & pos
        np.minimum.at(new_hi, c[k], bound[k])
        k = usable & ~pos
        np.maximum.at(new_lo, c[k], bound[k])
        new_hi = new_hi + 1e-9 * (1.0 + np.abs(new_hi))
        new_lo = new_lo - 1e-9 * (1.0 + np.abs(new_lo))
        new_hi[integer] = np.floor(new_hi[integer] + INT_TOL)
        new_lo[integer] = np.ceil(new_lo[integer] - INT_TOL)
        hi_next = np.minimum(hi, new_hi)
        lo_next = np.maximum(lo, new_lo)
        if np.any(lo_next > hi_next + 1e-7 * (1.0 + np.abs(hi_next))):
            return None
        lo_next = np.minimum(lo_next, hi_next)
        scale = 1e-7 * (1.0 + np.abs(hi))
        changed = np.any(hi - hi_next > scale) or np.any(lo_next - lo > scale)
        lo, hi = lo_next, hi_next
        if not changed:
            break
    return lo, hi


def _most_fractional(x, integer):
    idx = np.flatnonzero(integer)
    frac = x[idx] - np.floor(x[idx])
    dist = np.minimum(frac, 1.0 - frac)
    if dist.size == 0 or dist.max() <= INT_TOL:
        return None
    return int(idx[np.argmax(dist)])  # argmax keeps the lowest index on ties


def solve_milp(inst: MilpInstance, node_limit: int = NODE_LIMIT, rule: str = "bland",
               tighten: bool = True, cutoff: float | None = None) -> MilpSolution:
    """Globally optimal solution by LP-based best-first branch and bound.

    With ``tighten`` every node first tightens its variable box, then solves
    the LP relaxation from scratch. Branches on the most fractional integer
    variable; a node is pruned once its relaxation bound cannot beat the
    incumbent. A ``cutoff`` objective value prunes every node that cannot do
    strictly better than it.
    """
    sign = 1.0 if inst.sense == "max" else -1.0
    A, b = inst.A_ub, inst.b_ub

    def relax(lo, hi):
        if tighten:
            box = tighten_bounds(A, b, lo, hi, inst.integer)
            if box is None:
                return None, lo, hi
            lo, hi = box
        return solve_lp(inst.c, A, b, lower=lo, upper=hi, sense=inst.sense, rule=rule), lo, hi

    root, lo0, hi0 = relax(inst.lower.copy(), inst.upper.copy())
    nodes = 1
    if root is None:
        return MilpSolution("infeasible", None, np.nan, nodes, inst.n_banks)
    if root.status != "optimal":
        return MilpSolution(root.status, None, np.nan, nodes, inst.n_banks)

    counter = itertools.count()
    best, incumbent = (-np.inf if cutoff is None else sign * cutoff), None
    heap = []

    def consider(res, lo, hi):
        nonlocal best, incumbent
        value = sign * res.objective
        if value <= best + 1e-9 * max(1.0, abs(best)):
            return
        if _most_fractional(res.x, inst.integer) is None:
            best, incumbent = value, res.x
        else:
            heapq.heappush(heap, (-value, next(counter), lo, hi, res.x))

    consider(root, lo0, hi0)
    while heap:
        key, _, lo, hi, x = heapq.heappop(heap)
        if -key <= best + 1e-9 * max(1.0, abs(best)):
            continue
        j = _most_fractional(x, inst.integer)
        for branch in ("down", "up"):
            clo, chi = lo.copy(), hi.copy()
            if branch == "down":
                chi[j] = np.floor(x[j])
            else:
                clo[j] = np.ceil(x[j])
            nodes += 1
            if nodes > node_limit:
                status = "node-limit"
                out = None if incumbent is None else _round(incumbent, inst.integer)
                return MilpSolution(status, out, sign * best if out is not None else np.nan,
                                    nodes, inst.n_banks)
            res, clo, chi = relax(clo, chi)
            if res is not None and res.status == "optimal":
                consider(res, clo, chi)

    if incumbent is None:
        return MilpSolution("infeasible", None, np.nan, nodes, inst.n_banks)
    x = _round(incumbent, inst.integer)
    # node LPs accept integers within INT_TOL, and a big-M coefficient turns that
    # into a visible row residual; re-solve the original rows with the integers fixed so the
    # continuous part is an exact vertex
    lo, hi = inst.lower.copy(), inst.upper.copy()
    lo[inst.integer] = hi[inst.integer] = x[inst.integer]
    final = solve_lp(inst.c, inst.A_ub, inst.b_ub, lower=lo, upper=hi, sense=inst.sense, rule=rule)
    if final.status == "optimal":
        x = final.x
    return MilpSolution("optimal", x, float(inst.c @ x), nodes, inst.n_banks)


def _round(x, integer):
    x = x.copy()
    x[integer] = np.round(x[integer])
    return x
