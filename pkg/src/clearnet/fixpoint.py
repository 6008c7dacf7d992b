"""Regime maps ``Phi_b``/``F_b``, their extremal fixpoints and the clearing set.

For a binary regime vector ``b`` bank ``i`` pays

* ``min(y_i, l_i)`` when ``b_i = 0``,
* ``y_i`` if its assets ``x_i`` fall short of ``l_i`` and ``l_i`` otherwise when ``b_i = 1``.

``F_b(p) = Phi_b(p, H(p))`` is monotone in ``(b, p)``; the union over all ``b`` of its
fixpoints is exactly the set of clearing vectors. Extremal fixpoints are computed
by default-set descent (maximal) and solvency-set ascent (minimal), each freezing
the regime of every bank and solving the resulting linear system, in the spirit of
the fictitious default algorithm.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .equity import solve_Gplus
from .errors import InternalError, PreconditionError, ValidationError
from .network import (
    DEFAULT_TOL,
    ClearingPair,
    FinancialNetwork,
    assets_x,
    assets_y,
    clearing_pair,
    verify_clearing_pair,
)

RegimeVector = tuple[int, ...]


def as_regime(b, n: int) -> np.ndarray:
    """Normalise ``b`` (sequence, int 0/1 meaning constant, or array) to an int array."""
    if np.isscalar(b):
        b = [int(b)] * n
    arr = np.asarray(b)
    if arr.shape != (n,) or not np.all((arr == 0) | (arr == 1)):
        raise ValidationError(f"regime vector must be {n} binary entries, got {b!r}")
    return arr.astype(int)


def phi_b(net: FinancialNetwork, b, p, V, tol: float = DEFAULT_TOL) -> np.ndarray:
    b = as_regime(b, net.n)
    x = assets_x(net, p, V)
    y = assets_y(net, p, V)
    l = net.totals
    indicator_form = np.where(x < l - tol, y, l)
    return np.where(b == 0, np.minimum(y, l), indicator_form)


def eval_F(net: FinancialNetwork, b, p, tol: float = DEFAULT_TOL) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return phi_b(net, b, p, solve_Gplus(net, p, tol), tol)


def fixpoint_residual(net: FinancialNetwork, b, p, tol: float = DEFAULT_TOL) -> float:
    """Sup-norm of ``p - F_b(p)``."""
    return float(np.max(np.abs(np.asarray(p) - eval_F(net, b, p, tol))))


def _regime_solve(net: FinancialNetwork, pays_y: np.ndarray, equity_on: np.ndarray):
    """Solve the linear system of a frozen regime.

    ``p_i = y_i`` on ``pays_y`` and ``l_i`` elsewhere; ``V_i = x_i - l_i`` on
    ``equity_on`` and zero elsewhere.
    """
    l = net.totals
    P = net.relative.T
    Q = net.holdings.T
    U = np.flatnonzero(pays_y)
    A = np.flatnonzero(equity_on)
    fixed = np.where(pays_y, 0.0, l)
    nu, na = U.size, A.size

    mat = np.eye(nu + na)
    rhs = np.empty(nu + na)
    if nu:
        mat[:nu, :nu] -= net.beta * P[np.ix_(U, U)]
        mat[:nu, nu:] -= net.gamma * Q[np.ix_(U, A)]
        rhs[:nu] = net.alpha * net.cash[U] + net.beta * (P[U] @ fixed)
    if na:
        mat[nu:, :nu] -= P[np.ix_(A, U)]
        mat[nu:, nu:] -= Q[np.ix_(A, A)]
        rhs[nu:] = net.cash[A] + P[A] @ fixed - l[A]
    try:
        sol = np.linalg.solve(mat, rhs) if nu + na else rhs
    except np.linalg.LinAlgError as exc:
        raise PreconditionError(
            "singular regime system: a closed group of banks has no loss or outflow "
            "(e.g. beta = gamma = 1 with zero cash)") from exc
    p = fixed.copy()
    p[U] = sol[:nu]
    V = np.zeros(net.n)
    V[A] = sol[nu:]
    return p, V


def _finish(net, p, V, tol) -> ClearingPair:
    p = np.clip(p, 0.0, net.totals)
    return clearing_pair(net, p, np.maximum(V, 0.0), tol)


def max_fixpoint(net: FinancialNetwork, b=1, tol: float = DEFAULT_TOL) -> ClearingPair:
    """Maximal fixpoint of ``F_b`` with its equity ``V = H(p)``.

    The default set grows from empty; for each candidate set the equities of the
    paying banks are found by an inner ascent over the banks with positive equity.
    """
    b = as_regime(b, net.n)
    n, l = net.n, net.totals
    default = np.zeros(n, dtype=bool)
    for _ in range(n + 1):
        positive = np.zeros(n, dtype=bool)
        for _ in range(n + 2):
            p, V = _regime_solve(net, default, positive)
            x = assets_x(net, p, V)
            grown = positive | (~default & (x - l > 0))
            if np.array_equal(grown, positive):
                break
            positive = grown
        else:
            raise InternalError("equity ascent did not settle")
        y = assets_y(net, p, V)
        violating = ~default & np.where(b == 1, x < l - tol, y < l - tol)
        if not violating.any():
            return _finish(net, p, V, tol)
        default |= violating
    raise InternalError("default-set descent oscillated")


def min_fixpoint(net: FinancialNetwork, b=0, tol: float = DEFAULT_TOL) -> ClearingPair:
    """Minimal fixpoint of ``F_b`` with its equity ``V = H(p)``.

    The solvency set grows from the debt-free banks; for each candidate set the
    remaining banks pay ``min(y, l)``, resolved by an inner descent that releases
    banks from full payment as their discounted assets drop below ``l``.
    """
    b = as_regime(b, net.n)
    n, l = net.n, net.totals
    solvent = l <= tol
    for _ in range(n + 1):
        rest = ~solvent
        short = np.zeros(n, dtype=bool)
        for _ in range(n + 2):
            p, V = _regime_solve(net, short, solvent)
            y = assets_y(net, p, V)
            grown = short | (rest & (y < l - tol))
            if np.array_equal(grown, short):
                break
            short = grown
        else:
            raise InternalError("payment descent did not settle")
        x = assets_x(net, p, V)
        promote = rest & np.where(b == 1, x >= l - tol, y >= l - tol)
        if not promote.any():
            return _finish(net, p, V, tol)
        solvent |= promote
    raise InternalError("solvency-set ascent oscillated")


@dataclass(frozen=True)
class RegimeFixpoints:
    b: RegimeVector
    p_min: np.ndarray
    V_min: np.ndarray
    p_max: np.ndarray
    V_max: np.ndarray
    exists: bool = True

    @property
    def unique_hint(self) -> bool:
        return bool(np.max(np.abs(self.p_max - self.p_min), initial=0.0) <= DEFAULT_TOL)


def regime_fixpoints(net: FinancialNetwork, b, tol: float = DEFAULT_TOL) -> RegimeFixpoints:
    b = as_regime(b, net.n)
    lo = min_fixpoint(net, b, tol)
    hi = max_fixpoint(net, b, tol)
    if np.any(lo.p > hi.p + 10 * tol):
        raise InternalError(f"p_min > p_max for regime {tuple(b)}")
    return RegimeFixpoints(tuple(int(v) for v in b), lo.p, lo.V, hi.p, hi.V)


@dataclass
class ClearingSet:
    entries: list[RegimeFixpoints]
    vectors: list[ClearingPair] = field(default_factory=list)
    global_min: ClearingPair | None = None
    global_max: ClearingPair | None = None

    def __len__(self):
        return len(self.vectors)


def _worker(args):
    net, b, tol = args
    return regime_fixpoints(net, b, tol)


def enumerate_clearing_set(net: FinancialNetwork, n_cap: int = 16, tol: float = DEFAULT_TOL,
                           workers: int = 1) -> ClearingSet:
    """Extremal fixpoints of every ``F_b`` over ``b`` in lexicographic order.

    Every recorded vector is checked against the clearing axioms; identical vectors
    (sup-norm distance within ``10 * tol``) are reported once in ``vectors``.
    """
    n = net.n
    if n > n_cap:
        raise PreconditionError(f"enumeration over 2^{n} regimes exceeds the cap n <= {n_cap}")
    regimes = list(itertools.product((0, 1), repeat=n))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(_worker, [(net, b, tol) for b in regimes], chunksize=32))
    else:
        entries = [regime_fixpoints(net, b, tol) for b in regimes]

    found = np.empty((0, n))
    vectors: list[ClearingPair] = []
    for entry in entries:
        for p, V in ((entry.p_min, entry.V_min), (entry.p_max, entry.V_max)):
            if found.shape[0] and np.min(np.max(np.abs(found - p), axis=1)) <= 10 * tol:
                continue
            pair = clearing_pair(net, p, V, tol)
            report = verify_clearing_pair(net, pair, 10 * tol)
            if not report.overall:
                raise InternalError(f"regime {entry.b} produced a non-clearing vector: "
                                    + "; ".join(report.failures()))
            vectors.append(pair)
            found = np.vstack([found, p])

    first, last = entries[0], entries[-1]
    return ClearingSet(
        entries=entries,
        vectors=vectors,
        global_min=clearing_pair(net, first.p_min, first.V_min, tol),
        global_max=clearing_pair(net, last.p_max, last.V_max, tol),
    )


def extreme_pairs(net: FinancialNetwork, tol: float = DEFAULT_TOL) -> tuple[ClearingPair, ClearingPair]:
    """``(minimal, maximal)`` clearing pairs: minimal fixpoint of ``F_0``, maximal of ``F_1``."""
    return min_fixpoint(net, 0, tol), max_fixpoint(net, 1, tol)
