"""Interbank network model: data, asset evaluators and the clearing-pair axioms.

A network of ``n`` banks is described by

* ``cash`` -- external assets ``e``,
* ``liabilities`` -- nominal interbank debts ``L[i, j]`` owed by bank ``i`` to bank ``j``,
* ``holdings`` -- cross-holdings ``Theta[i, j]``, the share of bank ``i`` owned by bank ``j``,
* ``alpha``, ``beta``, ``gamma`` -- recovery fractions applied on default to cash,
  collected interbank payments and the value of held shares respectively.

Everything downstream works with the transposed matrices, so that
``x(p, V) = e + Pi' p + Theta' V`` is the total asset value of each bank.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import warnings

import numpy as np
import scipy.linalg

from .errors import ValidationError

DEFAULT_TOL = 1e-9
"""Absolute tolerance on money amounts used by every equality/inequality test."""

PIVOT_THRESHOLD = 1e-12
"""Smallest admissible LU pivot magnitude when testing ``I - Theta'`` for singularity."""


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _as_matrix(value: Any, n: int, name: str) -> np.ndarray:
    """Decode a dense array-of-arrays or a list of ``{from, to, amount}`` triplets."""
    if value is None:
        return np.zeros((n, n))
    if isinstance(value, np.ndarray):
        out = np.array(value, dtype=float)
    elif len(value) > 0 and isinstance(value[0], Mapping):
        out = np.zeros((n, n))
        for k, entry in enumerate(value):
            try:
                i, j, amount = int(entry["from"]), int(entry["to"]), float(entry["amount"])
            except (KeyError, TypeError, ValueError) as exc:
                raise ValidationError(f"{name}[{k}]: malformed triplet {entry!r}") from exc
            if not (0 <= i < n and 0 <= j < n):
                raise ValidationError(f"{name}[{k}]: index out of range for n={n}")
            out[i, j] += amount
    elif len(value) == 0:
        out = np.zeros((n, n))
    else:
        try:
            out = np.array(value, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"{name}: not a numeric matrix") from exc
    if out.shape != (n, n):
        raise ValidationError(f"{name}: expected shape ({n}, {n}), got {out.shape}")
    return out


def relative_liabilities(liabilities: np.ndarray) -> np.ndarray:
    """Row-normalise the liability matrix; debt-free banks get a unit row on the diagonal."""
    liabilities = np.asarray(liabilities, dtype=float)
    totals = liabilities.sum(axis=1)
    pi = np.eye(liabilities.shape[0])
    owing = totals > 0
    pi[owing] = liabilities[owing] / totals[owing, None]
    return pi


def _check_invertible(theta: np.ndarray) -> float:
    """Return the smallest |pivot| of the LU factorisation of ``I - Theta'``."""
    n = theta.shape[0]
    with warnings.catch_warnings():
        # an exactly singular matrix is what we are testing for
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, _ = scipy.linalg.lu_factor(np.eye(n) - theta.T, check_finite=True)
    return float(np.min(np.abs(np.diag(lu)))) if n else 1.0


@dataclass(frozen=True)
class FinancialNetwork:
    cash: np.ndarray
    liabilities: np.ndarray
    holdings: np.ndarray
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 1.0
    totals: np.ndarray = field(init=False, repr=False)
    relative: np.ndarray = field(init=False, repr=False)
    holdings_norm: float = field(init=False, repr=False)

    def __post_init__(self):
        cash = np.atleast_1d(np.asarray(self.cash, dtype=float))
        if cash.ndim != 1 or cash.size == 0:
            raise ValidationError("cash: expected a non-empty vector")
        n = cash.size
        liab = _as_matrix(self.liabilities, n, "liabilities")
        theta = _as_matrix(self.holdings, n, "holdings")

        for name, arr in (("cash", cash), ("liabilities", liab), ("holdings", theta)):
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"{name}: non-finite entries")
            if np.any(arr < 0):
                idx = tuple(int(k) for k in np.argwhere(arr < 0)[0])
                raise ValidationError(f"{name}: negative entry at {idx}")
        diag = np.flatnonzero(np.diag(liab) != 0)
        if diag.size:
            raise ValidationError(f"liabilities: nonzero self-debt on the diagonal at row {int(diag[0])}")
        for name in ("alpha", "beta", "gamma"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name}={value} outside [0, 1]")
            object.__setattr__(self, name, value)

        row_sums = theta.sum(axis=1)
        bad = np.flatnonzero(row_sums > 1.0 + 1e-12)
        if bad.size:
            i = int(bad[0])
            raise ValidationError(f"holdings: row {i} sums to {row_sums[i]:.6g} > 1")
        if _check_invertible(theta) < PIVOT_THRESHOLD:
            raise ValidationError("holdings: I - Theta' is singular (1 is an eigenvalue of Theta)")

        object.__setattr__(self, "cash", _freeze(cash))
        object.__setattr__(self, "liabilities", _freeze(liab))
        object.__setattr__(self, "holdings", _freeze(theta))
        object.__setattr__(self, "totals", _freeze(liab.sum(axis=1)))
        object.__setattr__(self, "relative", _freeze(relative_liabilities(liab)))
        object.__setattr__(self, "holdings_norm", float(row_sums.max()) if n else 0.0)

    @property
    def n(self) -> int:
        return self.cash.size

    @property
    def uniform_charges(self) -> bool:
        """True when ``alpha == beta == gamma``."""
        return self.alpha == self.beta == self.gamma

    @property
    def strictly_substochastic_holdings(self) -> bool:
        """``||Theta||_inf < 1``, the stronger condition some solvers need."""
        return self.holdings_norm < 1.0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "cash": self.cash.tolist(),
            "liabilities": self.liabilities.tolist(),
            "holdings": self.holdings.tolist(),
        }


def build_network(raw: Mapping[str, Any]) -> FinancialNetwork:
    """Validate a scenario mapping and build the network.

    ``raw`` needs ``cash`` and ``liabilities``; ``holdings`` defaults to zero and the
    recovery fractions to one. Matrices may be dense or triplet lists. When ``n`` is
    present it must agree with the length of ``cash``.
    """
    if "cash" not in raw:
        raise ValidationError("missing field 'cash'")
    if "liabilities" not in raw:
        raise ValidationError("missing field 'liabilities'")
    cash = np.atleast_1d(np.asarray(raw["cash"], dtype=float))
    if "n" in raw:
        n = raw["n"]
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
            raise ValidationError(f"n must be a positive integer, got {n!r}")
        if cash.size != n:
            raise ValidationError(f"cash has length {cash.size}, expected n={n}")
    n = cash.size
    return FinancialNetwork(
        cash=cash,
        liabilities=_as_matrix(raw["liabilities"], n, "liabilities"),
        holdings=_as_matrix(raw.get("holdings"), n, "holdings"),
        alpha=raw.get("alpha", 1.0),
        beta=raw.get("beta", 1.0),
        gamma=raw.get("gamma", 1.0),
    )


def _check_vectors(net: FinancialNetwork, *vecs: np.ndarray) -> list[np.ndarray]:
    out = []
    for v in vecs:
        v = np.asarray(v, dtype=float)
        if v.shape != (net.n,):
            raise ValueError(f"expected a vector of length {net.n}, got shape {v.shape}")
        out.append(v)
    return out


def assets_x(net: FinancialNetwork, p, V) -> np.ndarray:
    """Total assets ``e + Pi' p + Theta' V``."""
    p, V = _check_vectors(net, p, V)
    return net.cash + net.relative.T @ p + net.holdings.T @ V


def assets_y(net: FinancialNetwork, p, V) -> np.ndarray:
    """Assets left after default charges, ``alpha e + beta Pi' p + gamma Theta' V``."""
    p, V = _check_vectors(net, p, V)
    return (net.alpha * net.cash + net.beta * (net.relative.T @ p)
            + net.gamma * (net.holdings.T @ V))


@dataclass(frozen=True)
class ClearingPair:
    p: np.ndarray
    V: np.ndarray
    d: np.ndarray

    @property
    def default_set(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.d))


def clearing_pair(net: FinancialNetwork, p, V, tol: float = DEFAULT_TOL) -> ClearingPair:
    """Wrap ``(p, V)`` and attach the default indicator ``d = 1{x < l}``."""
    p, V = _check_vectors(net, p, V)
    x = assets_x(net, p, V)
    d = (x < net.totals - tol).astype(int)
    return ClearingPair(_freeze(p), _freeze(V), _freeze(d).astype(int))


@dataclass(frozen=True)
class BankCheck:
    ok: bool
    residual: float
    branch: str = ""


@dataclass(frozen=True)
class AxiomReport:
    limited_liability: tuple[BankCheck, ...]
    absolute_priority: tuple[BankCheck, ...]
    equity_evaluation: tuple[BankCheck, ...]
    bounds_ok: bool = True

    @property
    def overall(self) -> bool:
        return self.bounds_ok and all(
            c.ok for group in (self.limited_liability, self.absolute_priority, self.equity_evaluation)
            for c in group)

    def failures(self) -> list[str]:
        out = [] if self.bounds_ok else ["bounds: p outside [0, l] or V negative"]
        for name in ("limited_liability", "absolute_priority", "equity_evaluation"):
            for i, c in enumerate(getattr(self, name)):
                if not c.ok:
                    out.append(f"{name}[{i}]: residual {c.residual:.3g}")
        return out


def verify_clearing_pair(net: FinancialNetwork, pair, tol: float = DEFAULT_TOL) -> AxiomReport:
    """Check limited liability, absolute priority and equity evaluation bank by bank.

    ``pair`` is a :class:`ClearingPair` or a ``(p, V)`` tuple.
    """
    p, V = (pair.p, pair.V) if isinstance(pair, ClearingPair) else pair
    p, V = _check_vectors(net, p, V)
    l = net.totals
    x = assets_x(net, p, V)
    y = assets_y(net, p, V)
    bounds_ok = bool(np.all(p >= -tol) and np.all(p <= l + tol) and np.all(V >= -tol))

    limited, priority, equity = [], [], []
    for i in range(net.n):
        excess = p[i] - x[i]
        limited.append(BankCheck(bool(excess <= tol), max(excess, 0.0)))

        r_full, r_default = abs(p[i] - l[i]), abs(p[i] - y[i])
        if r_full <= tol:
            priority.append(BankCheck(True, r_full, "full"))
        elif r_default <= tol:
            priority.append(BankCheck(True, r_default, "default"))
        else:
            priority.append(BankCheck(False, min(r_full, r_default), "none"))

        target = x[i] - p[i] if r_full <= tol else 0.0
        r_eq = abs(V[i] - target)
        equity.append(BankCheck(bool(r_eq <= tol), r_eq))
    return AxiomReport(tuple(limited), tuple(priority), tuple(equity), bounds_ok)
