"""Cross-method comparison of clearing pairs."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ClearnetError
from .fixpoint import enumerate_clearing_set, max_fixpoint, min_fixpoint
from .gaussian import gaussian_max_clearing
from .milp.clearing import ObjectiveWeights, maximal_pair_via_milp, minimal_pair_via_milp
from .network import DEFAULT_TOL, ClearingPair, FinancialNetwork

REPORT_TOL = 1e-6


@dataclass
class MethodResult:
    method: str
    side: str                 # "max" or "min"
    pair: ClearingPair | None
    seconds: float
    note: str = ""

    def to_dict(self) -> dict:
        out = {"method": self.method, "side": self.side, "seconds": self.seconds}
        if self.pair is not None:
            out.update(p=self.pair.p.tolist(), V=self.pair.V.tolist(),
                       default_set=list(self.pair.default_set))
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class ComparisonReport:
    results: list[MethodResult]
    deltas: dict[tuple[str, str], float] = field(default_factory=dict)
    tol: float = REPORT_TOL

    @property
    def agree(self) -> bool:
        return all(d <= self.tol for d in self.deltas.values())

    def to_dict(self) -> dict:
        return {
            "agree": self.agree,
            "tol": self.tol,
            "methods": [r.to_dict() for r in self.results],
            "deltas": [{"a": a, "b": b, "sup_norm": d} for (a, b), d in self.deltas.items()],
        }


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def _sup(a: ClearingPair, b: ClearingPair) -> float:
    return float(max(np.max(np.abs(a.p - b.p)), np.max(np.abs(a.V - b.V))))


def compare_methods(net: FinancialNetwork, weights: ObjectiveWeights | None = None,
                    tol: float = DEFAULT_TOL, max_n: int = 16,
                    report_tol: float = REPORT_TOL) -> ComparisonReport:
    """Run every applicable method and compare the maximal and minimal pairs.

    Maximal side: fixpoint, MILP P1, Gaussian elimination (equal recovery
    fractions and ``||Theta||_inf < 1`` only) and enumeration (``n <= max_n``).
    Minimal side: fixpoint, enumeration, and MILP P2 when its equality flag is
    set; otherwise P2 is reported but left out of the deltas.
    """
    results: list[MethodResult] = []

    pair, dt = _timed(lambda: max_fixpoint(net, 1, tol))
    results.append(MethodResult("fixpoint", "max", pair, dt))
    pair, dt = _timed(lambda: min_fixpoint(net, 0, tol))
    results.append(MethodResult("fixpoint", "min", pair, dt))

    pair, dt = _timed(lambda: maximal_pair_via_milp(net, weights))
    results.append(MethodResult("milp-P1", "max", pair, dt))
    (pair, flag), dt = _timed(lambda: minimal_pair_via_milp(net, weights))
    results.append(MethodResult("milp-P2", "min", pair, dt,
                                "" if flag else "boundary case: lower bound only"))

    if net.uniform_charges and net.strictly_substochastic_holdings:
        pair, dt = _timed(lambda: gaussian_max_clearing(net, tol))
        results.append(MethodResult("gaussian", "max", pair, dt))

    if net.n <= max_n:
        cs, dt = _timed(lambda: enumerate_clearing_set(net, max_n, tol))
        results.append(MethodResult("enumeration", "max", cs.global_max, dt))
        results.append(MethodResult("enumeration", "min", cs.global_min, dt))

    deltas = {}
    for side in ("max", "min"):
        group = [r for r in results if r.side == side and r.pair is not None and not r.note]
        for a, b in itertools.combinations(group, 2):
            deltas[(f"{a.method}:{side}", f"{b.method}:{side}")] = _sup(a.pair, b.pair)
    return ComparisonReport(results, deltas, report_tol)


__all__ = ["ComparisonReport", "MethodResult", "compare_methods", "REPORT_TOL", "ClearnetError"]
