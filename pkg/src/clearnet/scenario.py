"""Scenario files: JSON ingestion, serialisation and a seeded random generator.

A scenario is a JSON object with keys ``n``, ``alpha``, ``beta``, ``gamma``,
``cash``, ``liabilities``, ``holdings`` and optionally ``name``, ``description``
and ``seed``. Matrices are either dense arrays of rows or lists of
``{"from": i, "to": j, "amount": a}`` triplets with 0-based indices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .network import FinancialNetwork, build_network

NETWORK_KEYS = ("n", "alpha", "beta", "gamma", "cash", "liabilities", "holdings")
META_KEYS = ("name", "description", "seed")
HOLDINGS_CAP = 0.9


@dataclass(frozen=True)
class Scenario:
    network: FinancialNetwork
    name: str = ""
    description: str = ""
    seed: int | None = None

    def to_dict(self) -> dict:
        out = {}
        if self.name:
            out["name"] = self.name
        if self.description:
            out["description"] = self.description
        if self.seed is not None:
            out["seed"] = self.seed
        out.update(self.network.to_dict())
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def dump(self, path) -> None:
        Path(path).write_text(self.dumps())


def from_mapping(raw) -> Scenario:
    if not isinstance(raw, dict):
        raise ValidationError(f"scenario must be a JSON object, got {type(raw).__name__}")
    unknown = sorted(set(raw) - set(NETWORK_KEYS) - set(META_KEYS))
    if unknown:
        raise ValidationError(f"unknown field {unknown[0]!r}")
    for key in ("alpha", "beta", "gamma"):
        if key in raw and (isinstance(raw[key], bool) or not isinstance(raw[key], (int, float))):
            raise ValidationError(f"field {key!r} must be a number, got {raw[key]!r}")
    for key in ("name", "description"):
        if key in raw and not isinstance(raw[key], str):
            raise ValidationError(f"field {key!r} must be a string")
    seed = raw.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ValidationError(f"field 'seed' must be an integer, got {seed!r}")
    try:
        net = build_network(raw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed network data: {exc}") from exc
    return Scenario(net, raw.get("name", ""), raw.get("description", ""), seed)


def loads(text: str, source: str = "<string>") -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return from_mapping(raw)


def ingest(path) -> Scenario:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return loads(text, str(path))


def gen_random_network(seed: int, n: int, density: float = 0.5, shock: float = 0.0,
                       alpha: float | None = None) -> Scenario:
    """Seeded random scenario.

    Liabilities are uniform on [0, 10] with Bernoulli(``density``) sparsity and a
    zero diagonal. Cross-holdings share the sparsity pattern and each row is
    rescaled to a random total in [0, 0.9]. Cash is uniform on [0, 5] scaled by
    ``1 - shock``. The recovery fractions are equal, drawn uniformly from (0, 1]
    unless ``alpha`` fixes them.
    """
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < density <= 1.0:
        raise ValidationError(f"density must lie in (0, 1], got {density}")
    if not 0.0 <= shock <= 1.0:
        raise ValidationError(f"shock must lie in [0, 1], got {shock}")
    if alpha is not None and not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha}")
    rng = np.random.default_rng(seed)
    off_diag = ~np.eye(n, dtype=bool)
    L = rng.uniform(0.0, 10.0, (n, n)) * (rng.random((n, n)) < density) * off_diag
    theta = rng.random((n, n)) * (rng.random((n, n)) < density) * off_diag
    rows = theta.sum(axis=1)
    target = rng.uniform(0.0, HOLDINGS_CAP, n)
    theta = theta / np.where(rows > 0, rows, 1.0)[:, None] * target[:, None]
    cash = rng.uniform(0.0, 5.0, n) * (1.0 - shock)
    a = float(1.0 - rng.random()) if alpha is None else float(alpha)
    net = FinancialNetwork(cash, L, theta, a, a, a)
    return Scenario(net, name=f"random-n{n}-seed{seed}", seed=int(seed))
