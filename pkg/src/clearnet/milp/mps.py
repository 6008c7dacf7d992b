"""Fixed-format MPS export of a :class:`MilpInstance`, plus a small reader."""

from __future__ import annotations

import numpy as np

from .branch_bound import MilpInstance

OBJ_ROW = "OBJ"


def _num(v: float) -> str:
    """Most accurate rendering of ``v`` that fits a 12-character field.

    Magnitudes below one may drop the leading zero (``.0123``) to gain a digit.
    """
    v = float(v)
    if v == 0.0:
        return "0"
    best, err = None, np.inf
    for digits in range(12, 0, -1):
        s = f"{v:.{digits}g}"
        for cand in (s, s.replace("0.", ".", 1) if s.lstrip("-").startswith("0.") else s):
            if len(cand) <= 12 and abs(float(cand) - v) < err:
                best, err = cand, abs(float(cand) - v)
        if best is not None and err == 0.0:
            break
    if best is None:
        raise ValueError(f"cannot fit {v!r} in 12 characters")
    return best


def _line(f1: str = "", f2: str = "", f3: str = "", f4: str = "", f5: str = "", f6: str = "") -> str:
    # columns 2-3, 5-12, 15-22, 25-36, 40-47, 50-61
    s = f" {f1:<2} {f2:<8}  {f3:<8}  {f4:>12}"
    if f5:
        s += f"   {f5:<8}  {f6:>12}"
    return s.rstrip()


def write_mps(inst: MilpInstance, path=None, name: str | None = None) -> str:
    """Render ``inst`` as fixed MPS; writes to ``path`` when given and returns the text."""
    for label in list(inst.col_names) + list(inst.row_names) + [OBJ_ROW]:
        if len(label) > 8 or " " in label:
            raise ValueError(f"name {label!r} does not fit the fixed MPS layout")
    A, b = inst.A_ub, inst.b_ub
    cost = inst.c if inst.sense == "min" else -inst.c
    out = [f"NAME          {(name or inst.kind or 'CLEARNET')[:8]}"]
    if inst.sense == "max":
        out.append("* objective negated: the original problem maximises")
    out.append("ROWS")
    out.append(_line("N", OBJ_ROW))
    out.extend(_line("L", r) for r in inst.row_names)

    out.append("COLUMNS")
    in_int = False
    for j, col in enumerate(inst.col_names):
        if inst.integer[j] != in_int:
            tag = "INTORG" if inst.integer[j] else "INTEND"
            out.append(_line("", "MARKER", "'MARKER'", "", f"'{tag}'"))
            in_int = bool(inst.integer[j])
        entries = [(OBJ_ROW, cost[j])] if cost[j] != 0 else []
        entries += [(inst.row_names[i], A[i, j]) for i in np.flatnonzero(A[:, j])]
        if not entries:
            entries = [(OBJ_ROW, 0.0)]
        for k in range(0, len(entries), 2):
            pair = entries[k:k + 2]
            if len(pair) == 2:
                out.append(_line("", col, pair[0][0], _num(pair[0][1]), pair[1][0], _num(pair[1][1])))
            else:
                out.append(_line("", col, pair[0][0], _num(pair[0][1])))
    if in_int:
        out.append(_line("", "MARKER", "'MARKER'", "", "'INTEND'"))

    out.append("RHS")
    nz = [(inst.row_names[i], b[i]) for i in np.flatnonzero(b)]
    for k in range(0, len(nz), 2):
        pair = nz[k:k + 2]
        if len(pair) == 2:
            out.append(_line("", "RHS", pair[0][0], _num(pair[0][1]), pair[1][0], _num(pair[1][1])))
        else:
            out.append(_line("", "RHS", pair[0][0], _num(pair[0][1])))

    out.append("BOUNDS")
    for j, col in enumerate(inst.col_names):
        lo, hi = inst.lower[j], inst.upper[j]
        if lo == hi:
            out.append(_line("FX", "BND", col, _num(lo)))
            continue
        if lo != 0.0:
            out.append(_line("MI" if lo == -np.inf else "LO", "BND", col, "" if lo == -np.inf else _num(lo)))
        if np.isfinite(hi):
            out.append(_line("UP", "BND", col, _num(hi)))
    out.append("ENDATA")
    text = "\n".join(out) + "\n"
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def read_mps(text: str) -> dict:
    """Parse fixed MPS text written by :func:`write_mps` (``<=`` rows only).

    Returns ``c`` (minimisation form), ``A``, ``b``, ``lower``, ``upper``,
    ``integer``, ``cols`` and ``rows``.
    """
    rows, cols = [], []
    coef: dict[tuple[str, str], float] = {}
    cost: dict[str, float] = {}
    rhs: dict[str, float] = {}
    bounds: dict[str, list[float]] = {}
    integer: set[str] = set()
    section, in_int, objective = None, False, None
    for raw in text.splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw.startswith(" "):
            section = raw.split()[0]
            continue
        f = raw.split()
        if section == "ROWS":
            if f[0] == "N":
                objective = f[1]
            elif f[0] == "L":
                rows.append(f[1])
            else:
                raise ValueError(f"unsupported row type {f[0]!r}")
        elif section == "COLUMNS":
            if len(f) >= 3 and f[1] == "'MARKER'":
                in_int = f[2] == "'INTORG'"
                continue
            col = f[0]
            if col not in cols:
                cols.append(col)
                bounds[col] = [0.0, np.inf]
            if in_int:
                integer.add(col)
            for r, v in zip(f[1::2], f[2::2]):
                if r == objective:
                    cost[col] = float(v)
                else:
                    coef[(r, col)] = float(v)
        elif section == "RHS":
            for r, v in zip(f[1::2], f[2::2]):
                rhs[r] = float(v)
        elif section == "BOUNDS":
            kind, col = f[0], f[2]
            val = float(f[3]) if len(f) > 3 else None
            if kind == "UP":
                bounds[col][1] = val
            elif kind == "LO":
                bounds[col][0] = val
            elif kind == "MI":
                bounds[col][0] = -np.inf
            elif kind == "FX":
                bounds[col] = [val, val]
            else:
                raise ValueError(f"unsupported bound type {kind!r}")
    ri = {r: i for i, r in enumerate(rows)}
    ci = {c: j for j, c in enumerate(cols)}
    A = np.zeros((len(rows), len(cols)))
    for (r, col), v in coef.items():
        A[ri[r], ci[col]] = v
    return {
        "c": np.array([cost.get(col, 0.0) for col in cols]),
        "A": A,
        "b": np.array([rhs.get(r, 0.0) for r in rows]),
        "lower": np.array([bounds[col][0] for col in cols]),
        "upper": np.array([bounds[col][1] for col in cols]),
        "integer": np.array([col in integer for col in cols]),
        "cols": cols,
        "rows": rows,
    }
