"""Command-line front end.

    clearnet <command> --input FILE [--format json|table] [--tol X]
             [--weights f1,f2,f3] [--max-n K] [--seed S] [--output FILE]

Exit codes: 0 success, 2 invalid input, 3 unmet solver precondition,
4 internal failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any

import numpy as np

from .compare import compare_methods
from .equity import compute_bounds
from .errors import ClearnetError, ValidationError
from .fixpoint import enumerate_clearing_set, max_fixpoint, min_fixpoint
from .gaussian import gaussian_reduction
from .milp.clearing import ObjectiveWeights, build_P1, maximal_pair_via_milp, minimal_pair_via_milp
from .milp.mps import write_mps
from .network import DEFAULT_TOL, ClearingPair
from .scenario import Scenario, gen_random_network, ingest

COMMANDS = ("validate", "max", "min", "enumerate", "milp-max", "milp-min", "gauss", "compare", "gen")
DIGITS = 9


def _round(obj: Any) -> Any:
    """Round every float in a JSON-like structure to ``DIGITS`` significant digits."""
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.{DIGITS}g}")
    return obj


def _pair(pair: ClearingPair) -> dict:
    return {"p": pair.p.tolist(), "V": pair.V.tolist(), "default_set": list(pair.default_set)}


def parse_weights(text: str | None, n: int) -> ObjectiveWeights | None:
    if text is None:
        return None
    try:
        parts = [float(s) for s in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"--weights: expected three numbers f1,f2,f3, got {text!r}") from exc
    if len(parts) != 3:
        raise ValidationError(f"--weights: expected three numbers f1,f2,f3, got {text!r}")
    return ObjectiveWeights.uniform(n, *parts)


def run_command(cmd: str, scenario: Scenario | None, flags: argparse.Namespace) -> dict:
    """Dispatch ``cmd`` and return a JSON-ready report."""
    tol = flags.tol
    if cmd == "gen":
        if flags.seed is None or flags.n is None:
            raise ValidationError("gen needs --seed and --n")
        sc = gen_random_network(flags.seed, flags.n, flags.density, flags.shock, flags.alpha)
        return {"command": cmd, "scenario": sc.to_dict()}

    net = scenario.network
    head = {"command": cmd, "name": scenario.name, "n": net.n}
    if cmd == "validate":
        bounds = compute_bounds(net)
        return {**head, "valid": True, "alpha": net.alpha, "beta": net.beta, "gamma": net.gamma,
                "uniform_charges": net.uniform_charges, "holdings_norm": net.holdings_norm,
                "kappa": bounds.kappa, "kappa1": bounds.kappa1}
    if cmd == "max":
        return {**head, "method": "fixpoint", **_pair(max_fixpoint(net, 1, tol))}
    if cmd == "min":
        return {**head, "method": "fixpoint", **_pair(min_fixpoint(net, 0, tol))}
    if cmd == "enumerate":
        cs = enumerate_clearing_set(net, flags.max_n, tol, workers=flags.workers)
        return {**head,
                "regimes": [{"b": list(e.b), "p_min": e.p_min.tolist(), "p_max": e.p_max.tolist()}
                            for e in cs.entries],
                "vectors": [_pair(v) for v in cs.vectors],
                "global_min": _pair(cs.global_min), "global_max": _pair(cs.global_max)}
    weights = parse_weights(flags.weights, net.n)
    if cmd == "milp-max":
        if flags.export_mps:
            write_mps(build_P1(net, weights), flags.export_mps)
        pair, sol = maximal_pair_via_milp(net, weights, return_solution=True)
        return {**head, "method": "milp-P1", **_pair(pair), "nodes": sol.nodes,
                "lemma_checks": sol.lemma_checks}
    if cmd == "milp-min":
        pair, flag, sol = minimal_pair_via_milp(net, weights, return_solution=True)
        return {**head, "method": "milp-P2", **_pair(pair), "equality_flag": flag,
                "nodes": sol.nodes, "lemma_checks": sol.lemma_checks}
    if cmd == "gauss":
        res = gaussian_reduction(net, tol)
        return {**head, "method": "gaussian", **_pair(res.pair), "eliminated": list(res.eliminated)}
    if cmd == "compare":
        report = compare_methods(net, weights, tol, flags.max_n)
        return {**head, **report.to_dict()}
    raise ValidationError(f"unknown command {cmd!r}")


def _table(report: dict) -> str:
    if report["command"] == "gen":
        return json.dumps(report["scenario"], indent=2)
    lines = [f"{report['command']}  n={report.get('n')}  {report.get('name', '')}".rstrip()]
    scalars = {k: v for k, v in report.items()
               if k not in ("command", "n", "name") and not isinstance(v, (list, dict))}
    lines += [f"  {k:<16} {v}" for k, v in scalars.items()]

    def bank_rows(pair, title):
        out = [title, f"  {'bank':>4}  {'p':>16}  {'V':>16}  default"]
        for i, (p, V) in enumerate(zip(pair["p"], pair["V"])):
            out.append(f"  {i:>4}  {p:>16.{DIGITS}g}  {V:>16.{DIGITS}g}  {'yes' if i in pair['default_set'] else 'no'}")
        return out

    if "p" in report:
        lines += bank_rows(report, "clearing pair")
    if "lemma_checks" in report:
        lines += [f"  check {k}: {'ok' if v else 'FAILED'}" for k, v in report["lemma_checks"].items()]
    if "vectors" in report:
        lines.append(f"regimes: {len(report['regimes'])}, distinct clearing vectors: {len(report['vectors'])}")
        for v in report["vectors"]:
            lines.append("  p = (" + ", ".join(f"{x:.{DIGITS}g}" for x in v["p"]) + ")")
        lines += bank_rows(report["global_min"], "global minimum")
        lines += bank_rows(report["global_max"], "global maximum")
    if "methods" in report:
        lines.append(f"{'method':<12} {'side':<4} {'seconds':>10}  p")
        for m in report["methods"]:
            p = ", ".join(f"{x:.{DIGITS}g}" for x in m.get("p", []))
            note = f"  [{m['note']}]" if m.get("note") else ""
            lines.append(f"{m['method']:<12} {m['side']:<4} {m['seconds']:>10.4g}  ({p}){note}")
        for d in report["deltas"]:
            lines.append(f"  |{d['a']} - {d['b']}| = {d['sup_norm']:.3g}")
        lines.append("verdict: " + ("agree" if report["agree"] else "DISAGREE"))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clearnet", description="Clearing pairs of interbank networks.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", help="scenario JSON file")
    ap.add_argument("--format", choices=("json", "table"), default="json")
    ap.add_argument("--tol", type=float, default=DEFAULT_TOL, help="absolute tolerance (default 1e-9)")
    ap.add_argument("--weights", help="MILP objective weights f1,f2,f3 (default 1,1,1)")
    ap.add_argument("--max-n", type=int, default=16, help="largest n allowed for enumeration")
    ap.add_argument("--seed", type=int, help="seed for gen")
    ap.add_argument("--output", help="write the report (or the generated scenario) here")
    ap.add_argument("--export-mps", metavar="FILE", help="milp-max: also write P1 as fixed MPS")
    ap.add_argument("--workers", type=int, default=1, help="processes for enumerate")
    gen = ap.add_argument_group("gen")
    gen.add_argument("--n", type=int, help="number of banks")
    gen.add_argument("--density", type=float, default=0.5)
    gen.add_argument("--shock", type=float, default=0.0)
    gen.add_argument("--alpha", type=float, help="fix alpha = beta = gamma instead of drawing it")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if not args.tol > 0:
            raise ValidationError(f"--tol must be positive, got {args.tol}")
        scenario = None
        if args.command != "gen":
            if not args.input:
                raise ValidationError(f"{args.command} needs --input FILE")
            scenario = ingest(args.input)
        report = run_command(args.command, scenario, args)
    except ClearnetError as exc:
        print(f"clearnet: error: {exc}", file=sys.stderr)
        return exc.exit_code

    if args.command == "gen":
        text = json.dumps(report["scenario"], indent=2) + "\n"
    elif args.format == "json":
        text = json.dumps(_round(report), indent=2) + "\n"
    else:
        text = _table(_round(report)) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
