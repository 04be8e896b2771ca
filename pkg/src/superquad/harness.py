"""CLI entry point: verification sweeps, margin-minimization searches and
CSV/JSON reports.

Exit codes: 0 = every evaluated instance holds; 1 = at least one genuine
violation; 2 = no violations but some hypothesis failures; 3 = usage or
configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .bounds import DEFAULT_T, THEOREMS, BoundReport, TheoremInfo
from .functions import (by_spec, check_monotone_convex_positive,
                        check_subquadratic, check_superquadratic,
                        DEFAULT_GRID_SIZE, FunctionModel)
from .sequences import Sequence, arithmetic, geometric, parse_sequence_spec, power

DEFAULT_SEED = 12345
DEFAULT_TOLERANCE = 1e-9
SEED_ENV_VAR = "SUPERQUAD_SEED"

STATUS_HOLDS = "holds"
STATUS_VIOLATED = "violated"
STATUS_PRECONDITION = "precondition_failed"

CSV_COLUMNS = ("theorem_id", "function", "sequence", "n", "t",
               "lhs", "rhs", "margin", "preconds_ok", "status")


@dataclass(frozen=True)
class SweepSpec:
    theorem_ids: tuple
    function_specs: tuple
    sequence_specs: tuple = ()
    n_range: tuple = (2, 10)
    t_values: tuple = (DEFAULT_T,)
    seed: int = DEFAULT_SEED
    tolerance: float = DEFAULT_TOLERANCE


@dataclass(frozen=True)
class SweepRow:
    theorem_id: str
    function: str
    sequence: str
    n: int
    t: Optional[int]
    lhs: float
    rhs: float
    margin: float
    preconds_ok: bool
    status: str


@dataclass
class SweepResult:
    rows: list
    counts: dict
    warnings: list = field(default_factory=list)
    min_margin_row: Optional[SweepRow] = None


def _margin_scale(lhs: float, rhs: float) -> float:
    vals = [1.0]
    if math.isfinite(lhs):
        vals.append(abs(lhs))
    if math.isfinite(rhs):
        vals.append(abs(rhs))
    return max(vals)


def _evaluate_instance(info: TheoremInfo, f: FunctionModel,
                       factory: Optional[Callable], n: int,
                       t: Optional[int]) -> BoundReport:
    seq = factory(n + 1) if factory is not None else None
    return info.evaluate(f, seq, n, t)


def _row_from_report(report: BoundReport, fspec: str, seqspec: str, n: int,
                     t: Optional[int], status: str) -> SweepRow:
    return SweepRow(report.theorem_id, fspec, seqspec, n, t,
                    report.lhs, report.rhs, report.margin,
                    report.preconds_ok, status)


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every requested (theorem, function, sequence, n, t) tuple.

    Deterministic for a fixed spec: tuples are visited in order and rows
    are stably sorted by (theorem_id, n).  A candidate violation is
    re-evaluated once before being reported as such.
    """
    rows: list = []
    warnings: list = []
    lo_req, hi_req = spec.n_range
    for tid in spec.theorem_ids:
        info = THEOREMS.get(tid)
        if info is None:
            raise ValueError(f"unknown theorem id {tid!r} "
                             f"(known: {', '.join(sorted(THEOREMS))})")
        lo = lo_req
        if lo < info.n_min:
            warnings.append(f"{tid}: n range clipped to start at {info.n_min}")
            lo = info.n_min
        t_list = spec.t_values if info.uses_t else (None,)
        if info.needs_sequence:
            if not spec.sequence_specs:
                raise ValueError(f"theorem {tid} needs at least one sequence spec")
            seq_list = spec.sequence_specs
        else:
            seq_list = ("-",)
        for fspec in spec.function_specs:
            f = by_spec(fspec)
            flags_ok = info.required_flags <= f.declared_flags
            for seqspec in seq_list:
                factory = parse_sequence_spec(seqspec)[1] if seqspec != "-" else None
                for n in range(lo, hi_req + 1):
                    for t in t_list:
                        if not flags_ok:
                            rows.append(SweepRow(tid, fspec, seqspec, n, t,
                                                 math.nan, math.nan, math.nan,
                                                 False, STATUS_PRECONDITION))
                            continue
                        report = _evaluate_instance(info, f, factory, n, t)
                        tol = spec.tolerance * _margin_scale(report.lhs, report.rhs)
                        if not report.preconds_ok:
                            status = STATUS_PRECONDITION
                        elif report.margin < -tol:
                            # re-evaluate before declaring a genuine violation
                            report = _evaluate_instance(info, f, factory, n, t)
                            status = (STATUS_VIOLATED if report.margin < -tol
                                      else STATUS_HOLDS)
                        else:
                            status = STATUS_HOLDS
                        rows.append(_row_from_report(report, fspec, seqspec, n, t, status))
    rows.sort(key=lambda r: (r.theorem_id, r.n))
    counts = {
        STATUS_HOLDS: sum(r.status == STATUS_HOLDS for r in rows),
        STATUS_VIOLATED: sum(r.status == STATUS_VIOLATED for r in rows),
        STATUS_PRECONDITION: sum(r.status == STATUS_PRECONDITION for r in rows),
    }
    evaluated = [r for r in rows if r.preconds_ok and math.isfinite(r.margin)]
    best = min(evaluated, key=lambda r: r.margin, default=None)
    return SweepResult(rows, counts, warnings, best)


# ------------------------------ reporting ------------------------------

def _float_repr(x) -> str:
    if x is None:
        return ""
    return f"{float(x):.17g}"


def emit_report(result: SweepResult, format: str, path: str) -> None:
    """Write rows to ``path``; CSV columns are fixed, JSON mirrors them."""
    rows = result.rows
    try:
        if format == "csv":
            with open(path, "w", newline="", encoding="utf-8") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for r in rows:
                    writer.writerow([
                        r.theorem_id, r.function, r.sequence, r.n,
                        "" if r.t is None else r.t,
                        _float_repr(r.lhs), _float_repr(r.rhs), _float_repr(r.margin),
                        "true" if r.preconds_ok else "false", r.status,
                    ])
        elif format == "json":
            payload = [{
                "theorem_id": r.theorem_id,
                "function": r.function,
                "sequence": r.sequence,
                "n": r.n,
                "t": r.t,
                "lhs": float(r.lhs) if math.isfinite(r.lhs) else None,
                "rhs": float(r.rhs) if math.isfinite(r.rhs) else None,
                "margin": float(r.margin) if math.isfinite(r.margin) else None,
                "preconds_ok": r.preconds_ok,
                "status": r.status,
            } for r in rows]
            with open(path, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=1)
                fh.write("\n")
        else:
            raise ValueError(f"unknown report format {format!r}")
    except OSError as exc:
        raise OSError(f"cannot write report to {path!r}: {exc}") from exc


def exit_code_for(result: SweepResult) -> int:
    if result.counts[STATUS_VIOLATED]:
        return 1
    if result.counts[STATUS_PRECONDITION]:
        return 2
    return 0


# ------------------------------- search -------------------------------

@dataclass
class SearchResult:
    theorem_id: str
    best_margin: float
    best_params: dict
    iterations: int
    converged: bool
    note: str = ""


_FAMILY_PARAM_RANGES = {
    "arithmetic": {"start": (0.1, 5.0), "step": (0.02, 3.0)},
    "geometric": {"start": (0.1, 5.0), "ratio": (1.001, 2.0)},
    "power": {"exponent": (0.3, 3.0)},
}


def _build_family_sequence(family: str, params: dict, length: int) -> Sequence:
    if family == "arithmetic":
        return arithmetic(params["start"], params["step"], length)
    if family == "geometric":
        return geometric(params["start"], params["ratio"], length)
    if family == "power":
        return power(params["exponent"], length)
    raise ValueError(f"unknown family {family!r}")


def minimize_margin(theorem_id: str, f: FunctionModel, seed: int = DEFAULT_SEED,
                    restarts: int = 10, budget: int = 2000,
                    tolerance: float = DEFAULT_TOLERANCE,
                    n_max: int = 100) -> SearchResult:
    """Coordinate descent with random restarts over the generator-parameter
    space of admissible sequences (plus n), minimizing the theorem margin.

    Candidates whose hypotheses fail are rejected.  A negative best margin
    is only reported after the winning configuration re-evaluates negative
    standalone; otherwise the result is flagged as not converged.
    """
    info = THEOREMS.get(theorem_id)
    if info is None:
        raise ValueError(f"unknown theorem id {theorem_id!r}")
    missing = info.required_flags - f.declared_flags
    if missing:
        raise ValueError(f"model {f.name!r} lacks flags {sorted(missing)} "
                         f"required by {theorem_id}")
    rng = np.random.default_rng(seed)
    evals = 0
    best_margin = math.inf
    best_params: Optional[dict] = None

    def evaluate(family: Optional[str], params: dict, n: int) -> Optional[float]:
        nonlocal evals
        if evals >= budget:
            return None
        evals += 1
        try:
            seq = (_build_family_sequence(family, params, n + 1)
                   if family is not None else None)
            report = info.evaluate(f, seq, n, DEFAULT_T)
        except (ValueError, IndexError):
            return None
        if not report.preconds_ok:
            return None
        return report.margin

    def consider(margin: Optional[float], family, params, n):
        nonlocal best_margin, best_params
        if margin is not None and margin < best_margin:
            best_margin = margin
            best_params = {"family": family, "n": n, **params}

    if not info.needs_sequence:
        n = info.n_min
        while evals < budget and n <= max(n_max, info.n_min):
            margin = evaluate(None, {}, n)
            consider(margin, None, {}, n)
            n += 1
    else:
        families = sorted(_FAMILY_PARAM_RANGES)
        for _ in range(max(1, restarts)):
            if evals >= budget:
                break
            # redraw until a hypothesis-satisfying starting point is found
            current = None
            while current is None and evals < budget:
                family = families[int(rng.integers(len(families)))]
                ranges = _FAMILY_PARAM_RANGES[family]
                params = {k: float(rng.uniform(*bounds)) for k, bounds in ranges.items()}
                n = int(rng.integers(max(2, info.n_min), max(3, n_max // 3)))
                current = evaluate(family, params, n)
            consider(current, family, params, n)
            scale = 0.5
            while current is not None and scale > 1e-3 and evals < budget:
                improved = False
                for key, bounds in ranges.items():
                    for factor in (1.0 + scale, 1.0 / (1.0 + scale)):
                        cand = dict(params)
                        cand[key] = float(np.clip(params[key] * factor, *bounds))
                        margin = evaluate(family, cand, n)
                        consider(margin, family, cand, n)
                        if margin is not None and margin < (current - 1e-15):
                            params, current, improved = cand, margin, True
                for dn in (1, -1, 5, -5):
                    n2 = n + dn
                    if n2 < max(2, info.n_min) or n2 > n_max:
                        continue
                    margin = evaluate(family, params, n2)
                    consider(margin, family, params, n2)
                    if margin is not None and margin < (current - 1e-15):
                        n, current, improved = n2, margin, True
                if not improved:
                    scale /= 2.0
    if best_params is None:
        raise RuntimeError(f"search budget exhausted without any valid "
                           f"configuration for {theorem_id}")

    # standalone re-evaluation of the winner at full precision
    family = best_params["family"]
    fam_params = {k: v for k, v in best_params.items() if k not in ("family", "n")}
    seq = (_build_family_sequence(family, fam_params, best_params["n"] + 1)
           if family is not None else None)
    recheck = info.evaluate(f, seq, best_params["n"], DEFAULT_T)
    converged = True
    note = ""
    tol = tolerance * _margin_scale(recheck.lhs, recheck.rhs)
    if best_margin < -tol and recheck.margin >= -tol:
        converged = False
        note = (f"search margin {best_margin:.6g} did not reproduce on "
                f"re-evaluation ({recheck.margin:.6g})")
    best_margin = recheck.margin
    return SearchResult(theorem_id, best_margin, best_params, evals, converged, note)


# --------------------------------- CLI ---------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(3)


def _parse_n_range(text: str) -> tuple:
    lo, sep, hi = text.partition("..")
    try:
        if sep:
            return int(lo), int(hi)
        return int(lo), int(lo)
    except ValueError:
        raise ValueError(f"bad n range {text!r}; expected e.g. 5 or 2..100") from None


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))


def _split(text: str) -> tuple:
    return tuple(part for part in text.split(",") if part)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="superquad",
                     description="Verify, certify and stress-test refinement "
                                 "bounds between discrete averages.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="sweep theorem bounds over a grid")
    p_verify.add_argument("--theorems", required=True,
                          help="comma-separated theorem ids, e.g. T1,T2")
    p_verify.add_argument("--functions", required=True,
                          help="comma-separated function specs, e.g. pow:2,pow:3")
    p_verify.add_argument("--sequences", default="",
                          help="comma-separated sequence specs, e.g. arith:1,1|geom:1,1.5 "
                               "(use | between specs because ',' is part of a spec)")
    p_verify.add_argument("--n", default="2..10", help="n range, e.g. 2..100")
    p_verify.add_argument("--t", default=str(DEFAULT_T),
                          help="comma-separated t values for t-indexed bounds")
    p_verify.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE,
                          help="relative violation tolerance")
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--out", default="report.csv")
    p_verify.add_argument("--format", choices=("csv", "json"), default="csv")
    p_verify.set_defaults(func=_cmd_verify)

    p_certify = sub.add_parser("certify", help="grid-certify one class of one function")
    p_certify.add_argument("--function", required=True)
    p_certify.add_argument("--class", dest="class_name", required=True,
                           choices=("superquadratic", "subquadratic",
                                    "increasing", "convex", "positive"))
    p_certify.add_argument("--grid", type=int, default=DEFAULT_GRID_SIZE)
    p_certify.set_defaults(func=_cmd_certify)

    p_search = sub.add_parser("search", help="minimize a theorem margin")
    p_search.add_argument("--theorem", required=True)
    p_search.add_argument("--function", required=True)
    p_search.add_argument("--restarts", type=int, default=10)
    p_search.add_argument("--budget", type=int, default=2000)
    p_search.add_argument("--seed", type=int, default=None)
    p_search.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE)
    p_search.set_defaults(func=_cmd_search)
    return parser


def _cmd_verify(args) -> int:
    seq_specs = tuple(s for s in args.sequences.split("|") if s) if args.sequences else ()
    spec = SweepSpec(
        theorem_ids=_split(args.theorems),
        function_specs=_split(args.functions),
        sequence_specs=seq_specs,
        n_range=_parse_n_range(args.n),
        t_values=tuple(int(v) for v in _split(args.t)),
        seed=args.seed if args.seed is not None else _default_seed(),
        tolerance=args.tolerance,
    )
    result = run_sweep(spec)
    emit_report(result, args.format, args.out)
    for warning in result.warnings:
        print(f"warning: {warning}")
    print(f"{len(result.rows)} instances -> "
          f"{result.counts[STATUS_HOLDS]} hold, "
          f"{result.counts[STATUS_VIOLATED]} violated, "
          f"{result.counts[STATUS_PRECONDITION]} hypothesis failures; "
          f"report written to {args.out}")
    if result.min_margin_row is not None:
        r = result.min_margin_row
        print(f"tightest instance: {r.theorem_id} f={r.function} seq={r.sequence} "
              f"n={r.n} margin={r.margin:.6g}")
    return exit_code_for(result)


def _cmd_certify(args) -> int:
    f = by_spec(args.function)
    if args.class_name == "superquadratic":
        cert = check_superquadratic(f, grid_size=args.grid)
    elif args.class_name == "subquadratic":
        cert = check_subquadratic(f, grid_size=args.grid)
    else:
        cert = check_monotone_convex_positive(f, grid_size=args.grid)[args.class_name]
    verdict = "PASS" if cert.passed else "FAIL"
    print(f"{verdict} {f.name} {cert.class_checked}: worst margin "
          f"{cert.worst_margin:.6g} on grid {cert.grid_size} "
          f"(tol {cert.tol_abs:g})")
    if not cert.passed and cert.witness:
        print(f"  witness: {cert.witness[0]}")
    for note in cert.notes:
        print(f"  note: {note}")
    return 0 if cert.passed else 1


def _cmd_search(args) -> int:
    f = by_spec(args.function)
    seed = args.seed if args.seed is not None else _default_seed()
    result = minimize_margin(args.theorem, f, seed=seed, restarts=args.restarts,
                             budget=args.budget, tolerance=args.tolerance)
    print(f"{result.theorem_id}: best margin {result.best_margin:.9g} after "
          f"{result.iterations} evaluations (converged={result.converged})")
    print(f"  at {result.best_params}")
    if result.note:
        print(f"  note: {result.note}")
    return 0 if result.best_margin >= -args.tolerance else 1


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
