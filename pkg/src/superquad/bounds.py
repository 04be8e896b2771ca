"""One evaluator per theorem: pairs an average-difference LHS with its
printed RHS bound, validating sequence hypotheses along the way.

Sequence hypotheses that fail do NOT abort the evaluation (the report
carries them, so out-of-hypothesis behaviour can be studied); missing
function class flags and domain violations do raise.  Every report records
its orientation: margin = lhs - rhs for lower bounds and rhs - lhs for
upper bounds, so nonnegative always means the inequality holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .averages import (accurate_sum, avg_A, avg_B, diff_D, diff_Delta, diff_E,
                       diff_H, diff_R, scaled_values)
from .functions import (INCREASING, POSITIVE, SUBQUADRATIC, SUPERQUADRATIC,
                        CONVEX, FunctionModel, eval_many)
from .sequences import (ConditionReport, Sequence, cond_B, cond_c_three_seq,
                        cond_III, cond_ratio_le_2, cond_T1,
                        increments_increasing, is_increasing)

DEFAULT_T = 2

LOWER = "lower"
UPPER = "upper"


@dataclass
class BoundReport:
    """One theorem instance: LHS, RHS, signed margin and hypothesis status."""

    theorem_id: str
    lhs: float
    rhs: float
    margin: float
    orientation: str
    preconditions: list = field(default_factory=list)
    params: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def preconds_ok(self) -> bool:
        return all(r.holds for r in self.preconditions)


def _make(theorem_id: str, lhs: float, rhs: float, orientation: str,
          preconditions: list, params: dict, extras: Optional[dict] = None) -> BoundReport:
    margin = (lhs - rhs) if orientation == LOWER else (rhs - lhs)
    return BoundReport(theorem_id, lhs, rhs, margin, orientation,
                       preconditions, params, extras or {})


def _require_flags(f: FunctionModel, flags) -> None:
    missing = sorted(set(flags) - f.declared_flags)
    if missing:
        raise ValueError(f"model {f.name!r} lacks required class flags: {missing}")


def _require_length(a: Sequence, least: int, label: str = "a") -> None:
    if len(a) < least:
        raise ValueError(f"sequence {label} needs at least {least} terms, has {len(a)}")


# ------------------------- fixed-grid average bounds -------------------------

def thmA_lower(f: FunctionModel, n: int) -> BoundReport:
    """Lower bound for the interior-average step A_{n+1} - A_n."""
    if n < 3:
        raise ValueError("A_lower needs n >= 3")
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    lhs = avg_A(f, n + 1).value - avg_A(f, n).value
    rhs = f(1.0 / (3.0 * n)) + f(16.0 / (81.0 * (n + 3)))
    return _make("A_lower", lhs, rhs, LOWER, [], {"n": n, "function": f.name})


def thmB_lower(f: FunctionModel, n: int) -> BoundReport:
    """Lower bound for the endpoint-average step B_{n-1} - B_n."""
    if n < 2:
        raise ValueError("B_lower needs n >= 2")
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    lhs = avg_B(f, n - 1).value - avg_B(f, n).value
    rhs = f(1.0 / (3.0 * n)) + f(16.0 / (81.0 * n))
    return _make("B_lower", lhs, rhs, LOWER, [], {"n": n, "function": f.name})


def thm_upper_A_general(f: FunctionModel, n: int) -> BoundReport:
    """Upper bound for A_{n+1} - A_n; exact (zero margin) for f = x^2."""
    if n < 3:
        raise ValueError("A_upper_gen needs n >= 3")
    _require_flags(f, (SUPERQUADRATIC,))
    lhs = avg_A(f, n + 1).value - avg_A(f, n).value
    r = np.arange(1, n)
    terms = (2.0 * r / (n * (n - 1.0))) * eval_many(f, (n - r - 1.0) / (n + 1.0)) \
        + (1.0 / (n - 1.0)) * eval_many(f, r / n)
    rhs = 0.5 * (f(1.0 / (n + 1)) + f(n / (n + 1.0))) - accurate_sum(terms)
    return _make("A_upper_gen", lhs, rhs, UPPER, [], {"n": n, "function": f.name})


def thm_upper_A_positive(f: FunctionModel, n: int) -> BoundReport:
    """Simplified upper bound for A_{n+1} - A_n for positive models."""
    if n < 3:
        raise ValueError("A_upper_pos needs n >= 3")
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    lhs = avg_A(f, n + 1).value - avg_A(f, n).value
    rhs = 0.5 * (f(1.0 / (n + 1)) + f(n / (n + 1.0))) \
        - (f((n - 2.0) / (3.0 * (n + 1))) + f(0.5))
    return _make("A_upper_pos", lhs, rhs, UPPER, [], {"n": n, "function": f.name})


def thm_upper_B(f: FunctionModel, n: int) -> BoundReport:
    """Upper bound for B_{n-1} - B_n; the (n-3)/n coefficient is evaluated
    exactly as stated, including its negative value at n = 2."""
    if n < 2:
        raise ValueError("B_upper needs n >= 2")
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    lhs = avg_B(f, n - 1).value - avg_B(f, n).value
    rhs = (n - 1.0) / (2.0 * n) * (f(1.0 / (n - 1)) + f(1.0)) \
        - (n - 3.0) / n * f(1.0 / 3.0) - f(0.5)
    return _make("B_upper", lhs, rhs, UPPER, [], {"n": n, "function": f.name})


# --------------------------- sequence-average bounds ---------------------------

def _endpoint_gap_minorant(a: Sequence, n: int,
                           tol_abs: float = 1e-12) -> ConditionReport:
    """Validity condition for the endpoint-gap relaxation used by the
    sequence upper bounds: the mean of 2(a_n - a_i)(a_i - a_1) over
    i = 1..n must dominate 2(a_n - a_{n-1})(a_2 - a_1).

    The products vanish at i = 1 and i = n, so for strictly increasing
    sequences this always fails at n = 2 and often at n = 3; where it
    fails the relaxed bound is not a guaranteed upper bound.
    """
    head = a.head(n)
    mean_products = 2.0 * accurate_sum((a[n] - head) * (head - a[1])) / n
    endpoint_product = 2.0 * (a[n] - a[n - 1]) * (a[2] - a[1])
    slack = mean_products - endpoint_product
    return ConditionReport("endpoint_gap_minorant", slack >= -tol_abs, slack, None, tol_abs)

def remark3_upper(f: FunctionModel, a: Sequence, m: int, n: int) -> BoundReport:
    """Upper bound for the partial sum of f(a_i/a_n), i = 1..m.

    For m = n the report also carries the coarser endpoint-gap relaxation
    and the convexity minorant; ``relaxation_ordered`` flags whether the
    relaxation really sits above the main bound on this instance.
    """
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    _require_length(a, n)
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    if not a[n] > a[1]:
        raise ValueError("a_n must exceed a_1")
    preconds = [is_increasing(a)]
    gap = a[n] - a[1]
    head = a.head(m)
    lhs = accurate_sum(scaled_values(f, a, a[n], m))
    w1 = accurate_sum((a[n] - head) / gap)
    w2 = accurate_sum((head - a[1]) / gap)
    arg_main = accurate_sum(2.0 * (a[n] - head) * (head - a[1]) / (gap * a[n] * m))
    rhs = f(a[1] / a[n]) * w1 + f(1.0) * w2 - m * f(arg_main)
    extras: dict = {}
    if m == n:
        arg_relaxed = 2.0 * (a[n] - a[n - 1]) * (a[2] - a[1]) / (gap * a[n])
        rhs_relaxed = f(a[1] / a[n]) * w1 + f(1.0) * w2 - n * f(arg_relaxed)
        minorant = n * f(accurate_sum(a.head(n)) / (n * a[n]))
        extras = {
            "rhs_relaxed": rhs_relaxed,
            "relaxation_gap": rhs_relaxed - rhs,
            "relaxation_ordered": rhs_relaxed >= rhs - 1e-12,
            "convex_minorant": minorant,
            "minorant_margin": lhs - minorant,
        }
    return _make("R3", lhs, rhs, UPPER, preconds,
                 {"n": n, "m": m, "function": f.name}, extras)


def thm_upper_seq(f: FunctionModel, a: Sequence, n: int) -> BoundReport:
    """Upper bound for the successive difference of (1/n) sum f(a_i/a_n)."""
    if n < 2:
        raise ValueError("seq_upper needs n >= 2")
    _require_length(a, n + 1)
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    if not a[n] > a[1]:
        raise ValueError("a_n must exceed a_1")
    preconds = [is_increasing(a), _endpoint_gap_minorant(a, n)]
    S = accurate_sum(a.head(n))
    S1 = S + a[n + 1]
    gap = a[n] - a[1]
    lhs = diff_Delta(f, a, n)
    rhs = (n * a[n] - S) / (n * gap) * f(a[1] / a[n]) \
        + (S - n * a[1]) / (n * gap) * f(1.0) \
        - f(2.0 * (a[n] - a[n - 1]) * (a[2] - a[1]) / (gap * a[n])) \
        - f(S1 / ((n + 1) * a[n + 1]))
    return _make("seq_upper", lhs, rhs, UPPER, preconds, {"n": n, "function": f.name})


def thm_upper_seq_c(f: FunctionModel, a: Sequence, c: Sequence, n: int) -> BoundReport:
    """c-weighted version of ``thm_upper_seq`` for a positive weight sequence."""
    if n < 2:
        raise ValueError("seq_upper_c needs n >= 2")
    _require_length(a, n + 1)
    _require_length(c, n + 1, "c")
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    if not a[n] > a[1]:
        raise ValueError("a_n must exceed a_1")
    preconds = [is_increasing(a), _endpoint_gap_minorant(a, n)]
    S = accurate_sum(a.head(n))
    S1 = S + a[n + 1]
    gap = a[n] - a[1]
    lhs = diff_D(f, a, c, n)
    rhs = (n * a[n] - S) / gap * f(a[1] / a[n]) / c[n] \
        + (S - n * a[1]) / gap * f(1.0) / c[n] \
        - n / c[n] * f(2.0 * (a[n] - a[n - 1]) * (a[2] - a[1]) / (gap * a[n])) \
        - (n + 1) / c[n + 1] * f(S1 / ((n + 1) * a[n + 1]))
    return _make("seq_upper_c", lhs, rhs, UPPER, preconds, {"n": n, "function": f.name})


def thm1_lower(f: FunctionModel, a: Sequence, n: int) -> BoundReport:
    """Three-term lower bound for the successive average difference.

    At n = 2 the two (n-2)-scaled terms are evaluated at argument 0, where
    positive models return f(0) from the model itself.
    """
    if n < 2:
        raise ValueError("T1 needs n >= 2")
    _require_length(a, n + 1)
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    preconds = [is_increasing(a), cond_T1(a, n)]
    g = a[2] - a[1]
    lhs = diff_Delta(f, a, n)
    rhs = (n - 1.0) / (n + 1.0) * (
        f(g / (n * a[n]))
        + f((n - 2.0) * g / (2.0 * (n - 1.0) * n * a[n]))
        + f((n - 2.0) * g / (3.0 * n * n * a[n]))
    )
    return _make("T1", lhs, rhs, LOWER, preconds, {"n": n, "function": f.name})


def thm2_lower(f: FunctionModel, a: Sequence, c: Sequence, n: int,
               t: int = DEFAULT_T) -> BoundReport:
    """c-weighted lower bound; also reports the sharper t-indexed sum.

    The zeroth-slot conventions a_0 = 0, c_0 = 0 are applied here.
    """
    if n < 1:
        raise ValueError("T2 needs n >= 1")
    if t < 0:
        raise ValueError("t must be nonnegative")
    _require_length(a, n + 1)
    _require_length(c, n + 1, "c")
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    a = a.with_zeroth()
    c = c.with_zeroth()
    preconds = [
        is_increasing(c),
        increments_increasing(c),
        cond_III(a, c, n),
        is_increasing(a),
    ]
    lhs = diff_D(f, a, c, n)
    base = 2.0 * c[1] * (a[2] - a[1]) * (c[n] - c[n - 1]) / (c[n] ** 2 * a[n])
    rhs = (n - 1.0) / c[n + 1] * f(base)
    if n >= 2:
        ratios = c.head(n - 1) / c[n]
        scale = c[1] * (a[2] - a[1]) / ((n - 1.0) * a[n] * c[n])
        tsum = 0.0
        for k in range(t + 1):
            arg = accurate_sum(2.0 * (1.0 - ratios) * np.abs(1.0 - 2.0 * ratios) ** k) * scale
            tsum += f(arg)
        rhs_tsum = (n - 1.0) / c[n + 1] * tsum
    else:
        rhs_tsum = 0.0
    return _make("T2", lhs, rhs, LOWER, preconds,
                 {"n": n, "t": t, "function": f.name},
                 {"rhs_tsum": rhs_tsum, "tsum_margin": lhs - rhs_tsum})


def thm3_lower(f: FunctionModel, a: Sequence, b: Sequence, c: Sequence, n: int) -> BoundReport:
    """Three-sequence lower bound using the smallest step of a."""
    if n < 1:
        raise ValueError("T3 needs n >= 1")
    _require_length(a, n + 1)
    _require_length(b, n + 1, "b")
    _require_length(c, n + 1, "c")
    _require_flags(f, (SUPERQUADRATIC, POSITIVE))
    a = a.with_zeroth()
    c = c.with_zeroth()
    preconds = [
        is_increasing(a),
        is_increasing(b),
        is_increasing(c),
        increments_increasing(c),
        cond_c_three_seq(a, b, c, n),
    ]
    lhs = diff_H(f, a, b, c, n)
    step_min = min(a[i + 1] - a[i] for i in range(1, n + 1))
    rhs = (n - 1.0) / c[n + 1] * f(2.0 * c[1] * (c[n] - c[n - 1]) * step_min
                                   / (c[n] ** 2 * b[n]))
    return _make("T3", lhs, rhs, LOWER, preconds, {"n": n, "function": f.name})


def thm8_upper(f: FunctionModel, a: Sequence, n: int) -> BoundReport:
    """Upper bound for the reversed successive difference of increasing
    subquadratic models, plus the doubling check when all ratios stay <= 2."""
    if n < 1:
        raise ValueError("T8 needs n >= 1")
    _require_length(a, n + 1)
    _require_flags(f, (SUBQUADRATIC, INCREASING))
    preconds = [is_increasing(a), cond_B(a, n)]
    ratio_rep = cond_ratio_le_2(a)
    lhs = diff_E(f, a, n)
    terms = []
    for i in range(1, n + 1):
        step = (a[i + 1] - a[i]) / a[n + 1]
        terms.append(i / (n * (n + 1.0)) * f((n - i + 1.0) / (n + 1.0) * step)
                     + (n - i + 1.0) / (n * (n + 1.0)) * f(i / (n + 1.0) * step))
    rhs = accurate_sum(terms)
    doubling_slack = (2.0 * accurate_sum(scaled_values(f, a, a[n], n)) / n
                      - accurate_sum(scaled_values(f, a, a[n + 1], n + 1)) / (n + 1))
    return _make("T8", lhs, rhs, UPPER, preconds,
                 {"n": n, "function": f.name},
                 {"ratio_condition": ratio_rep, "doubling_slack": doubling_slack})


def thm9_upper(f: FunctionModel, a: Sequence, n: int) -> BoundReport:
    """Sequence-weighted analogue of ``thm8_upper`` with weights a_n, a_{n+1}."""
    if n < 1:
        raise ValueError("T9 needs n >= 1")
    _require_length(a, n + 1)
    _require_flags(f, (SUBQUADRATIC, INCREASING))
    a = a.with_zeroth()
    preconds = [is_increasing(a), increments_increasing(a)]
    ratio_rep = cond_ratio_le_2(a)
    lhs = diff_R(f, a, n)
    terms = []
    for i in range(1, n + 1):
        step = (a[i + 1] - a[i]) / a[n + 1]
        terms.append((a[n + 1] - a[i]) / a[n + 1] * f(a[i] / a[n] * step)
                     + a[i] / a[n + 1] * f((a[n] - a[i]) / a[n + 1] * step))
    rhs = accurate_sum(terms) / a[n]
    doubling_slack = (2.0 * accurate_sum(scaled_values(f, a, a[n], n)) / a[n]
                      - accurate_sum(scaled_values(f, a, a[n + 1], n + 1)) / a[n + 1])
    return _make("T9", lhs, rhs, UPPER, preconds,
                 {"n": n, "function": f.name},
                 {"ratio_condition": ratio_rep, "doubling_slack": doubling_slack})


def thm10_checks(f: FunctionModel, n: int) -> BoundReport:
    """Doubling checks on both averages for increasing subquadratic models;
    convex-flagged models additionally get the monotone sandwich around the
    midpoint value.  The report margin is the smallest slack checked."""
    if n < 2:
        raise ValueError("T10 needs n >= 2")
    _require_flags(f, (SUBQUADRATIC, INCREASING))
    A_n = avg_A(f, n).value
    A_n1 = avg_A(f, n + 1).value
    B_n = avg_B(f, n).value
    B_nm1 = avg_B(f, n - 1).value
    slacks = {
        "A_doubling": 2.0 * A_n - A_n1,
        "B_doubling": 2.0 * B_n - B_nm1,
    }
    if f.has_flag(CONVEX):
        half = f(0.5)
        slacks.update({
            "A_monotone": A_n1 - A_n,
            "B_monotone": B_nm1 - B_n,
            "half_point_lower": A_n - half,
            "half_point_upper": 4.0 * half - 2.0 * A_n,
        })
    worst = min(slacks.values())
    report = _make("T10", A_n1, 2.0 * A_n, UPPER, [],
                   {"n": n, "function": f.name}, dict(slacks))
    report.margin = worst
    return report


# ------------------------------- registry -------------------------------

@dataclass(frozen=True)
class TheoremInfo:
    theorem_id: str
    required_flags: frozenset
    n_min: int
    needs_sequence: bool
    uses_t: bool
    evaluate: Callable  # (f, seq_or_None, n, t_or_None) -> BoundReport


def _info(tid, flags, n_min, needs_sequence, uses_t, fn) -> TheoremInfo:
    return TheoremInfo(tid, frozenset(flags), n_min, needs_sequence, uses_t, fn)


THEOREMS: dict = {
    info.theorem_id: info for info in (
        _info("A_lower", (SUPERQUADRATIC, POSITIVE), 3, False, False,
              lambda f, a, n, t: thmA_lower(f, n)),
        _info("B_lower", (SUPERQUADRATIC, POSITIVE), 2, False, False,
              lambda f, a, n, t: thmB_lower(f, n)),
        _info("A_upper_gen", (SUPERQUADRATIC,), 3, False, False,
              lambda f, a, n, t: thm_upper_A_general(f, n)),
        _info("A_upper_pos", (SUPERQUADRATIC, POSITIVE), 3, False, False,
              lambda f, a, n, t: thm_upper_A_positive(f, n)),
        _info("B_upper", (SUPERQUADRATIC, POSITIVE), 2, False, False,
              lambda f, a, n, t: thm_upper_B(f, n)),
        _info("R3", (SUPERQUADRATIC, POSITIVE), 2, True, False,
              lambda f, a, n, t: remark3_upper(f, a, n, n)),
        _info("seq_upper", (SUPERQUADRATIC, POSITIVE), 2, True, False,
              lambda f, a, n, t: thm_upper_seq(f, a, n)),
        _info("seq_upper_c", (SUPERQUADRATIC, POSITIVE), 2, True, False,
              lambda f, a, n, t: thm_upper_seq_c(f, a, a, n)),
        _info("T1", (SUPERQUADRATIC, POSITIVE), 2, True, False,
              lambda f, a, n, t: thm1_lower(f, a, n)),
        _info("T2", (SUPERQUADRATIC, POSITIVE), 1, True, True,
              lambda f, a, n, t: thm2_lower(f, a, a, n, DEFAULT_T if t is None else t)),
        _info("T3", (SUPERQUADRATIC, POSITIVE), 1, True, False,
              lambda f, a, n, t: thm3_lower(f, a, a, a, n)),
        _info("T8", (SUBQUADRATIC, INCREASING), 1, True, False,
              lambda f, a, n, t: thm8_upper(f, a, n)),
        _info("T9", (SUBQUADRATIC, INCREASING), 1, True, False,
              lambda f, a, n, t: thm9_upper(f, a, n)),
        _info("T10", (SUBQUADRATIC, INCREASING), 2, False, False,
              lambda f, a, n, t: thm10_checks(f, n)),
    )
}
