"""Refinement chains for weighted-mean inequalities, returned as data.

Each operation evaluates every rung of its inequality chain and reports the
consecutive margins, oriented so that a nonnegative margin means the chain
inequality holds.  Chains are data rather than booleans because margin
magnitudes drive tightness analysis downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .averages import accurate_sum
from .functions import POSITIVE, FunctionModel, eval_many

MAX_T = 64

NON_INCREASING = "non_increasing"
NON_DECREASING = "non_decreasing"

_WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ChainEvaluation:
    """Named rungs of an inequality chain plus their consecutive margins.

    ``margins[i]`` compares rung i with rung i+1, oriented by ``direction``
    so that a nonnegative value means that link of the chain holds.
    """

    levels: tuple           # ((name, value), ...)
    margins: tuple
    params: dict
    direction: str = NON_INCREASING

    def level_values(self) -> tuple:
        return tuple(v for _, v in self.levels)


def _chain(levels, params, direction=NON_INCREASING) -> ChainEvaluation:
    vals = [v for _, v in levels]
    if direction == NON_INCREASING:
        margins = tuple(vals[i] - vals[i + 1] for i in range(len(vals) - 1))
    else:
        margins = tuple(vals[i + 1] - vals[i] for i in range(len(vals) - 1))
    return ChainEvaluation(tuple(levels), margins, params, direction)


def _check_weights(weights, points, L: Optional[float]):
    w = np.asarray(weights, dtype=float)
    x = np.asarray(points, dtype=float)
    if w.shape != x.shape or w.ndim != 1 or w.size == 0:
        raise ValueError("weights and points must be equal-length non-empty 1-d collections")
    if (w < -_WEIGHT_SUM_TOL).any():
        raise ValueError("weights must be nonnegative")
    total = accurate_sum(w)
    if abs(total - 1.0) > _WEIGHT_SUM_TOL:
        raise ValueError(f"weights must sum to 1 (got {total})")
    if L is None:
        if (x < 0.0).any():
            raise ValueError("points must be nonnegative")
    elif ((x < 0.0) | (x > L)).any():
        raise ValueError(f"points must lie in [0, {L}]")
    return w, x


def _check_t(t: int, minimum: int) -> int:
    t = int(t)
    if t < minimum:
        raise ValueError(f"t must be at least {minimum}")
    if t > MAX_T:
        raise ValueError(f"t capped at {MAX_T}")
    return t


def _in_domain(f: FunctionModel, *args: float):
    for v in args:
        if not (0.0 <= v <= f.domain_end):
            raise ValueError(f"intermediate argument {v} outside [0, {f.domain_end}]")


def jensen_refinement(f: FunctionModel, weights, points) -> ChainEvaluation:
    """Weighted-value sum versus mean value plus weighted spread terms.

    For a superquadratic model the first rung dominates the second; for a
    subquadratic one the chain reverses sign.
    """
    w, x = _check_weights(weights, points, f.domain_end)
    xbar = accurate_sum(w * x)
    dev = np.abs(x - xbar)
    _in_domain(f, xbar, float(dev.max()))
    level1 = accurate_sum(w * eval_many(f, x))
    level2 = f(xbar) + accurate_sum(w * eval_many(f, dev))
    return _chain(
        [("weighted_values", level1), ("mean_plus_deviations", level2)],
        {"weights": tuple(map(float, w)), "points": tuple(map(float, x)), "mean": xbar},
    )


def lemma1_chain(f: FunctionModel, x: float, y: float, lam: float, t: int) -> ChainEvaluation:
    """Two-point mix chain: the t-fold expansion of the one-step refinement.

    Rungs: the two-point weighted value, the one-step refinement, the
    t-expanded refinement, and (for positive-flagged models) the truncated
    form that keeps only the mean and the accumulated spread terms.
    """
    t = _check_t(t, 1)
    if not (0.0 <= lam <= 1.0):
        raise ValueError("lam must lie in [0, 1]")
    _in_domain(f, x, y)
    d = abs(x - y)
    mix = lam * x + (1.0 - lam) * y
    q = abs(1.0 - 2.0 * lam)
    _in_domain(f, mix, (1.0 - lam) * d, lam * d)

    level1 = lam * f(x) + (1.0 - lam) * f(y)
    f_mix = f(mix)
    level2 = f_mix + lam * f((1.0 - lam) * d) + (1.0 - lam) * f(lam * d)
    spread = [f(2.0 * lam * (1.0 - lam) * q ** k * d) for k in range(t)]
    ksum = accurate_sum(spread)
    qt = q ** t
    level3 = f_mix + ksum + lam * f((1.0 - lam) * qt * d) + (1.0 - lam) * f(lam * qt * d)

    levels = [
        ("two_point_value", level1),
        ("one_step_refinement", level2),
        (f"expanded_t{t}", level3),
    ]
    if f.has_flag(POSITIVE):
        levels.append(("truncated_tail", f_mix + ksum))
    return _chain(levels, {"x": x, "y": y, "lam": lam, "t": t})


def lemma2_bound(f: FunctionModel, lams, As, t: int, use_common_A: bool = False) -> ChainEvaluation:
    """Split-value sum versus its mixed-argument lower bounds.

    With ``use_common_A`` the common bound A = min_i lam_i * A_i is used,
    the tightest admissible choice.
    """
    t = _check_t(t, 0)
    lam = np.asarray(lams, dtype=float)
    A = np.asarray(As, dtype=float)
    if lam.shape != A.shape or lam.ndim != 1 or lam.size == 0:
        raise ValueError("lams and As must be equal-length non-empty 1-d collections")
    if ((lam < 0.0) | (lam > 1.0)).any():
        raise ValueError("each lam must lie in [0, 1]")
    if ((A < 0.0) | (A > f.domain_end)).any():
        raise ValueError(f"each A must lie in [0, {f.domain_end}]")
    m = lam.size

    level1 = accurate_sum(
        [float(li) * f((1.0 - li) * ai) + (1.0 - float(li)) * f(li * ai)
         for li, ai in zip(lam, A)]
    )
    q = np.abs(1.0 - 2.0 * lam)

    def mixed(k: int) -> float:
        arg = accurate_sum(2.0 * lam * (1.0 - lam) * q ** k * A) / m
        _in_domain(f, arg)
        return m * f(arg)

    level2 = accurate_sum([mixed(k) for k in range(t + 1)])
    levels = [("split_values", level1), ("mixed_argument_bound", level2)]

    params = {"lams": tuple(map(float, lam)), "As": tuple(map(float, A)), "t": t}
    if use_common_A:
        common = float(np.min(lam * A))
        def common_term(k: int) -> float:
            arg = accurate_sum(2.0 * (1.0 - lam) * q ** k * common) / m
            _in_domain(f, arg)
            return m * f(arg)
        level3 = accurate_sum([common_term(k) for k in range(t + 1)])
        levels.append(("common_bound", level3))
        params["common_A"] = common
    return _chain(levels, params)


def lemma3_bound(f: FunctionModel, weights, points) -> ChainEvaluation:
    """Weighted-value sum against twice the value at the weighted mean.

    For increasing subquadratic models the doubled mean dominates whenever
    no point exceeds twice the weighted mean; that spread condition is
    validated and reported in ``params`` but a violation does not stop the
    evaluation.  Points only need to be nonnegative: the model is trusted
    to evaluate wherever its defining formula reaches.
    """
    w, x = _check_weights(weights, points, None)
    mean = accurate_sum(w * x)
    level1 = accurate_sum(w * eval_many(f, x))
    level2 = 2.0 * f(mean)
    spread_slack = 2.0 * mean - float(x.max())
    return _chain(
        [("weighted_values", level1), ("doubled_mean", level2)],
        {
            "weights": tuple(map(float, w)),
            "points": tuple(map(float, x)),
            "mean": mean,
            "spread_condition_holds": spread_slack >= -_WEIGHT_SUM_TOL,
            "spread_condition_slack": spread_slack,
        },
        direction=NON_DECREASING,
    )
