"""Discrete averages of function values and their successive differences.

All sums go through :func:`accurate_sum`, a compensated accumulation:
exact rounding (``math.fsum``) for short inputs, ``fsum`` over pairwise
chunk sums for long ones.  Margins of near-equality bounds therefore are
not swamped by accumulation error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .functions import FunctionModel, eval_many
from .sequences import Sequence

KIND_A = "A"
KIND_B = "B"
KIND_GENERALIZED = "generalized"

_CHUNK = 1024


def accurate_sum(values) -> float:
    """Compensated sum of a 1-d collection of floats."""
    if isinstance(values, np.ndarray):
        arr = values.astype(float, copy=False)
    else:
        arr = np.asarray(list(values), dtype=float)
    if arr.size <= 2 * _CHUNK:
        return math.fsum(arr.tolist())
    parts = [float(np.sum(arr[s:s + _CHUNK])) for s in range(0, arr.size, _CHUNK)]
    return math.fsum(parts)


@dataclass(frozen=True)
class AverageValue:
    value: float
    n: int
    kind: str

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"average is not finite: {self.value}")


def avg_A(f: FunctionModel, n: int) -> AverageValue:
    """Interior average (1/(n-1)) * sum_{r=1..n-1} f(r/n)."""
    if n < 2:
        raise ValueError("avg_A needs n >= 2")
    if f.domain_end < 1.0:
        raise ValueError(f"model {f.name!r} is not defined up to 1")
    vals = eval_many(f, np.arange(1, n) / n)
    return AverageValue(accurate_sum(vals) / (n - 1), n, KIND_A)


def avg_B(f: FunctionModel, n: int) -> AverageValue:
    """Endpoint-inclusive average (1/(n+1)) * sum_{r=0..n} f(r/n).

    The r = 0 term is f(0) as evaluated by the model, never assumed 0.
    """
    if n < 1:
        raise ValueError("avg_B needs n >= 1")
    if f.domain_end < 1.0:
        raise ValueError(f"model {f.name!r} is not defined up to 1")
    vals = eval_many(f, np.arange(0, n + 1) / n)
    return AverageValue(accurate_sum(vals) / (n + 1), n, KIND_B)


def scaled_values(f: FunctionModel, a: Sequence, denom: float, n: int) -> np.ndarray:
    """f(a_i / denom) for i = 1..n, validating every argument against the domain."""
    xs = a.head(n) / denom
    if xs.size:
        bad = (xs < 0.0) | (xs > f.domain_end)
        if bad.any():
            i = int(np.argmax(bad)) + 1
            raise ValueError(
                f"a[{i}]/denom = {xs[i - 1]} outside [0, {f.domain_end}] for model {f.name!r}"
            )
    return eval_many(f, xs)


def avg_general(f: FunctionModel, a: Sequence, denom: float, weight: float, n: int) -> AverageValue:
    """(1/weight) * sum_{i=1..n} f(a_i / denom)."""
    if not weight > 0:
        raise ValueError("weight must be positive")
    return AverageValue(accurate_sum(scaled_values(f, a, denom, n)) / weight, n, KIND_GENERALIZED)


def diff_Delta(f: FunctionModel, a: Sequence, n: int) -> float:
    """(1/n) sum_{i<=n} f(a_i/a_n)  -  (1/(n+1)) sum_{i<=n+1} f(a_i/a_{n+1})."""
    return (avg_general(f, a, a[n], n, n).value
            - avg_general(f, a, a[n + 1], n + 1, n + 1).value)


def diff_D(f: FunctionModel, a: Sequence, c: Sequence, n: int) -> float:
    """(1/c_n) sum_{r<=n} f(a_r/a_n)  -  (1/c_{n+1}) sum_{r<=n+1} f(a_r/a_{n+1})."""
    return (avg_general(f, a, a[n], c[n], n).value
            - avg_general(f, a, a[n + 1], c[n + 1], n + 1).value)


def diff_H(f: FunctionModel, a: Sequence, b: Sequence, c: Sequence, n: int) -> float:
    """Same as diff_D but with b_n, b_{n+1} as the scaling denominators."""
    return (avg_general(f, a, b[n], c[n], n).value
            - avg_general(f, a, b[n + 1], c[n + 1], n + 1).value)


def diff_E(f: FunctionModel, a: Sequence, n: int) -> float:
    """(1/(n+1)) sum_{i<=n+1} f(a_i/a_{n+1})  -  (1/n) sum_{i<=n} f(a_i/a_n)."""
    return (avg_general(f, a, a[n + 1], n + 1, n + 1).value
            - avg_general(f, a, a[n], n, n).value)


def diff_R(f: FunctionModel, a: Sequence, n: int) -> float:
    """(1/a_{n+1}) sum_{i<=n+1} f(a_i/a_{n+1})  -  (1/a_n) sum_{i<=n} f(a_i/a_n)."""
    return (avg_general(f, a, a[n + 1], a[n + 1], n + 1).value
            - avg_general(f, a, a[n], a[n], n).value)
