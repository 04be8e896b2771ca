"""Positive 1-indexed sequences and the named order/growth conditions on them.

Every validator returns a :class:`ConditionReport` instead of a bare bool so
callers can see how much slack a condition has and where it breaks.  Slacks
are oriented so that nonnegative means the condition holds; a witness index
(the left index of the worst consecutive pair, or the term index for
pointwise conditions) is recorded only on failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

DEFAULT_TOL_ABS = 1e-12

_REJECTION_CAP = 500


@dataclass(frozen=True)
class Sequence:
    """A finite sequence of strictly positive reals, indexed from 1.

    ``zeroth`` is an optional 0th slot that is pinned to exactly 0.0; it
    carries the ``a_0 = 0`` / ``c_0 = 0`` convention some bounds assume.
    """

    values: tuple
    zeroth: Optional[float] = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("sequence must be non-empty")
        for i, v in enumerate(vals, start=1):
            if not (math.isfinite(v) and v > 0.0):
                raise ValueError(f"sequence values must be finite and strictly positive; s[{i}] = {v}")
        if self.zeroth is not None and self.zeroth != 0.0:
            raise ValueError(f"zeroth element, when present, must be exactly 0; got {self.zeroth}")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int) -> float:
        if i == 0:
            if self.zeroth is None:
                raise IndexError("sequence has no zeroth element")
            return 0.0
        if 1 <= i <= len(self.values):
            return self.values[i - 1]
        raise IndexError(f"index {i} out of range for sequence of length {len(self.values)}")

    def head(self, n: int) -> np.ndarray:
        """First n terms (1..n) as an array."""
        if n > len(self.values):
            raise ValueError(f"sequence of length {len(self.values)} is too short for n = {n}")
        return np.asarray(self.values[:n], dtype=float)

    def with_zeroth(self) -> "Sequence":
        """Copy with the zeroth slot pinned to 0 (no-op if already present)."""
        if self.zeroth is not None:
            return self
        return Sequence(self.values, 0.0)

    def scaled(self, kappa: float) -> "Sequence":
        if not kappa > 0:
            raise ValueError("scaling factor must be positive")
        return Sequence(tuple(kappa * v for v in self.values), self.zeroth)


@dataclass(frozen=True)
class ConditionReport:
    condition_name: str
    holds: bool
    worst_slack: float
    witness_index: Optional[int]
    tol_abs: float = DEFAULT_TOL_ABS


def _report(name: str, slacks, indices, tol_abs: float) -> ConditionReport:
    slacks = list(slacks)
    if not slacks:
        # vacuous condition
        return ConditionReport(name, True, math.inf, None, tol_abs)
    pos = int(np.argmin(slacks))
    worst = float(slacks[pos])
    holds = worst >= -tol_abs
    witness = None if holds else int(list(indices)[pos])
    return ConditionReport(name, holds, worst, witness, tol_abs)


def is_increasing(s: Sequence, tol_abs: float = DEFAULT_TOL_ABS) -> ConditionReport:
    """Non-strict monotonicity: slack is the smallest consecutive difference."""
    if len(s) < 2:
        raise ValueError("is_increasing needs at least two terms")
    slacks = [s[i + 1] - s[i] for i in range(1, len(s))]
    return _report("increasing", slacks, range(1, len(s)), tol_abs)


def increments_increasing(s: Sequence, tol_abs: float = DEFAULT_TOL_ABS) -> ConditionReport:
    """The consecutive increments form a non-decreasing sequence.

    When the zeroth slot is present the first increment is s[1] - 0;
    otherwise increments start at s[2] - s[1] and three terms are required.
    """
    if s.zeroth is not None:
        if len(s) < 2:
            raise ValueError("increments_increasing needs at least two terms")
        incs = [s[1]] + [s[i] - s[i - 1] for i in range(2, len(s) + 1)]
        first = 1
    else:
        if len(s) < 3:
            raise ValueError("increments_increasing needs a zeroth element or at least three terms")
        incs = [s[i] - s[i - 1] for i in range(2, len(s) + 1)]
        first = 2
    slacks = [incs[j + 1] - incs[j] for j in range(len(incs) - 1)]
    return _report("increments_increasing", slacks, range(first, first + len(slacks)), tol_abs)


def cond_III(a: Sequence, c: Sequence, n: int, tol_abs: float = DEFAULT_TOL_ABS) -> ConditionReport:
    """Chained sandwich c_1(1 - a_1/a_2) <= c_{i-1}(1 - a_{i-1}/a_i) <= c_n(1 - a_n/a_{n+1}).

    Checked for i = 2..n; the i = 1 instance only involves the zeroth-slot
    convention and is treated as vacuous.
    """
    if len(a) < n + 1:
        raise ValueError(f"a must have at least n+1 = {n + 1} terms")
    if len(c) < n:
        raise ValueError(f"c must have at least n = {n} terms")
    lo = c[1] * (1.0 - a[1] / a[2]) if n >= 1 and len(a) >= 2 else 0.0
    hi = c[n] * (1.0 - a[n] / a[n + 1])
    slacks = []
    indices = []
    for i in range(2, n + 1):
        mid = c[i - 1] * (1.0 - a[i - 1] / a[i])
        slacks.extend([mid - lo, hi - mid])
        indices.extend([i, i])
    return _report("cond_III", slacks, indices, tol_abs)


def cond_B(a: Sequence, n: int, tol_abs: float = DEFAULT_TOL_ABS) -> ConditionReport:
    """i(a_{i+1}/a_i - 1) <= n(a_{n+1}/a_n - 1) for i = 1..n."""
    if len(a) < n + 1:
        raise ValueError(f"a must have at least n+1 = {n + 1} terms")
    bound = n * (a[n + 1] / a[n] - 1.0)
    slacks = [bound - i * (a[i + 1] / a[i] - 1.0) for i in range(1, n + 1)]
    return _report("cond_B", slacks, range(1, n + 1), tol_abs)


def cond_ratio_le_2(a: Sequence, tol_abs: float = DEFAULT_TOL_ABS) -> ConditionReport:
    """Consecutive ratios a_{i+1}/a_i stay at or below 2."""
    if len(a) < 2:
        raise ValueError("cond_ratio_le_2 needs at least two terms")
    slacks = [2.0 - a[i + 1] / a[i] for i in range(1, len(a))]
    return _report("cond_ratio_le_2", slacks, range(1, len(a)), tol_abs)


def cond_c_three_seq(a: Sequence, b: Sequence, c: Sequence, n: int,
                     tol_abs: float = DEFAULT_TOL_ABS) -> ConditionReport:
    """c_n(1 - b_n/b_{n+1}) >= c_r(1 - a_r/a_{r+1}) for every r <= n."""
    if len(a) < n + 1 or len(b) < n + 1:
        raise ValueError(f"a and b must have at least n+1 = {n + 1} terms")
    if len(c) < n:
        raise ValueError(f"c must have at least n = {n} terms")
    lhs = c[n] * (1.0 - b[n] / b[n + 1])
    slacks = [lhs - c[r] * (1.0 - a[r] / a[r + 1]) for r in range(1, n + 1)]
    return _report("cond_c_three_seq", slacks, range(1, n + 1), tol_abs)


def cond_T1(a: Sequence, n: int, tol_abs: float = DEFAULT_TOL_ABS) -> ConditionReport:
    """The sequence i(1 - a_i/a_{i+1}), i = 1..n, is non-decreasing."""
    if len(a) < n + 1:
        raise ValueError(f"a must have at least n+1 = {n + 1} terms")
    u = [i * (1.0 - a[i] / a[i + 1]) for i in range(1, n + 1)]
    slacks = [u[j + 1] - u[j] for j in range(len(u) - 1)]
    return _report("cond_T1", slacks, range(1, n), tol_abs)


# named condition checks usable by rejection sampling; n defaults to len-1
_NAMED_CONDITIONS: dict = {
    "increasing": lambda s, n: is_increasing(s),
    "increments": lambda s, n: increments_increasing(s.with_zeroth()),
    "B": lambda s, n: cond_B(s, n),
    "C": lambda s, n: cond_ratio_le_2(s),
    "T1": lambda s, n: cond_T1(s, n),
    "III": lambda s, n: cond_III(s, s, n),
}


def arithmetic(start: float, step: float, length: int) -> Sequence:
    return Sequence(tuple(start + step * i for i in range(length)))


def geometric(start: float, ratio: float, length: int) -> Sequence:
    if not (start > 0 and ratio > 0):
        raise ValueError("geometric start and ratio must be positive")
    return Sequence(tuple(start * ratio ** i for i in range(length)))


def power(exponent: float, length: int) -> Sequence:
    return Sequence(tuple(float(i) ** exponent for i in range(1, length + 1)))


def random_monotone(seed: int, length: int, conditions=(),
                    retry_cap: int = _REJECTION_CAP) -> Sequence:
    """Random increasing positive sequence, rejection-sampled against the
    named conditions.  Deterministic for a fixed seed."""
    unknown = [name for name in conditions if name not in _NAMED_CONDITIONS]
    if unknown:
        raise ValueError(f"unknown condition names: {unknown}")
    rng = np.random.default_rng(seed)
    n = length - 1
    for _ in range(retry_cap):
        start = rng.uniform(0.5, 2.0)
        increments = rng.uniform(0.05, 1.0, size=length - 1)
        vals = start + np.concatenate([[0.0], np.cumsum(increments)])
        seq = Sequence(tuple(vals))
        if all(_NAMED_CONDITIONS[name](seq, n).holds for name in conditions):
            return seq
    raise RuntimeError(
        f"rejection sampling gave up after {retry_cap} attempts "
        f"(length {length}, conditions {list(conditions)})"
    )


def generate(kind: str, params: dict, length: int) -> Sequence:
    """Build a sequence from a named family; deterministic for fixed params."""
    if length < 1:
        raise ValueError("length must be at least 1")
    if kind == "arithmetic":
        return arithmetic(params["start"], params["step"], length)
    if kind == "geometric":
        return geometric(params["start"], params["ratio"], length)
    if kind == "power":
        return power(params["exponent"], length)
    if kind == "random_monotone":
        return random_monotone(params["seed"], length, params.get("conditions", ()))
    raise ValueError(f"unknown sequence kind {kind!r}")


def parse_sequence_spec(spec: str) -> tuple[str, Callable[[int], Sequence]]:
    """Parse a CLI sequence spec into (canonical name, length -> Sequence).

    Forms: "arith:START,STEP", "geom:START,RATIO", "pow:EXPONENT",
    "rand:seed=S;cond=B,C".
    """
    kind, _, arg = spec.partition(":")
    try:
        if kind == "arith":
            start, step = (float(v) for v in arg.split(","))
            return spec, lambda length: arithmetic(start, step, length)
        if kind == "geom":
            start, ratio = (float(v) for v in arg.split(","))
            return spec, lambda length: geometric(start, ratio, length)
        if kind == "pow":
            expo = float(arg)
            return spec, lambda length: power(expo, length)
        if kind == "rand":
            seed = 0
            conds: tuple = ()
            for part in arg.split(";"):
                key, _, val = part.partition("=")
                if key == "seed":
                    seed = int(val)
                elif key == "cond":
                    conds = tuple(v for v in val.split(",") if v)
                elif key:
                    raise ValueError(f"unknown rand parameter {key!r}")
            return spec, lambda length: random_monotone(seed, length, conds)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad sequence spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown sequence spec {spec!r}")
