"""Test-function catalog on [0, L] and grid certification of shape classes.

Certification here is evidence, not proof: a passing certificate means no
violation was found on the recorded grid (a uniform grid plus an equally
sized fixed-seed random point set).  The random points are drawn as a
prefix of one seeded stream, so enlarging the grid only ever adds points;
a failure found at some grid size therefore persists at every larger one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

POSITIVE = "positive"
INCREASING = "increasing"
CONVEX = "convex"
SUPERQUADRATIC = "superquadratic"
SUBQUADRATIC = "subquadratic"
CLASS_FLAGS = frozenset({POSITIVE, INCREASING, CONVEX, SUPERQUADRATIC, SUBQUADRATIC})

ANALYTIC_DERIVATIVE = "analytic_derivative"
NUMERIC_DERIVATIVE = "numeric_derivative"
USER_SUPPLIED = "user_supplied"

DEFAULT_GRID_SIZE = 257
DEFAULT_TOL_ABS = 1e-12
_GRID_SEED = 1729
_MAX_WITNESSES = 4


@dataclass(frozen=True)
class FunctionModel:
    """An evaluable function on [0, domain_end] with optional derivative and
    declared shape-class flags.

    ``eval`` must be defined for every x in [0, domain_end], including x = 0
    by explicit value.  It may accept numpy arrays elementwise; scalar-only
    callables are handled by :func:`eval_many`.
    """

    name: str
    domain_end: float
    eval: Callable
    derivative: Optional[Callable] = None
    declared_flags: frozenset = frozenset()

    def __post_init__(self):
        if not (math.isfinite(self.domain_end) and self.domain_end > 0):
            raise ValueError(f"domain_end must be a positive real, got {self.domain_end}")
        flags = frozenset(self.declared_flags)
        unknown = flags - CLASS_FLAGS
        if unknown:
            raise ValueError(f"unknown class flags: {sorted(unknown)}")
        object.__setattr__(self, "declared_flags", flags)

    def __call__(self, x: float) -> float:
        return float(self.eval(x))

    def has_flag(self, flag: str) -> bool:
        return flag in self.declared_flags

    def negated(self) -> "FunctionModel":
        ev, der = self.eval, self.derivative
        return FunctionModel(
            name=f"neg({self.name})",
            domain_end=self.domain_end,
            eval=lambda x: -ev(x),
            derivative=(lambda x: -der(x)) if der is not None else None,
        )


def eval_many(f: FunctionModel, xs) -> np.ndarray:
    """Evaluate a model on an array, vectorized when the model allows it."""
    xs = np.asarray(xs, dtype=float)
    try:
        out = np.asarray(f.eval(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except Exception:
        pass
    flat = np.array([float(f.eval(float(v))) for v in xs.ravel()], dtype=float)
    return flat.reshape(xs.shape)


@dataclass(frozen=True)
class SupportConstantPolicy:
    """How to produce the candidate support constant C(x).

    ``analytic_derivative`` uses the model derivative, ``numeric_derivative``
    a central finite difference with the given step (default 1e-6 * L), and
    ``user_supplied`` a caller-provided ``c_func``.
    """

    mode: str = ANALYTIC_DERIVATIVE
    step: Optional[float] = None
    c_func: Optional[Callable] = None

    @classmethod
    def default_for(cls, f: FunctionModel) -> "SupportConstantPolicy":
        if f.derivative is not None:
            return cls(ANALYTIC_DERIVATIVE)
        return cls(NUMERIC_DERIVATIVE, step=1e-6 * f.domain_end)


def support_constant(f: FunctionModel, policy: SupportConstantPolicy, x: float) -> float:
    """Candidate support constant at x: the derivative when available, a
    finite difference otherwise (forward at x = 0)."""
    L = f.domain_end
    if not (0.0 <= x <= L):
        raise ValueError(f"x = {x} outside domain [0, {L}]")
    if policy.mode == USER_SUPPLIED:
        if policy.c_func is None:
            raise ValueError("user_supplied policy requires c_func")
        return float(policy.c_func(x))
    if policy.mode == ANALYTIC_DERIVATIVE:
        if f.derivative is None:
            raise ValueError(f"analytic_derivative policy needs a derivative on model {f.name!r}")
        if x > 0.0:
            return float(f.derivative(x))
        try:
            c = float(f.derivative(0.0))
        except Exception:
            c = math.nan
        if math.isfinite(c):
            return c
        h = policy.step if policy.step is not None else 1e-6 * L
        return (float(f.eval(h)) - float(f.eval(0.0))) / h
    if policy.mode == NUMERIC_DERIVATIVE:
        h = policy.step if policy.step is not None else 1e-6 * L
        if not h > 0:
            raise ValueError("finite-difference step must be positive")
        if h > L / 4.0:
            raise ValueError(f"finite-difference step {h} exceeds domain_end/4 = {L / 4.0}")
        if x - h < 0.0:
            return (float(f.eval(x + h)) - float(f.eval(x))) / h
        if x + h > L:
            return (float(f.eval(x)) - float(f.eval(x - h))) / h
        return (float(f.eval(x + h)) - float(f.eval(x - h))) / (2.0 * h)
    raise ValueError(f"unknown support-constant mode {policy.mode!r}")


@dataclass(frozen=True)
class Certificate:
    """Outcome of one grid-based class check.

    ``passed`` is True iff ``worst_margin >= -tol_abs``; ``witness`` lists
    the grid point(s)/pair(s) achieving the worst margin, capped at a few.
    A pass is always "no violation found on this grid", never a proof.
    """

    class_checked: str
    passed: bool
    worst_margin: float
    witness: tuple
    grid_size: int
    tol_abs: float
    notes: tuple = ()


def certification_grid(domain_end: float, grid_size: int) -> np.ndarray:
    """Uniform grid on [0, L] plus an equal-size seeded random set.

    The random half is a prefix of a single fixed-seed stream so that grids
    of increasing size are nested.
    """
    if grid_size < 3:
        raise ValueError("grid_size must be at least 3")
    uniform = np.linspace(0.0, domain_end, grid_size)
    rng = np.random.default_rng(_GRID_SEED)
    return np.concatenate([uniform, rng.uniform(0.0, domain_end, grid_size)])


def _pair_witnesses(points: np.ndarray, margins: np.ndarray, worst: float) -> tuple:
    idx = np.argwhere(margins == worst)[:_MAX_WITNESSES]
    return tuple((float(points[i]), float(points[j])) for i, j in idx)


def check_superquadratic(f: FunctionModel, policy: Optional[SupportConstantPolicy] = None,
                         grid_size: int = DEFAULT_GRID_SIZE,
                         tol_abs: float = DEFAULT_TOL_ABS) -> Certificate:
    """Scan f(y) - f(x) - C(x)(y - x) - f(|y - x|) over all ordered grid pairs."""
    if policy is None:
        policy = SupportConstantPolicy.default_for(f)
    pts = certification_grid(f.domain_end, grid_size)
    fvals = eval_many(f, pts)
    cvals = np.array([support_constant(f, policy, float(x)) for x in pts])
    diff = pts[None, :] - pts[:, None]
    margins = fvals[None, :] - fvals[:, None] - cvals[:, None] * diff - eval_many(f, np.abs(diff))
    worst = float(margins.min())
    notes = ()
    if policy.mode == NUMERIC_DERIVATIVE:
        notes = ("support constant estimated by finite differences; a failure may "
                 "reflect that candidate rather than the class itself",)
    return Certificate(SUPERQUADRATIC, worst >= -tol_abs, worst,
                       _pair_witnesses(pts, margins, worst), grid_size, tol_abs, notes)


def check_subquadratic(f: FunctionModel, policy: Optional[SupportConstantPolicy] = None,
                       grid_size: int = DEFAULT_GRID_SIZE,
                       tol_abs: float = DEFAULT_TOL_ABS) -> Certificate:
    """Same scan applied to the negation of f; the support constant is taken
    for -f (a caller-supplied policy must refer to -f)."""
    cert = check_superquadratic(f.negated(), policy, grid_size, tol_abs)
    return replace(cert, class_checked=SUBQUADRATIC)


def check_monotone_convex_positive(f: FunctionModel, grid_size: int = DEFAULT_GRID_SIZE,
                                   tol_abs: float = DEFAULT_TOL_ABS) -> dict:
    """Grid checks for the increasing, convex and positive classes.

    Returns one certificate per class, keyed "increasing" / "convex" /
    "positive".  Convexity uses the midpoint inequality over all grid pairs.
    """
    pts = np.unique(certification_grid(f.domain_end, grid_size))
    fvals = eval_many(f, pts)

    inc_slacks = fvals[1:] - fvals[:-1]
    worst_inc = float(inc_slacks.min())
    k = int(np.argmin(inc_slacks))
    inc_witness = ((float(pts[k]), float(pts[k + 1])),)

    mid = (pts[:, None] + pts[None, :]) / 2.0
    convex_slack = (fvals[:, None] + fvals[None, :]) / 2.0 - eval_many(f, mid)
    worst_cvx = float(convex_slack.min())
    cvx_witness = _pair_witnesses(pts, convex_slack, worst_cvx)

    worst_pos = float(fvals.min())
    pos_witness = ((float(pts[int(np.argmin(fvals))]),),)

    return {
        INCREASING: Certificate(INCREASING, worst_inc >= -tol_abs, worst_inc,
                                inc_witness, grid_size, tol_abs),
        CONVEX: Certificate(CONVEX, worst_cvx >= -tol_abs, worst_cvx,
                            cvx_witness, grid_size, tol_abs),
        POSITIVE: Certificate(POSITIVE, worst_pos >= -tol_abs, worst_pos,
                              pos_witness, grid_size, tol_abs),
    }


# --------------------------- function catalog ---------------------------

def _elementwise(core: Callable) -> Callable:
    """Wrap an array->array kernel so it also accepts and returns scalars."""
    def ev(x):
        arr = np.asarray(x, dtype=float)
        if arr.ndim == 0:
            return float(core(arr.reshape(1))[0])
        return core(arr)
    return ev


def _power_model(m: float) -> FunctionModel:
    flags = {POSITIVE}
    if m > 0:
        flags.add(INCREASING)
    if m >= 1 or m == 0:
        flags.add(CONVEX)
    if m >= 2:
        flags.add(SUPERQUADRATIC)
    if m <= 2:
        flags.add(SUBQUADRATIC)

    def ev_core(arr):
        return arr ** m

    if m == 1.0:
        def der_core(arr):
            return np.ones_like(arr)
    else:
        def der_core(arr):
            return m * arr ** (m - 1.0)

    return FunctionModel(f"pow:{m:g}", 1.0, _elementwise(ev_core),
                         _elementwise(der_core), frozenset(flags))


def _pnorm_model(p: float, minus_one: bool) -> FunctionModel:
    # (1 + x^p)^(1/p), optionally shifted down by 1; convex increasing and
    # subquadratic for p >= 1
    if p < 1:
        raise ValueError("pnorm exponent must be at least 1")
    shift = 1.0 if minus_one else 0.0
    name = f"pnorm_m1:{p:g}" if minus_one else f"pnorm:{p:g}"

    def ev_core(arr):
        return (1.0 + arr ** p) ** (1.0 / p) - shift

    def der_core(arr):
        return arr ** (p - 1.0) * (1.0 + arr ** p) ** (1.0 / p - 1.0)

    return FunctionModel(name, 1.0, _elementwise(ev_core), _elementwise(der_core),
                         frozenset({POSITIVE, INCREASING, CONVEX, SUBQUADRATIC}))


def _log_weighted_model(coeff: float, name: str, convex: bool) -> FunctionModel:
    # coeff*x^2 - 2*x^2*log(x), extended by continuity with value 0 at x = 0

    def ev_core(arr):
        out = np.zeros(arr.shape)
        m = arr > 0.0
        xm = arr[m]
        out[m] = coeff * xm * xm - 2.0 * xm * xm * np.log(xm)
        return out

    def der_core(arr):
        out = np.zeros(arr.shape)
        m = arr > 0.0
        xm = arr[m]
        out[m] = (2.0 * coeff - 2.0) * xm - 4.0 * xm * np.log(xm)
        return out

    flags = {POSITIVE, INCREASING, SUBQUADRATIC}
    if convex:
        flags.add(CONVEX)
    return FunctionModel(name, 1.0, _elementwise(ev_core), _elementwise(der_core),
                         frozenset(flags))


def zero_model() -> FunctionModel:
    """The zero function: degenerate member of every class."""
    return FunctionModel("zero", 1.0,
                         _elementwise(lambda arr: np.zeros(arr.shape)),
                         _elementwise(lambda arr: np.zeros(arr.shape)),
                         CLASS_FLAGS)


CATALOG_SPECS = (
    "pow:1", "pow:1.5", "pow:2", "pow:2.5", "pow:3", "pow:4",
    "pnorm:1", "pnorm:2", "pnorm:3",
    "pnorm_m1:1", "pnorm_m1:2",
    "xlog3", "xlog",
)


def by_spec(spec: str) -> FunctionModel:
    """Resolve a function spec string ("pow:2", "pnorm:3", "pnorm_m1:2",
    "xlog", "xlog3") to a model."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "pow":
            return _power_model(float(arg))
        if kind == "pnorm":
            return _pnorm_model(float(arg), minus_one=False)
        if kind == "pnorm_m1":
            return _pnorm_model(float(arg), minus_one=True)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"bad function spec {spec!r}: {exc}") from None
    if spec == "xlog":
        return _log_weighted_model(1.0, "xlog", convex=False)
    if spec == "xlog3":
        return _log_weighted_model(3.0, "xlog3", convex=True)
    raise ValueError(f"unknown function spec {spec!r}")


def catalog() -> list:
    """All built-in test functions, each tagged with its asserted classes."""
    return [by_spec(s) for s in CATALOG_SPECS]
