"""Differentiable objectives and generic concavifier estimation.

A concavifier of f is a constant alpha such that (alpha/2)||x||^2 - f(x) is
convex; equivalently, f admits the quadratic upper model

    f(y) <= f(x) + grad f(x)^T (y - x) + (alpha/2) ||y - x||^2

for all x, y.  The inverse of a concavifier is a safe fixed step size for
gradient descent.  This module estimates the smallest such constant over a
compact box, either by sampling the Hessian spectrum or by maximizing the
mid-point acceleration quotient

    psi(x, y) = 4 [f(x) + f(y) - 2 f((x+y)/2)] / ||x - y||^2

whose supremum over a region characterizes the concavifier there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .eigenbounds import SymMatrix, power_iteration
from .errors import DegeneratePairError, InvalidInputError, UnsupportedOperationError

QUAD_CHECK_RTOL = 1e-9
MIDPOINT_SEPARATION_FLOOR = 1e-8
DIRECTED_STEP_SCALE = 1e-3
GRAD_CHECK_STEP_SCALE = 1e-6

ESTIMATE_METHODS = ("hessian-sampling", "midpoint-sup", "analytic")


@dataclass
class ObjectiveFunction:
    """Scalar field over R^dim with gradient and optional Hessian callables."""

    dim: int
    evaluate: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Optional[Callable[[np.ndarray], SymMatrix]] = None

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidInputError("dimension must be at least 1")


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box with a sample-count budget for the estimators."""

    lower: np.ndarray
    upper: np.ndarray
    budget: int

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise InvalidInputError("lower and upper must be vectors of equal length")
        if not np.all(lo <= hi):
            raise InvalidInputError("lower must be <= upper componentwise")
        if self.budget < 1:
            raise InvalidInputError("budget must be at least 1")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    @property
    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(self.lower, self.upper, size=(count, self.dim))


@dataclass(frozen=True)
class ConcavifierEstimate:
    """Sampled estimate of the optimal concavifier over a box.

    Both estimators report a lower bound on the true supremum (the maximum
    over finitely many samples), clamped at zero since a concavifier is a
    non-negative constant.
    """

    value: float
    method: str
    samples_used: int
    witness: object

    def __post_init__(self):
        if self.method not in ESTIMATE_METHODS:
            raise InvalidInputError(f"unknown method {self.method!r}")
        if self.value < 0.0:
            raise InvalidInputError("estimate value must be non-negative")


@dataclass(frozen=True)
class QuadraticCheck:
    holds: bool
    slack: float


def _as_point(f: ObjectiveFunction, x) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (f.dim,):
        raise InvalidInputError(f"expected a point of dimension {f.dim}, got shape {x.shape}")
    return x


def upper_quadratic_check(f: ObjectiveFunction, x, y, alpha: float) -> QuadraticCheck:
    """Test f(y) <= f(x) + grad f(x)^T (y-x) + (alpha/2)||y-x||^2.

    slack is the left-over of the right-hand side; the check passes when
    slack >= -1e-9 * max(1, |f(x)|).
    """
    x = _as_point(f, x)
    y = _as_point(f, y)
    if alpha < 0.0:
        raise InvalidInputError("alpha must be non-negative")
    fx = float(f.evaluate(x))
    diff = y - x
    slack = fx + float(f.gradient(x) @ diff) + 0.5 * alpha * float(diff @ diff) - float(f.evaluate(y))
    tol = QUAD_CHECK_RTOL * max(1.0, abs(fx))
    return QuadraticCheck(holds=slack >= -tol, slack=slack)


def midpoint_acceleration(f: ObjectiveFunction, x, y) -> float:
    """psi(x, y) = 4 [f(x) + f(y) - 2 f((x+y)/2)] / ||x - y||^2."""
    x = _as_point(f, x)
    y = _as_point(f, y)
    sep2 = float(np.sum((x - y) ** 2))
    if sep2 < MIDPOINT_SEPARATION_FLOOR**2:
        raise DegeneratePairError("points are closer than the separation floor")
    mid = (x + y) / 2.0
    return 4.0 / sep2 * (float(f.evaluate(x)) + float(f.evaluate(y)) - 2.0 * float(f.evaluate(mid)))


def estimate_concavifier_midpoint(
    f: ObjectiveFunction, domain: BoxDomain, rng: np.random.Generator | None = None
) -> ConcavifierEstimate:
    """Maximize the mid-point quotient over sampled pairs.

    Half the budget goes to uniform random pairs, half to short pairs
    (x, x + eps*u) with u the dominant Hessian direction at the box center
    when a Hessian is available, else the coordinate axes.  eps is
    1e-3 times the box diameter.
    """
    if domain.dim != f.dim:
        raise InvalidInputError("domain dimension does not match the objective")
    if domain.budget < 2:
        raise InvalidInputError("midpoint estimation needs a budget of at least 2")
    if domain.diameter < MIDPOINT_SEPARATION_FLOOR:
        raise DegeneratePairError("domain diameter is below the separation floor")
    rng = rng if rng is not None else np.random.default_rng(0)

    n_uniform = domain.budget // 2
    n_directed = domain.budget - n_uniform
    eps = DIRECTED_STEP_SCALE * domain.diameter
    # pairs much shorter than the directed step length carry no extra
    # information and their three-point cancellation noise grows like 1/sep^2
    min_sep2 = max((0.5 * eps) ** 2, MIDPOINT_SEPARATION_FLOOR**2)

    best = -np.inf
    best_pair = None
    pairs = 0

    if n_uniform:
        xs = domain.sample(rng, n_uniform)
        ys = domain.sample(rng, n_uniform)
        for x, y in zip(xs, ys):
            if np.sum((x - y) ** 2) < min_sep2:
                continue
            pairs += 1
            psi = midpoint_acceleration(f, x, y)
            if psi > best:
                best, best_pair = psi, (x, y)

    if f.hessian is not None:
        directions = [power_iteration(f.hessian(domain.center)).vector]
    else:
        directions = list(np.eye(f.dim))
    xs = domain.sample(rng, n_directed)
    for i, x in enumerate(xs):
        u = directions[i % len(directions)]
        y = np.clip(x + eps * u, domain.lower, domain.upper)
        if np.sum((x - y) ** 2) < min_sep2:
            y = np.clip(x - eps * u, domain.lower, domain.upper)
        if np.sum((x - y) ** 2) < min_sep2:
            continue
        pairs += 1
        psi = midpoint_acceleration(f, x, y)
        if psi > best:
            best, best_pair = psi, (x, y)

    if best_pair is None:
        raise DegeneratePairError("no sampled pair exceeded the separation floor")
    return ConcavifierEstimate(
        value=max(0.0, best), method="midpoint-sup", samples_used=pairs, witness=best_pair
    )


def estimate_concavifier_hessian(
    f: ObjectiveFunction, domain: BoxDomain, rng: np.random.Generator | None = None
) -> ConcavifierEstimate:
    """Maximize the top Hessian eigenvalue over sampled points in the box."""
    if f.hessian is None:
        raise UnsupportedOperationError("objective does not provide a Hessian")
    if domain.dim != f.dim:
        raise InvalidInputError("domain dimension does not match the objective")
    rng = rng if rng is not None else np.random.default_rng(0)

    best = -np.inf
    witness = None
    for x in domain.sample(rng, domain.budget):
        lam = power_iteration(f.hessian(x)).value
        if lam > best:
            best, witness = lam, x
    return ConcavifierEstimate(
        value=max(0.0, best), method="hessian-sampling", samples_used=domain.budget, witness=witness
    )


def central_difference_gradient(fun: Callable[[np.ndarray], float], x, step: float | None = None) -> np.ndarray:
    """Central finite-difference gradient with h = 1e-6 * max(1, ||x||)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h = step if step is not None else GRAD_CHECK_STEP_SCALE * max(1.0, float(np.linalg.norm(x)))
    grad = np.empty_like(x)
    for i in range(x.shape[0]):
        e = np.zeros_like(x)
        e[i] = h
        grad[i] = (float(fun(x + e)) - float(fun(x - e))) / (2.0 * h)
    return grad


def quadratic_objective(a) -> ObjectiveFunction:
    """f(x) = 0.5 x^T A x for a symmetric matrix A."""
    mat = SymMatrix(np.array(a, dtype=float))
    entries = mat.entries
    return ObjectiveFunction(
        dim=mat.size,
        evaluate=lambda x: 0.5 * float(x @ (entries @ x)),
        gradient=lambda x: entries @ x,
        hessian=lambda x: mat,
    )


def linear_objective(c) -> ObjectiveFunction:
    """f(x) = c^T x; Hessian identically zero."""
    c = np.atleast_1d(np.asarray(c, dtype=float))
    zero = SymMatrix(np.zeros((c.shape[0], c.shape[0])))
    return ObjectiveFunction(
        dim=c.shape[0],
        evaluate=lambda x: float(c @ x),
        gradient=lambda x: c.copy(),
        hessian=lambda x: zero,
    )
