"""Fixed-step gradient descent with per-step descent-inequality verification.

Every run records, for each step t, the objective value, the gradient norm,
and the descent gap

    g_t = f(x_t) - f(x_{t+1}) - (eta/2) ||grad f(x_t)||^2

which is non-negative (up to round-off) whenever 1/eta is a valid concavifier
of f over the visited region.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidInputError, NumericalFailureError
from .objectives import ObjectiveFunction

DESCENT_SLACK_RTOL = 1e-9
FLOAT_FMT = "%.17g"

TRACE_COLUMNS = ("step", "loss", "grad_norm", "descent_gap", "monotone_so_far")


@dataclass(frozen=True)
class DescentConfig:
    """Step size, step budget, initial point and the descent-slack tolerance.

    The slack tolerance is relative: a step counts as descending when
    f(x_{t+1}) <= f(x_t) + slack_rtol * max(1, |f(x_t)|).  grad_norm_stop
    enables the optional early stop (off by default).
    """

    eta: float
    steps: int
    x0: np.ndarray
    slack_rtol: float = DESCENT_SLACK_RTOL
    grad_norm_stop: float | None = None

    def __post_init__(self):
        if not self.eta > 0.0:
            raise InvalidInputError("step size must be positive")
        if self.steps < 1:
            raise InvalidInputError("step budget must be at least 1")
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))


@dataclass(frozen=True)
class DescentTrace:
    """Per-step record of a descent run.

    losses and grad_norms have one entry per recorded iterate (at most
    steps+1); gaps has one entry per completed step.  monotone means the loss
    never rose beyond the slack tolerance anywhere in the trace.
    """

    losses: np.ndarray
    grad_norms: np.ndarray
    gaps: np.ndarray
    monotone: bool
    diverged: bool
    final_point: np.ndarray
    eta: float

    @property
    def steps_taken(self) -> int:
        return self.gaps.shape[0]

    def monotone_prefix(self) -> np.ndarray:
        """monotone-so-far flag per recorded iterate."""
        ok = np.ones(self.losses.shape[0], dtype=bool)
        for t in range(1, self.losses.shape[0]):
            tol = DESCENT_SLACK_RTOL * max(1.0, abs(self.losses[t - 1]))
            ok[t] = ok[t - 1] and self.losses[t] <= self.losses[t - 1] + tol
        return ok


def gd_step(x, grad, eta: float) -> np.ndarray:
    """x - eta * grad."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    grad = np.atleast_1d(np.asarray(grad, dtype=float))
    if x.shape != grad.shape:
        raise InvalidInputError("point and gradient dimensions differ")
    if not eta > 0.0:
        raise InvalidInputError("step size must be positive")
    if not np.all(np.isfinite(grad)):
        raise NumericalFailureError("gradient has non-finite entries")
    return x - eta * grad


def run_descent(f: ObjectiveFunction, config: DescentConfig) -> DescentTrace:
    """Iterate x <- x - eta * grad f(x) for the configured number of steps.

    No early stopping unless grad_norm_stop is set.  If the objective or
    gradient becomes non-finite the trace is truncated and flagged diverged.
    """
    x = config.x0.copy()
    if x.shape != (f.dim,):
        raise InvalidInputError(f"initial point has shape {x.shape}, expected ({f.dim},)")
    fx = float(f.evaluate(x))
    if not np.isfinite(fx):
        raise InvalidInputError("objective is not finite at the initial point")

    losses = [fx]
    grad_norms = []
    gaps = []
    diverged = False

    g = np.asarray(f.gradient(x), dtype=float)
    gn = float(np.linalg.norm(g))
    grad_norms.append(gn)

    for _ in range(config.steps):
        if not np.all(np.isfinite(g)):
            diverged = True
            break
        if config.grad_norm_stop is not None and gn <= config.grad_norm_stop:
            break
        x_next = x - config.eta * g
        f_next = float(f.evaluate(x_next))
        if not np.isfinite(f_next):
            diverged = True
            break
        gaps.append(fx - f_next - 0.5 * config.eta * gn * gn)
        x, fx = x_next, f_next
        losses.append(fx)
        g = np.asarray(f.gradient(x), dtype=float)
        gn = float(np.linalg.norm(g))
        grad_norms.append(gn)

    losses = np.asarray(losses)
    monotone = True
    for t in range(1, losses.shape[0]):
        tol = config.slack_rtol * max(1.0, abs(losses[t - 1]))
        if losses[t] > losses[t - 1] + tol:
            monotone = False
            break

    return DescentTrace(
        losses=losses,
        grad_norms=np.asarray(grad_norms),
        gaps=np.asarray(gaps),
        monotone=monotone,
        diverged=diverged,
        final_point=x,
        eta=config.eta,
    )


def save_trace(trace: DescentTrace, path, timestamp: str | None = None) -> None:
    """Write a trace as delimited text: step, loss, grad_norm, descent_gap,
    monotone_so_far.  The final row has no completed step, so its gap is nan.
    """
    path = Path(path)
    prefix = trace.monotone_prefix()
    with path.open("w") as fh:
        if timestamp is not None:
            fh.write(f"# generated: {timestamp}\n")
        fh.write(",".join(TRACE_COLUMNS) + "\n")
        for t in range(trace.losses.shape[0]):
            gap = trace.gaps[t] if t < trace.gaps.shape[0] else float("nan")
            fh.write(
                "%d,%s,%s,%s,%d\n"
                % (t, FLOAT_FMT % trace.losses[t], FLOAT_FMT % trace.grad_norms[t], FLOAT_FMT % gap, int(prefix[t]))
            )


def load_trace(path) -> dict[str, np.ndarray]:
    """Read a trace file back into column arrays (comment lines are skipped)."""
    path = Path(path)
    with path.open() as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines or tuple(lines[0].split(",")) != TRACE_COLUMNS:
        raise InvalidInputError(f"{path} is not a descent trace file")
    rows = [ln.split(",") for ln in lines[1:]]
    return {
        "step": np.array([int(r[0]) for r in rows]),
        "loss": np.array([float(r[1]) for r in rows]),
        "grad_norm": np.array([float(r[2]) for r in rows]),
        "descent_gap": np.array([float(r[3]) for r in rows]),
        "monotone_so_far": np.array([bool(int(r[4])) for r in rows]),
    }
