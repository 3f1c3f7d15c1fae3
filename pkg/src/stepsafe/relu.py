"""Single-hidden-layer ReLU teacher-student model and its concavifier bounds.

The network maps x in R^d to sum_j max(0, x^T w_j) over k hidden neurons
(no biases, output weights fixed to 1).  Targets come from a teacher with
the same architecture, so zero training loss is attainable.  The quadratic
loss over n points is

    l(w) = 1/(2n) * sum_i (f(x_i, w) - y_i)^2

whose almost-everywhere Hessian is (1/n) sum_i a(x_i, w) a(x_i, w)^T, where
a(x, w) stacks k copies of x, each masked by the activation indicator
1{x^T w_j >= 0}.  Four upper bounds on the optimal concavifier:

    alpha1 = (k/n) sum_i ||x_i||^2          (per-point top-eigenvalue sum)
    alpha2 = (1/n) lambda_max(sum_i abar_i abar_i^T)   (all-active matrix, tight)
    alpha3 = Gershgorin bound on the same all-active matrix
    alpha4 = Brauer/Cassini bound on the same matrix

plus a brute-force search ``alpha_oracle`` for the exact constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .eigenbounds import (
    SymMatrix,
    brauer_cassini_upper,
    gershgorin_upper,
    kron_allones_structure_lambda,
)
from .errors import InvalidInputError, UnsupportedOperationError
from .objectives import ObjectiveFunction

ORACLE_STRATEGIES = ("pattern-enum", "random-search")
PATTERN_ENUM_MAX_POINTS = 12
PATTERN_ENUM_MAX_DIM = 3
KINK_MARGIN_RTOL = 1e-6

# seed stream tag for student initializations, kept distinct from data streams
INIT_STREAM = 1


@dataclass(frozen=True)
class NetConfig:
    """Problem size and data seed for one teacher-student instance."""

    d: int
    k: int
    n: int
    seed: int

    def __post_init__(self):
        if self.d < 1 or self.k < 1 or self.n < 1:
            raise InvalidInputError("d, k and n must all be at least 1")


@dataclass(frozen=True)
class Weights:
    """Flat weight vector in R^{k*d}; block j holds the weights of neuron j."""

    flat: np.ndarray
    k: int
    d: int

    def __post_init__(self):
        flat = np.atleast_1d(np.asarray(self.flat, dtype=float))
        if self.k < 1 or self.d < 1:
            raise InvalidInputError("k and d must be at least 1")
        if flat.shape != (self.k * self.d,):
            raise InvalidInputError(f"expected {self.k * self.d} weights, got shape {flat.shape}")
        object.__setattr__(self, "flat", flat)

    @property
    def matrix(self) -> np.ndarray:
        """Row j is the weight vector of neuron j."""
        return self.flat.reshape(self.k, self.d)

    def block(self, j: int) -> np.ndarray:
        if not 0 <= j < self.k:
            raise InvalidInputError(f"neuron index {j} out of range")
        return self.flat[j * self.d : (j + 1) * self.d]


def _forward_all(inputs: np.ndarray, wmat: np.ndarray) -> np.ndarray:
    return np.maximum(inputs @ wmat.T, 0.0).sum(axis=1)


@dataclass(frozen=True)
class ReluDataset:
    """Teacher-generated inputs/targets; targets are exactly the teacher output."""

    inputs: np.ndarray
    targets: np.ndarray
    teacher: Weights
    seed: int

    def __post_init__(self):
        inputs = np.asarray(self.inputs, dtype=float)
        targets = np.asarray(self.targets, dtype=float)
        if inputs.ndim != 2 or inputs.shape[0] < 1:
            raise InvalidInputError("inputs must be a nonempty (n, d) array")
        if targets.shape != (inputs.shape[0],):
            raise InvalidInputError("targets must be a vector with one entry per input")
        if inputs.shape[1] != self.teacher.d:
            raise InvalidInputError("input dimension does not match the teacher")
        if not np.array_equal(targets, _forward_all(inputs, self.teacher.matrix)):
            raise InvalidInputError("targets do not equal the teacher forward pass")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "targets", targets)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]


def generate_dataset(config: NetConfig) -> ReluDataset:
    """Standard-Gaussian inputs and teacher weights, fully determined by the seed.

    Draw order is pinned: inputs first, then the teacher.
    """
    rng = np.random.default_rng(config.seed)
    inputs = rng.standard_normal((config.n, config.d))
    teacher = Weights(rng.standard_normal(config.k * config.d), k=config.k, d=config.d)
    targets = _forward_all(inputs, teacher.matrix)
    return ReluDataset(inputs=inputs, targets=targets, teacher=teacher, seed=config.seed)


def initial_weights(config: NetConfig) -> Weights:
    """Student initialization, standard Gaussian from the seed stream
    (config.seed, INIT_STREAM), separate from the data stream."""
    rng = np.random.default_rng([config.seed, INIT_STREAM])
    return Weights(rng.standard_normal(config.k * config.d), k=config.k, d=config.d)


def forward(x, w: Weights) -> float:
    """sum_j max(0, x^T w_j)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (w.d,):
        raise InvalidInputError(f"expected a point of dimension {w.d}, got shape {x.shape}")
    return float(np.maximum(w.matrix @ x, 0.0).sum())


def forward_all(inputs, w: Weights) -> np.ndarray:
    """Batched forward pass; the canonical computation behind dataset targets.

    The exact-equality invariant of ReluDataset is pinned to this routine
    (single-point matrix products may round differently).
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 2 or inputs.shape[1] != w.d:
        raise InvalidInputError(f"expected an (n, {w.d}) input array, got shape {inputs.shape}")
    return _forward_all(inputs, w.matrix)


def loss(w: Weights, data: ReluDataset) -> float:
    """1/(2n) sum_i (forward(x_i, w) - y_i)^2."""
    if w.d != data.d:
        raise InvalidInputError("weight dimension does not match the data")
    resid = _forward_all(data.inputs, w.matrix) - data.targets
    return float(0.5 * np.mean(resid**2))


def gradient(w: Weights, data: ReluDataset) -> np.ndarray:
    """(1/n) sum_i (forward(x_i, w) - y_i) * a(x_i, w), flat in R^{kd}."""
    if w.d != data.d:
        raise InvalidInputError("weight dimension does not match the data")
    z = data.inputs @ w.matrix.T
    resid = np.maximum(z, 0.0).sum(axis=1) - data.targets
    mask = z >= 0.0
    gmat = (mask * resid[:, None]).T @ data.inputs / data.n
    return gmat.reshape(-1)


def a_vector(x, w: Weights) -> np.ndarray:
    """Stack of k copies of x, block j masked by 1{x^T w_j >= 0}.

    The indicator is >= so zero inner products count as active; in particular
    w = 0 activates every neuron.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (w.d,):
        raise InvalidInputError(f"expected a point of dimension {w.d}, got shape {x.shape}")
    mask = (w.matrix @ x) >= 0.0
    return (mask[:, None] * x[None, :]).reshape(-1)


def abar_vector(x, k: int) -> np.ndarray:
    """All-active version of a(x, w): k stacked copies of x."""
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return np.tile(x, k)


def alpha_single_point(x, k: int) -> float:
    """Exact optimal concavifier of the single-point loss: k * ||x||^2."""
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(k) * float(x @ x)


def bound_alpha1(data: ReluDataset, k: int) -> float:
    """(k/n) sum_i ||x_i||^2."""
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    return float(k) / data.n * float((data.inputs**2).sum())


def second_moment_matrix(data: ReluDataset) -> SymMatrix:
    """S = (1/n) sum_i x_i x_i^T, symmetrized against round-off."""
    g = data.inputs.T @ data.inputs / data.n
    return SymMatrix((g + g.T) / 2.0)


def allactive_gram_matrix(data: ReluDataset, k: int) -> SymMatrix:
    """Explicit kd x kd matrix M = (1/n) sum_i abar(x_i) abar(x_i)^T."""
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    stacked = np.tile(data.inputs, (1, k))
    m = stacked.T @ stacked / data.n
    return SymMatrix((m + m.T) / 2.0)


def bound_alpha2(data: ReluDataset, k: int) -> float:
    """(1/n) lambda_max(sum_i abar_i abar_i^T), via the block-structure fast path."""
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    return kron_allones_structure_lambda(second_moment_matrix(data), k)


def bound_alpha3(data: ReluDataset, k: int) -> float:
    """Gershgorin upper bound on the explicit all-active matrix."""
    return gershgorin_upper(allactive_gram_matrix(data, k))


def bound_alpha4(data: ReluDataset, k: int, variant: str = "standard") -> float:
    """Brauer/Cassini upper bound on the explicit all-active matrix."""
    if k * data.d < 2:
        raise InvalidInputError("the pairwise bound requires k*d >= 2")
    return brauer_cassini_upper(allactive_gram_matrix(data, k), variant)


def _sphere_grid(d: int) -> np.ndarray:
    """Dense deterministic grid of unit directions used to certify patterns."""
    if d == 1:
        return np.array([[1.0], [-1.0]])
    if d == 2:
        t = np.linspace(0.0, 2.0 * np.pi, 4096, endpoint=False)
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if d == 3:
        m = 8192
        i = np.arange(m)
        golden = (1.0 + np.sqrt(5.0)) / 2.0
        z = 1.0 - 2.0 * (i + 0.5) / m
        r = np.sqrt(np.maximum(0.0, 1.0 - z**2))
        theta = 2.0 * np.pi * i / golden
        return np.stack([r * np.cos(theta), r * np.sin(theta), z], axis=1)
    raise UnsupportedOperationError("pattern enumeration is limited to d <= 3")


def realizable_activation_patterns(inputs: np.ndarray) -> np.ndarray:
    """All sign vectors s with s_i = 1{x_i^T v >= 0} certified by some direction v.

    Certification samples v over a dense sphere grid plus the zero vector
    (which activates everything).  Returns a (p, n) boolean array of distinct
    patterns.  A pattern the grid misses only lowers the resulting oracle
    value, never raises it.
    """
    inputs = np.asarray(inputs, dtype=float)
    dirs = _sphere_grid(inputs.shape[1])
    signs = (inputs @ dirs.T) >= 0.0
    patterns = np.vstack([signs.T, np.ones((1, inputs.shape[0]), dtype=bool)])
    return np.unique(patterns, axis=0)


def _pattern_enum_value(data: ReluDataset, k: int) -> float:
    patterns = realizable_activation_patterns(data.inputs)
    best = 0.0
    for s in patterns:
        sub = data.inputs[s]
        if sub.shape[0] == 0:
            continue
        lam = float(np.linalg.eigvalsh(sub.T @ sub)[-1])
        best = max(best, lam)
    # The best assignment gives every neuron the same argmax pattern: the
    # resulting matrix has identical blocks and top eigenvalue k * lambda_max
    # of the masked Gram, and Cauchy-Schwarz across blocks shows no mixed
    # assignment can exceed that.
    return float(k) * best / data.n


def _random_search_value(data: ReluDataset, k: int, budget: int, rng: np.random.Generator) -> float:
    inputs = data.inputs
    n, d = inputs.shape
    kd = k * d
    gram = inputs @ inputs.T if n < kd else None
    chunk = int(max(1, min(1024, 2e7 // max(1, n * kd))))
    best = 0.0
    remaining = budget
    while remaining > 0:
        c = min(chunk, remaining)
        remaining -= c
        w = rng.standard_normal((c, k, d))
        masks = np.einsum("nd,ckd->cnk", inputs, w, optimize=True) >= 0.0
        if kd <= n:
            stacked = (masks[:, :, :, None] * inputs[None, :, None, :]).reshape(c, n, kd)
            grams = stacked.transpose(0, 2, 1) @ stacked
        else:
            mf = masks.astype(float)
            grams = (mf @ mf.transpose(0, 2, 1)) * gram[None, :, :]
        best = max(best, float(np.linalg.eigvalsh(grams)[:, -1].max()))
    return best / n


def alpha_oracle(
    data: ReluDataset,
    k: int,
    strategy: str,
    budget: int = 10_000,
    rng: np.random.Generator | None = None,
) -> float:
    """Search for the exact optimal concavifier (1/n) max_w lambda_max of the
    masked Gram sum.

    ``pattern-enum`` enumerates certified activation patterns and is limited
    to n <= 12 and d <= 3; ``random-search`` maximizes over ``budget`` random
    weight draws and reports a lower bound on the optimum.  The reported
    value never asserts global optimality.
    """
    if k < 1:
        raise InvalidInputError("k must be at least 1")
    if strategy not in ORACLE_STRATEGIES:
        raise InvalidInputError(f"unknown strategy {strategy!r}; expected one of {ORACLE_STRATEGIES}")
    if strategy == "pattern-enum":
        if data.n > PATTERN_ENUM_MAX_POINTS or data.d > PATTERN_ENUM_MAX_DIM:
            raise UnsupportedOperationError(
                f"pattern enumeration needs n <= {PATTERN_ENUM_MAX_POINTS} and d <= {PATTERN_ENUM_MAX_DIM}"
            )
        return _pattern_enum_value(data, k)
    if budget < 1:
        raise InvalidInputError("budget must be at least 1")
    rng = rng if rng is not None else np.random.default_rng(data.seed)
    return _random_search_value(data, k, budget, rng)


@dataclass(frozen=True)
class BoundReport:
    """The four concavifier bounds (plus optional oracle) for one configuration."""

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    alpha_oracle: float | None
    config: NetConfig
    alpha4_variant: str


def compute_bound_report(
    data: ReluDataset,
    config: NetConfig,
    alpha4_variant: str = "standard",
    oracle_strategy: str | None = None,
    oracle_budget: int = 10_000,
    rng: np.random.Generator | None = None,
) -> BoundReport:
    oracle = None
    if oracle_strategy is not None:
        oracle = alpha_oracle(data, config.k, oracle_strategy, oracle_budget, rng)
    return BoundReport(
        alpha1=bound_alpha1(data, config.k),
        alpha2=bound_alpha2(data, config.k),
        alpha3=bound_alpha3(data, config.k),
        alpha4=bound_alpha4(data, config.k, alpha4_variant),
        alpha_oracle=oracle,
        config=config,
        alpha4_variant="paper" if alpha4_variant == "paper-literal" else alpha4_variant,
    )


def near_kink(w: Weights, data: ReluDataset, margin: float = KINK_MARGIN_RTOL) -> bool:
    """True when any |x_i^T w_j| < margin * ||x_i|| * ||w_j||.

    Gradient checks are skipped at such points: the loss gradient jumps across
    activation boundaries, so finite differences straddling one are meaningless.
    """
    z = np.abs(data.inputs @ w.matrix.T)
    scale = np.linalg.norm(data.inputs, axis=1)[:, None] * np.linalg.norm(w.matrix, axis=1)[None, :]
    return bool(np.any(z < margin * scale))


def loss_hessian_matrix(w: Weights, data: ReluDataset) -> SymMatrix:
    """Almost-everywhere loss Hessian (1/n) sum_i a(x_i, w) a(x_i, w)^T."""
    mask = (data.inputs @ w.matrix.T) >= 0.0
    stacked = (mask[:, :, None] * data.inputs[:, None, :]).reshape(data.n, w.k * w.d)
    h = stacked.T @ stacked / data.n
    return SymMatrix((h + h.T) / 2.0)


def loss_objective(data: ReluDataset) -> ObjectiveFunction:
    """The training loss as an objective over flat weights in R^{kd}."""
    k, d = data.teacher.k, data.teacher.d

    def _wrap(flat: np.ndarray) -> Weights:
        return Weights(np.asarray(flat, dtype=float), k=k, d=d)

    return ObjectiveFunction(
        dim=k * d,
        evaluate=lambda flat: loss(_wrap(flat), data),
        gradient=lambda flat: gradient(_wrap(flat), data),
        hessian=lambda flat: loss_hessian_matrix(_wrap(flat), data),
    )


# --- delimited-text export/import ------------------------------------------
#
# Dataset file: header "x0,...,x{d-1},y", one row per point, 17 significant
# digits so float64 values round-trip exactly.  Teacher file: the kd weights,
# one per line, no header.

FLOAT_FMT = "%.17g"


def save_dataset(data: ReluDataset, inputs_path, teacher_path) -> None:
    inputs_path, teacher_path = Path(inputs_path), Path(teacher_path)
    header = ",".join([f"x{i}" for i in range(data.d)] + ["y"])
    rows = np.column_stack([data.inputs, data.targets])
    with inputs_path.open("w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")
    with teacher_path.open("w") as fh:
        for v in data.teacher.flat:
            fh.write(FLOAT_FMT % v + "\n")


def load_dataset(inputs_path, teacher_path, seed: int = -1) -> ReluDataset:
    """Load a dataset pair written by save_dataset.

    The teacher width k is recovered from the weight-file length; targets are
    re-verified against the teacher forward pass.  Datasets loaded from disk
    carry seed -1 unless told otherwise.
    """
    inputs_path, teacher_path = Path(inputs_path), Path(teacher_path)
    with inputs_path.open() as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise InvalidInputError(f"{inputs_path} is empty")
    header = lines[0].split(",")
    if len(header) < 2 or header[-1] != "y":
        raise InvalidInputError(f"{inputs_path} has an unexpected header {header!r}")
    d = len(header) - 1
    table = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float)
    if table.ndim != 2 or table.shape[1] != d + 1:
        raise InvalidInputError(f"{inputs_path} rows do not match the header")
    flat = np.loadtxt(teacher_path, dtype=float, ndmin=1)
    if flat.shape[0] % d != 0:
        raise InvalidInputError("teacher weight count is not a multiple of the input dimension")
    teacher = Weights(flat, k=flat.shape[0] // d, d=d)
    return ReluDataset(inputs=table[:, :d], targets=table[:, d], teacher=teacher, seed=seed)
