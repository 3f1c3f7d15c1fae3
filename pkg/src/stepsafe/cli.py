"""Command-line front end wiring the model, bounds and descent engine together.

Subcommands:

* ``bounds``      -- per-seed bound table plus mean/stddev summary rows
* ``train``       -- descent traces at eta = 1/bound for each selected bound
* ``scale-sweep`` -- descent traces at eta = scale/alpha2 over a scale grid
* ``oracle``      -- brute-force oracle next to the four bounds, with ratios

Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 I/O failure.
Per-run seeds derive from the master seed by fixed arithmetic: run r uses
seed + r for the data stream and (seed + r, 1) for the student init stream.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import relu
from .descent import DescentConfig, run_descent, save_trace
from .errors import InvalidInputError, NumericalFailureError
from .relu import NetConfig
from .tableio import write_table

BOUND_CHOICES = ("alpha1", "alpha2", "alpha3", "alpha4", "oracle")
DEFAULT_BOUNDS = ("alpha1", "alpha2", "alpha3", "alpha4")
DEFAULT_SCALES = (0.5, 1.0, 2.0, 4.0)

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_NUMERICAL_FAILURE = 2
EXIT_IO_FAILURE = 3


@dataclass
class ExperimentSpec:
    d: int = 10
    k: int = 5
    n: int = 1000
    seed: int = 0
    reps: int = 1
    steps: int = 100
    scales: tuple = DEFAULT_SCALES
    bounds: tuple = DEFAULT_BOUNDS
    alpha4_variant: str = "standard"
    out: Path = Path("results")
    timestamp: bool = True
    oracle_strategy: str = "auto"
    oracle_budget: int = 10_000

    def validate(self) -> None:
        if min(self.d, self.k, self.n) < 1:
            raise InvalidInputError("d, k and n must all be at least 1")
        if self.reps < 1:
            raise InvalidInputError("reps must be at least 1")
        if self.steps < 1:
            raise InvalidInputError("steps must be at least 1")
        if not self.scales or any(s <= 0 for s in self.scales):
            raise InvalidInputError("scale factors must be positive")
        bad = [b for b in self.bounds if b not in BOUND_CHOICES]
        if bad or not self.bounds:
            raise InvalidInputError(f"bound selection must be a nonempty subset of {BOUND_CHOICES}")
        if self.alpha4_variant not in ("standard", "paper"):
            raise InvalidInputError("alpha4 variant must be 'standard' or 'paper'")
        if self.oracle_strategy not in ("auto",) + relu.ORACLE_STRATEGIES:
            raise InvalidInputError("oracle strategy must be auto, pattern-enum or random-search")
        if self.oracle_budget < 1:
            raise InvalidInputError("oracle budget must be at least 1")

    def run_seed(self, rep: int) -> int:
        return self.seed + rep

    def stamp(self) -> str | None:
        return datetime.now(timezone.utc).isoformat() if self.timestamp else None


# --- spec file + flag merging ------------------------------------------------

_KEY_TO_FIELD = {
    "d": "d",
    "k": "k",
    "n": "n",
    "seed": "seed",
    "reps": "reps",
    "steps": "steps",
    "scales": "scales",
    "bounds": "bounds",
    "alpha4-variant": "alpha4_variant",
    "out": "out",
    "no-timestamp": "no_timestamp",
    "oracle-strategy": "oracle_strategy",
    "oracle-budget": "oracle_budget",
}


def _parse_scales(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise InvalidInputError(f"bad scale list {text!r}") from exc


def _parse_bounds(text: str) -> tuple:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise InvalidInputError(f"bad boolean value {text!r}")


def read_spec_file(path) -> dict:
    """Flat key=value file mirroring the flags; '#' starts a comment."""
    values = {}
    with Path(path).open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidInputError(f"{path}:{lineno}: expected key = value")
            key, text = (part.strip() for part in line.split("=", 1))
            if key not in _KEY_TO_FIELD:
                raise InvalidInputError(f"{path}:{lineno}: unknown key {key!r}")
            values[_KEY_TO_FIELD[key]] = text
    return values


def build_spec(args: argparse.Namespace) -> ExperimentSpec:
    """Defaults, overridden by the spec file, overridden by explicit flags."""
    spec = ExperimentSpec()
    if args.spec is not None:
        raw = read_spec_file(args.spec)
        converters = {
            "d": int, "k": int, "n": int, "seed": int, "reps": int, "steps": int,
            "scales": _parse_scales, "bounds": _parse_bounds,
            "alpha4_variant": str, "out": Path,
            "oracle_strategy": str, "oracle_budget": int,
        }
        for name, text in raw.items():
            if name == "no_timestamp":
                spec.timestamp = not _parse_bool(text)
            else:
                setattr(spec, name, converters[name](text))
    for name in ("d", "k", "n", "seed", "reps", "steps", "oracle_budget"):
        value = getattr(args, name)
        if value is not None:
            setattr(spec, name, value)
    if args.scales is not None:
        spec.scales = _parse_scales(args.scales)
    if args.bounds is not None:
        spec.bounds = _parse_bounds(args.bounds)
    if args.alpha4_variant is not None:
        spec.alpha4_variant = args.alpha4_variant
    if args.out is not None:
        spec.out = Path(args.out)
    if args.no_timestamp:
        spec.timestamp = False
    if args.oracle_strategy is not None:
        spec.oracle_strategy = args.oracle_strategy
    spec.validate()
    return spec


# --- shared helpers -----------------------------------------------------------


def _resolve_oracle_strategy(spec: ExperimentSpec) -> str:
    if spec.oracle_strategy != "auto":
        return spec.oracle_strategy
    if spec.n <= relu.PATTERN_ENUM_MAX_POINTS and spec.d <= relu.PATTERN_ENUM_MAX_DIM:
        return "pattern-enum"
    return "random-search"


def _bound_value(name: str, data: relu.ReluDataset, spec: ExperimentSpec, seed: int) -> float:
    if name == "alpha1":
        return relu.bound_alpha1(data, spec.k)
    if name == "alpha2":
        return relu.bound_alpha2(data, spec.k)
    if name == "alpha3":
        return relu.bound_alpha3(data, spec.k)
    if name == "alpha4":
        return relu.bound_alpha4(data, spec.k, spec.alpha4_variant)
    if name == "oracle":
        return relu.alpha_oracle(
            data, spec.k, _resolve_oracle_strategy(spec), spec.oracle_budget,
            rng=np.random.default_rng(seed),
        )
    raise InvalidInputError(f"unknown bound {name!r}")


def _summary_rows(kind_col_rows: list[list]) -> list[list]:
    """Append mean and stddev rows over the numeric columns of per-run rows."""
    body = np.array([[v for v in row[1:]] for row in kind_col_rows], dtype=float)
    mean = body.mean(axis=0)
    std = body.std(axis=0)
    return [["mean"] + [float(v) for v in mean], ["stddev"] + [float(v) for v in std]]


def _run_descent_for(data, spec: ExperimentSpec, eta: float, seed: int):
    if not np.isfinite(eta) or eta <= 0.0:
        raise NumericalFailureError(f"derived step size {eta!r} is unusable")
    w0 = relu.initial_weights(NetConfig(spec.d, spec.k, spec.n, seed))
    objective = relu.loss_objective(data)
    return run_descent(objective, DescentConfig(eta=eta, steps=spec.steps, x0=w0.flat))


# --- subcommands ---------------------------------------------------------------


def cmd_bounds(spec: ExperimentSpec) -> Path:
    spec.out.mkdir(parents=True, exist_ok=True)
    header = ["kind", "seed"] + list(spec.bounds)
    rows = []
    for rep in range(spec.reps):
        seed = spec.run_seed(rep)
        data = relu.generate_dataset(NetConfig(spec.d, spec.k, spec.n, seed))
        rows.append(["run", float(seed)] + [_bound_value(b, data, spec, seed) for b in spec.bounds])
    rows += _summary_rows(rows)
    out = spec.out / "bounds.csv"
    write_table(out, header, rows, timestamp=spec.stamp())
    mean_row = rows[-2]
    summary = ", ".join(f"{b}={v:.6g}" for b, v in zip(spec.bounds, mean_row[2:]))
    print(f"bounds: d={spec.d} k={spec.k} n={spec.n} reps={spec.reps} mean {summary}")
    print(f"wrote {out}")
    return out


def cmd_train(spec: ExperimentSpec) -> Path:
    spec.out.mkdir(parents=True, exist_ok=True)
    summary_rows = []
    for rep in range(spec.reps):
        seed = spec.run_seed(rep)
        data = relu.generate_dataset(NetConfig(spec.d, spec.k, spec.n, seed))
        for name in spec.bounds:
            value = _bound_value(name, data, spec, seed)
            trace = _run_descent_for(data, spec, 1.0 / value, seed)
            path = spec.out / f"train_{name}_seed{seed}.csv"
            save_trace(trace, path, timestamp=spec.stamp())
            summary_rows.append(
                [name, float(seed), float(value), 1.0 / value, float(trace.losses[-1]),
                 trace.monotone, trace.diverged]
            )
            print(
                f"train: {name}={value:.6g} eta={1.0 / value:.3e} seed={seed} "
                f"final_loss={trace.losses[-1]:.3e} monotone={trace.monotone}"
            )
    out = spec.out / "train_summary.csv"
    write_table(
        out, ["bound", "seed", "bound_value", "eta", "final_loss", "monotone", "diverged"],
        summary_rows, timestamp=spec.stamp(),
    )
    print(f"wrote {out}")
    return out


def cmd_scale_sweep(spec: ExperimentSpec) -> Path:
    spec.out.mkdir(parents=True, exist_ok=True)
    run_rows = []
    by_scale: dict[float, list[bool]] = {s: [] for s in spec.scales}
    for rep in range(spec.reps):
        seed = spec.run_seed(rep)
        data = relu.generate_dataset(NetConfig(spec.d, spec.k, spec.n, seed))
        a2 = relu.bound_alpha2(data, spec.k)
        for scale in spec.scales:
            trace = _run_descent_for(data, spec, scale / a2, seed)
            path = spec.out / f"sweep_s{scale:g}_seed{seed}.csv"
            save_trace(trace, path, timestamp=spec.stamp())
            run_rows.append(
                [float(scale), float(seed), float(a2), scale / a2, float(trace.losses[-1]),
                 trace.monotone, trace.diverged]
            )
            by_scale[scale].append(not trace.monotone)
    write_table(
        spec.out / "sweep_runs.csv",
        ["scale", "seed", "alpha2", "eta", "final_loss", "monotone", "diverged"],
        run_rows, timestamp=spec.stamp(),
    )
    summary = [[float(s), float(np.mean(flags)) if flags else 0.0] for s, flags in by_scale.items()]
    out = spec.out / "sweep_summary.csv"
    write_table(out, ["scale", "nonmonotone_fraction"], summary, timestamp=spec.stamp())
    for s, frac in summary:
        print(f"scale-sweep: scale={s:g} nonmonotone_fraction={frac:.2f}")
    print(f"wrote {out}")
    return out


def cmd_oracle(spec: ExperimentSpec) -> Path:
    spec.out.mkdir(parents=True, exist_ok=True)
    strategy = _resolve_oracle_strategy(spec)
    header = ["kind", "seed", "oracle", "alpha1", "alpha2", "alpha3", "alpha4", "oracle_over_alpha2"]
    rows = []
    for rep in range(spec.reps):
        seed = spec.run_seed(rep)
        data = relu.generate_dataset(NetConfig(spec.d, spec.k, spec.n, seed))
        report = relu.compute_bound_report(
            data, NetConfig(spec.d, spec.k, spec.n, seed),
            alpha4_variant=spec.alpha4_variant,
            oracle_strategy=strategy,
            oracle_budget=spec.oracle_budget,
            rng=np.random.default_rng(seed),
        )
        rows.append(
            ["run", float(seed), report.alpha_oracle, report.alpha1, report.alpha2,
             report.alpha3, report.alpha4, report.alpha_oracle / report.alpha2]
        )
    rows += _summary_rows(rows)
    out = spec.out / "oracle.csv"
    write_table(out, header, rows, timestamp=spec.stamp())
    print(f"oracle ({strategy}): mean oracle/alpha2 = {rows[-2][-1]:.4f}")
    print(f"wrote {out}")
    return out


# --- argument parsing ----------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; keep 1 for bad input
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID_INPUT, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog="stepsafe", description="Concavifier bounds and safe-step experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("bounds", "bound table over seeds"),
        ("train", "descent traces at eta = 1/bound"),
        ("scale-sweep", "descent traces at eta = scale/alpha2"),
        ("oracle", "brute-force oracle next to the bounds"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--spec", type=Path, default=None, help="key=value file; flags override it")
        p.add_argument("--d", type=int, default=None, help="input dimension")
        p.add_argument("--k", type=int, default=None, help="hidden neurons")
        p.add_argument("--n", type=int, default=None, help="data points")
        p.add_argument("--seed", type=int, default=None, help="master seed")
        p.add_argument("--reps", type=int, default=None, help="number of seeds (seed + index)")
        p.add_argument("--steps", type=int, default=None, help="descent steps per run")
        p.add_argument("--scales", type=str, default=None, help="comma list, e.g. 0.5,1,2,4")
        p.add_argument("--bounds", type=str, default=None, help=f"comma subset of {','.join(BOUND_CHOICES)}")
        p.add_argument("--alpha4-variant", choices=("standard", "paper"), default=None, dest="alpha4_variant")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--no-timestamp", action="store_true", dest="no_timestamp",
                       help="suppress the '# generated:' header line")
        p.add_argument("--oracle-strategy", choices=("auto", "pattern-enum", "random-search"),
                       default=None, dest="oracle_strategy")
        p.add_argument("--oracle-budget", type=int, default=None, dest="oracle_budget")
    return parser


_COMMANDS = {
    "bounds": cmd_bounds,
    "train": cmd_train,
    "scale-sweep": cmd_scale_sweep,
    "oracle": cmd_oracle,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        spec = build_spec(args)
        _COMMANDS[args.command](spec)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INVALID_INPUT
    except InvalidInputError as exc:
        print(f"stepsafe: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except NumericalFailureError as exc:
        print(f"stepsafe: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except OSError as exc:
        print(f"stepsafe: i/o failure: {exc}", file=sys.stderr)
        return EXIT_IO_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
