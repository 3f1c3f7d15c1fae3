"""Tests for the fixed-step descent engine and trace recording."""

import numpy as np
import pytest

from stepsafe.descent import DescentConfig, gd_step, load_trace, run_descent, save_trace
from stepsafe.errors import InvalidInputError, NumericalFailureError
from stepsafe.objectives import ObjectiveFunction, quadratic_objective, upper_quadratic_check
from stepsafe.relu import NetConfig, generate_dataset, initial_weights, loss_objective


class TestGdStep:
    def test_basic(self):
        assert np.array_equal(gd_step([1.0, 1.0], [1.0, 0.0], 0.5), [0.5, 1.0])

    def test_zero_gradient(self):
        x = np.array([2.0, -3.0])
        assert np.array_equal(gd_step(x, np.zeros(2), 0.1), x)

    def test_exact_minimizer_of_isotropic_quadratic(self):
        x = np.array([3.0, -4.0])
        assert np.array_equal(gd_step(x, x, 1.0), np.zeros(2))

    def test_nonfinite_gradient(self):
        with pytest.raises(NumericalFailureError):
            gd_step([1.0], [np.nan], 0.1)

    def test_bad_eta(self):
        with pytest.raises(InvalidInputError):
            gd_step([1.0], [1.0], 0.0)


class TestRunDescent:
    def test_isotropic_quadratic_one_step(self):
        f = quadratic_objective(np.eye(2))
        trace = run_descent(f, DescentConfig(eta=1.0, steps=5, x0=[3.0, 4.0]))
        assert np.array_equal(trace.losses, [12.5, 0.0, 0.0, 0.0, 0.0, 0.0])
        assert np.all(trace.gaps >= 0.0)
        assert trace.monotone and not trace.diverged

    def test_quadratic_contraction_rate(self):
        rng = np.random.default_rng(3)
        diag = rng.uniform(0.5, 4.0, size=6)
        f = quadratic_objective(np.diag(diag))
        x0 = rng.standard_normal(6)
        steps = 1000
        trace = run_descent(f, DescentConfig(eta=1.0 / diag.max(), steps=steps, x0=x0))
        bound = trace.losses[0] * (1.0 - diag.min() / diag.max()) ** (2 * steps) + 1e-12
        assert trace.losses[-1] <= bound
        assert trace.monotone

    def test_descent_gaps_nonnegative_at_safe_step(self):
        rng = np.random.default_rng(5)
        g = rng.standard_normal((5, 5))
        a = (g @ g.T + (g @ g.T).T) / 2
        f = quadratic_objective(a)
        alpha = np.linalg.eigvalsh(a)[-1]
        trace = run_descent(f, DescentConfig(eta=1.0 / alpha, steps=200, x0=rng.standard_normal(5)))
        tol = 1e-9 * np.maximum(1.0, np.abs(trace.losses[:-1]))
        assert np.all(trace.gaps >= -tol)

    def test_post_hoc_quadratic_check_on_iterates(self):
        data = generate_dataset(NetConfig(d=4, k=2, n=30, seed=2))
        from stepsafe.relu import bound_alpha2

        alpha = bound_alpha2(data, 2)
        f = loss_objective(data)
        w0 = initial_weights(NetConfig(d=4, k=2, n=30, seed=2))
        trace = run_descent(f, DescentConfig(eta=1.0 / alpha, steps=40, x0=w0.flat))
        # replay and verify the quadratic model between consecutive iterates
        x = w0.flat.copy()
        for _ in range(10):
            g = f.gradient(x)
            y = x - trace.eta * g
            assert upper_quadratic_check(f, x, y, alpha).holds
            x = y

    @pytest.mark.filterwarnings("ignore:overflow encountered")
    def test_divergence_flagged(self):
        f = ObjectiveFunction(
            dim=1,
            evaluate=lambda x: float(x[0] ** 4),
            gradient=lambda x: 4.0 * x**3,
        )
        trace = run_descent(f, DescentConfig(eta=10.0, steps=100, x0=[2.0]))
        assert trace.diverged
        assert not trace.monotone
        assert trace.losses.shape[0] <= 101
        assert np.all(np.isfinite(trace.losses))

    def test_gradient_norm_stop(self):
        f = quadratic_objective(np.eye(3))
        trace = run_descent(
            f, DescentConfig(eta=1.0, steps=50, x0=[1.0, 2.0, 3.0], grad_norm_stop=1e-12)
        )
        assert trace.losses.shape[0] < 51

    def test_trace_determinism(self):
        data = generate_dataset(NetConfig(d=3, k=2, n=20, seed=6))
        f = loss_objective(data)
        cfg = DescentConfig(eta=0.05, steps=30, x0=initial_weights(NetConfig(3, 2, 20, 6)).flat)
        t1, t2 = run_descent(f, cfg), run_descent(f, cfg)
        assert np.array_equal(t1.losses, t2.losses)
        assert np.array_equal(t1.gaps, t2.gaps)
        assert np.array_equal(t1.final_point, t2.final_point)

    def test_zero_loss_at_teacher_init(self):
        data = generate_dataset(NetConfig(d=3, k=2, n=20, seed=8))
        f = loss_objective(data)
        trace = run_descent(f, DescentConfig(eta=0.1, steps=20, x0=data.teacher.flat))
        assert np.array_equal(trace.losses, np.zeros(21))

    def test_dimension_mismatch(self):
        f = quadratic_objective(np.eye(2))
        with pytest.raises(InvalidInputError):
            run_descent(f, DescentConfig(eta=0.1, steps=5, x0=[1.0]))


class TestTraceIO:
    def test_round_trip(self, tmp_path):
        f = quadratic_objective(np.diag([1.0, 2.0]))
        trace = run_descent(f, DescentConfig(eta=0.3, steps=12, x0=[1.0, -1.5]))
        path = tmp_path / "trace.csv"
        save_trace(trace, path)
        cols = load_trace(path)
        assert np.array_equal(cols["loss"], trace.losses)
        assert np.array_equal(cols["grad_norm"], trace.grad_norms)
        assert np.array_equal(cols["descent_gap"][:-1], trace.gaps)
        assert np.isnan(cols["descent_gap"][-1])
        assert np.array_equal(cols["monotone_so_far"], trace.monotone_prefix())

    def test_timestamp_header_skipped(self, tmp_path):
        f = quadratic_objective(np.eye(1))
        trace = run_descent(f, DescentConfig(eta=0.5, steps=3, x0=[1.0]))
        path = tmp_path / "trace.csv"
        save_trace(trace, path, timestamp="2026-01-01T00:00:00Z")
        assert path.read_text().startswith("# generated:")
        cols = load_trace(path)
        assert cols["loss"].shape[0] == trace.losses.shape[0]

    def test_rejects_foreign_file(self, tmp_path):
        path = tmp_path / "junk.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(InvalidInputError):
            load_trace(path)
