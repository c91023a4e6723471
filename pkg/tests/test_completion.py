import numpy as np
import pytest

from grouse.completion import (
    CompletionProblem,
    fit_coefficients,
    low_rank_problem,
    relative_error,
    solve_completion,
    svd_baseline_error,
)
from grouse.engine import StepSchedule, SubspaceEstimate, TrackerConfig, evaluate_cost
from grouse.linalg import orthonormalize


def full_problem(n_rows, n_cols, rank, seed, passes=10):
    rng = np.random.default_rng(seed)
    truth = rng.standard_normal((n_rows, rank)) @ rng.standard_normal((rank, n_cols))
    rows, cols = np.nonzero(np.ones_like(truth, dtype=bool))
    problem = CompletionProblem(
        n_rows, n_cols, rank, rows, cols, truth[rows, cols], passes=passes, init_seed=seed
    )
    return problem, truth


# -- error metrics ------------------------------------------------------------

def test_relative_error_trivial_cases():
    V = np.arange(1.0, 7.0).reshape(2, 3)
    assert relative_error(V, V) == 0.0
    assert relative_error(np.zeros_like(V), V) == pytest.approx(1.0)
    assert relative_error(2 * V, V) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        relative_error(V, V.T)
    with pytest.raises(ValueError):
        relative_error(V, np.zeros_like(V))


def test_svd_baseline_exact_rank_is_zero():
    rng = np.random.default_rng(0)
    V = rng.standard_normal((30, 3)) @ rng.standard_normal((3, 20))
    assert svd_baseline_error(V, 3) < 1e-14
    assert svd_baseline_error(V, 0) == pytest.approx(1.0)


@pytest.mark.parametrize("n,d", [(10, 3), (25, 1), (8, 7)])
def test_svd_baseline_identity(n, d):
    assert svd_baseline_error(np.eye(n), d) == pytest.approx(np.sqrt((n - d) / n), rel=1e-14)


def test_svd_baseline_matches_truncated_product():
    V = np.random.default_rng(1).standard_normal((40, 25))
    U, s, Wt = np.linalg.svd(V, full_matrices=False)
    for d in (1, 5, 12):
        Vd = (U[:, :d] * s[:d]) @ Wt[:d]
        assert svd_baseline_error(V, d) == pytest.approx(relative_error(Vd, V), rel=1e-10)


# -- problem validation -------------------------------------------------------

def test_problem_validation():
    with pytest.raises(ValueError):
        CompletionProblem(5, 4, 4, [0], [0], [1.0])
    with pytest.raises(ValueError):
        CompletionProblem(5, 4, 0, [0], [0], [1.0])
    with pytest.raises(ValueError):
        CompletionProblem(5, 4, 2, [5], [0], [1.0])
    with pytest.raises(ValueError):
        CompletionProblem(5, 4, 2, [0, 0], [1, 1], [1.0, 2.0])
    with pytest.raises(ValueError):
        CompletionProblem(5, 4, 2, [0], [0], [np.inf])
    with pytest.raises(ValueError):
        CompletionProblem(5, 4, 2, [0, 1], [0], [1.0])


def test_columns_group_entries():
    p = CompletionProblem(4, 3, 1, [3, 0, 2], [2, 0, 2], [1.0, 2.0, 3.0])
    cols = p.columns()
    assert [len(c) for c in cols] == [1, 0, 2]
    np.testing.assert_array_equal(cols[2].support, [2, 3])
    np.testing.assert_array_equal(cols[2].values, [3.0, 1.0])
    np.testing.assert_array_equal(p.empty_columns, [1])


# -- solver -------------------------------------------------------------------

def test_fully_observed_small_matrix_recovered():
    problem, truth = full_problem(60, 80, 3, seed=2)
    result = solve_completion(problem)
    assert relative_error(result.reconstruction, truth) < 1e-6


def test_objective_equals_sum_of_column_costs():
    problem, _ = low_rank_problem(30, 40, 2, 0.5, noise_std=0.1, seed=3, passes=2)
    result = solve_completion(problem)
    U = result.basis.basis
    total = sum(evaluate_cost(result.basis, c) for c in problem.columns())
    A, rms = fit_coefficients(U, problem.columns())
    direct = sum(
        float(np.sum((c.values - U[c.support] @ A[:, j]) ** 2))
        for j, c in enumerate(problem.columns())
    )
    assert total == pytest.approx(direct, rel=1e-9)
    assert rms**2 * problem.n_observed == pytest.approx(direct, rel=1e-9)


def test_fit_history_nonincreasing():
    problem, _ = low_rank_problem(80, 100, 3, 0.4, seed=4, passes=8)
    history = solve_completion(problem).fit_history
    assert len(history) == 8
    diffs = np.diff(history)
    rises = diffs > 0
    assert rises.sum() <= 0.05 * diffs.size + 1e-12
    assert np.all(diffs[rises] < 1e-12)


def test_reconstruction_rank_bounded():
    problem, _ = low_rank_problem(40, 50, 4, 0.3, noise_std=0.5, seed=5, passes=2)
    X = solve_completion(problem).reconstruction
    s = np.linalg.svd(X, compute_uv=False)
    assert np.sum(s > 1e-10 * s[0]) <= 4


def test_shuffle_seed_determinism():
    problem, _ = low_rank_problem(30, 30, 2, 0.5, seed=6, passes=2)
    a = solve_completion(problem).reconstruction
    b = solve_completion(problem).reconstruction
    assert np.array_equal(a, b)
    problem.shuffle_seed += 1
    c = solve_completion(problem).reconstruction
    assert not np.array_equal(a, c)


def test_empty_columns_flagged_with_zero_coefficients():
    problem, truth = low_rank_problem(30, 20, 2, 0.6, seed=7, passes=3)
    keep = problem.cols != 5
    p = CompletionProblem(
        30, 20, 2, problem.rows[keep], problem.cols[keep], problem.values[keep], passes=3
    )
    result = solve_completion(p)
    np.testing.assert_array_equal(result.empty_columns, [5])
    np.testing.assert_array_equal(result.coefficients[:, 5], 0.0)
    np.testing.assert_array_equal(result.reconstruction[:, 5], 0.0)


def test_on_pass_callback_sees_each_pass():
    problem, _ = low_rank_problem(20, 20, 2, 0.5, seed=8, passes=3)
    seen = []
    solve_completion(problem, on_pass=lambda k, U: seen.append((k, U.shape)))
    assert seen == [(1, (20, 2)), (2, (20, 2)), (3, (20, 2))]


def test_constant_step_config_accepted():
    problem, truth = full_problem(30, 40, 2, seed=9, passes=10)
    cfg = TrackerConfig(schedule=StepSchedule("constant", 0.05))
    err = relative_error(solve_completion(problem, cfg).reconstruction, truth)
    assert err < 1e-3


def test_fit_coefficients_exact_on_span():
    rng = np.random.default_rng(10)
    U = orthonormalize(rng.standard_normal((12, 3)))
    A0 = rng.standard_normal((3, 5))
    X = U @ A0
    rows, cols = np.nonzero(rng.random(X.shape) < 0.7)
    p = CompletionProblem(12, 5, 3, rows, cols, X[rows, cols])
    A, rms = fit_coefficients(SubspaceEstimate(U).basis, p.columns())
    np.testing.assert_allclose(A, A0, atol=1e-10)
    assert rms < 1e-12
