import itertools

import numpy as np
import pytest

from submanifold_ot.config import TransportConfig
from submanifold_ot.errors import (
    DimensionMismatchError,
    InfeasibleTransportError,
    IterationLimitError,
    SolverLimitError,
)
from submanifold_ot.measures import DiscreteMeasure
from submanifold_ot.transport import solver as solver_module
from submanifold_ot.transport import (
    check_duals,
    cost_matrix,
    solve_assignment,
    solve_exact,
    solver_report,
    wasserstein2,
)


def _brute_force_cost(mu, nu):
    costs = cost_matrix(mu, nu)
    n = mu.size
    return min(
        costs[np.arange(n), list(p)].sum() / n for p in itertools.permutations(range(n))
    )


def test_one_dimensional_solution_is_the_sorted_matching(rng):
    xs = rng.normal(size=6)
    ys = rng.normal(size=6) + 2.0
    mu = DiscreteMeasure.from_points(xs[:, None])
    nu = DiscreteMeasure.from_points(ys[:, None])
    solution = solve_exact(mu, nu)
    expected = np.zeros((6, 6))
    expected[np.argsort(xs), np.argsort(ys)] = 1.0 / 6
    assert np.allclose(solution.plan.dense(), expected)
    assert solution.method == "network-simplex"
    assert solution.iterations == 1


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_exact_cost_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    mu = DiscreteMeasure.from_points(rng.normal(size=(6, 2)))
    nu = DiscreteMeasure.from_points(rng.normal(size=(6, 2)) + 1.0)
    expected = _brute_force_cost(mu, nu)
    assert solve_exact(mu, nu).cost == pytest.approx(expected, abs=1e-12)
    assert solve_assignment(mu, nu).cost == pytest.approx(expected, abs=1e-12)
    assert wasserstein2(mu, nu) == pytest.approx(np.sqrt(expected), abs=1e-10)


def test_duals_certify_optimality(rng):
    mu = DiscreteMeasure.from_points(rng.normal(size=(8, 3)), rng.uniform(1, 2, 8))
    nu = DiscreteMeasure.from_points(rng.normal(size=(5, 3)), rng.uniform(1, 2, 5))
    solution = solve_exact(mu, nu)
    duals = check_duals(solution)
    assert duals["feasibility_violation"] <= 1e-9
    assert duals["support_slack"] <= 1e-9
    assert solution.dual_gap <= 1e-9


def test_solver_report_keys(rng):
    mu = DiscreteMeasure.from_points(rng.normal(size=(5, 2)))
    nu = DiscreteMeasure.from_points(rng.normal(size=(4, 2)))
    report = solver_report(solve_exact(mu, nu))
    assert set(report) == {
        "cost",
        "support_size",
        "dual_gap",
        "monotone_certificate",
        "iterations",
    }
    assert report["monotone_certificate"] is True
    assert 5 <= report["support_size"] <= 8


def test_unequal_masses_are_infeasible():
    mu = DiscreteMeasure(np.array([[0.0], [1.0]]), np.array([1.0, 1.0]))
    nu = DiscreteMeasure.from_points([[0.0], [1.0]])
    with pytest.raises(InfeasibleTransportError):
        solve_exact(mu, nu)


def test_instance_checks():
    mu = DiscreteMeasure.from_points(np.zeros((4, 2)) + np.arange(4)[:, None])
    with pytest.raises(DimensionMismatchError):
        solve_exact(mu, DiscreteMeasure.from_points([[0.0, 0.0, 0.0]]))
    with pytest.raises(SolverLimitError) as excinfo:
        solve_exact(mu, mu, TransportConfig(max_atoms=3))
    assert excinfo.value.limit == 3


def test_assignment_needs_uniform_measures():
    mu = DiscreteMeasure.from_points([[0.0], [1.0]], masses=[1.0, 2.0])
    with pytest.raises(ValueError):
        solve_assignment(mu, mu)
    uniform = DiscreteMeasure.from_points([[0.0], [1.0]])
    with pytest.raises(ValueError, match="no duals"):
        check_duals(solve_assignment(uniform, uniform))


def test_exact_cost_matches_brute_force_on_many_small_draws():
    rng = np.random.default_rng(500)
    permutations = {
        n: np.array(list(itertools.permutations(range(n)))) for n in range(1, 8)
    }
    for _ in range(500):
        n = int(rng.integers(1, 8))
        dim = int(rng.integers(1, 5))
        mu = DiscreteMeasure.from_points(rng.normal(size=(n, dim)))
        nu = DiscreteMeasure.from_points(rng.normal(size=(n, dim)))
        costs = cost_matrix(mu, nu)
        expected = costs[np.arange(n), permutations[n]].sum(axis=1).min() / n
        assert solve_exact(mu, nu).cost == pytest.approx(expected, abs=1e-12)


def test_iteration_cap_error_reports_the_cap(monkeypatch):
    calls = []

    def capped_emd(a, b, costs, numItermax, log):
        calls.append(numItermax)
        return np.zeros((len(a), len(b))), {
            "warning": "numItermax reached before optimality. Try to increase numItermax.",
            "u": np.zeros(len(a)),
            "v": np.zeros(len(b)),
        }

    monkeypatch.setattr(solver_module.ot, "emd", capped_emd)
    mu = DiscreteMeasure.from_points([[0.0], [1.0]])
    with pytest.raises(IterationLimitError) as excinfo:
        solve_exact(mu, mu, TransportConfig(num_itermax=100))
    assert calls == [100, 1000, 10_000]
    assert excinfo.value.iterations == 10_000
    assert excinfo.value.passes == solver_module.MAX_PASSES
    assert "10000 iterations" in str(excinfo.value)
    assert not isinstance(excinfo.value, SolverLimitError)


def test_iteration_cap_is_retried_with_a_larger_cap(monkeypatch):
    real_emd = solver_module.ot.emd
    calls = []

    def first_pass_capped(a, b, costs, numItermax, log):
        calls.append(numItermax)
        if len(calls) == 1:
            return np.zeros((len(a), len(b))), {"warning": "numItermax reached"}
        return real_emd(a, b, costs, numItermax=numItermax, log=log)

    monkeypatch.setattr(solver_module.ot, "emd", first_pass_capped)
    mu = DiscreteMeasure.from_points([[0.0], [1.0]])
    nu = DiscreteMeasure.from_points([[1.0], [0.0]])
    solution = solve_exact(mu, nu, TransportConfig(num_itermax=50))
    assert calls == [50, 500]
    assert solution.iterations == 2
    assert solution.cost == pytest.approx(0.0, abs=1e-15)
