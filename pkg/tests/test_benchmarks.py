import numpy as np
import pytest

from pbopt.benchmarks import (PROBLEMS, branin, get_problem, griewank,
                              map_action, normalize_point, parabola,
                              problem_names, rosenbrock)
from pbopt.errors import ConfigurationError, InputError

ANALYTIC = ("parabola", "rosenbrock2", "rosenbrock5", "rosenbrock10",
            "branin", "griewank")


class TestMapping:
    def test_endpoints(self):
        p = get_problem("parabola")
        assert np.allclose(map_action(np.full(2, -1.0), p), p.lower)
        assert np.allclose(map_action(np.full(2, 1.0), p), p.upper)

    def test_midpoint(self):
        p = get_problem("parabola")
        assert np.allclose(map_action(np.zeros(2), p), [0.0, 0.0])

    def test_start_point_normalizes_to_half(self):
        p = get_problem("parabola")
        assert np.allclose(normalize_point(np.array([2.5, 2.5]), p), [0.5, 0.5])

    def test_roundtrip_identity(self):
        rng = np.random.default_rng(0)
        for name in ANALYTIC:
            p = get_problem(name)
            a = rng.uniform(-0.999, 0.999, p.dim)
            back = normalize_point(map_action(a, p), p)
            assert np.max(np.abs(back - a)) < 1e-12

    def test_out_of_range_action_rejected(self):
        p = get_problem("parabola")
        with pytest.raises(InputError):
            map_action(np.array([1.2, 0.0]), p)
        with pytest.raises(InputError):
            map_action(np.array([0.0, 0.0, 0.0]), p)

    def test_batch_mapping(self):
        p = get_problem("branin")
        batch = np.array([[-1.0, -1.0], [1.0, 1.0], [0.0, 0.0]])
        mapped = map_action(batch, p)
        assert np.allclose(mapped, [[0.0, 0.0], [15.0, 15.0], [7.5, 7.5]])


class TestFunctions:
    def test_parabola(self):
        assert parabola([0.0, 0.0]) == 0.0
        assert parabola([2.5, 2.5]) == pytest.approx(12.5)
        assert parabola([-5.0, 5.0]) == pytest.approx(50.0)

    @pytest.mark.parametrize("d", [2, 5, 10])
    def test_rosenbrock_minimum_at_ones(self, d):
        assert rosenbrock(np.ones(d)) == 0.0

    def test_rosenbrock_values(self):
        assert rosenbrock([-1.0, 0.0]) == pytest.approx(104.0)
        assert rosenbrock(np.zeros(5)) == pytest.approx(4.0)
        assert rosenbrock(np.zeros(10)) == pytest.approx(9.0)

    def test_branin_global_minima(self):
        # two identical global minima; the second sits at (3*pi, 2.475)
        assert branin([np.pi, 2.275]) == pytest.approx(0.397887, abs=1e-5)
        assert branin([3 * np.pi, 2.475]) == pytest.approx(0.397887, abs=1e-5)

    def test_branin_start_value(self):
        assert branin([7.5, 7.5]) == pytest.approx(51.39723, abs=1e-3)

    def test_griewank_values(self):
        assert griewank([0.0, 0.0]) == 0.0
        assert griewank([np.pi, 0.0]) == pytest.approx(2.0024674, abs=1e-5)
        # direct evaluation of the 2-D variant with the sqrt(2) scaling
        assert griewank([5.0, 5.0]) == pytest.approx(1.2744346, abs=1e-4)

    def test_listed_minima_within_tolerance(self):
        checks = [
            ("parabola", [0.0, 0.0], 0.0),
            ("rosenbrock2", [1.0, 1.0], 0.0),
            ("branin", [np.pi, 2.275], 0.397887),
            ("griewank", [0.0, 0.0], 0.0),
        ]
        for name, point, value in checks:
            assert get_problem(name).cost(np.asarray(point)) == pytest.approx(
                value, abs=1e-5)


class TestRegistry:
    def test_contains_all_problems(self):
        names = problem_names()
        for expected in ANALYTIC + ("lorenz_stabilizer", "lorenz_oscillator"):
            assert expected in names

    def test_unknown_name_raises(self):
        with pytest.raises(ConfigurationError):
            get_problem("rastrigin")

    def test_starts_inside_bounds(self):
        for name, p in PROBLEMS.items():
            assert np.all(p.start >= p.lower) and np.all(p.start <= p.upper)
            assert np.all(p.lower < p.upper)
            assert p.start.size == p.dim

    def test_dimensions(self):
        dims = {"parabola": 2, "rosenbrock2": 2, "rosenbrock5": 5,
                "rosenbrock10": 10, "branin": 2, "griewank": 2,
                "lorenz_stabilizer": 4, "lorenz_oscillator": 4}
        for name, d in dims.items():
            assert get_problem(name).dim == d

    def test_cost_functions_are_pure(self):
        p = get_problem("rosenbrock2")
        x = np.array([-1.0, 0.0])
        assert p.cost(x) == p.cost(x)
        assert np.array_equal(x, [-1.0, 0.0])
