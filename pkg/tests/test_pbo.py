import math

import numpy as np
import pytest

from pbopt.benchmarks import get_problem
from pbopt.distribution import angle_count, log_density, make_params
from pbopt.errors import ConfigurationError
from pbopt.nets import init_network, mlp_spec, set_output_bias
from pbopt.pbo import (NetworkHyper, PboAgent, PboConfig, PolicyTriple,
                       decay_factor, decayed_advantage, off_policy_loss,
                       pbo_loss, policy_forward, population_size,
                       whiten_rewards)


def make_policy_triple(d, seed=0, gain=1e-2, hidden=(2, 2, 2)):
    n_angles = angle_count(d)
    return PolicyTriple(
        init_network(mlp_spec(2, hidden, d, "tanh", gain), seed),
        init_network(mlp_spec(2, hidden, d, "sigmoid", gain), seed + 1),
        init_network(mlp_spec(2, hidden, n_angles, "sigmoid", gain), seed + 2)
        if n_angles else None)


def parabola_evaluator(problem):
    return lambda X: np.array([problem.cost(x) for x in X])


class TestPopulationSize:
    def test_values(self):
        assert population_size(1) == 4
        assert population_size(2) == 6
        assert population_size(10) == 10

    def test_rejects_zero(self):
        with pytest.raises(ConfigurationError):
            population_size(0)


class TestWhitening:
    def test_constant_rewards_give_zeros(self):
        assert np.array_equal(whiten_rewards([5.0, 5.0, 5.0]), np.zeros(3))

    def test_standardized_and_floored(self):
        out = whiten_rewards([1.0, 2.0, 3.0])
        assert np.allclose(out, [0.0, 0.0, 1.224745], atol=1e-6)

    def test_affine_invariance(self):
        rng = np.random.default_rng(0)
        r = rng.normal(0, 3, 12)
        for a, b in ((2.0, 5.0), (0.3, -7.0), (1e4, 0.0)):
            assert np.allclose(whiten_rewards(a * r + b), whiten_rewards(r),
                               atol=1e-10)

    def test_nonnegative(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            assert np.all(whiten_rewards(rng.normal(0, 1, 8)) >= 0.0)


class TestDecay:
    def test_reference_values(self):
        assert decay_factor(2) == pytest.approx(0.503415, abs=1e-6)
        assert decay_factor(5) == pytest.approx(0.826226, abs=1e-6)
        assert decay_factor(10) == pytest.approx(0.969803, abs=1e-6)

    def test_limit_toward_one(self):
        assert decay_factor(2, alpha=200.0) == 1.0

    def test_decayed_advantage(self):
        assert decayed_advantage(0, 0.7, 0.5) == 0.7
        assert decayed_advantage(1, 1.2, 0.5) == pytest.approx(0.6)
        assert decayed_advantage(3, 0.8, 0.5) == pytest.approx(0.1)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            decay_factor(0)
        with pytest.raises(ConfigurationError):
            decay_factor(2, alpha=0.0)


class TestLosses:
    def _policy(self):
        return make_params([0.1, -0.2], [0.4, 0.6], [1.2])

    def test_zero_advantages_zero_loss(self):
        policy = self._policy()
        actions = np.array([[0.0, 0.0], [0.5, -0.5]])
        assert pbo_loss(actions, [0.0, 0.0], policy) == 0.0

    def test_single_record_equals_log_density(self):
        policy = self._policy()
        a = np.array([0.3, 0.1])
        assert pbo_loss(a[None], [1.0], policy) == pytest.approx(
            log_density(policy, a), abs=1e-12)

    def test_weighted_mean_identity(self):
        policy = self._policy()
        actions = np.array([[0.3, 0.1], [-0.4, 0.2]])
        l1 = log_density(policy, actions[0])
        l2 = log_density(policy, actions[1])
        assert pbo_loss(actions, [1.0, 2.0], policy) == pytest.approx(
            (l1 + 2.0 * l2) / 2.0, abs=1e-12)

    def test_off_policy_ratio_one_gives_mean_advantage(self):
        policy = self._policy()
        actions = np.array([[0.3, 0.1], [-0.4, 0.2], [0.0, 0.0]])
        behavior = log_density(policy, actions)
        adv = np.array([0.5, 1.5, 0.0])
        loss, skipped = off_policy_loss(actions, adv, behavior, policy)
        assert loss == pytest.approx(adv.mean(), abs=1e-12)
        assert skipped == 0

    def test_off_policy_zero_advantages(self):
        policy = self._policy()
        actions = np.array([[0.3, 0.1]])
        behavior = log_density(policy, actions)
        loss, _ = off_policy_loss(actions, [0.0], behavior, policy)
        assert loss == 0.0

    def test_off_policy_closed_form_gaussian_ratio(self):
        # hand-computed density ratio of two known 2-D normals
        theta = make_params([0.2, 0.0], [0.5, 0.5], [np.pi / 2])
        behind = make_params([0.0, 0.0], [1.0, 1.0], [np.pi / 2])
        a = np.array([0.4, -0.3])

        def normal_logpdf(x, m, var):
            return sum(-0.5 * (math.log(2 * math.pi * v) + (xi - mi) ** 2 / v)
                       for xi, mi, v in zip(x, m, var))

        lp_t = normal_logpdf(a, [0.2, 0.0], [0.25, 0.25])
        lp_b = normal_logpdf(a, [0.0, 0.0], [1.0, 1.0])
        expected = math.exp(lp_t - lp_b) * 2.0
        loss, skipped = off_policy_loss(
            a[None], [2.0], np.array([lp_b]), theta)
        assert loss == pytest.approx(expected, abs=1e-9)
        assert skipped == 0

    def test_off_policy_overflow_skipped(self):
        policy = self._policy()
        actions = np.array([[0.3, 0.1], [0.0, 0.0]])
        behavior = np.array([-2000.0, log_density(policy, actions[1])])
        loss, skipped = off_policy_loss(actions, [1.0, 1.0], behavior, policy)
        assert skipped == 1
        assert math.isfinite(loss)


class TestPolicyForward:
    def test_fresh_networks_neutral_outputs(self):
        nets = make_policy_triple(2, seed=0)
        params = policy_forward(nets, np.array([1.0, 1.0]))
        assert np.max(np.abs(params.mean)) < 0.02
        assert np.allclose(params.stddev, 0.5, atol=0.01)
        assert np.allclose(params.angles, np.pi / 2, atol=0.02)

    def test_mean_bias_injection(self):
        nets = make_policy_triple(2, seed=1)
        set_output_bias(nets.mean, np.arctanh(np.array([0.5, 0.5])))
        params = policy_forward(nets, np.array([1.0, 1.0]))
        assert np.allclose(params.mean, 0.5, atol=0.01)

    def test_random_networks_always_produce_valid_params(self):
        rng = np.random.default_rng(7)
        state = np.array([1.0, 1.0])
        for trial in range(1000):
            d = int(rng.integers(2, 7))
            nets = make_policy_triple(d, seed=trial)
            for net in (nets.mean, nets.stddev, nets.corr):
                net.params[:] = rng.normal(0, 4, net.parameter_count)
            params = policy_forward(nets, state)
            # saturated activations may round onto the interval ends
            assert np.all(params.mean >= -1.0) and np.all(params.mean <= 1.0)
            assert np.all(params.stddev >= 1e-6) and np.all(params.stddev <= 1.0)
            assert np.all(params.angles >= 0.0) and np.all(params.angles <= np.pi)
            assert np.linalg.eigvalsh(params.cov).min() >= -1e-8


class TestConfig:
    def test_defaults_match_reference_table(self):
        cfg = PboConfig()
        assert (cfg.mean.learning_rate, cfg.mean.history, cfg.mean.epochs,
                cfg.mean.batches) == (5e-3, 1, 128, 1)
        assert (cfg.stddev.learning_rate, cfg.stddev.history,
                cfg.stddev.epochs, cfg.stddev.batches) == (5e-3, 8, 16, 4)
        assert (cfg.corr.learning_rate, cfg.corr.history, cfg.corr.epochs,
                cfg.corr.batches) == (1e-3, 16, 16, 8)
        for hyper in (cfg.mean, cfg.stddev, cfg.corr):
            assert hyper.hidden == (2, 2, 2)

    def test_validation(self):
        with pytest.raises(ConfigurationError):
            NetworkHyper(0.0, 1, 1, 1)
        with pytest.raises(ConfigurationError):
            NetworkHyper(1e-3, 0, 1, 1)
        with pytest.raises(ConfigurationError):
            PboConfig(individuals=0)
        with pytest.raises(ConfigurationError):
            PboConfig(alpha=-1.0)


class TestAgent:
    def test_population_default_and_record_size(self):
        problem = get_problem("parabola")
        agent = PboAgent(problem, seed=0)
        assert agent.n_i == 6
        agent.step_generation(parabola_evaluator(problem))
        record = agent.last_record
        assert record.raw.shape == (6, 2)
        assert record.clipped.shape == (6, 2)
        assert record.advantages.shape == (6,)
        assert np.all(record.advantages >= 0.0)
        assert np.all(record.clipped >= -1.0) and np.all(record.clipped <= 1.0)

    def test_history_discipline(self):
        problem = get_problem("parabola")
        agent = PboAgent(problem, seed=3)
        ev = parabola_evaluator(problem)
        for _ in range(12):
            agent.step_generation(ev)
        mean_records = agent._records_for("mean")
        assert [r.generation for r in mean_records] == [11]
        std_records = agent._records_for("stddev")
        assert [r.generation for r in std_records] == list(range(4, 12))
        corr_records = agent._records_for("corr")
        assert len(corr_records) == 12

    def test_constant_rewards_leave_networks_unchanged(self):
        problem = get_problem("parabola")
        agent = PboAgent(problem, seed=5)
        before = [net.params.copy() for net in
                  (agent.nets.mean, agent.nets.stddev, agent.nets.corr)]
        agent.step_generation(lambda X: np.full(len(X), 3.25))
        after = [agent.nets.mean.params, agent.nets.stddev.params,
                 agent.nets.corr.params]
        for b, a in zip(before, after):
            assert np.array_equal(b, a)

    def test_start_point_centers_initial_policy(self):
        problem = get_problem("parabola")
        agent = PboAgent(problem, seed=0)
        params = agent.policy()
        assert np.allclose(params.mean, [0.5, 0.5], atol=0.01)
        assert np.allclose(params.stddev, 0.5, atol=0.01)

    def test_same_seed_identical_runs(self):
        problem = get_problem("parabola")
        traces = []
        for _ in range(2):
            agent = PboAgent(problem, seed=11)
            ev = parabola_evaluator(problem)
            costs = [agent.step_generation(ev)[1] for _ in range(5)]
            traces.append(np.vstack(costs))
        assert np.array_equal(traces[0], traces[1])

    def test_parabola_improves_hundredfold_in_50_generations(self):
        problem = get_problem("parabola")
        agent = PboAgent(problem, seed=0)
        ev = parabola_evaluator(problem)
        best = []
        for _ in range(50):
            _, costs = agent.step_generation(ev)
            best.append(costs.min())
        assert min(best) <= best[0] / 100.0
        running = np.minimum.accumulate(best)
        assert np.all(np.diff(running) <= 0.0)

    def test_off_policy_mode_runs(self):
        problem = get_problem("parabola")
        config = PboConfig(off_policy_importance=True)
        agent = PboAgent(problem, config=config, seed=2)
        ev = parabola_evaluator(problem)
        for _ in range(8):
            agent.step_generation(ev)
        assert agent.importance_skips >= 0
        assert np.isfinite(agent.policy().mean).all()

    def test_one_dimensional_problem_supported(self):
        from pbopt.benchmarks import Problem
        problem = Problem("line", 1, np.array([-2.0]), np.array([2.0]),
                          np.array([1.0]), lambda x: float(x[0] ** 2))
        agent = PboAgent(problem, seed=0)
        assert agent.nets.corr is None
        ev = lambda X: np.array([problem.cost(x) for x in X])
        for _ in range(25):
            _, costs = agent.step_generation(ev)
        assert costs.min() < 0.05

    @pytest.mark.parametrize("hidden", [(), (2,), (4, 4), (2, 2, 2, 2)])
    def test_architecture_sensitivity_range(self, hidden):
        # the hidden-width sweep from the sensitivity study, including the
        # bias-only network with no hidden layers
        problem = get_problem("parabola")
        config = PboConfig(mean=NetworkHyper(5e-3, 1, 128, 1, hidden),
                           stddev=NetworkHyper(5e-3, 8, 16, 4, hidden),
                           corr=NetworkHyper(1e-3, 16, 16, 8, hidden))
        agent = PboAgent(problem, config=config, seed=0)
        ev = parabola_evaluator(problem)
        best = np.inf
        for _ in range(30):
            _, costs = agent.step_generation(ev)
            best = min(best, costs.min())
        assert best < 12.5 / 100.0  # clearly below the starting cost

    @pytest.mark.parametrize("n_i", [3, 12])
    def test_population_sensitivity_range(self, n_i):
        problem = get_problem("parabola")
        agent = PboAgent(problem, config=PboConfig(individuals=n_i), seed=1)
        ev = parabola_evaluator(problem)
        for _ in range(20):
            _, costs = agent.step_generation(ev)
        assert agent.last_record.raw.shape == (n_i, 2)
        assert costs.min() < 1.0

    def test_custom_input_state_dimension(self):
        problem = get_problem("parabola")
        agent = PboAgent(problem, config=PboConfig(input_state=(1.0, 0.5, -0.5)),
                         seed=0)
        assert agent.nets.mean.input_size == 3
        agent.step_generation(parabola_evaluator(problem))
        assert np.isfinite(agent.policy().mean).all()

    def test_update_ascends_the_weighted_objective(self):
        # one generation of training must not decrease the loss it ascends
        problem = get_problem("parabola")
        agent = PboAgent(problem, seed=4)
        ev = parabola_evaluator(problem)
        agent.step_generation(ev)
        record = agent.last_record
        weights = record.advantages
        before = pbo_loss(record.raw, weights, record.params)
        after = pbo_loss(record.raw, weights, agent.policy())
        assert after > before
