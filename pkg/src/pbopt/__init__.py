"""Black-box optimization toolkit: a policy-gradient optimizer with a
full-covariance normal search distribution built from neural-network outputs,
(mu, lambda)-ES and CMA-ES baselines, analytic benchmark functions, and a
feedback-controlled Lorenz environment.
"""

from .benchmarks import PROBLEMS, Problem, get_problem, map_action, problem_names
from .distribution import (ActionBatch, DistributionParams, build_covariance,
                           elementary_matrix, log_density, make_params, sample)
from .es import CmaEs, MuLambdaEs, cmaes_constants, cmaes_recombination_weights
from .harness import (ExperimentConfig, RunLog, aggregate_runs, execute_run,
                      load_config, run_experiment)
from .lorenz import (ControlParams, LorenzConfig, Trajectory, integrate,
                     oscillator_reward, stabilizer_reward, uncontrolled_rewards)
from .nets import (AdamState, LayerSpec, Network, adam_step, backward, forward,
                   init_network, mlp_spec)
from .pbo import (GenerationRecord, NetworkHyper, PboAgent, PboConfig,
                  PolicyTriple, decay_factor, decayed_advantage, off_policy_loss,
                  pbo_loss, policy_forward, population_size, whiten_rewards)

__version__ = "0.1.0"
