"""Qualitative possibilistic MDPs, POMDPs and mixed-observability MDPs.

Value iteration with optimal stationary policies under a stay action, flat
belief-space tools used as reference oracles, and a grid target-recognition
benchmark against a probabilistic baseline.
"""

from .errors import (
    BeliefSpaceTooLargeError,
    DimensionError,
    ImpossibleObservationError,
    InvalidScaleError,
    InvariantError,
    ModelValidationError,
    NonConvergenceError,
    PreconditionError,
)
from .mdp import (
    PiMdpModel,
    ValueSolution,
    evaluate_policy_optimistic,
    finite_horizon_solve,
    repeat_rule,
    value_iteration,
    widest_path_oracle,
)
from .momdp import (
    MixedBelief,
    MixedValueSolution,
    PiMomdpModel,
    enumerate_hidden_beliefs,
    mixed_cardinality,
    mixed_belief_update,
    mixed_joint_observation,
    mixed_predict,
    mixed_preference,
    momdp_finite_horizon_solve,
    momdp_value_iteration,
)
from .pomdp import (
    PiPomdpModel,
    belief_cardinality,
    belief_predict,
    belief_preference,
    belief_update,
    enumerate_belief_space,
    flatten_momdp_to_pomdp,
    flatten_pomdp_to_mdp,
    observation_possibility,
    reachable_beliefs,
)
from .grid import GridConfig, build_possibilistic_grid, build_probabilistic_grid
from .io import load_model, save_model
from .scale import QualitativeScale, make_scale, order_reverse, sugeno_optimistic, uniform_scale

__version__ = "0.1.0"

__all__ = [
    "BeliefSpaceTooLargeError",
    "DimensionError",
    "GridConfig",
    "ImpossibleObservationError",
    "InvalidScaleError",
    "InvariantError",
    "MixedBelief",
    "MixedValueSolution",
    "ModelValidationError",
    "NonConvergenceError",
    "PiMdpModel",
    "PiMomdpModel",
    "PiPomdpModel",
    "PreconditionError",
    "QualitativeScale",
    "ValueSolution",
    "belief_cardinality",
    "belief_predict",
    "belief_preference",
    "belief_update",
    "build_possibilistic_grid",
    "build_probabilistic_grid",
    "enumerate_belief_space",
    "enumerate_hidden_beliefs",
    "evaluate_policy_optimistic",
    "finite_horizon_solve",
    "flatten_momdp_to_pomdp",
    "flatten_pomdp_to_mdp",
    "load_model",
    "make_scale",
    "mixed_belief_update",
    "mixed_cardinality",
    "mixed_joint_observation",
    "mixed_predict",
    "mixed_preference",
    "momdp_finite_horizon_solve",
    "momdp_value_iteration",
    "observation_possibility",
    "order_reverse",
    "reachable_beliefs",
    "repeat_rule",
    "save_model",
    "sugeno_optimistic",
    "uniform_scale",
    "value_iteration",
    "widest_path_oracle",
]
