"""Mixed-observability possibilistic MDPs.

The state is a pair (visible, hidden). Because the visible part is observed
exactly, a reachable belief is a visible state together with a possibility
distribution over hidden states only, and value iteration runs over
``S_v x B_h`` instead of the full flat belief space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ImpossibleObservationError, ModelValidationError, PreconditionError
from .mdp import run_value_iteration
from .pomdp import ENUMERATION_CAP, BeliefIndex, belief_cardinality, enumerate_belief_space
from .scale import QualitativeScale, check_rows_normalized, frozen, possibility_distribution


@dataclass(frozen=True)
class MixedBelief:
    visible: int
    hidden: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "hidden", tuple(int(x) for x in self.hidden))


@dataclass(frozen=True, eq=False)
class PiMomdpModel:
    scale: QualitativeScale
    transition: np.ndarray  # (Sv, Sh, A, Sv', Sh')
    hidden_observation: np.ndarray  # (Sv', Sh', A, Oh)
    preference: np.ndarray  # (Sv, Sh)
    initial: MixedBelief
    stay_action: int
    stay_observation: int
    visible_names: Optional[tuple[str, ...]] = field(default=None, compare=False)
    hidden_names: Optional[tuple[str, ...]] = field(default=None, compare=False)
    action_names: Optional[tuple[str, ...]] = field(default=None, compare=False)
    observation_names: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("transition", "hidden_observation", "preference"):
            object.__setattr__(self, name, frozen(getattr(self, name)))
        T, O, mu, s = self.transition, self.hidden_observation, self.preference, self.scale
        if T.ndim != 5 or T.shape[:2] != T.shape[3:]:
            raise ModelValidationError(f"transition must have shape (Sv, Sh, A, Sv, Sh), got {T.shape}")
        V, H, A = T.shape[:3]
        if O.ndim != 4 or O.shape[:3] != (V, H, A):
            raise ModelValidationError(f"hidden observation must have shape ({V}, {H}, {A}, Oh)")
        if mu.shape != (V, H) or mu.min() < 0 or mu.max() > s.k:
            raise ModelValidationError(f"preference must be a ({V}, {H}) table of levels")
        check_rows_normalized(T.reshape(V, H, A, V * H), s, "transition", ("s_v", "s_h", "a"))
        check_rows_normalized(O, s, "hidden observation", ("s'_v", "s'_h", "a"))
        if not 0 <= self.initial.visible < V:
            raise ModelValidationError("initial visible state out of range")
        possibility_distribution(self.initial.hidden, s)
        if len(self.initial.hidden) != H:
            raise ModelValidationError(f"initial hidden belief must have {H} entries")
        if not (0 <= self.stay_action < A and 0 <= self.stay_observation < O.shape[3]):
            raise ModelValidationError("stay action / stay observation out of range")
        eye = np.eye(V * H, dtype=bool).reshape(V, H, V, H)
        if not np.array_equal(T[:, :, self.stay_action], np.where(eye, s.top, s.bottom)):
            raise ModelValidationError("transition under the stay action is not the identity")
        nothing = np.full(O.shape[3], s.bottom)
        nothing[self.stay_observation] = s.top
        if not (O[:, :, self.stay_action] == nothing).all():
            raise ModelValidationError(
                "hidden observation under the stay action must be the stay observation with possibility 1"
            )

    @property
    def num_visible(self) -> int:
        return self.transition.shape[0]

    @property
    def num_hidden(self) -> int:
        return self.transition.shape[1]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[2]

    @property
    def num_hidden_observations(self) -> int:
        return self.hidden_observation.shape[3]


def mixed_predict(model: PiMomdpModel, belief: MixedBelief, action: int) -> np.ndarray:
    """beta^a(s'_v, s'_h) = max_{s_h} min(T(s'_v, s'_h | s_v, s_h, a), beta_h(s_h))."""
    T = model.transition[belief.visible, :, action]  # (Sh, Sv', Sh')
    hidden = np.asarray(belief.hidden)
    pred = np.minimum(T, hidden[:, None, None]).max(axis=0)
    assert pred.max() == model.scale.top
    return pred


def mixed_joint_observation(model: PiMomdpModel, predicted: np.ndarray, action: int) -> np.ndarray:
    """beta^a(s'_v, o'_h) = max_{s'_h} min(pi(o'_h | s'_v, s'_h, a), beta^a(s'_v, s'_h))."""
    O = model.hidden_observation[:, :, action, :]  # (Sv', Sh', Oh)
    joint = np.minimum(O, predicted[:, :, None]).max(axis=1)
    assert joint.max() == model.scale.top
    return joint


def mixed_belief_update(
    model: PiMomdpModel, belief: MixedBelief, action: int, visible: int, observation: int
) -> MixedBelief:
    pred = mixed_predict(model, belief, action)
    joint = np.minimum(model.hidden_observation[visible, :, action, observation], pred[visible])
    top = joint.max()
    if top == model.scale.bottom:
        raise ImpossibleObservationError(
            f"(s'_v={visible}, o'_h={observation}) is impossible after action {action}"
        )
    return MixedBelief(visible, np.where(joint == top, model.scale.top, joint))


def mixed_preference(model: PiMomdpModel, belief: MixedBelief) -> int:
    mu = model.preference[belief.visible]
    return int(np.maximum(mu, model.scale.reverse(np.asarray(belief.hidden))).min())


def mixed_cardinality(num_visible: int, num_hidden: int, num_levels: int) -> int:
    return num_visible * belief_cardinality(num_hidden, num_levels)


def enumerate_hidden_beliefs(model: PiMomdpModel, cap: int = ENUMERATION_CAP) -> np.ndarray:
    return enumerate_belief_space(model.num_hidden, model.scale, cap)


@dataclass(frozen=True, eq=False)
class MixedValueSolution:
    values: np.ndarray  # (Sv, N_h)
    policy: np.ndarray  # (Sv, N_h)
    iterations: int
    hidden_beliefs: np.ndarray = field(compare=False)
    index: BeliefIndex = field(compare=False, repr=False)

    def value(self, belief: MixedBelief) -> int:
        return int(self.values[belief.visible, self.index[belief.hidden]])

    def action(self, belief: MixedBelief) -> int:
        return int(self.policy[belief.visible, self.index[belief.hidden]])


@dataclass
class _Successors:
    """Sparse successor lists of the mixed belief-MDP, grouped by (state, action)."""

    poss: np.ndarray  # possibility of each edge
    target: np.ndarray  # flat mixed-state index reached
    segment_starts: np.ndarray  # first edge of each (state, action) group
    num_states: int
    num_actions: int

    def q_values(self, u: np.ndarray) -> np.ndarray:
        cand = np.minimum(self.poss, u[self.target])
        return np.maximum.reduceat(cand, self.segment_starts).reshape(self.num_states, self.num_actions)


def _build_successors(model: PiMomdpModel, index: BeliefIndex) -> _Successors:
    """Enumerate every possible (s'_v, o'_h) outcome from every (s_v, beta_h, a).

    Successor groups are ordered by (s_v, beta_h index, a) and, inside a
    group, by (s'_v, o'_h).
    """
    beliefs = index.beliefs
    N, V, A = len(beliefs), model.num_visible, model.num_actions
    top = model.scale.top
    poss_blocks = np.empty((V, N, A), dtype=object)
    target_blocks = np.empty((V, N, A), dtype=object)
    for v in range(V):
        for a in range(A):
            T = model.transition[v, :, a]  # (Sh, Sv', Sh')
            cols = np.flatnonzero(T.max(axis=(0, 2)))
            T = T[:, cols, :]
            pred = np.minimum(T[None], beliefs[:, :, None, None]).max(axis=1)  # (N, C, Sh')
            O = model.hidden_observation[cols, :, a, :]  # (C, Sh', Oh)
            joint_cells = np.minimum(O[None], pred[..., None])  # (N, C, Sh', Oh)
            joint = joint_cells.max(axis=2)  # (N, C, Oh)
            updated = np.where(joint_cells == joint[:, :, None, :], top, joint_cells)
            idx = index.lookup(updated.transpose(0, 1, 3, 2))  # (N, C, Oh)
            targets = cols[None, :, None] * N + idx
            for n in range(N):
                keep = joint[n] > 0
                poss_blocks[v, n, a] = joint[n][keep]
                target_blocks[v, n, a] = targets[n][keep]
    lengths = np.array([len(p) for p in poss_blocks.ravel()])
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    return _Successors(
        np.concatenate(poss_blocks.ravel()),
        np.concatenate(target_blocks.ravel()),
        starts,
        V * N,
        A,
    )


def _initial_values(model: PiMomdpModel, beliefs: np.ndarray) -> np.ndarray:
    rev = model.scale.reverse(beliefs)  # (N, Sh)
    return np.maximum(model.preference[:, None, :], rev[None, :, :]).min(axis=2)  # (Sv, N)


def momdp_value_iteration(
    model: PiMomdpModel, cap: int = ENUMERATION_CAP, improvement_guard: bool = True
) -> MixedValueSolution:
    """Value iteration over (visible state, hidden belief) pairs.

    Every pair of ``S_v x B_h`` is swept, reachable or not. The policy of a
    pair starts at the stay action and is only replaced on sweeps where the
    pair's value increases strictly.
    """
    beliefs = enumerate_hidden_beliefs(model, cap)
    index = BeliefIndex(beliefs, model.scale)
    succ = _build_successors(model, index)
    V, N = model.num_visible, len(beliefs)
    values, policy, it = run_value_iteration(
        _initial_values(model, beliefs).ravel(),
        succ.q_values,
        model.stay_action,
        V * N * model.scale.size,
        improvement_guard,
    )
    return MixedValueSolution(
        frozen(values.reshape(V, N)), frozen(policy.reshape(V, N)), it, beliefs, index
    )


def momdp_finite_horizon_solve(model: PiMomdpModel, horizon: int, cap: int = ENUMERATION_CAP):
    """Backward induction over ``S_v x B_h``.

    Returns ``(hidden_beliefs, values, policy)`` where ``values[i]`` has shape
    ``(Sv, N_h)`` and ``policy[t]`` is the decision rule at stage ``t``.
    """
    if horizon < 0:
        raise PreconditionError("horizon must be non-negative")
    beliefs = enumerate_hidden_beliefs(model, cap)
    index = BeliefIndex(beliefs, model.scale)
    succ = _build_successors(model, index)
    shape = (model.num_visible, len(beliefs))
    values = [_initial_values(model, beliefs)]
    rules = []
    for _ in range(horizon):
        q = succ.q_values(values[-1].ravel())
        values.append(q.max(axis=1).reshape(shape))
        rules.append(q.argmax(axis=1).reshape(shape))
    return beliefs, values, rules[::-1]
