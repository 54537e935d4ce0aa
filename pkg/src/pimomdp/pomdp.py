"""Flat possibilistic POMDPs: belief revision, belief enumeration, and the belief-MDP translation.

The flat machinery is exponential in the number of states. It is used to solve
small problems and, more importantly, as an independent reference for the
mixed-observability solver.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    BeliefSpaceTooLargeError,
    ImpossibleObservationError,
    ModelValidationError,
    PreconditionError,
)
from .mdp import PiMdpModel, has_stay_structure
from .scale import QualitativeScale, check_rows_normalized, frozen, possibility_distribution

ENUMERATION_CAP = 10**7


@dataclass(frozen=True, eq=False)
class PiPomdpModel:
    scale: QualitativeScale
    transition: np.ndarray  # (S, A, S)
    observation: np.ndarray  # (S', A, O)
    preference: np.ndarray  # (S,)
    initial_belief: np.ndarray  # (S,)
    stay_action: Optional[int] = None
    stay_observation: Optional[int] = None
    state_names: Optional[tuple[str, ...]] = field(default=None, compare=False)
    action_names: Optional[tuple[str, ...]] = field(default=None, compare=False)
    observation_names: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        # reuse the MDP checks for the dynamic part
        PiMdpModel(self.scale, self.transition, self.preference, self.stay_action)
        for name in ("transition", "observation", "preference"):
            object.__setattr__(self, name, frozen(getattr(self, name)))
        object.__setattr__(
            self, "initial_belief", possibility_distribution(self.initial_belief, self.scale)
        )
        O = self.observation
        S, A = self.transition.shape[:2]
        if O.ndim != 3 or O.shape[:2] != (S, A):
            raise ModelValidationError(f"observation must have shape ({S}, {A}, O), got {O.shape}")
        if self.initial_belief.shape != (S,):
            raise ModelValidationError(f"initial belief must have {S} entries")
        check_rows_normalized(O, self.scale, "observation", ("s'", "a"))
        if self.stay_observation is not None:
            if self.stay_action is None:
                raise ModelValidationError("a stay observation needs a stay action")
            rows = O[:, self.stay_action, :]
            if not (
                (rows[:, self.stay_observation] == self.scale.top).all()
                and (np.delete(rows, self.stay_observation, axis=1) == self.scale.bottom).all()
            ):
                raise ModelValidationError(
                    "observation rows under the stay action must put 1 on the stay observation only"
                )

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[1]

    @property
    def num_observations(self) -> int:
        return self.observation.shape[2]


def belief_predict(model, belief, action: int) -> np.ndarray:
    pred = np.minimum(model.transition[:, action, :], np.asarray(belief)[:, None]).max(axis=0)
    assert pred.max() == model.scale.top
    return pred


def observation_possibility(model, predicted, action: int) -> np.ndarray:
    obs = np.minimum(model.observation[:, action, :], np.asarray(predicted)[:, None]).max(axis=0)
    assert obs.max() == model.scale.top
    return obs


def belief_update(model, belief, action: int, observation: int) -> np.ndarray:
    """Qualitative counterpart of Bayes' rule.

    Raises ``ImpossibleObservationError`` when the observation has possibility 0.
    """
    pred = belief_predict(model, belief, action)
    joint = np.minimum(model.observation[:, action, observation], pred)
    top = joint.max()
    if top == model.scale.bottom:
        raise ImpossibleObservationError(
            f"observation {observation} is impossible after action {action}"
        )
    return np.where(joint == top, model.scale.top, joint)


def belief_preference(model, belief) -> int:
    """min_s max(mu(s), n(belief(s))): high only when every plausible state is satisfactory."""
    return int(np.maximum(model.preference, model.scale.reverse(np.asarray(belief))).min())


def belief_cardinality(num_states: int, num_levels: int) -> int:
    return num_levels**num_states - (num_levels - 1) ** num_states


def enumerate_belief_space(num_states: int, scale: QualitativeScale, cap: int = ENUMERATION_CAP):
    """All normalized distributions over ``num_states`` elements, in lexicographic order."""
    L = scale.size
    if L**num_states > cap:
        raise BeliefSpaceTooLargeError(belief_cardinality(num_states, L), cap)
    codes = np.arange(L**num_states, dtype=np.int64)
    powers = L ** np.arange(num_states - 1, -1, -1, dtype=np.int64)
    all_vectors = (codes[:, None] // powers[None, :]) % L
    beliefs = all_vectors[all_vectors.max(axis=1) == scale.top]
    assert len(beliefs) == belief_cardinality(num_states, L)
    return beliefs


class BeliefIndex:
    """Exact lookup from a belief vector to its position in a lexicographic enumeration."""

    def __init__(self, beliefs: np.ndarray, scale: QualitativeScale):
        self.beliefs = beliefs
        self.num_levels = scale.size
        self.powers = self.num_levels ** np.arange(beliefs.shape[1] - 1, -1, -1, dtype=np.int64)
        self._table = np.full(self.num_levels ** beliefs.shape[1], -1, dtype=np.int64)
        self._table[beliefs @ self.powers] = np.arange(len(beliefs))

    def __len__(self):
        return len(self.beliefs)

    def lookup(self, vectors) -> np.ndarray:
        """Index of each vector (last axis); -1 for vectors outside the enumeration."""
        return self._table[np.asarray(vectors) @ self.powers]

    def __getitem__(self, vector) -> int:
        return int(self.lookup(vector))


def _batch_updates(model, beliefs: np.ndarray, action: int):
    """Observation possibilities (N, O) and updated beliefs (N, O, S) for every belief at once."""
    T = model.transition[:, action, :]
    pred = np.minimum(T[None, :, :], beliefs[:, :, None]).max(axis=1)  # (N, S')
    obs_rows = model.observation[:, action, :]  # (S', O)
    joint = np.minimum(obs_rows[None, :, :], pred[:, :, None])  # (N, S', O)
    obs_poss = joint.max(axis=1)  # (N, O)
    updated = np.where(joint == obs_poss[:, None, :], model.scale.top, joint)
    return obs_poss, updated.transpose(0, 2, 1)


@dataclass(frozen=True, eq=False)
class BeliefMdp:
    """A belief-MDP together with the beliefs its states stand for."""

    mdp: PiMdpModel
    beliefs: np.ndarray
    index: BeliefIndex = field(compare=False)


def flatten_pomdp_to_mdp(model: PiPomdpModel, beliefs=None, cap: int = ENUMERATION_CAP) -> BeliefMdp:
    """Translate a POMDP into an MDP whose states are beliefs.

    By default the full belief space is enumerated. A subset may be passed
    instead, but it must be closed under every possible revision. The stay
    action is carried over only when it is the identity on the resulting
    belief-MDP.
    """
    if beliefs is None:
        beliefs = enumerate_belief_space(model.num_states, model.scale, cap)
    beliefs = np.asarray(beliefs, dtype=np.int64)
    index = BeliefIndex(beliefs, model.scale)
    N, A = len(beliefs), model.num_actions
    T = np.zeros((N, A, N), dtype=np.int64)
    rows = np.arange(N)
    for a in range(A):
        obs_poss, updated = _batch_updates(model, beliefs, a)
        targets = index.lookup(updated)  # (N, O)
        possible = obs_poss > model.scale.bottom
        if (targets[possible] < 0).any():
            raise PreconditionError("belief subset is not closed under revision")
        for o in range(model.num_observations):
            ok = possible[:, o]
            cells = (rows[ok], a, targets[ok, o])
            T[cells] = np.maximum(T[cells], obs_poss[ok, o])
    mu = np.maximum(model.preference[None, :], model.scale.reverse(beliefs)).min(axis=1)
    stay = model.stay_action
    if stay is not None and not has_stay_structure(T, stay, model.scale):
        stay = None
    return BeliefMdp(PiMdpModel(model.scale, T, mu, stay), beliefs, index)


def belief_finite_horizon_values(model: PiPomdpModel, horizon: int, beliefs=None):
    """Belief-space backward induction written directly over observations.

    Uses ``u_i(b) = max_a max_o min(b^a(o), u_{i-1}(b^{a,o}))`` with no
    intermediate belief-MDP; kept as a cross-check of the translation.
    """
    if beliefs is None:
        beliefs = enumerate_belief_space(model.num_states, model.scale)
    index = BeliefIndex(beliefs, model.scale)
    per_action = []
    for a in range(model.num_actions):
        obs_poss, updated = _batch_updates(model, beliefs, a)
        per_action.append((obs_poss, index.lookup(updated)))
    u = np.maximum(model.preference[None, :], model.scale.reverse(beliefs)).min(axis=1)
    values = [u]
    for _ in range(horizon):
        best = np.zeros(len(beliefs), dtype=np.int64)
        for obs_poss, targets in per_action:
            cand = np.where(obs_poss > 0, np.minimum(obs_poss, u[np.maximum(targets, 0)]), 0)
            best = np.maximum(best, cand.max(axis=1))
        u = best
        values.append(u)
    return beliefs, values


def flatten_momdp_to_pomdp(model) -> PiPomdpModel:
    """View a mixed-observability model as a plain POMDP over ``S_v x S_h``.

    Flat state ``(s_v, s_h)`` has index ``s_v * |S_h| + s_h``; flat
    observation ``(o_v, o_h)`` has index ``o_v * |O_h| + o_h`` with ``o_v``
    ranging over visible states.
    """
    V, H, A, Oh = model.num_visible, model.num_hidden, model.num_actions, model.num_hidden_observations
    S = V * H
    T = model.transition.reshape(V, H, A, S).reshape(S, A, S)
    O = np.zeros((V, H, A, V, Oh), dtype=np.int64)
    for v in range(V):
        O[v, :, :, v, :] = model.hidden_observation[v]
    O = O.reshape(S, A, V * Oh)
    beta0 = np.zeros((V, H), dtype=np.int64)
    beta0[model.initial.visible] = model.initial.hidden
    return PiPomdpModel(
        model.scale,
        T,
        O,
        model.preference.reshape(S),
        beta0.reshape(S),
        stay_action=model.stay_action,
    )


def reachable_beliefs(model: PiPomdpModel, start=None, limit: int = 10**6) -> list[tuple[int, ...]]:
    """Breadth-first closure of the initial belief under every action and possible observation."""
    start = tuple(int(x) for x in (model.initial_belief if start is None else start))
    seen = {start}
    order = [start]
    queue = deque([start])
    while queue:
        b = np.array(queue.popleft())
        for a in range(model.num_actions):
            obs = observation_possibility(model, belief_predict(model, b, a), a)
            for o in np.flatnonzero(obs):
                nb = tuple(int(x) for x in belief_update(model, b, a, int(o)))
                if nb not in seen:
                    if len(seen) >= limit:
                        raise BeliefSpaceTooLargeError(len(seen), limit)
                    seen.add(nb)
                    order.append(nb)
                    queue.append(nb)
    return order
