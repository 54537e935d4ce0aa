"""Fully observable possibilistic MDPs.

Transition tables are integer arrays ``T[s, a, s']`` of level indices. Values,
preferences and beliefs are level indices as well, so every backup is a pure
max-min computation over integers.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvariantError, ModelValidationError, PreconditionError
from .scale import QualitativeScale, check_rows_normalized, frozen

ENUMERATION_CAP = 10**7


@dataclass(frozen=True, eq=False)
class PiMdpModel:
    scale: QualitativeScale
    transition: np.ndarray  # (S, A, S)
    preference: np.ndarray  # (S,)
    stay_action: Optional[int] = None
    state_names: Optional[tuple[str, ...]] = field(default=None, compare=False)
    action_names: Optional[tuple[str, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        T = frozen(self.transition)
        mu = frozen(self.preference)
        object.__setattr__(self, "transition", T)
        object.__setattr__(self, "preference", mu)
        if T.ndim != 3 or T.shape[0] != T.shape[2]:
            raise ModelValidationError(f"transition must have shape (S, A, S), got {T.shape}")
        if mu.shape != (T.shape[0],):
            raise ModelValidationError(f"preference must have shape ({T.shape[0]},)")
        if mu.min() < 0 or mu.max() > self.scale.k:
            raise ModelValidationError("preference holds levels outside the scale")
        check_rows_normalized(T, self.scale, "transition", ("s", "a"))
        if self.stay_action is not None:
            _check_stay_rows(T[:, self.stay_action, :], self.scale, "transition")

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def num_actions(self) -> int:
        return self.transition.shape[1]


def _check_stay_rows(rows: np.ndarray, scale: QualitativeScale, what: str):
    expected = np.where(np.eye(rows.shape[0], rows.shape[1], dtype=bool), scale.top, scale.bottom)
    if not np.array_equal(rows, expected):
        bad = int(np.argwhere((rows != expected).any(axis=1))[0, 0])
        raise ModelValidationError(f"{what} row (s={bad}) under the stay action is not the identity")


def has_stay_structure(T: np.ndarray, a: int, scale: QualitativeScale) -> bool:
    rows = T[:, a, :]
    return np.array_equal(rows, np.where(np.eye(len(rows), dtype=bool), scale.top, scale.bottom))


@dataclass(frozen=True, eq=False)
class ValueSolution:
    values: np.ndarray
    policy: np.ndarray
    iterations: int


def q_values(model: PiMdpModel, u: np.ndarray) -> np.ndarray:
    """q[s, a] = max_{s'} min(T[s, a, s'], u[s'])."""
    return np.minimum(model.transition, u[None, None, :]).max(axis=2)


def finite_horizon_solve(model: PiMdpModel, horizon: int):
    """Backward induction of the optimistic criterion.

    Returns ``(values, policy)`` with ``values[i]`` the optimal value for ``i``
    remaining steps (``values[0]`` is the preference) and ``policy[t]`` the
    decision rule applied at stage ``t``.
    """
    if horizon < 0:
        raise PreconditionError("horizon must be non-negative")
    values = [model.preference.copy()]
    rules = []
    for _ in range(horizon):
        q = q_values(model, values[-1])
        values.append(q.max(axis=1))
        rules.append(q.argmax(axis=1))
    # rules[i-1] was computed from values[i-1], so it is the rule of stage p - i
    return values, rules[::-1]


def evaluate_policy_optimistic(
    model: PiMdpModel,
    s0: int,
    policy: Sequence[Sequence[int]],
    mode: str = "auto",
    cap: int = ENUMERATION_CAP,
) -> int:
    """Optimistic value of a (possibly non-stationary) policy from ``s0``.

    ``policy[t][s]`` is the action taken at stage ``t``. ``mode="enumerate"``
    scans every trajectory, ``mode="dp"`` runs a backward pass along the
    fixed policy, ``"auto"`` enumerates when there are at most ``cap``
    trajectories.
    """
    rules = np.asarray(policy, dtype=np.int64)
    if rules.ndim != 2 or len(rules) == 0:
        raise PreconditionError("policy must be a non-empty sequence of decision rules")
    p, n = len(rules), model.num_states
    if mode == "auto":
        mode = "enumerate" if n**p <= cap else "dp"
    T, mu = model.transition, model.preference
    if mode == "enumerate":
        return _enumerate_trajectories(model, s0, rules)
    if mode != "dp":
        raise ValueError(f"unknown mode {mode!r}")
    v = mu.copy()
    states = np.arange(n)
    for t in range(p - 1, -1, -1):
        v = np.minimum(T[states, rules[t]], v[None, :]).max(axis=1)
    return int(v[s0])


def _enumerate_trajectories(model: PiMdpModel, s0: int, rules: np.ndarray, block: int = 1 << 18) -> int:
    """Scan all |S|^p trajectories in blocks; the last stage is the fastest-varying digit."""
    n, p = model.num_states, len(rules)
    T, mu = model.transition, model.preference
    powers = n ** np.arange(p - 1, -1, -1, dtype=np.int64)
    best = model.scale.bottom
    for start in range(0, n**p, block):
        codes = np.arange(start, min(start + block, n**p), dtype=np.int64)
        traj = (codes[:, None] // powers[None, :]) % n  # (B, p) = (s_1, ..., s_p)
        prev = np.full(len(codes), s0, dtype=np.int64)
        poss = np.full(len(codes), model.scale.top, dtype=np.int64)
        for t in range(p):
            poss = np.minimum(poss, T[prev, rules[t, prev], traj[:, t]])
            prev = traj[:, t]
        best = max(best, int(np.minimum(poss, mu[prev]).max()))
    return best


def repeat_rule(rule: Sequence[int], horizon: int) -> np.ndarray:
    return np.tile(np.asarray(rule, dtype=np.int64), (horizon, 1))


def run_value_iteration(
    initial: np.ndarray,
    backup: Callable[[np.ndarray], np.ndarray],
    stay_action: int,
    bound: int,
    improvement_guard: bool = True,
):
    """Shared loop of both value iteration algorithms.

    ``backup(u)`` returns the q-table ``(n, A)`` for the snapshot ``u``. The
    policy entry of a state is only rewritten on sweeps where its value rises
    strictly; with ``improvement_guard=False`` it is rewritten on every sweep
    (the older variant, kept for comparison).
    """
    u_cur = initial.copy()
    u_star = np.zeros_like(u_cur)
    policy = np.full(len(u_cur), stay_action, dtype=np.int64)
    iterations = 0
    while not np.array_equal(u_star, u_cur):
        iterations += 1
        if iterations > bound:
            raise InvariantError(
                f"no fixpoint after {bound} sweeps; the stay action hypothesis is violated"
            )
        u_star = u_cur
        q = backup(u_star)
        u_cur = q.max(axis=1)
        update = u_cur > u_star if improvement_guard else np.ones(len(u_cur), dtype=bool)
        policy[update] = q[update].argmax(axis=1)
    return u_star, policy, iterations


def value_iteration(model: PiMdpModel, improvement_guard: bool = True) -> ValueSolution:
    """Infinite-horizon value iteration with a stay action; returns the optimal stationary policy."""
    if model.stay_action is None:
        raise PreconditionError("value iteration needs a stay action")
    values, policy, it = run_value_iteration(
        model.preference,
        lambda u: q_values(model, u),
        model.stay_action,
        model.num_states * model.scale.size,
        improvement_guard,
    )
    return ValueSolution(frozen(values), frozen(policy), it)


def widest_path_oracle(model: PiMdpModel, s0: int) -> int:
    """Best bottleneck width from ``s0`` to a state, capped by that state's preference.

    Edge width is ``max_a T[s, a, s']``. Computed with a Dijkstra-style search
    on a max-heap; it shares no code with value iteration.
    """
    if model.stay_action is None:
        raise PreconditionError("the oracle characterizes the stay-action setting only")
    width = model.transition.max(axis=1)
    best = np.full(model.num_states, -1, dtype=np.int64)
    heap = [(-model.scale.top, s0)]
    while heap:
        w, s = heapq.heappop(heap)
        w = -w
        if best[s] >= 0:
            continue
        best[s] = w
        for nxt in np.flatnonzero(width[s]):
            if best[nxt] < 0:
                heapq.heappush(heap, (-min(w, int(width[s, nxt])), int(nxt)))
    reached = best >= 0
    return int(np.minimum(best[reached], model.preference[reached]).max())
