"""Target-recognition grid benchmark.

A robot on a g x g grid knows its position and must reach the target that is
A; which of the two targets is A is hidden. Two agents are compared: one
planning with a possibilistic mixed-observability model and one planning
with a probabilistic model solved over a discretized belief. Both act in the
same simulated reality, whose far-field observations are worse than either
agent assumes.

Conventions
-----------
Positions ``(x, y)`` run over ``1..g``; the visible index is
``(x - 1) * g + (y - 1)``. Target 1 sits at ``(1, g)``, target 2 at
``(g, 1)``. Hidden state 0 is "target 1 is A", 1 is "target 2 is A".
Observations name what each target looked like: oAA, oAB, oBA, oBB, plus a
fifth symbol "nothing" emitted only by the stay action.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .errors import ImpossibleObservationError, NonConvergenceError, PreconditionError
from .momdp import MixedBelief, MixedValueSolution, PiMomdpModel, mixed_belief_update
from .scale import make_scale

STAY, UP, DOWN, RIGHT, LEFT = range(5)
ACTION_NAMES = ("stay", "up", "down", "right", "left")
_MOVES = {STAY: (0, 0), UP: (0, 1), DOWN: (0, -1), RIGHT: (1, 0), LEFT: (-1, 0)}
HIDDEN_NAMES = ("A1", "A2")
OBSERVATION_NAMES = ("oAA", "oAB", "oBA", "oBB", "nothing")
NOTHING = 4

CSV_COLUMNS = (
    "sweep_parameter",
    "poss_mean_reward",
    "poss_std",
    "prob_mean_reward",
    "prob_std",
    "poss_fallback_count",
    "capped_runs_poss",
    "capped_runs_prob",
    "n_runs",
    "seed",
)


@dataclass(frozen=True)
class GridConfig:
    g: int = 10
    D: float = 10.0
    C: float = 4.0
    p_bad: float = 0.8
    reward_goal: float = 100.0
    penalty: float = 100.0
    step_cost: float = 1.0
    gamma: float = 0.99
    max_steps: int = 400

    def __post_init__(self):
        if self.g <= 1:
            raise ValueError("grid side must be > 1")
        if not 0.0 <= self.p_bad <= 1.0:
            raise ValueError("p_bad must lie in [0, 1]")
        if self.D <= 0 or self.C < 0:
            raise ValueError("D must be positive and C non-negative")

    @cached_property
    def geometry(self) -> "GridGeometry":
        return GridGeometry(self.g)


class GridGeometry:
    """Positions, moves and squared target distances for a g x g grid."""

    def __init__(self, g: int):
        self.g = g
        xs, ys = np.meshgrid(np.arange(1, g + 1), np.arange(1, g + 1), indexing="ij")
        self.xy = np.stack([xs.ravel(), ys.ravel()], axis=1)  # (V, 2)
        self.targets = ((1, g), (g, 1))
        self.target_cells = tuple(self.cell(*t) for t in self.targets)
        self.start = self.cell(1, 1)
        # integer squared distances keep level identity exact
        self.dist2 = np.stack(
            [((self.xy - np.array(t)) ** 2).sum(axis=1) for t in self.targets], axis=1
        )  # (V, 2)
        self.move = np.empty((g * g, len(_MOVES)), dtype=np.int64)
        for a, (dx, dy) in _MOVES.items():
            nx = np.clip(self.xy[:, 0] + dx, 1, g)
            ny = np.clip(self.xy[:, 1] + dy, 1, g)
            self.move[:, a] = (nx - 1) * g + (ny - 1)

    @property
    def num_cells(self) -> int:
        return self.g * self.g

    def cell(self, x: int, y: int) -> int:
        return (x - 1) * self.g + (y - 1)

    def position(self, cell: int) -> tuple[int, int]:
        return int(self.xy[cell, 0]), int(self.xy[cell, 1])

    @property
    def distance(self) -> np.ndarray:
        return np.sqrt(self.dist2)


def _observation_parts(o: int) -> tuple[int, int]:
    """(target 1 seen as B, target 2 seen as B) for a symbol in oAA..oBB."""
    return o // 2, o % 2


def _seen_correctly(o: int, hidden: int) -> tuple[bool, bool]:
    t1_b, t2_b = _observation_parts(o)
    # target 1 is B exactly when hidden == A2, target 2 is B when hidden == A1
    return bool(t1_b) == (hidden == 1), bool(t2_b) == (hidden == 0)


def compose_observation(t1_is_a: bool, t2_is_a: bool) -> int:
    return 2 * (not t1_is_a) + (not t2_is_a)


def bad_observation_levels(g: int):
    """Scale and per-cell level of pi(bad_i | x, y) = distance_i / (sqrt(2) (g - 1))."""
    geo = GridGeometry(g)
    full = 2 * (g - 1) ** 2
    d2_values = np.unique(geo.dist2)
    labels = [1.0 if d2 == full else math.sqrt(d2) / (math.sqrt(2) * (g - 1)) for d2 in d2_values]
    scale = make_scale(labels)
    # make_scale only adds 0 and 1, which already correspond to d2 = 0 and d2 = full
    assert scale.size == len(d2_values)
    levels = np.searchsorted(d2_values, geo.dist2)  # (V, 2), index into the scale
    return scale, levels


def build_possibilistic_grid(cfg: GridConfig, initial_hidden=None) -> PiMomdpModel:
    geo = cfg.geometry
    scale, bad = bad_observation_levels(cfg.g)
    top = scale.top
    V, H, A, O = geo.num_cells, 2, len(_MOVES), len(OBSERVATION_NAMES)
    T = np.zeros((V, H, A, V, H), dtype=np.int64)
    for a in range(A):
        for h in range(H):
            T[np.arange(V), h, a, geo.move[:, a], h] = top
    obs = np.zeros((V, H, A, O), dtype=np.int64)
    for h in range(H):
        for o in range(4):
            ok1, ok2 = _seen_correctly(o, h)
            level = np.minimum(
                top if ok1 else bad[:, 0],
                top if ok2 else bad[:, 1],
            )
            obs[:, h, :, o] = np.broadcast_to(level, (V,))[:, None]
    obs[:, :, STAY, :] = 0
    obs[:, :, STAY, NOTHING] = top
    mu = np.zeros((V, H), dtype=np.int64)
    for h in range(H):
        mu[geo.target_cells[h], h] = top
    hidden0 = (top, top) if initial_hidden is None else tuple(initial_hidden)
    return PiMomdpModel(
        scale,
        T,
        obs,
        mu,
        MixedBelief(geo.start, hidden0),
        stay_action=STAY,
        stay_observation=NOTHING,
        visible_names=tuple(f"({x},{y})" for x, y in geo.xy),
        hidden_names=HIDDEN_NAMES,
        action_names=ACTION_NAMES,
        observation_names=OBSERVATION_NAMES,
    )


def good_observation_probability(cfg: GridConfig) -> np.ndarray:
    """Pr(good_i | x, y) = (1 + exp(-d_i / D)) / 2 as assumed by the probabilistic agent, (V, 2)."""
    return 0.5 * (1.0 + np.exp(-cfg.geometry.distance / cfg.D))


def true_good_observation_probability(cfg: GridConfig) -> np.ndarray:
    """Ground truth: 1 - p_bad when both targets are farther than C, the agent's model otherwise."""
    good = good_observation_probability(cfg)
    far = (cfg.geometry.distance > cfg.C).all(axis=1)
    good[far] = 1.0 - cfg.p_bad
    return good


def observation_probabilities(good: np.ndarray) -> np.ndarray:
    """Pr(o | cell, hidden) for o in oAA..oBB from per-target correctness probabilities, (V, 2, 4)."""
    P = np.empty((len(good), 2, 4))
    for h in range(2):
        for o in range(4):
            ok1, ok2 = _seen_correctly(o, h)
            p1 = good[:, 0] if ok1 else 1.0 - good[:, 0]
            p2 = good[:, 1] if ok2 else 1.0 - good[:, 1]
            P[:, h, o] = p1 * p2
    return P


@dataclass(frozen=True, eq=False)
class ProbGridModel:
    """Probabilistic mixed-observability grid model used by the baseline agent."""

    cfg: GridConfig
    observation: np.ndarray  # (V', H, A, O), rows sum to 1
    reward: np.ndarray  # (V', H) reward collected on entering V'
    terminal: np.ndarray  # (V', H) bool

    @property
    def geometry(self) -> GridGeometry:
        return self.cfg.geometry


def build_probabilistic_grid(cfg: GridConfig) -> ProbGridModel:
    geo = cfg.geometry
    V = geo.num_cells
    obs = np.zeros((V, 2, len(_MOVES), len(OBSERVATION_NAMES)))
    obs[:, :, :, :4] = observation_probabilities(good_observation_probability(cfg))[:, :, None, :]
    obs[:, :, STAY, :] = 0.0
    obs[:, :, STAY, NOTHING] = 1.0
    assert np.allclose(obs.sum(axis=3), 1.0, atol=1e-9, rtol=0)
    reward = np.full((V, 2), -cfg.step_cost)
    terminal = np.zeros((V, 2), dtype=bool)
    for h in range(2):
        reward[geo.target_cells[h], h] = cfg.reward_goal
        reward[geo.target_cells[1 - h], h] = -cfg.penalty
        terminal[geo.target_cells[h], h] = True
    return ProbGridModel(cfg, obs, reward, terminal)


@dataclass(frozen=True, eq=False)
class ProbPolicy:
    actions: np.ndarray  # (V, N)
    values: np.ndarray  # (V, N)
    resolution: int
    iterations: int

    def belief_index(self, b: float) -> int:
        return int(np.rint(b * (self.resolution - 1)))

    def action(self, cell: int, b: float) -> int:
        return int(self.actions[cell, self.belief_index(b)])


def solve_prob_baseline(
    model: ProbGridModel, resolution: int = 201, tolerance: float = 1e-6, max_iters: int = 100_000
) -> ProbPolicy:
    """Discounted value iteration over (cell, Pr(A1)) with Pr(A1) snapped to a uniform grid."""
    if resolution < 2:
        raise PreconditionError("belief grid needs at least 2 points")
    gamma = model.cfg.gamma
    if not gamma < 1:
        raise PreconditionError("discount must be < 1")
    move = model.geometry.move
    V, A = move.shape
    b = np.linspace(0.0, 1.0, resolution)[None, :]  # (1, N)
    nb = 1.0 - b
    rewards, coefs, gathers = [], [], []
    for a in range(A):
        nxt = move[:, a]
        r = b * model.reward[nxt, 0][:, None] + nb * model.reward[nxt, 1][:, None]
        cont1 = (~model.terminal[nxt, 0]).astype(float)[:, None]
        cont2 = (~model.terminal[nxt, 1]).astype(float)[:, None]
        coef_a, idx_a = [], []
        for o in range(model.observation.shape[3]):
            l1 = model.observation[nxt, 0, a, o][:, None]
            l2 = model.observation[nxt, 1, a, o][:, None]
            if not (l1.any() or l2.any()):
                continue
            evidence = b * l1 + nb * l2
            post = np.divide(b * l1, evidence, out=np.zeros_like(evidence), where=evidence > 0)
            coef_a.append(gamma * (b * l1 * cont1 + nb * l2 * cont2))
            idx_a.append(np.rint(post * (resolution - 1)).astype(np.int64))
        rewards.append(r)
        coefs.append(np.stack(coef_a))
        gathers.append(nxt[None, :, None] * resolution + np.stack(idx_a))
    values = np.zeros((V, resolution))
    for it in range(1, max_iters + 1):
        flat = values.ravel()
        q = np.stack([r + (c * flat[gi]).sum(axis=0) for r, c, gi in zip(rewards, coefs, gathers)])
        new = q.max(axis=0)
        residual = np.abs(new - values).max()
        values = new
        if residual < tolerance:
            return ProbPolicy(q.argmax(axis=0), values, resolution, it)
    raise NonConvergenceError(residual, max_iters)


# --- agents -----------------------------------------------------------------


class PossibilisticAgent:
    """Tracks a mixed belief with qualitative revision and follows a solved policy."""

    def __init__(self, model: PiMomdpModel, solution: MixedValueSolution, initial_hidden=None):
        self.model = model
        self.solution = solution
        self.initial_hidden = tuple(model.initial.hidden if initial_hidden is None else initial_hidden)
        self._cache: dict = {}
        self.fallbacks = 0

    def reset(self, cell: int):
        self.cell = cell
        self.belief = self.solution.index[self.initial_hidden]

    def act(self) -> int:
        return int(self.solution.policy[self.cell, self.belief])

    def observe(self, action: int, cell: int, observation: int):
        key = (self.cell, self.belief, action, cell, observation)
        nxt = self._cache.get(key)
        if nxt is None:
            prior = MixedBelief(self.cell, self.solution.hidden_beliefs[self.belief])
            try:
                post = mixed_belief_update(self.model, prior, action, cell, observation)
                nxt = self.solution.index[post.hidden]
            except ImpossibleObservationError:
                nxt = -1
            self._cache[key] = nxt
        if nxt < 0:
            self.fallbacks += 1
        else:
            self.belief = nxt
        self.cell = cell


class ProbabilisticAgent:
    """Tracks Pr(A1) exactly with Bayes' rule; looks the action up at the nearest grid belief."""

    def __init__(self, model: ProbGridModel, policy: ProbPolicy, initial_b: float = 0.5):
        self.model = model
        self.policy = policy
        self.initial_b = initial_b
        self.fallbacks = 0

    def reset(self, cell: int):
        self.cell = cell
        self.b = self.initial_b

    def act(self) -> int:
        return self.policy.action(self.cell, self.b)

    def observe(self, action: int, cell: int, observation: int):
        l1 = self.model.observation[cell, 0, action, observation]
        l2 = self.model.observation[cell, 1, action, observation]
        evidence = self.b * l1 + (1.0 - self.b) * l2
        if evidence > 0:
            self.b = self.b * l1 / evidence
        else:
            self.fallbacks += 1
        self.cell = cell


# --- simulation ---------------------------------------------------------------


@dataclass
class SimulationReport:
    steps: np.ndarray
    rewards: np.ndarray
    capped: np.ndarray
    fallback_events: int
    seed: int

    @property
    def n_runs(self) -> int:
        return len(self.rewards)

    @property
    def mean_defined(self) -> bool:
        return self.n_runs > 0

    @property
    def mean(self) -> float:
        return float(self.rewards.mean()) if self.n_runs else math.nan

    @property
    def std(self) -> float:
        return float(self.rewards.std()) if self.n_runs else math.nan

    @property
    def capped_runs(self) -> int:
        return int(self.capped.sum())


def run_rng(seed: int, run: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, run]))


def simulate(
    cfg: GridConfig,
    agent,
    seed: int,
    n_runs: int,
    max_steps: Optional[int] = None,
    true_hidden: Optional[int] = None,
) -> SimulationReport:
    """Roll an agent out in the ground-truth grid.

    The hidden state is drawn uniformly per run unless ``true_hidden`` fixes
    it. Each step the agent acts, the robot moves, each target is seen
    correctly with its ground-truth probability, and the agent revises its
    belief. A run ends on target A's cell with reward ``100 - k``; runs
    reaching ``max_steps`` score ``100 - max_steps`` and are flagged.
    """
    max_steps = cfg.max_steps if max_steps is None else max_steps
    geo = cfg.geometry
    good = true_good_observation_probability(cfg)
    steps = np.zeros(n_runs, dtype=np.int64)
    capped = np.zeros(n_runs, dtype=bool)
    agent.fallbacks = 0
    for run in range(n_runs):
        rng = run_rng(seed, run)
        hidden = int(rng.integers(2)) if true_hidden is None else true_hidden
        goal = geo.target_cells[hidden]
        cell = geo.start
        agent.reset(cell)
        k = 0
        while cell != goal and k < max_steps:
            a = agent.act()
            cell = int(geo.move[cell, a])
            k += 1
            if a == STAY:
                o = NOTHING
            else:
                u1, u2 = rng.random(2)
                t1_correct, t2_correct = u1 < good[cell, 0], u2 < good[cell, 1]
                o = compose_observation(t1_correct == (hidden == 0), t2_correct == (hidden == 1))
            agent.observe(a, cell, o)
        steps[run] = k
        capped[run] = cell != goal
    rewards = cfg.reward_goal - steps.astype(float)
    return SimulationReport(steps, rewards, capped, agent.fallbacks, seed)


# --- sweeps -------------------------------------------------------------------


@dataclass
class BenchAgents:
    """Both solved agents for one grid configuration (policies do not depend on p_bad)."""

    cfg: GridConfig
    poss_model: PiMomdpModel
    poss_solution: MixedValueSolution
    prob_model: ProbGridModel
    prob_policy: ProbPolicy

    @classmethod
    def solve(cls, cfg: GridConfig, resolution: int = 201, tolerance: float = 1e-6):
        from .momdp import momdp_value_iteration

        poss = build_possibilistic_grid(cfg)
        prob = build_probabilistic_grid(cfg)
        return cls(
            cfg,
            poss,
            momdp_value_iteration(poss),
            prob,
            solve_prob_baseline(prob, resolution, tolerance),
        )


def _row(param, poss: SimulationReport, prob: SimulationReport, seed: int) -> dict:
    return {
        "sweep_parameter": param,
        "poss_mean_reward": poss.mean,
        "poss_std": poss.std,
        "prob_mean_reward": prob.mean,
        "prob_std": prob.std,
        "poss_fallback_count": poss.fallback_events,
        "capped_runs_poss": poss.capped_runs,
        "capped_runs_prob": prob.capped_runs,
        "n_runs": poss.n_runs,
        "seed": seed,
    }


def sweep_pbad(
    cfg: GridConfig,
    pbad_values: Sequence[float],
    n_runs: int,
    seed: int,
    agents: Optional[BenchAgents] = None,
) -> list[dict]:
    """Mean reward of both agents against the ground-truth error probability."""
    if n_runs == 0:
        return []
    agents = agents or BenchAgents.solve(cfg)
    rows = []
    for p in pbad_values:
        truth = replace(cfg, p_bad=float(p))
        poss = simulate(truth, PossibilisticAgent(agents.poss_model, agents.poss_solution), seed, n_runs)
        prob = simulate(truth, ProbabilisticAgent(agents.prob_model, agents.prob_policy), seed, n_runs)
        rows.append(_row(float(p), poss, prob, seed))
    return rows


def possibilistic_wrong_prior(scale, wrongness: float) -> int:
    """Level of the correct hidden state when the wrong one is fully possible.

    Greatest scale level not above ``2 (1 - w)``: total ignorance at
    ``w = 0.5``, certainty of the wrong state as ``w`` approaches 1.
    Once ``2 (1 - w)`` drops below the smallest positive level the correct
    state gets possibility 0, and qualitative revision can never restore it.
    """
    return scale.floor(2.0 * (1.0 - wrongness) + 1e-12)


def sweep_initial_belief(
    cfg: GridConfig,
    wrongness_values: Sequence[float],
    n_runs: int,
    seed: int,
    agents: Optional[BenchAgents] = None,
) -> list[dict]:
    """Both agents start out believing target 2 is A while target 1 is A in truth."""
    if n_runs == 0:
        return []
    agents = agents or BenchAgents.solve(cfg)
    scale = agents.poss_model.scale
    rows = []
    for w in wrongness_values:
        if not 0.5 <= w < 1.0:
            raise ValueError(f"wrongness must lie in [0.5, 1), got {w}")
        hidden0 = (possibilistic_wrong_prior(scale, w), scale.top)
        poss_agent = PossibilisticAgent(agents.poss_model, agents.poss_solution, hidden0)
        prob_agent = ProbabilisticAgent(agents.prob_model, agents.prob_policy, 1.0 - w)
        poss = simulate(cfg, poss_agent, seed, n_runs, true_hidden=0)
        prob = simulate(cfg, prob_agent, seed, n_runs, true_hidden=0)
        rows.append(_row(float(w), poss, prob, seed))
    return rows


def format_number(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{x:.6g}"


def write_csv(rows: Sequence[dict], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([format_number(row[c]) for c in CSV_COLUMNS])
