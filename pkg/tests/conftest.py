import numpy as np
import pytest

from pimomdp import MixedBelief, PiMdpModel, PiMomdpModel, make_scale, uniform_scale

STAY = 0


def random_rows(rng, shape, k):
    """Random level tables whose last axis is normalized (max = k)."""
    rows = rng.integers(0, k + 1, size=shape)
    flat = rows.reshape(-1, shape[-1])
    flat[np.arange(len(flat)), rng.integers(0, shape[-1], size=len(flat))] = k
    return flat.reshape(shape)


def random_mdp(rng, n_states, n_actions, n_levels, stay=True):
    """Random model; action 0 is the stay action when ``stay`` is set."""
    scale = uniform_scale(n_levels - 1)
    T = random_rows(rng, (n_states, n_actions, n_states), scale.k)
    if stay:
        T[:, STAY, :] = np.eye(n_states, dtype=np.int64) * scale.k
    mu = rng.integers(0, scale.k + 1, size=n_states)
    return PiMdpModel(scale, T, mu, STAY if stay else None)


def random_momdp(rng, n_visible, n_hidden, n_actions, n_obs, n_levels):
    """Random mixed model with stay action 0 and stay observation 0."""
    scale = uniform_scale(n_levels - 1)
    k = scale.k
    V, H = n_visible, n_hidden
    T = random_rows(rng, (V, H, n_actions, V * H), k).reshape(V, H, n_actions, V, H)
    T[:, :, STAY] = np.eye(V * H, dtype=np.int64).reshape(V, H, V, H) * k
    O = random_rows(rng, (V, H, n_actions, n_obs), k)
    O[:, :, STAY, :] = 0
    O[:, :, STAY, 0] = k
    mu = rng.integers(0, k + 1, size=(V, H))
    hidden0 = random_rows(rng, (H,), k)
    return PiMomdpModel(scale, T, O, mu, MixedBelief(int(rng.integers(V)), hidden0), STAY, 0)


def stay_trap_model():
    """Two states, stay action 0 and action b = 1 moving s1 to s2; s2 is the goal."""
    scale = make_scale([0, 1])
    T = np.zeros((2, 2, 2), dtype=np.int64)
    T[0, 0, 0] = T[1, 0, 1] = 1
    T[0, 1, 1] = T[1, 1, 1] = 1
    return PiMdpModel(scale, T, [0, 1], stay_action=0, state_names=("s1", "s2"), action_names=("stay", "b"))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")
    print(ACCEPTANCE_LINES[-1])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
