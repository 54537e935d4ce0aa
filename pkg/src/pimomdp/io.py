"""JSON model files.

Tables hold scale labels (numbers), not level indices. Labels are matched to
scale members by their canonical decimal text, never by closeness.

Layout per ``kind``::

    pi-mdp    transition[s][a][s'], preference[s]
    pi-pomdp  + observation[s'][a][o], initial_belief[s], observations, stay_observation
    pi-momdp  transition[s_v][s_h][a][s'_v][s'_h], hidden_observation[s'_v][s'_h][a][o_h],
              preference[s_v][s_h], initial {visible, hidden_belief}
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ModelValidationError
from .mdp import PiMdpModel
from .momdp import MixedBelief, PiMomdpModel
from .pomdp import PiPomdpModel
from .scale import QualitativeScale, make_scale

KINDS = ("pi-mdp", "pi-pomdp", "pi-momdp")


class ModelParseError(ModelValidationError):
    def __init__(self, msg, line=None, column=None):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{msg}{where}")


def canonical_label(x) -> str:
    return repr(float(x))


def _levels(table, scale: QualitativeScale, what: str) -> np.ndarray:
    lookup = {canonical_label(lab): i for i, lab in enumerate(scale.labels)}
    arr = np.asarray(table, dtype=object)
    out = np.empty(arr.shape, dtype=np.int64)
    for idx, lab in np.ndenumerate(arr):
        if isinstance(lab, bool) or not isinstance(lab, (int, float)):
            raise ModelValidationError(f"{what}{list(idx)}: {lab!r} is not a number")
        try:
            out[idx] = lookup[canonical_label(lab)]
        except KeyError:
            raise ModelValidationError(
                f"{what}{list(idx)}: label {lab} is not a member of the declared scale"
            ) from None
    return out


def _index(names, name, what):
    try:
        return list(names).index(name)
    except ValueError:
        raise ModelValidationError(f"unknown {what} {name!r}") from None


def _shape_check(arr: np.ndarray, shape, what):
    if arr.shape != tuple(shape):
        raise ModelValidationError(f"{what} has shape {arr.shape}, expected {tuple(shape)}")


def model_from_dict(doc: dict):
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ModelValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    declared = doc.get("scale")
    if not isinstance(declared, list) or not declared:
        raise ModelValidationError("scale must be a non-empty array of numbers")
    scale = make_scale(declared)
    lv = lambda key: _levels(doc[key], scale, key)  # noqa: E731
    try:
        if kind == "pi-momdp":
            return _momdp_from_dict(doc, scale, lv)
        states, actions = doc["states"], doc["actions"]
        T, mu = lv("transition"), lv("preference")
        _shape_check(T, (len(states), len(actions), len(states)), "transition")
        stay = doc.get("stay_action")
        stay = None if stay is None else _index(actions, stay, "action")
        if kind == "pi-mdp":
            return PiMdpModel(scale, T, mu, stay, tuple(states), tuple(actions))
        observations = doc["observations"]
        O = lv("observation")
        _shape_check(O, (len(states), len(actions), len(observations)), "observation")
        stay_o = doc.get("stay_observation")
        stay_o = None if stay_o is None else _index(observations, stay_o, "observation")
        return PiPomdpModel(
            scale, T, O, mu, lv("initial_belief"), stay, stay_o,
            tuple(states), tuple(actions), tuple(observations),
        )
    except KeyError as exc:
        raise ModelValidationError(f"missing field {exc.args[0]!r}") from None


def _momdp_from_dict(doc, scale, lv):
    vis, hid = doc["visible_states"], doc["hidden_states"]
    actions, obs = doc["actions"], doc["hidden_observations"]
    T, O, mu = lv("transition"), lv("hidden_observation"), lv("preference")
    V, H, A = len(vis), len(hid), len(actions)
    _shape_check(T, (V, H, A, V, H), "transition")
    _shape_check(O, (V, H, A, len(obs)), "hidden_observation")
    init = doc["initial"]
    hidden0 = _levels(init["hidden_belief"], scale, "initial.hidden_belief")
    return PiMomdpModel(
        scale, T, O, mu,
        MixedBelief(_index(vis, init["visible"], "visible state"), hidden0),
        _index(actions, doc["stay_action"], "action"),
        _index(obs, doc["stay_observation"], "hidden observation"),
        tuple(vis), tuple(hid), tuple(actions), tuple(obs),
    )


def load_model(path):
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from None
    if not isinstance(doc, dict):
        raise ModelParseError(f"{path}: top-level value must be an object")
    return model_from_dict(doc)


def _names(names, prefix, n):
    return list(names) if names is not None else [f"{prefix}{i}" for i in range(n)]


def model_to_dict(model) -> dict:
    scale = model.scale
    lab = lambda a: scale.to_labels(a).tolist()  # noqa: E731
    doc = {"scale": list(scale.labels)}
    if isinstance(model, PiMomdpModel):
        vis = _names(model.visible_names, "v", model.num_visible)
        hid = _names(model.hidden_names, "h", model.num_hidden)
        act = _names(model.action_names, "a", model.num_actions)
        obs = _names(model.observation_names, "o", model.num_hidden_observations)
        doc.update(
            kind="pi-momdp",
            visible_states=vis,
            hidden_states=hid,
            actions=act,
            hidden_observations=obs,
            transition=lab(model.transition),
            hidden_observation=lab(model.hidden_observation),
            preference=lab(model.preference),
            initial={"visible": vis[model.initial.visible], "hidden_belief": lab(list(model.initial.hidden))},
            stay_action=act[model.stay_action],
            stay_observation=obs[model.stay_observation],
        )
        return doc
    states = _names(model.state_names, "s", model.num_states)
    actions = _names(model.action_names, "a", model.num_actions)
    doc.update(
        kind="pi-mdp",
        states=states,
        actions=actions,
        transition=lab(model.transition),
        preference=lab(model.preference),
        stay_action=None if model.stay_action is None else actions[model.stay_action],
    )
    if isinstance(model, PiPomdpModel):
        observations = _names(model.observation_names, "o", model.num_observations)
        doc.update(
            kind="pi-pomdp",
            observations=observations,
            observation=lab(model.observation),
            initial_belief=lab(model.initial_belief),
            stay_observation=None
            if model.stay_observation is None
            else observations[model.stay_observation],
        )
    return doc


def save_model(model, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n", encoding="utf-8")
