"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 validation error, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InvariantError, ModelValidationError, PiModelError, PreconditionError
from .grid import (
    BenchAgents,
    GridConfig,
    PossibilisticAgent,
    ProbabilisticAgent,
    build_possibilistic_grid,
    format_number,
    simulate,
    sweep_initial_belief,
    sweep_pbad,
    write_csv,
)
from .io import load_model, save_model
from .mdp import PiMdpModel, finite_horizon_solve, value_iteration
from .momdp import (
    PiMomdpModel,
    mixed_cardinality,
    momdp_finite_horizon_solve,
    momdp_value_iteration,
)
from .pomdp import PiPomdpModel, belief_cardinality, flatten_pomdp_to_mdp

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_SOLVER = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _fmt_belief(scale, levels) -> str:
    return "(" + ", ".join(format_number(scale.label(int(x))) for x in levels) + ")"


def _names(names, prefix, n):
    return list(names) if names is not None else [f"{prefix}{i}" for i in range(n)]


def _solve_mdp(model: PiMdpModel, args, state_labels):
    scale = model.scale
    actions = _names(model.action_names, "a", model.num_actions)
    if args.infinite:
        sol = value_iteration(model)
        values, policy = sol.values, sol.policy
        print(f"converged after {sol.iterations} sweeps")
        dump = {"iterations": sol.iterations}
    else:
        tables, rules = finite_horizon_solve(model, args.horizon)
        values = tables[-1]
        policy = rules[0] if rules else None
        print(f"horizon {args.horizon}")
        dump = {"horizon": args.horizon}
    print(f"{'state':<24} {'u*':>10}  policy")
    rows = []
    for s, label in enumerate(state_labels):
        act = actions[policy[s]] if policy is not None else "-"
        print(f"{label:<24} {format_number(scale.label(int(values[s]))):>10}  {act}")
        rows.append({"state": label, "value": scale.label(int(values[s])), "action": act})
    dump["rows"] = rows
    return dump


def _solve_momdp(model: PiMomdpModel, args):
    scale = model.scale
    vis = _names(model.visible_names, "v", model.num_visible)
    actions = _names(model.action_names, "a", model.num_actions)
    if args.infinite:
        sol = momdp_value_iteration(model)
        beliefs, values, policy = sol.hidden_beliefs, sol.values, sol.policy
        print(f"converged after {sol.iterations} sweeps")
        dump = {"iterations": sol.iterations}
    else:
        beliefs, tables, rules = momdp_finite_horizon_solve(model, args.horizon)
        values = tables[-1]
        policy = rules[0] if rules else None
        print(f"horizon {args.horizon}")
        dump = {"horizon": args.horizon}
    print(f"{'visible':<12} {'hidden belief':<28} {'u*':>10}  policy")
    rows = []
    for v in range(model.num_visible):
        for j, b in enumerate(beliefs):
            act = actions[policy[v, j]] if policy is not None else "-"
            val = scale.label(int(values[v, j]))
            print(f"{vis[v]:<12} {_fmt_belief(scale, b):<28} {format_number(val):>10}  {act}")
            rows.append(
                {"visible": vis[v], "hidden_belief": scale.to_labels(b).tolist(), "value": val, "action": act}
            )
    dump["rows"] = rows
    return dump


def cmd_solve(args) -> int:
    model = load_model(args.model)
    if isinstance(model, PiMomdpModel):
        dump = _solve_momdp(model, args)
    elif isinstance(model, PiPomdpModel):
        flat = flatten_pomdp_to_mdp(model)
        labels = [_fmt_belief(model.scale, b) for b in flat.beliefs]
        if args.infinite and flat.mdp.stay_action is None:
            raise PreconditionError("infinite-horizon solve needs a stay action and a stay observation")
        dump = _solve_mdp(flat.mdp, args, labels)
    else:
        labels = _names(model.state_names, "s", model.num_states)
        dump = _solve_mdp(model, args, labels)
    if args.json:
        Path(args.json).write_text(json.dumps(dump, indent=1) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    model = load_model(args.model)
    levels = model.scale.size
    if isinstance(model, PiMdpModel):
        print("fully observable; belief space = state space")
        print(f"states: {model.num_states}")
        return EXIT_OK
    counts = [("computed", levels)]
    if args.levels is not None and args.levels != levels:
        counts.append(("override", args.levels))
    for tag, L in counts:
        if isinstance(model, PiMomdpModel):
            V, H = model.num_visible, model.num_hidden
            print(
                f"[{tag} #L={L}] mixed belief states: {mixed_cardinality(V, H, L)} "
                f"(per visible state: {belief_cardinality(H, L)})   "
                f"flat belief states: {belief_cardinality(V * H, L)}"
            )
        else:
            print(f"[{tag} #L={L}] flat belief states: {belief_cardinality(model.num_states, L)}")
    return EXIT_OK


def _grid_config(args) -> GridConfig:
    return GridConfig(g=args.g, D=args.d, C=args.c, max_steps=args.max_steps)


def cmd_bench(args) -> int:
    cfg = _grid_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    agents = BenchAgents.solve(cfg, resolution=args.resolution) if args.runs else None
    sweeps = []
    if args.pbad_list is not None:
        rows = sweep_pbad(cfg, args.pbad_list, args.runs, args.seed, agents)
        sweeps.append(("pbad", out / "pbad_sweep.csv", rows))
    if args.wrongness_list is not None:
        cfg_w = GridConfig(g=cfg.g, D=cfg.D, C=cfg.C, p_bad=args.pbad, max_steps=cfg.max_steps)
        rows = sweep_initial_belief(cfg_w, args.wrongness_list, args.runs, args.seed, agents)
        sweeps.append(("wrongness", out / "initial_belief_sweep.csv", rows))
    if not sweeps:
        print("nothing to do: give --pbad-list and/or --wrongness-list", file=sys.stderr)
        return EXIT_USAGE
    for name, path, rows in sweeps:
        write_csv(rows, path)
        for r in rows:
            print(
                f"{name}={format_number(r['sweep_parameter'])}: "
                f"possibilistic {format_number(r['poss_mean_reward'])}  "
                f"probabilistic {format_number(r['prob_mean_reward'])}"
            )
        print(f"wrote {path}")
    return EXIT_OK


def cmd_gen_grid(args) -> int:
    model = build_possibilistic_grid(GridConfig(g=args.g))
    save_model(model, args.out)
    print(f"wrote {args.out}: {model.num_visible} visible states, {model.scale.size} levels")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = GridConfig(g=args.g, D=args.d, C=args.c, p_bad=args.pbad, max_steps=args.max_steps)
    agents = BenchAgents.solve(cfg, resolution=args.resolution)
    for name, agent in (
        ("possibilistic", PossibilisticAgent(agents.poss_model, agents.poss_solution)),
        ("probabilistic", ProbabilisticAgent(agents.prob_model, agents.prob_policy)),
    ):
        rep = simulate(cfg, agent, args.seed, args.runs)
        mean = format_number(rep.mean) if rep.mean_defined else "undefined"
        std = format_number(rep.std) if rep.mean_defined else "undefined"
        print(
            f"{name}: runs={rep.n_runs} mean={mean} std={std} "
            f"capped={rep.capped_runs} fallbacks={rep.fallback_events}"
        )
    return EXIT_OK


def _add_grid_flags(p, pbad=False):
    p.add_argument("--g", type=int, default=10)
    p.add_argument("--d", type=float, default=10.0)
    p.add_argument("--c", type=float, default=4.0)
    p.add_argument("--runs", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--max-steps", type=int, default=400)
    p.add_argument("--resolution", type=int, default=201)
    if pbad:
        p.add_argument("--pbad", type=float, default=0.8)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pimomdp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve a model file")
    p.add_argument("model")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--horizon", type=int)
    mode.add_argument("--infinite", action="store_true")
    p.add_argument("--json", help="write a machine-readable dump here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("enumerate", help="belief-space sizes of a model file")
    p.add_argument("model")
    p.add_argument("--levels", type=int, help="also report counts for this number of levels")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("bench", help="P_bad and wrong-initial-belief sweeps on the grid")
    _add_grid_flags(p, pbad=True)
    p.add_argument("--pbad-list", type=_float_list)
    p.add_argument("--wrongness-list", type=_float_list)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("gen-grid", help="write the possibilistic grid model as a model file")
    p.add_argument("--g", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_grid)

    p = sub.add_parser("simulate", help="simulate both agents at one P_bad")
    _add_grid_flags(p, pbad=True)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "runs", 0) < 0 or (getattr(args, "horizon", None) or 0) < 0:
        print("counts must be non-negative", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except ModelValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PreconditionError, InvariantError, PiModelError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
