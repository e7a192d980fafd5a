"""Command-line front end.

Four subcommands drive the library from JSON configuration files:

    gtra solve    --config cfg.json --out DIR    one equilibrium solve
    gtra compare  --config cfg.json --out DIR    strategy comparison suite
    gtra sweep    --config cfg.json --out DIR --axis lambda --values 0:15:0.5
    gtra dynamics --config cfg.json --out DIR    single-target phase portrait

Every run writes CSV tables, SVG plots, and a manifest.json recording the
resolved configuration, its 64-bit digest, and the produced files. Re-running
a command with the same inputs reproduces the CSV outputs byte for byte (17
significant digits, fixed row order) regardless of the thread count.

Exit codes: 0 success, 2 configuration error, 3 numeric/solver failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import hashlib
import json
import os
import sys
from pathlib import Path

from . import __version__
from .dynamics import interior_equilibrium, phase_portrait, reduce_payoffs
from .errors import CapacityError, ConfigError, NumericError
from .experiments import METRIC_COLUMNS, STRATEGY_NAMES, compare_config, mean_outcomes
from .game import TargetParams, attacker_utility, qr_attack_distribution
from .metrics import consumed_resources
from .scenarios import Scenario, ScenarioConfig, SweepAxis, sample_instance, sweep_grid
from .solver import GaParams, iga_solve
from .svgplot import line_plot, marked_scatter_plot

SCHEMA_VERSION = 1

COMPARISON_COLUMNS = ("n", "instance", "strategy") + METRIC_COLUMNS + ("feasible",)
SWEEP_COLUMNS = ("axis", "value", "n", "instance", "strategy") + METRIC_COLUMNS + ("feasible",)
QSTAR_COLUMNS = ("target_id", "q", "consumption")
SUMMARY_COLUMNS = ("defender_utility", "attacker_utility", "consumption", "iterations")
PAYOFFS_COLUMNS = ("a", "b", "c", "d", "f")
EQUILIBRIUM_COLUMNS = ("p_star", "q_star")
TRAJECTORY_COLUMNS = ("trajectory", "t", "p", "q")

_GA_KEYS = {
    "population_size",
    "generations",
    "crossover_rate",
    "mutation_rate",
    "mutation_scale",
    "elitism_count",
    "stall_generations",
    "tournament_size",
    "blend_alpha",
}


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def load_config(path: str) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top-level value must be a JSON object")
    return doc


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        raise ConfigError(f"{path}: missing required key '{key}'")
    return doc[key]


def _as_number(value, key: str, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: '{key}' must be a number, got {value!r}")
    return float(value)


def _as_int(value, key: str, path: str) -> int:
    num = _as_number(value, key, path)
    if num != int(num):
        raise ConfigError(f"{path}: '{key}' must be an integer, got {value!r}")
    return int(num)


def resolve_scenario_config(doc: dict, path: str, paper_scale: bool) -> dict:
    """Validate a scenario config document and fill in the defaults.

    Desk-scale limits (instances <= 20, n <= 200) apply unless the caller
    passed --paper-scale, which raises them to the full 100 x 1000 size.
    """
    max_n = 1000 if paper_scale else 200
    max_instances = 100 if paper_scale else 20
    known = {
        "scenario",
        "n",
        "gamma",
        "alpha",
        "lambda",
        "instances",
        "seed",
        "trials",
        "times",
        "shared_trial_draws",
        "budget_fraction",
        "partones_sort_by_reward",
        "ga",
    }
    for key in doc:
        if key not in known:
            raise ConfigError(f"{path}: unknown key '{key}'")

    scenario = _require(doc, "scenario", path)
    try:
        scenario = Scenario(scenario).value
    except ValueError:
        names = ", ".join(s.value for s in Scenario)
        raise ConfigError(f"{path}: 'scenario' must be one of {names}, got {scenario!r}")

    raw_n = _require(doc, "n", path)
    if isinstance(raw_n, list):
        ns = [_as_int(v, "n", path) for v in raw_n]
    else:
        ns = [_as_int(raw_n, "n", path)]
    if not ns:
        raise ConfigError(f"{path}: 'n' must not be empty")
    for n in ns:
        if not 1 <= n <= max_n:
            raise ConfigError(
                f"{path}: 'n' must lie in [1, {max_n}] (pass --paper-scale for "
                f"full-size runs), got {n}"
            )

    gamma = _as_number(doc.get("gamma", 0.1), "gamma", path)
    if not 0.0 < gamma <= 1.0:
        raise ConfigError(
            f"{path}: 'gamma' must satisfy 0 < gamma <= 1 (the resource-to-target "
            f"ratio stays below 1), got {gamma}"
        )
    alpha = _as_number(doc.get("alpha", 0.8), "alpha", path)
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"{path}: 'alpha' must lie in [0, 1], got {alpha}")
    lam = _as_number(doc.get("lambda", 1.5), "lambda", path)
    if lam < 0:
        raise ConfigError(f"{path}: 'lambda' must be >= 0, got {lam}")

    instances = _as_int(doc.get("instances", max_instances if paper_scale else 20), "instances", path)
    if not 1 <= instances <= max_instances:
        raise ConfigError(
            f"{path}: 'instances' must lie in [1, {max_instances}] (pass "
            f"--paper-scale for full-size runs), got {instances}"
        )
    seed = _as_int(doc.get("seed", 20260809), "seed", path)
    if seed < 0:
        raise ConfigError(f"{path}: 'seed' must be >= 0, got {seed}")
    trials = _as_int(doc.get("trials", 10000), "trials", path)
    if trials < 1:
        raise ConfigError(f"{path}: 'trials' must be >= 1, got {trials}")
    times = _as_int(doc.get("times", 10), "times", path)
    if times < 1:
        raise ConfigError(f"{path}: 'times' must be >= 1, got {times}")
    shared = doc.get("shared_trial_draws", True)
    if not isinstance(shared, bool):
        raise ConfigError(f"{path}: 'shared_trial_draws' must be a boolean")
    budget_fraction = doc.get("budget_fraction")
    if budget_fraction is not None:
        budget_fraction = _as_number(budget_fraction, "budget_fraction", path)
        if not 0.0 <= budget_fraction <= 1.0:
            raise ConfigError(
                f"{path}: 'budget_fraction' must lie in [0, 1], got {budget_fraction}"
            )
    sort_flag = doc.get("partones_sort_by_reward", False)
    if not isinstance(sort_flag, bool):
        raise ConfigError(f"{path}: 'partones_sort_by_reward' must be a boolean")

    ga_doc = doc.get("ga", {})
    if not isinstance(ga_doc, dict):
        raise ConfigError(f"{path}: 'ga' must be an object")
    for key in ga_doc:
        if key not in _GA_KEYS:
            raise ConfigError(f"{path}: unknown GA key 'ga.{key}'")
    try:
        ga = GaParams(**ga_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: invalid GA parameters: {exc}") from exc

    return {
        "scenario": scenario,
        "n": ns if isinstance(raw_n, list) else ns[0],
        "gamma": gamma,
        "alpha": alpha,
        "lambda": lam,
        "instances": instances,
        "seed": seed,
        "trials": trials,
        "times": times,
        "shared_trial_draws": shared,
        "budget_fraction": budget_fraction,
        "partones_sort_by_reward": sort_flag,
        "ga": {k: getattr(ga, k) for k in sorted(_GA_KEYS)},
    }


def resolve_dynamics_config(doc: dict, path: str) -> dict:
    known = {"target", "alpha", "grid", "dt", "max_steps", "tol"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"{path}: unknown key '{key}'")
    target_doc = _require(doc, "target", path)
    if not isinstance(target_doc, dict):
        raise ConfigError(f"{path}: 'target' must be an object")
    fields = {"attack_reward", "attack_penalty", "defense_cost", "attack_cost"}
    for key in target_doc:
        if key not in fields:
            raise ConfigError(f"{path}: unknown key 'target.{key}'")
    target = {k: _as_number(_require(target_doc, k, path), f"target.{k}", path) for k in sorted(fields)}
    alpha = _as_number(doc.get("alpha", 0.8), "alpha", path)
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"{path}: 'alpha' must lie in [0, 1], got {alpha}")
    grid = _as_int(doc.get("grid", 4), "grid", path)
    if grid < 2:
        raise ConfigError(f"{path}: 'grid' must be >= 2, got {grid}")
    dt = _as_number(doc.get("dt", 0.01), "dt", path)
    max_steps = _as_int(doc.get("max_steps", 5000), "max_steps", path)
    tol = _as_number(doc.get("tol", 1e-8), "tol", path)
    if dt <= 0 or max_steps < 1 or tol <= 0:
        raise ConfigError(f"{path}: 'dt', 'max_steps' and 'tol' must be positive")
    return {
        "target": target,
        "alpha": alpha,
        "grid": grid,
        "dt": dt,
        "max_steps": max_steps,
        "tol": tol,
    }


def config_digest(resolved: dict) -> str:
    canonical = json.dumps(resolved, sort_keys=True, separators=(",", ":"))
    return hashlib.blake2b(canonical.encode("utf-8"), digest_size=8).hexdigest()


def write_manifest(
    out_dir: Path, args, resolved: dict, columns: dict, outputs: list[str], threads: int
) -> None:
    manifest = {
        "command_line": " ".join(args.raw_argv),
        "config_digest": config_digest(resolved),
        "master_seed": resolved.get("seed", 0),
        "tool_version": __version__,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "threads": threads,
        "schema_version": SCHEMA_VERSION,
        "columns": columns,
        "config": resolved,
        "outputs": outputs,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _scenario_cfg(resolved: dict, n: int) -> ScenarioConfig:
    return ScenarioConfig(
        scenario=Scenario(resolved["scenario"]),
        n=n,
        gamma=resolved["gamma"],
        alpha=resolved["alpha"],
        lam=resolved["lambda"],
        instances=resolved["instances"],
        master_seed=resolved["seed"],
        budget_fraction=resolved["budget_fraction"],
    )


def _scalar_n(resolved: dict, path: str) -> int:
    n = resolved["n"]
    if isinstance(n, list):
        raise ConfigError(f"{path}: 'n' must be a single integer for this command")
    return n


def cmd_solve(args) -> int:
    doc = load_config(args.config)
    resolved = resolve_scenario_config(doc, args.config, args.paper_scale)
    if args.seed is not None:
        resolved["seed"] = args.seed
    n = _scalar_n(resolved, args.config)
    out_dir = _prepare_out_dir(args)
    ga = GaParams(**resolved["ga"])

    g = sample_instance(_scenario_cfg(resolved, n), 0)
    result = iga_solve(g, times=resolved["times"], params=ga)
    q = result.q_star
    p = qr_attack_distribution(g, q)

    weights = g.resource_costs
    write_csv(
        out_dir / "q_star.csv",
        QSTAR_COLUMNS,
        [
            (t.id, float(q.q[i]), float(q.q[i] * weights[i]))
            for i, t in enumerate(g.targets)
        ],
    )
    write_csv(
        out_dir / "summary.csv",
        SUMMARY_COLUMNS,
        [
            (
                result.utility,
                attacker_utility(g, p, q),
                consumed_resources(g, q),
                result.iterations_used,
            )
        ],
    )
    outputs = ["q_star.csv", "summary.csv"]
    columns = {"q_star.csv": list(QSTAR_COLUMNS), "summary.csv": list(SUMMARY_COLUMNS)}
    write_manifest(out_dir, args, resolved, columns, outputs, args.threads)
    return 0


def _comparison_rows(resolved: dict, ns: list[int], threads: int):
    """All per-instance rows plus per-(n, strategy) mean rows, in fixed order."""
    ga = GaParams(**resolved["ga"])
    rows = []
    mean_rows = []
    means_by_n = {}
    for n in ns:
        cfg = _scenario_cfg(resolved, n)
        per_instance = compare_config(
            cfg,
            trials=resolved["trials"],
            times=resolved["times"],
            ga=ga,
            shared_trial_draws=resolved["shared_trial_draws"],
            threads=threads,
        )
        for index, outcomes in enumerate(per_instance):
            for outcome in outcomes:
                rows.append(
                    (n, index, outcome.strategy)
                    + tuple(outcome.metric(m) for m in METRIC_COLUMNS)
                    + (outcome.feasible,)
                )
        means = mean_outcomes(per_instance)
        means_by_n[n] = means
        for name in STRATEGY_NAMES:
            mean_rows.append(
                (n, "mean", name)
                + tuple(means[name][m] for m in METRIC_COLUMNS)
                + ("",)
            )
    return rows + mean_rows, means_by_n


def cmd_compare(args) -> int:
    doc = load_config(args.config)
    resolved = resolve_scenario_config(doc, args.config, args.paper_scale)
    if args.seed is not None:
        resolved["seed"] = args.seed
    ns = resolved["n"] if isinstance(resolved["n"], list) else [resolved["n"]]
    out_dir = _prepare_out_dir(args)

    all_rows, means_by_n = _comparison_rows(resolved, ns, args.threads)
    write_csv(out_dir / "comparison.csv", COMPARISON_COLUMNS, all_rows)

    outputs = ["comparison.csv"]
    for metric in METRIC_COLUMNS:
        if metric == "attacker_utility":
            continue
        series = [
            (name, [float(n) for n in ns], [means_by_n[n][name][metric] for n in ns])
            for name in STRATEGY_NAMES
        ]
        fname = f"{metric}_vs_n.svg"
        line_plot(
            out_dir / fname,
            series,
            title=f"{metric} by strategy",
            x_label="targets",
            y_label=metric,
        )
        outputs.append(fname)
    columns = {"comparison.csv": list(COMPARISON_COLUMNS)}
    write_manifest(out_dir, args, resolved, columns, outputs, args.threads)
    return 0


def parse_values(text: str) -> list[float]:
    """Grid expression: 'a:b:c' (inclusive range) or a comma list."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(tok) for tok in text.split(":")]
            if len(parts) != 3:
                raise ValueError("range expression needs start:stop:step")
            start, stop, step = parts
            if step <= 0:
                raise ValueError("range step must be > 0")
            count = int((stop - start) / step + 1e-9) + 1
            if count < 1:
                raise ValueError("empty range")
            return [start + k * step for k in range(count)]
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"cannot parse values expression {text!r}: {exc}") from exc


def cmd_sweep(args) -> int:
    doc = load_config(args.config)
    resolved = resolve_scenario_config(doc, args.config, args.paper_scale)
    if args.seed is not None:
        resolved["seed"] = args.seed
    n = _scalar_n(resolved, args.config)
    try:
        axis = SweepAxis(args.axis)
    except ValueError:
        names = ", ".join(a.value for a in SweepAxis)
        raise ConfigError(f"unknown sweep axis {args.axis!r}; expected one of {names}")
    values = parse_values(args.values)
    if not values:
        raise ConfigError("sweep needs at least one value")
    out_dir = _prepare_out_dir(args)

    base = _scenario_cfg(resolved, n)
    grid = sweep_grid(base, axis, values)
    ga = GaParams(**resolved["ga"])

    rows = []
    mean_rows = []
    ne_defender = []
    ne_attacker = []
    for value, cfg in zip(values, grid):
        per_instance = compare_config(
            cfg,
            trials=resolved["trials"],
            times=resolved["times"],
            ga=ga,
            shared_trial_draws=resolved["shared_trial_draws"],
            threads=args.threads,
        )
        for index, outcomes in enumerate(per_instance):
            for outcome in outcomes:
                rows.append(
                    (axis.value, value, cfg.n, index, outcome.strategy)
                    + tuple(outcome.metric(m) for m in METRIC_COLUMNS)
                    + (outcome.feasible,)
                )
        means = mean_outcomes(per_instance)
        for name in STRATEGY_NAMES:
            mean_rows.append(
                (axis.value, value, cfg.n, "mean", name)
                + tuple(means[name][m] for m in METRIC_COLUMNS)
                + ("",)
            )
        ne_defender.append(means["NE"]["defender_utility"])
        ne_attacker.append(means["NE"]["attacker_utility"])

    write_csv(out_dir / "sweep.csv", SWEEP_COLUMNS, rows + mean_rows)
    fname = f"utilities_vs_{axis.value}.svg"
    line_plot(
        out_dir / fname,
        [
            ("defender utility", values, ne_defender),
            ("attacker utility", values, ne_attacker),
        ],
        title=f"equilibrium utilities vs {axis.value}",
        x_label=axis.value,
        y_label="utility",
    )
    columns = {"sweep.csv": list(SWEEP_COLUMNS)}
    write_manifest(out_dir, args, resolved, columns, ["sweep.csv", fname], args.threads)
    return 0


def cmd_dynamics(args) -> int:
    doc = load_config(args.config)
    resolved = resolve_dynamics_config(doc, args.config)
    out_dir = _prepare_out_dir(args)

    target = TargetParams(id=1, **resolved["target"])
    sp = reduce_payoffs(target, resolved["alpha"])
    write_csv(out_dir / "payoffs.csv", PAYOFFS_COLUMNS, [(sp.a, sp.b, sp.c, sp.d, sp.f)])

    equilibrium = interior_equilibrium(sp)
    if equilibrium is None:
        write_csv(out_dir / "equilibrium.csv", EQUILIBRIUM_COLUMNS, [("absent", "absent")])
    else:
        write_csv(out_dir / "equilibrium.csv", EQUILIBRIUM_COLUMNS, [equilibrium])

    trajectories = phase_portrait(
        sp,
        grid=resolved["grid"],
        dt=resolved["dt"],
        max_steps=resolved["max_steps"],
        tol=resolved["tol"],
    )
    rows = []
    series = []
    for tid, trajectory in enumerate(trajectories):
        pts = trajectory.points
        rows.extend((tid, float(t), float(p), float(q)) for t, p, q in pts)
        series.append((f"path {tid}", [float(p) for p in pts[:, 1]], [float(q) for q in pts[:, 2]]))
    write_csv(out_dir / "trajectories.csv", TRAJECTORY_COLUMNS, rows)
    marked_scatter_plot(
        out_dir / "phase.svg",
        series,
        marker=equilibrium,
        title="replicator phase plane",
        x_label="attack probability",
        y_label="defense probability",
    )
    columns = {
        "payoffs.csv": list(PAYOFFS_COLUMNS),
        "equilibrium.csv": list(EQUILIBRIUM_COLUMNS),
        "trajectories.csv": list(TRAJECTORY_COLUMNS),
    }
    outputs = ["payoffs.csv", "equilibrium.csv", "trajectories.csv", "phase.svg"]
    write_manifest(out_dir, args, resolved, columns, outputs, args.threads)
    return 0


def _prepare_out_dir(args) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gtra",
        description="Budgeted security resource allocation against a softmax attacker.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "solve": (cmd_solve, "solve one instance for the equilibrium allocation"),
        "compare": (cmd_compare, "compare the equilibrium against the four baselines"),
        "sweep": (cmd_sweep, "comparison across a parameter grid"),
        "dynamics": (cmd_dynamics, "single-target replicator phase portrait"),
    }
    for name, (func, help_text) in specs.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="JSON configuration file")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--threads", type=int, default=1, help="instance-level worker threads")
        cmd.add_argument(
            "--paper-scale",
            action="store_true",
            help="allow full-size runs (100 instances, up to 1000 targets)",
        )
        if name == "sweep":
            cmd.add_argument("--axis", required=True, help="N, gamma, alpha, lambda or budget_fraction")
            cmd.add_argument("--values", required=True, help="grid: 'a:b:c' or comma list")
        cmd.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    raw_argv = list(sys.argv if argv is None else ["gtra"] + list(argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    args.raw_argv = raw_argv

    env_out = os.environ.get("GTRA_OUT_DIR")
    if env_out:
        args.out = env_out
    env_threads = os.environ.get("GTRA_THREADS")
    if env_threads:
        try:
            args.threads = int(env_threads)
        except ValueError:
            print(f"error: GTRA_THREADS must be an integer, got {env_threads!r}", file=sys.stderr)
            return 2
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2

    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericError, CapacityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
