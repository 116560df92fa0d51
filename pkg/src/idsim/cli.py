"""Command-line front end.

Subcommands: bench (Monte Carlo predictor comparison), trial (single run),
disamb (one-shot mode selection), serve (WebSocket teleop backend).
Machine-readable output (JSON/CSV) goes to stdout or files; human-oriented
tables go to stderr. Exit codes: 0 success, 1 runtime error, 2 usage or
configuration error. The config path may also come from the environment
variable IDS_CONFIG.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from .config import (
    load_config_document,
    trial_config_from_dict,
    trial_config_to_dict,
    write_trial_sidecar,
)
from .core import Pose
from .disambiguation import select_disambiguation_mode
from .errors import ConfigError, IdsimError
from .inference import uniform_belief, BeliefState
from .simulation import PREDICTORS, run_benchmark, run_trial

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _resolve_config_path(args, parser):
    path = args.config or os.environ.get("IDS_CONFIG")
    if not path:
        parser.error("a config file is required (positional argument or IDS_CONFIG)")
    return path


def _load_trial_config(path):
    return trial_config_from_dict(load_config_document(path))


def _floats(text, what):
    try:
        return [float(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise ConfigError(f"{what} must be a comma-separated list of numbers") from None


def cmd_bench(args, parser):
    config = _load_trial_config(_resolve_config_path(args, parser))
    report = run_benchmark(config, n_trials=args.trials)
    os.makedirs(args.out, exist_ok=True)

    report_path = os.path.join(args.out, "benchmark.json")
    with open(report_path, "w", encoding="utf-8") as f:
        json.dump(report.to_json_dict(), f, indent=2, sort_keys=True)
        f.write("\n")

    csv_path = os.path.join(args.out, "accuracies.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as f:
        f.write("trial," + ",".join(PREDICTORS) + "\n")
        for i in range(report.n_trials):
            cells = [repr(float(report.accuracies[p][i])) for p in PREDICTORS]
            f.write(f"{i}," + ",".join(cells) + "\n")

    print(report_path)
    print(csv_path)
    print("predictor        mean      std      n", file=sys.stderr)
    for pred in PREDICTORS:
        print(
            f"{pred:<10} {100 * report.mean(pred):8.2f}% {100 * report.std(pred):7.2f}%  {report.n_trials:5d}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_trial(args, parser):
    config = _load_trial_config(_resolve_config_path(args, parser))
    if args.seed is not None:
        from dataclasses import replace

        config = replace(config, seed=args.seed)
    result = run_trial(config)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "trial.csv")
    result.write_csv(csv_path)
    write_trial_sidecar(config, os.path.join(args.out, "trial.json"))
    print(csv_path)
    return EXIT_OK


def cmd_disamb(args, parser):
    config = _load_trial_config(_resolve_config_path(args, parser))
    n_goals = len(config.scene.goals)

    pose = config.scene.start_pose
    if args.pose is not None:
        values = _floats(args.pose, "--pose")
        if len(values) == 3:
            pose = Pose(np.array(values), Pose.identity().orientation)
        elif len(values) == 7:
            pose = Pose(np.array(values[:3]), np.array(values[3:]))
        else:
            raise ConfigError("--pose takes 3 values (position) or 7 (position + quaternion)")

    if args.belief is not None:
        values = _floats(args.belief, "--belief")
        if len(values) != n_goals:
            raise ConfigError(
                f"--belief has {len(values)} entries but the scene has {n_goals} goals"
            )
        weights = np.array(values)
        if np.any(weights < 0.0) or weights.sum() <= 0.0:
            raise ConfigError("--belief entries must be non-negative with a positive sum")
        belief = BeliefState(weights / weights.sum())
    else:
        belief = uniform_belief(n_goals)

    from .arbitration import make_context_builder

    result = select_disambiguation_mode(
        belief,
        pose,
        config.interface,
        config.interface.switch_order[0],
        config.disamb,
        config.field,
        make_context_builder(config.scene, config.autonomy),
    )
    print(json.dumps(result.to_json_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def cmd_serve(args, parser):
    import uvicorn

    from .service import create_app

    config = _load_trial_config(_resolve_config_path(args, parser))
    app = create_app(config, log_dir=args.out)
    if args.static is not None:
        from fastapi.staticfiles import StaticFiles

        if not os.path.isdir(args.static):
            raise ConfigError(f"static directory not found: {args.static}")
        app.mount("/", StaticFiles(directory=args.static, html=True), name="ui")
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except (OSError, SystemExit) as e:  # uvicorn wraps bind failures
        code = e.code if isinstance(e, SystemExit) else None
        if isinstance(e, SystemExit) and (code == 0 or code is None):
            return EXIT_OK
        print(f"error: cannot serve on {args.host}:{args.port}: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="idsim",
        description="Shared-autonomy simulation: intent inference, mode disambiguation, and teleop service.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_config(p):
        p.add_argument("config", nargs="?", help="JSON config file (default: $IDS_CONFIG)")

    p = sub.add_parser("bench", help="run the Monte Carlo predictor comparison")
    add_config(p)
    p.add_argument("--trials", type=int, default=500, help="number of trials (default 500)")
    p.add_argument("--out", default="bench_out", help="output directory")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("trial", help="run a single trial and write its log")
    add_config(p)
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default="trial_out", help="output directory")
    p.set_defaults(func=cmd_trial)

    p = sub.add_parser("disamb", help="one-shot disambiguation mode selection")
    add_config(p)
    p.add_argument("--pose", default=None, help="robot pose: x,y,z or x,y,z,qx,qy,qz,qw")
    p.add_argument("--belief", default=None, help="comma-separated goal probabilities")
    p.set_defaults(func=cmd_disamb)

    p = sub.add_parser("serve", help="serve the teleop WebSocket protocol")
    add_config(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--out", default="sessions", help="session log directory")
    p.add_argument("--static", default=None, help="directory of UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args, parser)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except IdsimError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return EXIT_OK
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
