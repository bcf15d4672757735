"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 convergence or accuracy
failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import AccuracyError, ConfigError, ConvergenceError, ParameterError, UltraJCError
from .experiments import ExperimentConfig, SweepAxis, failed_checks, load_config, run_experiment, with_overrides
from .hamiltonians import ModelParams
from .presets import PRESETS, preset_configs
from .sweep import default_workers
from .tables import FORMATS, emit

log = logging.getLogger("ultrajc")

EXIT_OK, EXIT_CONFIG, EXIT_ACCURACY, EXIT_IO = 0, 2, 3, 4


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="output directory (default: results)")
    p.add_argument("--format", choices=FORMATS, default=None, help="override the table format")
    p.add_argument("--workers", type=int, default=None, help="sweep worker processes (default: available CPUs)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the creation time from metadata")
    p.add_argument("--cutoff", type=int, default=None, help="Fock cutoff N_c (default 20)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultrajc", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="run a named panel preset")
    p.add_argument("name", choices=PRESETS)
    _common(p)

    p = sub.add_parser("run", help="run an experiment config file")
    p.add_argument("config")
    _common(p)

    p = sub.add_parser("validity", help="RWA validity report, e.g. `validity g=0.5 xi=2.76 nu=5 N=2`")
    p.add_argument("params", nargs="*", metavar="key=value")
    _common(p)

    p = sub.add_parser("spectrum", help="JC spectrum vs g, e.g. `spectrum omega_c=1 g_max=3 points=301`")
    p.add_argument("params", nargs="*", metavar="key=value")
    _common(p)
    return parser


def _key_values(tokens, allowed) -> dict:
    out = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep or key not in allowed:
            raise ConfigError(f"expected key=value with key in {sorted(allowed)}, got {token!r}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    return out


def _validity_config(tokens) -> ExperimentConfig:
    kv = _key_values(tokens, {"omega_c", "g", "xi", "nu", "N", "t_max"})
    n_exc = int(kv.pop("N", 2))
    t_max = kv.pop("t_max", None)
    return ExperimentConfig("validity_report", ModelParams(**kv), "validity", n_exc=n_exc, t_end=t_max)


def _spectrum_configs(tokens) -> list:
    kv = _key_values(
        tokens, {"omega_c", "g_max", "points", "n_max", "delta_min", "delta_max", "delta_points"}
    )
    params = ModelParams(omega_c=kv.get("omega_c", 1.0), g=0.0)
    g_axis = SweepAxis("g", 0.0, kv.get("g_max", 3.0), int(kv.get("points", 301)))
    n_max = int(kv.get("n_max", 12))
    out = [ExperimentConfig("spectrum", params, "spectrum", g_axis=g_axis, n_max=n_max)]
    if "delta_min" in kv or "delta_max" in kv:
        d_axis = SweepAxis("delta", kv.get("delta_min", -0.9), kv.get("delta_max", 1.0), int(kv.get("delta_points", 96)))
        out.append(ExperimentConfig("phase_diagram", params, "phase_diagram", g_axis=g_axis, delta_axis=d_axis, n_max=n_max))
    return out


def _configs(args) -> list:
    if args.command == "preset":
        return preset_configs(args.name, cutoff=args.cutoff or 20)
    if args.command == "run":
        return [load_config(args.config)]
    if args.command == "validity":
        return [_validity_config(args.params)]
    return _spectrum_configs(args.params)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    workers = args.workers if args.workers is not None else default_workers()
    try:
        configs = _configs(args)
        configs = [with_overrides(c, cutoff=args.cutoff, fmt=args.format, out_dir=args.out) for c in configs]
    except (ConfigError, ParameterError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    failures = []
    for cfg in configs:
        try:
            log.info("running %s (%s)", cfg.name, cfg.kind)
            table = run_experiment(cfg, workers=workers, timestamp=not args.no_timestamp)
        except (ConfigError, ParameterError) as exc:
            print(f"config error in {cfg.name}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (AccuracyError, ConvergenceError) as exc:
            print(f"accuracy failure in {cfg.name}: {exc}", file=sys.stderr)
            return EXIT_ACCURACY
        except UltraJCError as exc:
            print(f"error in {cfg.name}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            path = emit(table, cfg.output_format, cfg.out_dir)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return EXIT_IO
        print(path)
        if cfg.kind == "validity_report":
            print(f"regime={table.metadata['regime']} valid={table.metadata['valid']}")
            for row in table.rows:
                print(f"  {row[5]:4s} {row[0]:38s} ratio={row[4]:.4g}")
        failures += failed_checks(table)
    if failures:
        for f in failures:
            print(f"convergence check failed: {f}", file=sys.stderr)
        return EXIT_ACCURACY
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
