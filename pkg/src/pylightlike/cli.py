from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import FORMATS, Settings, load_settings
from .errors import ConfigurationError, LightlikeError
from .fixtures import available, load_fixture, serialize
from .paths import core_defaults_file, fixture_data_dir, user_cache_dir, user_config_dir, user_settings_file
from .suites import ALL, RunSettings, available_suites, get_suite, run_suites

logger = logging.getLogger(__name__)

PROG = "lightlike"
EXIT_ERROR = 1


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def _error(message: str) -> int:
    print(f"{PROG}: error: {message}", file=sys.stderr)
    return EXIT_ERROR


def parse_params(items: list[str] | None) -> dict[str, float]:
    """``KEY=VALUE`` pairs from repeated ``--param`` flags."""
    params: dict[str, float] = {}
    for item in items or []:
        key, sep, raw = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"--param expects KEY=VALUE, got {item!r}")
        try:
            params[key] = float(raw)
        except ValueError:
            raise ConfigurationError(f"--param {key} must be a number, got {raw!r}") from None
    return params


def _settings(args: argparse.Namespace) -> Settings:
    overrides = {
        "run": {
            "points": getattr(args, "points", None),
            "tol": getattr(args, "tol", None),
            "seed": getattr(args, "seed", None),
            "format": getattr(args, "format", None),
        }
    }
    return load_settings(args.config, overrides=overrides)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def run_cmd(args: argparse.Namespace) -> int:
    suites = args.suite or [ALL]
    where = f"fixture {args.fixture!r}, suite {'+'.join(suites)}"
    try:
        settings = _settings(args)
        run_settings = RunSettings(**settings.run_values())
        fmt = settings.report_format
        fixture = load_fixture(
            args.fixture,
            parameters=parse_params(args.param),
            bootstrap_points=settings.get_int("numerics", "bootstrap_points"),
            degeneracy=run_settings.degeneracy,
            max_rejections=run_settings.max_rejections,
        )
        report = run_suites(fixture, suites, run_settings)
    except LightlikeError as exc:
        return _error(f"{where}: {exc}")
    text = report.render(fmt)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
        logger.info("wrote report to %s", args.out)
    else:
        sys.stdout.write(text)
    for row in report.failures():
        print(
            f"{PROG}: {fixture.name}: {row.suite}: {row.check_id} failed "
            f"(max residual {row.max_residual:.3e} >= {row.tolerance:g})",
            file=sys.stderr,
        )
    return report.exit_code()


def list_cmd(args: argparse.Namespace) -> int:
    suites = {name: get_suite(name) for name in available_suites()}
    if args.as_json:
        data = {
            "fixtures": available(),
            "suites": {
                name: {"requires": list(s.requires), "description": s.description}
                for name, s in suites.items()
            },
        }
        print(json.dumps(data, indent=2, sort_keys=True))
        return 0
    print("fixtures:")
    for name in available():
        print(f"  {name}")
    print("suites:")
    for name, suite in suites.items():
        needs = f" (needs {', '.join(suite.requires)})" if suite.requires else ""
        print(f"  {name:<12} {suite.description}{needs}")
    return 0


def show_cmd(args: argparse.Namespace) -> int:
    try:
        fixture = load_fixture(args.fixture, parameters=parse_params(args.param))
    except LightlikeError as exc:
        return _error(f"fixture {args.fixture!r}: {exc}")
    sys.stdout.write(serialize(fixture))
    return 0


def show_paths(args: argparse.Namespace) -> int:
    data = {
        "user_config": user_config_dir(),
        "user_settings": user_settings_file(),
        "user_cache": user_cache_dir(),
        "core_defaults": core_defaults_file(),
        "fixtures": fixture_data_dir(),
    }
    if args.as_json:
        print(json.dumps({k: str(v) for k, v in data.items()}))
    else:
        for k, v in data.items():
            print(f"{k}: {v}")
    return 0


def config_show(args: argparse.Namespace) -> int:
    try:
        settings = load_settings(args.config)
    except LightlikeError as exc:
        return _error(str(exc))
    if args.format == "json":
        sys.stdout.write(settings.to_json())
    else:
        sys.stdout.write(settings.to_ini())
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logging"
    )
    with_config = argparse.ArgumentParser(add_help=False)
    with_config.add_argument("--config", type=Path, default=None, help="Extra settings INI file")

    parser = argparse.ArgumentParser(
        prog=PROG,
        description="Verify identities of statistical manifolds and their lightlike hypersurfaces.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # run command
    p_run = subparsers.add_parser(
        "run", help="Run check suites on a fixture.", parents=[common, with_config]
    )
    p_run.add_argument("--fixture", required=True, help="Registry name or path to a .toml file")
    p_run.add_argument(
        "--suite",
        action="append",
        choices=[*available_suites(), ALL],
        help="Suite to run; repeat for several (default: all)",
    )
    p_run.add_argument("--points", type=int, default=None)
    p_run.add_argument("--tol", type=float, default=None)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--format", choices=FORMATS, default=None)
    p_run.add_argument("--out", type=Path, default=None, help="Write the report here")
    p_run.add_argument("--param", action="append", metavar="KEY=VALUE", help="Override a fixture parameter")
    p_run.set_defaults(func=run_cmd)

    # list command
    p_list = subparsers.add_parser("list", help="List fixtures and suites.", parents=[common])
    p_list.add_argument("--json", dest="as_json", action="store_true")
    p_list.set_defaults(func=list_cmd)

    # show command
    p_show = subparsers.add_parser(
        "show", help="Print the normalized fixture document.", parents=[common]
    )
    p_show.add_argument("fixture")
    p_show.add_argument("--param", action="append", metavar="KEY=VALUE")
    p_show.set_defaults(func=show_cmd)

    # paths command
    p_paths = subparsers.add_parser("paths", help="Show directories in use.", parents=[common])
    p_paths.add_argument("--json", dest="as_json", action="store_true")
    p_paths.set_defaults(func=show_paths)

    # config group
    p_config = subparsers.add_parser("config", help="Inspect settings.")
    sp_config = p_config.add_subparsers(dest="config_cmd", required=True)
    p_cfg_show = sp_config.add_parser(
        "show", help="Show merged settings", parents=[common, with_config]
    )
    p_cfg_show.add_argument("--as", dest="format", choices=["ini", "json"], default="ini")
    p_cfg_show.set_defaults(func=config_show)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(getattr(args, "verbose", 0))
    func = getattr(args, "func", None)
    if func is None:
        parser.print_help()
        return EXIT_ERROR
    try:
        return int(func(args))
    except SystemExit as exc:  # pragma: no cover - argparse may raise
        return int(exc.code or 0)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
