"""``ensemble-qip`` command line: one subcommand per scenario, CSV output.

Configuration is layered: scenario defaults, then ``--config FILE``, then
``--set key=value`` and the per-key ``--key-name VALUE`` flags. Errors print a
single ``error: kind=<kind> exit=<code> msg=<text>`` line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import os
import sys
from typing import Optional, Sequence

from .. import __version__
from ..errors import ConfigError, ConvergenceError, DomainError
from .config import DISPLAY_UNIT, ScenarioConfig, echo_lines, parse_config
from .scenarios import SCENARIOS, Scenario, ScenarioResult

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_CONVERGENCE, EXIT_IO = 0, 1, 2, 3, 4
_SWEEP_HELP = {
    "sweep_start": "first sweep value",
    "sweep_stop": "last sweep value",
    "sweep_count": "number of sweep points",
    "sweep_scale": "linear or log spacing",
}


class _Parser(argparse.ArgumentParser):
    """Argparse that raises instead of exiting, so errors share one format."""

    def error(self, message):
        raise ConfigError(message)


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ensemble-qip", description="Ensemble cavity-QED gate and protocol simulations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="scenario", metavar="SCENARIO", parser_class=_Parser)
    sub.required = True
    for sc in SCENARIOS.values():
        keys = dict(sc.keys)
        epilog = ["config keys:"] + [f"  {k.describe()}" for k in keys.values()]
        if sc.sweep_kind is not None:
            d = sc.sweep_default
            unit = f" [{DISPLAY_UNIT[sc.sweep_kind]}]" if sc.sweep_kind in DISPLAY_UNIT else ""
            epilog.append(f"  sweep_start, sweep_stop{unit}, sweep_count, sweep_scale: sweep over {sc.sweep_help}"
                          f" (default {d.count} points, {d.scale})")
        epilog.append("  seed, output: random seed and CSV path")
        p = sub.add_parser(sc.name, help=sc.description, description=sc.description,
                           epilog="\n".join(epilog), formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", metavar="FILE", help="key = value configuration file")
        p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                       help="override one config key (repeatable)")
        p.add_argument("--out", metavar="PATH", help="write CSV here")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                       help="worker processes for sweeps (default: available CPUs)")
        names = list(keys)
        if sc.sweep_kind is not None:
            names += ["sweep_start", "sweep_stop", "sweep_count", "sweep_scale"]
        for name in names:
            k = keys.get(name)
            help_ = k.describe() if k is not None else f"{_SWEEP_HELP[name]} ({sc.sweep_help})"
            if k is not None and k.kind == "bool":
                p.add_argument(_flag(name), dest=f"key_{name}", nargs="?", const="true", metavar="BOOL", help=help_)
            else:
                p.add_argument(_flag(name), dest=f"key_{name}", metavar="VALUE", help=help_)
    return parser


def shipped_config(name: str) -> Optional[str]:
    """Path of a config bundled with the package, or None."""
    path = os.path.join(os.path.dirname(os.path.dirname(__file__)), "configs", os.path.basename(name))
    return path if os.path.isfile(path) else None


def _read(path: str) -> str:
    if not os.path.exists(path) and shipped_config(path):
        path = shipped_config(path)
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except UnicodeDecodeError as exc:
        raise ConfigError(f"config file is not UTF-8: {path}: {exc}") from None


def resolve_config(sc: Scenario, args) -> ScenarioConfig:
    """Merge file, ``--set`` and per-key flags into one validated config."""
    lines = []
    if args.config:
        lines.append(_read(args.config))
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        lines.append(item)
    for attr, value in sorted(vars(args).items()):
        if attr.startswith("key_") and value is not None:
            lines.append(f"{attr[4:]} = {value}")
    if args.seed is not None:
        lines.append(f"seed = {args.seed}")
    if args.out is not None:
        lines.append(f"output = {args.out}")
    # later assignments override earlier ones
    return parse_config("\n".join(lines), sc.name, sc.keys, sc.sweep_kind, sc.sweep_default)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    if isinstance(v, float) or hasattr(v, "dtype"):
        x = float(v)
        return "0" if x == 0 else f"{x:.12g}"
    return str(v)


def render_csv(sc: Scenario, cfg: ScenarioConfig, result: ScenarioResult) -> str:
    """Header comments echoing the resolved config, then RFC-4180 rows."""
    buf = io.StringIO()
    buf.write(f"# ensemble-qip {__version__}\n")
    for line in echo_lines(cfg, sc.keys, sc.sweep_kind):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(result.columns)
    for row in result.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _fail(kind: str, code: int, msg: str) -> int:
    one_line = " ".join(str(msg).split())
    print(f"error: kind={kind} exit={code} msg={one_line}", file=sys.stderr)
    return code


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one scenario; returns the process exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ConfigError as exc:
        return _fail("config", EXIT_CONFIG, exc)
    sc = SCENARIOS[args.scenario]
    try:
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        cfg = resolve_config(sc, args)
        result = sc.runner(cfg, args.workers)
    except ConvergenceError as exc:
        return _fail("convergence", EXIT_CONVERGENCE, exc)
    except (ConfigError, DomainError, ValueError) as exc:
        return _fail("config", EXIT_CONFIG, exc)
    except OSError as exc:
        return _fail("io", EXIT_IO, exc)
    except Exception as exc:  # keep the one-line contract for unexpected failures
        return _fail("internal", EXIT_INTERNAL, f"{type(exc).__name__}: {exc}")
    for line in result.report:
        print(line)
    if cfg.output:
        try:
            with open(cfg.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(render_csv(sc, cfg, result))
        except OSError as exc:
            return _fail("io", EXIT_IO, f"{cfg.output}: {exc.strerror or exc}")
        print(f"wrote {len(result.rows)} rows to {cfg.output}")
    return EXIT_OK


def main() -> None:
    sys.exit(run())
