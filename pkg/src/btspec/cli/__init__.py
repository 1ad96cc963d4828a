"""Command-line front end: ``btspec <subcommand> --config run.cfg``."""
from __future__ import annotations

import argparse
import logging
import sys
from importlib import resources
from pathlib import Path

from .commands import COMMANDS, EXIT_CONFIG, Context, run_command
from .config import ConfigError, RunConfig, describe_schema, load_config, parse_config_text

__all__ = ["main", "build_parser", "bundled_config", "ConfigError", "RunConfig", "load_config",
           "parse_config_text"]

DEFAULT_CONFIG = {"validate": "no_hole"}


def bundled_config(name: str) -> str:
    """Text of a configuration shipped with the package (``no_hole``, ``disk``, ...)."""
    res = resources.files(__package__).joinpath("configs", f"{name}.cfg")
    if not res.is_file():
        raise ConfigError(f"no bundled config named {name!r}")
    return res.read_text()


def bundled_names():
    return sorted(p.name[:-4] for p in resources.files(__package__).joinpath("configs").iterdir()
                  if p.name.endswith(".cfg"))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="btspec",
        description="Floquet/monodromy spectra of the Bloch-Torrey operator on perforated domains.",
        epilog="Config keys:\n" + describe_schema(),
        formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="config file, or the name of a bundled config "
                    f"({', '.join(bundled_names())})")
    ap.add_argument("--out", help="output directory (overrides output_dir)")
    ap.add_argument("--seed", type=int, help="start-vector seed (overrides seed)")
    ap.add_argument("--threads", type=int, default=1, help="worker processes for sweeps")
    ap.add_argument("--plots", action="store_true", default=None, help="write SVG figures")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                    help="override a config key (repeatable)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def _load(args) -> RunConfig:
    overrides = {"seed": args.seed, "output_dir": args.out, "plots": args.plots}
    extra = "\n".join(args.set)
    name = args.config or DEFAULT_CONFIG.get(args.command)
    if name is None:
        raise ConfigError("--config is required")
    path = Path(name)
    if path.is_file():
        cfg = load_config(path, overrides)
        if not extra:
            return cfg
        text, source = path.read_text(), str(path)
    else:
        text, source = bundled_config(name), f"<bundled {name}>"
    if extra:
        text = _merge(text, extra)
    return parse_config_text(text, source, overrides)


def _merge(text: str, extra: str) -> str:
    """Drop config lines whose keys are overridden by ``--set``."""
    keys = {ln.split("=", 1)[0].strip() for ln in extra.splitlines() if "=" in ln}
    kept = [ln for ln in text.splitlines()
            if ln.split("#", 1)[0].split("=", 1)[0].strip() not in keys]
    return "\n".join(kept + extra.splitlines())


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        ctx = Context(cfg, Path(cfg["output_dir"]), bool(cfg["plots"]), args.threads or 1)
        return run_command(args.command, ctx)
    except ConfigError as exc:
        print(f"btspec: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
