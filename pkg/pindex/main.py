#!/usr/bin/env python3
"""pindex main entry point.

This module contains the main function and command-line interface. It
handles argument parsing, configuration management and dispatch to the
registered commands, and maps their outcome to the process exit code.
"""

import argparse
import json
import logging
import sys

from rich.console import Console
from rich.logging import RichHandler
from rich.panel import Panel

from pindex._version import __version__
from pindex.commands import CommandRegistry
from pindex.config import ConfigManager
from pindex.errors import PIndexError, format_error_message

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(message)s",
    datefmt="[%X]",
    handlers=[RichHandler(rich_tracebacks=True)],
)
logger = logging.getLogger("pindex")

#: Exit codes.
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFICATION = 2

#: Command-line flags that override configuration keys of the same name.
OVERRIDE_KEYS = ("restarts", "seed", "modes", "reproducible")


def configure_logging(verbose: bool) -> None:
    """Configure logging level based on verbose flag.

    Args:
        verbose: Whether to enable verbose logging
    """
    if verbose:
        logger.setLevel(logging.DEBUG)
        logger.debug("Verbose logging enabled")
    else:
        logger.setLevel(logging.INFO)


def build_parser() -> argparse.ArgumentParser:
    """Build the parser with one subcommand per registered command."""
    parser = argparse.ArgumentParser(
        prog="pindex",
        description="pindex - P-index theory of symmetric closed characteristics",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"pindex {__version__}")

    config_group = parser.add_argument_group("Configuration")
    config_group.add_argument("--config-show", action="store_true", help="Show the current configuration")
    config_group.add_argument("--config-reset", action="store_true", help="Reset configuration to defaults")

    shared = argparse.ArgumentParser(add_help=False)
    output_group = shared.add_argument_group("Output")
    output_group.add_argument("--out", default=None, help="Write the JSON report to this file")
    output_group.add_argument(
        "--reproducible",
        action="store_true",
        default=None,
        help="Omit timing and timestamps so equal inputs give identical reports",
    )
    output_group.add_argument("--verbose", action="store_true", help="Enable verbose mode with detailed logging")

    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, command_class in CommandRegistry.get_command_classes().items():
        sub = subparsers.add_parser(
            name,
            parents=[shared],
            help=command_class.description,
            description=command_class.description,
            formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        )
        command_class.add_arguments(sub)
    return parser


def handle_config_commands(args: argparse.Namespace, console: Console) -> bool:
    """Handle configuration-related flags."""
    if args.config_show:
        print(json.dumps(ConfigManager.get_instance().get_config(), indent=2))
        return True

    if args.config_reset:
        ConfigManager.get_instance().reset()
        console.print("[green]Configuration reset to defaults[/]")
        return True

    return False


def print_error(console: Console, error: BaseException, command: str, arguments: dict) -> None:
    details = format_error_message(error, command, arguments)
    body = details["error_note"]
    if details["possible_fix"]:
        body += f"\n\n[bold]Possible fix:[/] {details['possible_fix']}"
    console.print(Panel(body, title=f"[bold red]{type(error).__name__}[/]", border_style="red", expand=False))


def main(argv: list[str] | None = None) -> int:
    """Main entry point for the application.

    Returns:
        The exit code: 0 on success, 1 on usage or configuration errors,
        2 when verification failures are present
    """
    console = Console(stderr=True)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    configure_logging(getattr(args, "verbose", False))

    if handle_config_commands(args, console):
        return EXIT_OK
    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    arguments = {k: v for k, v in vars(args).items() if k not in ("config_show", "config_reset")}
    try:
        overrides = {key: getattr(args, key, None) for key in OVERRIDE_KEYS}
        config = dict(ConfigManager.get_instance().override(overrides))
        command = CommandRegistry.get_command(args.command)
        report = command.run(args, config).finish()
    except PIndexError as e:
        logger.debug("command failed", exc_info=True)
        print_error(console, e, args.command, arguments)
        return e.exit_code
    except ValueError as e:
        print_error(console, e, args.command, arguments)
        return EXIT_USAGE
    except Exception as e:
        logger.exception("Unexpected error occurred:")
        console.print(f"\n[bold red]Unexpected error:[/] {str(e)}")
        return EXIT_USAGE

    reproducible = bool(config.get("reproducible"))
    digits = int(config.get("significant_digits", 17))
    if args.out:
        report.write(args.out, reproducible=reproducible, digits=digits)
    else:
        print(report.to_json(reproducible=reproducible, digits=digits))
    report.render(console)
    return EXIT_VERIFICATION if report.failures else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
