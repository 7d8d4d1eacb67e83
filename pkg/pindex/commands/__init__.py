"""Command-line pipelines; importing this package registers every command."""

from pindex.commands import ellipsoid_analyze, find_orbits, index_path, iterate, verify_suite
from pindex.commands.base import BaseCommand
from pindex.commands.registry import CommandRegistry, register_command

__all__ = [
    "BaseCommand",
    "CommandRegistry",
    "ellipsoid_analyze",
    "find_orbits",
    "index_path",
    "iterate",
    "register_command",
    "verify_suite",
]
