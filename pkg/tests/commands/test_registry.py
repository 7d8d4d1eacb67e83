"""Tests for the CommandRegistry."""

import os
import sys

import pytest

# Add the root directory to the path for direct imports
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), "../..")))

from pindex.commands import CommandRegistry, register_command
from pindex.commands.base import BaseCommand
from pindex.commands.iterate import IterateCommand


class SampleCommand(BaseCommand):
    """A command used only by the registry tests."""

    name = "registry-sample"
    description = "Registry sample"

    def run(self, args, config):
        return self.new_report(args, config)


class ClashingCommand(BaseCommand):
    """A different class with the same name as SampleCommand."""

    name = "registry-sample"
    description = "Clashing sample"

    def run(self, args, config):
        return self.new_report(args, config)


@pytest.fixture
def sample_registered():
    """Register SampleCommand and remove it again afterwards."""
    register_command(SampleCommand)
    yield SampleCommand
    CommandRegistry._commands.pop(SampleCommand.name, None)


def test_singleton():
    """Every construction returns the same registry."""
    assert CommandRegistry() is CommandRegistry()


def test_all_commands_registered():
    """Importing the package registers the five pipelines."""
    assert {
        "ellipsoid-analyze",
        "find-orbits",
        "index-path",
        "iterate",
        "verify-suite",
    } <= set(CommandRegistry.get_command_classes())


def test_command_classes_are_sorted():
    """Subcommands are listed alphabetically."""
    names = list(CommandRegistry.get_command_classes())
    assert names == sorted(names)


def test_register_and_get(sample_registered):
    """A registered class can be instantiated by name."""
    command = CommandRegistry.get_command("registry-sample")
    assert isinstance(command, sample_registered)


def test_register_same_class_twice(sample_registered):
    """Registering the same class again is a no-op."""
    assert CommandRegistry.register(sample_registered) is sample_registered
    assert CommandRegistry.get_command_classes()["registry-sample"] is sample_registered


def test_register_name_clash(sample_registered):
    """A different class under a taken name is rejected."""
    with pytest.raises(ValueError, match="already registered"):
        CommandRegistry.register(ClashingCommand)


def test_register_without_name():
    """Classes without a name cannot be registered."""

    class Nameless(BaseCommand):
        description = "no name"

        def run(self, args, config):
            return self.new_report(args, config)

    with pytest.raises(ValueError, match="has no name"):
        CommandRegistry.register(Nameless)


def test_unknown_command():
    """Unknown names raise KeyError."""
    with pytest.raises(KeyError):
        CommandRegistry.get_command("no-such-command")


def test_builtin_command_instance():
    """Built-in commands instantiate to their classes."""
    assert isinstance(CommandRegistry.get_command("iterate"), IterateCommand)
