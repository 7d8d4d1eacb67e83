"""Command registry for pindex.

Commands register themselves with :func:`register_command` when their
module is imported; the CLI builds one subparser per registered command.
"""

import logging
from typing import TypeVar

from pindex.commands.base import BaseCommand

# Configure logging
logger = logging.getLogger(__name__)

# Type variable for decorator type checking
T = TypeVar("T", bound=type[BaseCommand])


class CommandRegistry:
    """Registry for all available commands.

    Implemented as a singleton so that every command lands in one registry
    regardless of where it is imported.

    Attributes:
        _instance: The singleton instance
        _commands: Registered command classes keyed by name
    """

    _instance = None
    _commands: dict[str, type[BaseCommand]] = {}

    def __new__(cls) -> "CommandRegistry":
        if cls._instance is None:
            logger.debug("Creating new CommandRegistry singleton instance")
            cls._instance = super().__new__(cls)
        return cls._instance

    @classmethod
    def register(cls, command_class: T) -> T:
        """Register a command class.

        Args:
            command_class: The command class to register

        Returns:
            The registered command class (for decorator use)

        Raises:
            ValueError: If another class is already registered under the name
        """
        if not getattr(command_class, "name", None):
            raise ValueError(f"Command class {command_class.__name__} has no name")

        name = command_class.name
        if name in cls._commands:
            if cls._commands[name] is command_class:
                logger.debug(f"Command {name} already registered")
                return command_class
            raise ValueError(
                f"Command name '{name}' is already registered for {cls._commands[name].__name__}",
            )

        logger.debug(f"Registering command: {name} ({command_class.__name__})")
        cls._commands[name] = command_class
        return command_class

    @classmethod
    def get_command_classes(cls) -> dict[str, type[BaseCommand]]:
        return dict(sorted(cls._commands.items()))

    @classmethod
    def get_command(cls, name: str) -> BaseCommand:
        """Instantiate a registered command.

        Raises:
            KeyError: If no command has the name
        """
        return cls._commands[name]()


def register_command(cls: T) -> T:
    """Decorator to register a command class.

    Example:
        @register_command
        class VerifySuiteCommand(BaseCommand):
            name = "verify-suite"
            description = "Run the property matrix"
    """
    return CommandRegistry.register(cls)
