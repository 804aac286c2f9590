"""MIT License.

Copyright (c) 2023 Ritik Ranjan

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""

from __future__ import annotations

import argparse
import importlib
import logging
import sys
from typing import TextIO

from utils import RunConfig, all_commands

from .command import Command
from .context import RunContext
from .errors import (
    ConfigurationError,
    DomainError,
    InputFormatError,
    RangeError,
    RmqError,
    UsageError,
    VerificationFailed,
)

__all__ = ("EXIT_FAILURE", "EXIT_OK", "EXIT_USAGE", "App")

log = logging.getLogger("app")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

USAGE_ERRORS = (UsageError, ConfigurationError, InputFormatError, RangeError, DomainError, argparse.ArgumentTypeError)


class App:
    """Command-line application: loads command modules and runs one command per process."""

    def __init__(self, *, commands_to_load: list[str] | None = None, prog: str = "rmq") -> None:
        self.parser = argparse.ArgumentParser(
            prog=prog,
            description="Range minimum queries answered by closest-hit ray casting over a software BVH.",
        )
        self.parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
        self._subparsers = self.parser.add_subparsers(dest="command", metavar="command", required=True)

        self.commands: dict[str, Command] = {}
        self.commands_to_load = commands_to_load if commands_to_load is not None else list(all_commands)

        self.setup_hook()

    def __repr__(self) -> str:
        return f"<App commands={sorted(self.commands)}>"

    def setup_hook(self) -> None:
        """Import every configured command module and call its `setup`."""
        for extension in self.commands_to_load:
            try:
                module = importlib.import_module(extension)
            except ModuleNotFoundError:
                log.warning("extension %s not found. Skipping.", extension)
                continue

            setup = getattr(module, "setup", None)
            if setup is None:
                log.warning("extension %s has no setup function. Skipping.", extension)
                continue

            try:
                setup(self)
            except Exception as err:  # pylint: disable=broad-except
                log.warning("extension %s failed to load: %s", extension, err, exc_info=True)
            else:
                log.debug("extension %s loaded", extension)

    def add_command(self, command: Command) -> None:
        if command.name in self.commands:
            log.warning("command %s is already loaded. Skipping.", command.name)
            return

        parser = self._subparsers.add_parser(
            command.name,
            help=command.help,
            description=command.description or command.help,
        )
        command.add_arguments(parser)
        self.commands[command.name] = command

    def parse(self, argv: list[str] | None = None) -> RunConfig:
        """Parse flags into a validated `RunConfig`. argparse itself exits with 2 on malformed flags."""
        namespace = self.parser.parse_args(argv)
        config = RunConfig.from_namespace(namespace)

        if problems := config.validate():
            raise UsageError("; ".join(problems))
        return config

    def invoke(self, ctx: RunContext) -> int:
        command = ctx.command
        log.debug("running %r with %r", command, ctx.config)
        return int(command.run(ctx) or EXIT_OK)

    def run(self, argv: list[str] | None = None, *, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
        """Parse, run one command, and return its exit code."""
        ctx: RunContext | None = None
        try:
            config = self.parse(argv)
            if config.verbose:
                logging.getLogger().setLevel(logging.DEBUG)
            ctx = RunContext(self, config, stdout=stdout, stderr=stderr)
            return self.invoke(ctx)
        except Exception as error:  # pylint: disable=broad-except
            return self.on_command_error(ctx, error, stderr=stderr)

    def on_command_error(self, ctx: RunContext | None, error: Exception, *, stderr: TextIO | None = None) -> int:
        """Map an error to an exit code and report it."""
        stream = ctx.stderr if ctx is not None else stderr or sys.stderr

        def report(message: str) -> None:
            if ctx is not None:
                ctx.error(message)
            else:
                stream.write(f"error: {message}\n")

        if isinstance(error, USAGE_ERRORS):
            report(str(error))
            if isinstance(error, ConfigurationError) and error.report is not None:
                report(str(error.report))
            return EXIT_USAGE

        if isinstance(error, VerificationFailed):
            report(str(error))
            return EXIT_FAILURE

        if isinstance(error, RmqError):
            log.error("%s: %s", type(error).__name__, error)
            report(str(error))
            return EXIT_FAILURE

        log.exception("unhandled error", exc_info=error)
        report(f"internal error: {error!r}")
        return EXIT_FAILURE
