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

import contextlib
import logging
import sys
from collections.abc import Iterator
from typing import TYPE_CHECKING, TextIO

from colorama import Fore

if TYPE_CHECKING:
    from utils.config import RunConfig

    from .app import App
    from .command import Command

__all__ = ("RunContext",)

log = logging.getLogger("context")


class RunContext:
    """Everything a command sees while it runs: the app, its config and the output streams."""

    def __init__(self, app: App, config: RunConfig, *, stdout: TextIO | None = None, stderr: TextIO | None = None) -> None:
        self.app = app
        self.config = config
        self.stdout = stdout or sys.stdout
        self.stderr = stderr or sys.stderr

    def __repr__(self) -> str:
        return f"<RunContext command={self.config.command}>"

    @property
    def command(self) -> Command:
        return self.app.commands[self.config.command]

    def send(self, *lines: str) -> None:
        """Write lines to stdout."""
        for line in lines:
            self.stdout.write(f"{line}\n")

    def error(self, message: str) -> None:
        """Write an error line to stderr, in red when it is a terminal."""
        colored = getattr(self.stderr, "isatty", lambda: False)()
        prefix = f"{Fore.RED}error:{Fore.RESET}" if colored else "error:"
        self.stderr.write(f"{prefix} {message}\n")

    @contextlib.contextmanager
    def output(self) -> Iterator[TextIO]:
        """Open `--output`, falling back to stdout."""
        path = self.config.output_path
        if path is None:
            yield self.stdout
            return

        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fp:
            yield fp
        log.info("wrote %s", path)
