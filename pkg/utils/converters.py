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
import re

__all__ = (
    "convert_bool",
    "parse_count",
    "parse_exponents",
    "parse_names",
)

_POWER = re.compile(r"^(?P<base>\d+)\s*(?:\^|\*\*)\s*(?P<exp>\d+)$")
_SHIFT = re.compile(r"^(?P<base>\d+)\s*<<\s*(?P<exp>\d+)$")
_RANGE = re.compile(r"^(?P<start>-?\d+)\s*\.\.\s*(?P<stop>-?\d+)$")


def convert_bool(entiry: str) -> bool | None:
    """Converts a string to a boolean value."""
    yes = {
        "yes",
        "y",
        "true",
        "t",
        "1",
        "enable",
        "on",
        "active",
        "activated",
        "ok",
        "accept",
        "agree",
    }
    if entiry.lower() in yes:
        return True

    no = {
        "no",
        "n",
        "false",
        "f",
        "0",
        "disable",
        "off",
        "deactive",
        "deactivated",
        "cancel",
        "deny",
        "disagree",
    }

    return False if entiry.lower() in no else None


def parse_count(argument: str) -> int:
    """Converts `1048576`, `2^20`, `2**20` or `1<<20` into a non-negative integer."""
    argument = argument.strip()

    if match := _POWER.fullmatch(argument):
        return int(match["base"]) ** int(match["exp"])

    if match := _SHIFT.fullmatch(argument):
        return int(match["base"]) << int(match["exp"])

    try:
        value = int(argument, base=10)
    except ValueError:
        msg = f"{argument!r} is not a count (try 1048576, 2^20 or 1<<20)"
        raise argparse.ArgumentTypeError(msg) from None

    if value < 0:
        msg = f"{argument!r} must not be negative"
        raise argparse.ArgumentTypeError(msg)
    return value


def parse_exponents(argument: str) -> list[int]:
    """Converts `10..20` (inclusive, either direction) or `-1,-2,-5` into a list of integers."""
    argument = argument.strip()

    if match := _RANGE.fullmatch(argument):
        start, stop = int(match["start"]), int(match["stop"])
        step = 1 if stop >= start else -1
        return list(range(start, stop + step, step))

    try:
        return [int(part) for part in argument.split(",") if part.strip()]
    except ValueError:
        msg = f"{argument!r} is not an exponent list (try 10..20 or -1,-2,-3)"
        raise argparse.ArgumentTypeError(msg) from None


def parse_names(argument: str) -> list[str]:
    """Converts `raycast, sparse` into `["raycast", "sparse"]`, dropping duplicates but keeping order."""
    names: list[str] = []
    for part in argument.split(","):
        name = part.strip().lower()
        if name and name not in names:
            names.append(name)

    if not names:
        msg = "expected at least one name"
        raise argparse.ArgumentTypeError(msg)
    return names
