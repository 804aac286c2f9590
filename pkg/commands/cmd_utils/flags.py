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
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

from utils import ALGORITHMS, DISTRIBUTIONS, defaults, parse_count, parse_exponents, parse_names

__all__ = (
    "BENCH_FLAGS",
    "COMMON_FLAGS",
    "HEATMAP_FLAGS",
    "MEASURE_FLAGS",
    "QUERY_FLAGS",
    "RAYCAST_FLAGS",
    "SCALING_FLAGS",
    "VERIFY_FLAGS",
    "Flag",
    "add_flags",
)


@dataclass(frozen=True, slots=True)
class Flag:  # pylint: disable=too-many-instance-attributes
    """One command-line flag. Single-letter aliases get one dash, the rest two."""

    name: str
    aliases: tuple[str, ...] = ()
    default: Any = None
    description: str = ""
    type: Callable[[str], Any] | None = None
    choices: tuple[str, ...] | None = None
    action: str | None = None
    metavar: str | None = None

    @property
    def option_strings(self) -> list[str]:
        names = [f"--{self.name.replace('_', '-')}"]
        names += [f"-{alias}" if len(alias) == 1 else f"--{alias}" for alias in self.aliases]
        return names

    def add_to(self, parser: argparse.ArgumentParser) -> None:
        kwargs: dict[str, Any] = {"dest": self.name, "default": self.default, "help": self.description}
        if self.action is not None:
            kwargs["action"] = self.action
        else:
            kwargs.update(type=self.type, choices=self.choices, metavar=self.metavar)
        parser.add_argument(*self.option_strings, **kwargs)


def add_flags(parser: argparse.ArgumentParser, *groups: tuple[Flag, ...]) -> None:
    for group in groups:
        for flag in group:
            flag.add_to(parser)


_heatmap = defaults["heatmap"]
_scaling = defaults["scaling"]

# fmt: off
THREADS         = Flag("threads",         ("t", "workers"), None,                       "worker threads (default: RMQ_THREADS, else physical cores)", parse_count, metavar="N")  # noqa: E501
SEED            = Flag("seed",            ("s",),           None,                       "PRNG seed",                                         parse_count, metavar="SEED")
OUTPUT          = Flag("output",          ("o", "out"),     None,                       "write results here instead of stdout",              str,         metavar="PATH")
FP64            = Flag("fp64",            (),               False,                      "build 64-bit geometry (debugging)",                 action="store_true")

BLOCK_SIZE      = Flag("block_size",      ("bs",),          None,                       "elements per block, must pass the precision gate",  parse_count, metavar="BS")
NB              = Flag("nb",              ("blocks",),      None,                       "number of blocks, block size becomes ceil(n/nb)",  parse_count, metavar="B")
BLOCKMIN        = Flag("blockmin",        (),               None,                       "how fully covered blocks are answered",             str,         ("geometry", "lookup_table"))  # noqa: E501
STRICT_LAYOUT   = Flag("strict_layout",   (),               False,                      "linear cell layout normalized by the block count",  action="store_true")
CHECK_PAYLOAD   = Flag("check_payload",   (),               False,                      "check theta + t against the stored value",          action="store_true")

ALGO            = Flag("algo",            ("a",),           None,                       "solver",                                            str,         ALGORITHMS)
ALGOS           = Flag("algos",           (),               list(ALGORITHMS),           "comma separated solvers",                           parse_names, metavar="A,B")
N               = Flag("n",               (),               None,                       "array size, e.g. 1048576 or 2^20",                  parse_count, metavar="N")
Q               = Flag("q",               ("batch",),       None,                       "queries per batch",                                 parse_count, metavar="Q")
DIST            = Flag("dist",            ("d",),           None,                       "query length distribution",                         str,         DISTRIBUTIONS)
REPS            = Flag("reps",            ("r",),           None,                       "timed repeats per realization",                     parse_count, metavar="R")
REALIZATIONS    = Flag("realizations",    (),               None,                       "independent arrays per measurement",                parse_count, metavar="K")

NMIN            = Flag("nmin",            (),               _heatmap["nmin"],           "smallest n exponent",                               int,         metavar="E")
NMAX            = Flag("nmax",            (),               _heatmap["nmax"],           "largest n exponent",                                int,         metavar="E")
YMIN            = Flag("ymin",            (),               _heatmap["ymin"],           "smallest range exponent, |(l,r)| = n*2^y",          int,         metavar="Y")
YMAX            = Flag("ymax",            (),               _heatmap["ymax"],           "largest range exponent",                            int,         metavar="Y")
BS_EXPS         = Flag("block_size_exps", ("bs-exps",),     _heatmap["block_size_exps"], "block size exponents swept for raycast",          parse_exponents, metavar="E,E")  # noqa: E501
QMIN            = Flag("qmin",            (),               _scaling["qmin"],           "smallest batch exponent",                           int,         metavar="E")
QMAX            = Flag("qmax",            (),               _scaling["qmax"],           "largest batch exponent",                            int,         metavar="E")

INPUT           = Flag("input",           ("i",),           None,                       "array file, optionally followed by `l r` lines",   str,         metavar="PATH")
QUERIES         = Flag("queries",         (),               None,                       "separate file of `l r` lines",                      str,         metavar="PATH")
LAYOUT          = Flag("layout",          (),               "block",                    "scene layout for raycast",                          str,         ("single", "block"))
BY              = Flag("by",              (),               "both",                     "what to print per query",                           str,         ("index", "value", "both"))
NORMALIZE       = Flag("normalize",       (),               False,                      "map real values into [0, 1] first",                 action="store_true")
STATS           = Flag("stats",           (),               False,                      "print scene statistics to stderr",                  action="store_true")
DUMP_SCENE      = Flag("dump_scene",      (),               None,                       "write the triangles, one per line",                 str,         metavar="PATH")

SUITES          = Flag("suites",          (),               None,                       "comma separated suites to run (default: all)",      parse_names, metavar="A,B")
FULL            = Flag("full",            (),               False,                      "run at acceptance sizes (slow)",                    action="store_true")
INJECT_FAULT    = Flag("inject_fault",    (),               False,                      "shift the right partial block by one (must fail)",  action="store_true")
# fmt: on

COMMON_FLAGS = (THREADS, SEED, OUTPUT)
RAYCAST_FLAGS = (BLOCK_SIZE, NB, BLOCKMIN, STRICT_LAYOUT, FP64)
MEASURE_FLAGS = (Q, REPS, REALIZATIONS)
BENCH_FLAGS = (ALGO, N, DIST)
HEATMAP_FLAGS = (ALGOS, NMIN, NMAX, YMIN, YMAX, BS_EXPS, BLOCKMIN)
SCALING_FLAGS = (ALGO, N, DIST, QMIN, QMAX, REPS, REALIZATIONS, BLOCK_SIZE, NB, BLOCKMIN)
QUERY_FLAGS = (INPUT, QUERIES, ALGO, LAYOUT, BY, NORMALIZE, STATS, DUMP_SCENE, CHECK_PAYLOAD)
VERIFY_FLAGS = (SUITES, FULL, INJECT_FAULT, FP64)
