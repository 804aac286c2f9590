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
import json
import logging
import os
import pathlib
from collections.abc import Iterator
from typing import Any

import psutil

from .converters import convert_bool

with contextlib.suppress(ImportError):
    from dotenv import load_dotenv

    load_dotenv()

log = logging.getLogger("config")

ROOT = pathlib.Path(__file__).resolve().parent.parent
DEFAULTS_PATH = pathlib.Path(os.environ.get("RMQ_DEFAULTS", ROOT / "rmq.json"))

with open(DEFAULTS_PATH, encoding="utf-8") as f:
    defaults = json.load(f)

all_commands: list[str] = defaults["all_commands"]
limits: dict[str, int] = defaults["limits"]

__all__ = (
    "ALGORITHMS",
    "COMMANDS",
    "DISTRIBUTIONS",
    "ENV",
    "Environment",
    "Null",
    "RunConfig",
    "all_commands",
    "default_threads",
    "defaults",
    "limits",
)

COMMANDS = ("verify", "query", "bench", "heatmap", "scaling")
ALGORITHMS = ("raycast", "exhaustive", "sparse")
DISTRIBUTIONS = ("large", "medium", "small")
BLOCKMIN_STRATEGIES = ("geometry", "lookup_table")


class Null:
    """Null Object."""

    def __repr__(self) -> str:
        return "Null()"

    def __str__(self) -> str:
        return "Null()"

    def __bool__(self) -> bool:
        return False

    def __eq__(self, other: Any) -> bool:  # noqa: ANN401
        return isinstance(other, Null)

    def __hash__(self) -> int:
        return 0

    def __getattr__(self, name: str) -> Null:
        return self

    def __getitem__(self, name: str) -> Null:
        return self


ANY = Null | str | list | bool | dict | int | float | None


class Environment:
    """Environment Variables."""

    def __init__(self) -> None:
        self.__dict = os.environ

    def __getattr__(self, name: str) -> ANY:
        return self.parse_entity(self.__dict.get(name))

    @staticmethod
    def parse_entity(entity: str | int | float | None, *, return_null: bool = True) -> ANY:
        """Parse an entity to a python object."""
        if entity is None:
            return Null() if return_null else None

        entity = str(entity)

        try:
            return json.loads(entity)
        except json.JSONDecodeError:
            pass

        if entity.isdigit():
            return int(entity)

        if (_bool := convert_bool(entity)) is not None:
            return _bool

        if "," in entity:
            # list
            # recursive call
            return [Environment.parse_entity(e) for e in entity.split(",")]

        return entity

    def __getitem__(self, name: str) -> ANY:
        return self.__getattr__(name)


ENV = Environment()

if isinstance(ENV.RMQ_MAX_N_EXP, int):
    limits["max_n_exp"] = ENV.RMQ_MAX_N_EXP
if isinstance(ENV.RMQ_LOOKUP_MAX_BLOCKS, int):
    limits["lookup_max_blocks"] = ENV.RMQ_LOOKUP_MAX_BLOCKS


def default_threads() -> int:
    """Worker count used when `--threads` is not given.

    `RMQ_THREADS` wins, then the physical core count, then 1.
    """
    from_env = ENV.RMQ_THREADS
    if isinstance(from_env, int) and not isinstance(from_env, bool) and from_env >= 1:
        return from_env
    if from_env:
        log.warning("ignoring RMQ_THREADS=%r, expected a positive integer", os.environ.get("RMQ_THREADS"))

    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


class RunConfig:  # pylint: disable=too-many-instance-attributes, too-many-public-methods
    """Everything one invocation needs, built from the parsed flags."""

    def __init__(
        self,
        **kwargs: Any,  # noqa: ANN401
    ) -> None:
        run = defaults["run"]
        # fmt: off
        self._command: str                 = kwargs.get("command")                                       # type: ignore  # noqa
        self._n: int | None                = kwargs.get("n")                                             # noqa
        self._q: int                       = run["q"] if kwargs.get("q") is None else kwargs["q"]           # noqa
        self._dist: str                    = kwargs.get("dist") or run["dist"]                           # noqa
        self._algo: str                    = kwargs.get("algo") or run["algo"]                           # noqa
        self._algos: list[str]             = kwargs.get("algos") or [self._algo]                         # noqa
        self._block_size: int | None       = kwargs.get("block_size")                                    # noqa
        self._nb: int | None               = kwargs.get("nb")                                            # noqa
        self._blockmin: str                = kwargs.get("blockmin") or run["blockmin"]                   # noqa
        self._threads: int                 = default_threads() if kwargs.get("threads") is None else kwargs["threads"]  # noqa
        self._seed: int                    = run["seed"] if kwargs.get("seed") is None else kwargs["seed"]  # noqa
        self._reps: int                    = run["reps"] if kwargs.get("reps") is None else kwargs["reps"]  # noqa
        self._realizations: int            = run["realizations"] if kwargs.get("realizations") is None else kwargs["realizations"]  # noqa
        self._input: pathlib.Path | None   = _as_path(kwargs.get("input"))                               # noqa
        self._output: pathlib.Path | None  = _as_path(kwargs.get("output"))                              # noqa
        self._fp64: bool                   = bool(kwargs.get("fp64"))                                    # noqa
        self._strict_layout: bool          = bool(kwargs.get("strict_layout"))                           # noqa
        # fmt: on

        self.__kw = kwargs

    def __repr__(self) -> str:
        return f"<RunConfig command={self.command} n={self.n} algo={self.algo} threads={self.threads}>"

    def __str__(self) -> str:
        return self.command

    @classmethod
    def from_namespace(cls, namespace: Any) -> RunConfig:  # noqa: ANN401
        """Build a config from an `argparse.Namespace`."""
        return cls(**vars(namespace))

    @property
    def command(self) -> str:
        """Command to run."""
        return self._command

    @property
    def n(self) -> int | None:
        """Array size."""
        return self._n

    @property
    def q(self) -> int:
        """Batch size."""
        return self._q

    @property
    def dist(self) -> str:
        """Query length distribution."""
        return self._dist

    @property
    def algo(self) -> str:
        """Solver for single runs."""
        return self._algo

    @property
    def algos(self) -> list[str]:
        """Solvers for sweeps."""
        return self._algos

    @property
    def block_size(self) -> int | None:
        """Block size hint, validated strictly."""
        if self._block_size is None and self._nb is not None and self._n:
            return -(-self._n // self._nb)
        return self._block_size

    @property
    def nb(self) -> int | None:
        """Number-of-blocks override."""
        return self._nb

    @property
    def blockmin(self) -> str:
        """How block minimums are answered."""
        return self._blockmin

    @property
    def threads(self) -> int:
        """Engine worker count."""
        return self._threads

    @property
    def seed(self) -> int:
        """PRNG seed."""
        return self._seed

    @property
    def reps(self) -> int:
        """Timed repeats per realization."""
        return self._reps

    @property
    def realizations(self) -> int:
        """Independent arrays per measurement."""
        return self._realizations

    @property
    def input_path(self) -> pathlib.Path | None:
        """Input file."""
        return self._input

    @property
    def output_path(self) -> pathlib.Path | None:
        """Output file, stdout when absent."""
        return self._output

    @property
    def fp64(self) -> bool:
        """64-bit geometry for debugging."""
        return self._fp64

    @property
    def strict_layout(self) -> bool:
        """Linear cell layout normalized by the block count, for inspection."""
        return self._strict_layout

    def validate(self) -> list[str]:  # pylint: disable=too-many-branches
        """Return every inconsistency, an empty list means the config is usable."""
        problems: list[str] = []

        if self.command not in COMMANDS:
            problems.append(f"unknown command {self.command!r}")

        for algo in self.algos:
            if algo not in ALGORITHMS:
                problems.append(f"unknown algorithm {algo!r}, expected one of {', '.join(ALGORITHMS)}")

        if self.dist not in DISTRIBUTIONS:
            problems.append(f"unknown distribution {self.dist!r}, expected one of {', '.join(DISTRIBUTIONS)}")

        if self.blockmin not in BLOCKMIN_STRATEGIES:
            problems.append(f"unknown block-minimum strategy {self.blockmin!r}")

        block_flags = self._block_size is not None or self._nb is not None or self.strict_layout
        if block_flags and "raycast" not in self.algos:
            problems.append("--block-size, --nb and --strict-layout only apply to the raycast algorithm")
        if block_flags and self.layout == "single":
            problems.append("--block-size, --nb and --strict-layout only apply to the block layout")

        if self._block_size is not None and self._nb is not None:
            problems.append("--block-size and --nb are mutually exclusive")

        for name in ("n", "q", "threads", "reps", "realizations", "_block_size", "_nb"):
            value = getattr(self, name)
            if value is not None and value < 1:
                problems.append(f"--{name.strip('_').replace('_', '-')} must be at least 1, got {value}")

        if self.seed < 0 or self.seed >= 2**64:
            problems.append("--seed must fit in an unsigned 64-bit integer")

        if self.command == "query" and self.input_path is None:
            problems.append("query needs --input")

        if self.command in {"bench", "scaling"} and self.n is None:
            problems.append(f"{self.command} needs --n")

        max_n = 1 << int(limits["max_n_exp"])
        if self.n is not None and self.n > max_n:
            problems.append(f"--n {self.n} is above the limit of 2^{limits['max_n_exp']} (RMQ_MAX_N_EXP)")

        if self.command == "heatmap":
            if not 1 <= self.nmin <= self.nmax <= int(limits["max_n_exp"]):
                problems.append(f"heatmap needs 1 <= --nmin <= --nmax <= {limits['max_n_exp']}, got {self.nmin} and {self.nmax}")
            if not self.ymin <= self.ymax <= 0:
                problems.append(f"heatmap needs --ymin <= --ymax <= 0, got {self.ymin} and {self.ymax}")

        if self.command == "scaling" and not 0 <= self.qmin <= self.qmax:
            problems.append(f"scaling needs 0 <= --qmin <= --qmax, got {self.qmin} and {self.qmax}")

        return problems

    def __getattr__(self, __name: str) -> Any:  # noqa: ANN401
        return self.__kw.get(__name, None)

    def __getitem__(self, __name: str) -> Any:  # noqa: ANN401
        return self.__kw.get(__name, None)

    def __iter__(self) -> Iterator[Any]:  # noqa: ANN201
        return iter(self.__kw.items())


def _as_path(value: str | pathlib.Path | None) -> pathlib.Path | None:
    if value is None or value == "":
        return None
    return pathlib.Path(value)
