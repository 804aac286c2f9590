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

import pytest

from utils import RunConfig, convert_bool, default_threads, parse_count, parse_exponents, parse_names


class TestConverters:
    @pytest.mark.parametrize(("text", "expected"), [("1048576", 1 << 20), ("2^20", 1 << 20), ("2**10", 1024), ("1<<4", 16)])
    def test_counts(self, text, expected):
        assert parse_count(text) == expected

    @pytest.mark.parametrize("text", ["-3", "ten", "2^", "1e6"])
    def test_bad_counts(self, text):
        with pytest.raises(argparse.ArgumentTypeError):
            parse_count(text)

    def test_exponents(self):
        assert parse_exponents("10..13") == [10, 11, 12, 13]
        assert parse_exponents("-1..-3") == [-1, -2, -3]
        assert parse_exponents("-1,-5") == [-1, -5]

    def test_names(self):
        assert parse_names("Raycast, sparse,raycast") == ["raycast", "sparse"]

    def test_bools(self):
        assert convert_bool("on") is True
        assert convert_bool("off") is False
        assert convert_bool("maybe") is None


class TestDefaultThreads:
    def test_environment_wins(self, monkeypatch):
        monkeypatch.setenv("RMQ_THREADS", "3")
        assert default_threads() == 3

    def test_bad_value_falls_back(self, monkeypatch):
        monkeypatch.setenv("RMQ_THREADS", "lots")
        assert default_threads() >= 1


class TestRunConfig:
    def test_defaults(self):
        config = RunConfig(command="bench", n=1024)
        assert (config.q, config.dist, config.algo, config.seed) == (65536, "large", "raycast", 7)
        assert config.algos == ["raycast"]
        assert config.validate() == []

    def test_number_of_blocks_sets_block_size(self):
        assert RunConfig(command="bench", n=1000, nb=3).block_size == 334

    def test_seed_zero_is_kept(self):
        assert RunConfig(command="verify", seed=0).seed == 0

    @pytest.mark.parametrize(
        ("kwargs", "fragment"),
        [
            ({"command": "bench"}, "needs --n"),
            ({"command": "bench", "n": 16, "algo": "sparse", "nb": 2}, "raycast"),
            ({"command": "bench", "n": 16, "block_size": 4, "nb": 2}, "mutually exclusive"),
            ({"command": "bench", "n": 16, "dist": "tiny"}, "distribution"),
            ({"command": "bench", "n": 1 << 40}, "RMQ_MAX_N_EXP"),
            ({"command": "query"}, "--input"),
            ({"command": "scaling", "n": 16, "qmin": 5, "qmax": 2}, "--qmin"),
            ({"command": "heatmap", "nmin": 3, "nmax": 40, "ymin": -2, "ymax": -1}, "--nmax"),
            ({"command": "teleport"}, "unknown command"),
            ({"command": "bench", "n": 16, "q": 0}, "--q must be at least 1"),
            ({"command": "bench", "n": 16, "reps": 0}, "--reps must be at least 1"),
            ({"command": "bench", "n": 16, "threads": 0}, "--threads must be at least 1"),
            ({"command": "bench", "n": 16, "realizations": 0}, "--realizations must be at least 1"),
            ({"command": "query", "input": "a.txt", "layout": "single", "block_size": 4}, "block layout"),
            ({"command": "query", "input": "a.txt", "layout": "single", "nb": 2}, "block layout"),
            ({"command": "query", "input": "a.txt", "layout": "single", "strict_layout": True}, "block layout"),
        ],
    )
    def test_problems(self, kwargs, fragment):
        problems = RunConfig(**kwargs).validate()
        assert any(fragment in problem for problem in problems), problems

    def test_unknown_keys_read_as_none(self):
        config = RunConfig(command="query", input="x.txt", layout="single")
        assert config.layout == "single"
        assert config.stats is None
