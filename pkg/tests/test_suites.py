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

import numpy as np
import pytest

from commands.cmd_utils import DEFAULT_SUITES, SUITE_REGISTRY, SuiteResult, SuiteSettings, run_suites


def run_one(name: str, **kwargs) -> SuiteResult:
    (result,) = run_suites([name], SuiteSettings.create(**kwargs))
    return result


class TestSuiteResult:
    def test_counts(self):
        result = SuiteResult("demo")
        result.check(True, "unused")
        result.check(False, lambda: "lazy note")
        assert (result.checks, result.failures, result.notes) == (2, 1, ["lazy note"])
        assert not result.passed

    def test_compare_counts_elements(self):
        result = SuiteResult("demo")
        assert not result.compare(np.array([1, 2, 3]), np.array([1, 0, 0]), "column")
        assert (result.checks, result.failures) == (3, 2)
        assert "first at 1" in result.notes[0]


class TestRegistry:
    def test_precision_is_opt_in(self):
        assert "precision" in SUITE_REGISTRY
        assert "precision" not in DEFAULT_SUITES
        assert set(DEFAULT_SUITES) == {
            "examples", "oracle", "transform", "coverage", "bvh", "engine", "decomposition", "distributions", "determinism",
        }  # fmt: skip

    def test_exception_is_a_failure(self, monkeypatch):
        def explode(settings, result):
            raise RuntimeError("boom")

        monkeypatch.setitem(SUITE_REGISTRY, "explode", explode)
        result = run_one("explode")
        assert result.failures == 1
        assert "boom" in result.notes[0]


@pytest.mark.parametrize("name", DEFAULT_SUITES)
def test_suite_passes(name):
    result = run_one(name, threads=2)
    assert result.checks > 0
    assert result.passed, result.notes


@pytest.mark.parametrize("name", ["examples", "engine", "decomposition"])
def test_shifted_right_block_is_detected(name):
    assert not run_one(name, inject_fault=True).passed


@pytest.mark.slow
def test_precision_suite():
    result = run_one("precision", fp64=True)
    assert result.passed, result.notes


@pytest.mark.slow
@pytest.mark.parametrize("name", [*DEFAULT_SUITES, "precision"])
def test_full_sizes(name):
    result = run_one(name, full=True, threads=4)
    assert result.passed, result.notes
