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

import pytest

from core import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, App


@pytest.fixture
def int_input(tmp_path):
    path = tmp_path / "array.txt"
    path.write_text("int\n5\n3\n1\n9\n6\n2\n# queries\n3 5\n0 5\n1 4\n", encoding="utf-8")
    return path


@pytest.fixture
def real_input(tmp_path):
    path = tmp_path / "reals.txt"
    path.write_text("0.5\n-1.25\n3\n-1.25\n\n0 2\n2 3\n2 2\n", encoding="utf-8")
    return path


class TestApp:
    def test_commands_are_loaded(self):
        assert set(App().commands) == {"verify", "query", "bench", "heatmap", "scaling"}

    def test_missing_extension_is_skipped(self):
        app = App(commands_to_load=["commands.query", "commands.nothing_here"])
        assert set(app.commands) == {"query"}

    def test_malformed_flag_exits_with_usage(self):
        with pytest.raises(SystemExit) as info:
            App().run(["bench", "--algo", "quantum"])
        assert info.value.code == EXIT_USAGE


class TestQuery:
    def test_integer_input(self, run_cli, int_input):
        code, out, _ = run_cli("query", "--input", int_input, "--threads", "2")
        assert code == EXIT_OK
        assert out.splitlines() == ["5 2", "2 1", "2 1"]

    @pytest.mark.parametrize("algo", ["raycast", "sparse", "exhaustive"])
    @pytest.mark.parametrize("layout", ["single", "block"])
    def test_every_solver_agrees(self, run_cli, int_input, algo, layout):
        code, out, _ = run_cli("query", "-i", int_input, "--algo", algo, "--layout", layout, "--by", "index")
        assert code == EXIT_OK
        assert out.split() == ["5", "2", "2"]

    def test_real_input_prints_original_values(self, run_cli, real_input):
        code, out, _ = run_cli("query", "--input", real_input, "--by", "value")
        assert code == EXIT_OK
        assert out.splitlines() == ["-1.25", "-1.25", "3"]

    def test_number_of_blocks(self, run_cli, int_input):
        code, out, _ = run_cli("query", "--input", int_input, "--nb", "3", "--blockmin", "lookup_table", "--by", "index")
        assert code == EXIT_OK
        assert out.split() == ["5", "2", "2"]

    def test_separate_query_file(self, run_cli, tmp_path):
        array = tmp_path / "a.txt"
        array.write_text("9\n2\n7\n8\n4\n1\n3\n", encoding="utf-8")
        queries = tmp_path / "q.txt"
        queries.write_text("2 6\n0 1\n", encoding="utf-8")
        code, out, _ = run_cli("query", "--input", array, "--queries", queries, "--by", "index")
        assert code == EXIT_OK
        assert out.split() == ["5", "1"]

    def test_output_file_and_stats(self, run_cli, int_input, tmp_path):
        target = tmp_path / "out" / "answers.txt"
        dump = tmp_path / "scene.txt"
        code, out, err = run_cli("query", "-i", int_input, "-o", target, "--stats", "--dump-scene", dump, "--block-size", "2")
        assert code == EXIT_OK
        assert out == ""
        assert target.read_text(encoding="utf-8").splitlines()[0] == "5 2"
        assert "layout block_matrix bs=2 blocks=3" in err
        assert len(dump.read_text(encoding="utf-8").splitlines()) == 6 + 3

    def test_failing_block_size_prints_gate(self, run_cli, int_input):
        code, _, err = run_cli("query", "--input", int_input, "--block-size", "2^20")
        assert code == EXIT_USAGE
        assert "1/bs" in err

    @pytest.mark.parametrize("flags", [("--block-size", "2"), ("--nb", "3"), ("--strict-layout",)])
    def test_block_flags_need_block_layout(self, run_cli, int_input, flags):
        code, _, err = run_cli("query", "--input", int_input, "--layout", "single", *flags)
        assert code == EXIT_USAGE
        assert "block layout" in err

    def test_bad_line_is_reported(self, run_cli, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("1\n2\nthree\n", encoding="utf-8")
        code, _, err = run_cli("query", "--input", path)
        assert code == EXIT_USAGE
        assert "line 3" in err

    def test_query_out_of_range(self, run_cli, tmp_path):
        path = tmp_path / "range.txt"
        path.write_text("1\n2\n0 2\n", encoding="utf-8")
        code, _, err = run_cli("query", "--input", path)
        assert code == EXIT_USAGE
        assert "line 3" in err

    def test_normalize_rejects_integers(self, run_cli, int_input):
        code, _, _ = run_cli("query", "--input", int_input, "--normalize")
        assert code == EXIT_USAGE

    def test_missing_input_flag(self, run_cli):
        code, _, err = run_cli("query")
        assert code == EXIT_USAGE
        assert "--input" in err


class TestBench:
    def test_one_row(self, run_cli):
        code, out, _ = run_cli("bench", "--algo", "sparse", "--n", "2^8", "--q", "64", "--reps", "1", "--realizations", "2")
        assert code == EXIT_OK
        header, row = out.splitlines()
        assert header.startswith("n,q,dist,algo,block_size")
        assert row.startswith("256,64,large,sparse,,")
        assert row.endswith(",ok")

    def test_block_flags_need_raycast(self, run_cli):
        code, _, err = run_cli("bench", "--algo", "sparse", "--n", "64", "--block-size", "4")
        assert code == EXIT_USAGE
        assert "raycast" in err

    @pytest.mark.parametrize("flag", ["--q", "--reps", "--threads", "--realizations"])
    def test_zero_counts_are_rejected(self, run_cli, flag):
        code, out, err = run_cli("bench", "--algo", "sparse", "--n", "256", "--q", "4", flag, "0")
        assert code == EXIT_USAGE
        assert out == ""
        assert f"{flag} must be at least 1" in err

    def test_needs_n(self, run_cli):
        code, _, _ = run_cli("bench", "--algo", "sparse")
        assert code == EXIT_USAGE

    def test_heatmap(self, run_cli, tmp_path):
        target = tmp_path / "heatmap.csv"
        code, _, _ = run_cli(
            "heatmap", "--algos", "sparse,raycast", "--nmin", "6", "--nmax", "6", "--ymin", "-2", "--ymax", "-1",
            "--bs-exps", "2,3", "--q", "32", "--reps", "1", "--realizations", "1", "-o", target,
        )  # fmt: skip
        assert code == EXIT_OK
        rows = target.read_text(encoding="utf-8").splitlines()
        assert len(rows) == 1 + 2 * 4

    def test_heatmap_range_checks(self, run_cli):
        code, _, err = run_cli("heatmap", "--ymin", "-1", "--ymax", "2")
        assert code == EXIT_USAGE
        assert "--ymax" in err

    def test_scaling(self, run_cli):
        code, out, _ = run_cli(
            "scaling", "--algo", "raycast", "--n", "512", "--qmin", "3", "--qmax", "5", "--reps", "1", "--realizations", "1",
        )  # fmt: skip
        assert code == EXIT_OK
        assert len(out.splitlines()) == 1 + 3


class TestVerify:
    def test_examples_pass(self, run_cli):
        code, out, _ = run_cli("verify", "--suites", "examples,transform")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0].split() == ["suite", "checks", "failures"]
        assert [line.split()[0] for line in lines[1:]] == ["examples", "transform"]
        assert all(line.split()[2] == "0" for line in lines[1:])

    def test_injected_fault_fails(self, run_cli):
        code, out, err = run_cli("verify", "--suites", "examples", "--inject-fault")
        assert code == EXIT_FAILURE
        assert out.splitlines()[1].split()[2] != "0"
        assert "examples" in err

    def test_unknown_suite(self, run_cli):
        code, _, err = run_cli("verify", "--suites", "nope")
        assert code == EXIT_USAGE
        assert "nope" in err
