"""Command line contract: flags, outputs, exit statuses."""

import csv
import json

import pytest

from noisysearch.cli import main


def run_cli(*args):
    return main(list(args))


class TestCli:
    def test_graph_run_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "res.csv"
        code = run_cli(
            "graph-adversarial", "--n", "15", "--p", "0.3", "--delta", "0.2",
            "--trials", "120", "--seed", "3", "--gen", "path",
            "--out", str(out), "--format", "csv",
        )
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 1
        assert rows[0]["scenario"] == "graph-adversarial"
        assert rows[0]["bound_satisfied"] == "true"
        assert "mean_queries" in capsys.readouterr().out

    def test_json_format_and_transcripts(self, tmp_path):
        out = tmp_path / "res.json"
        code = run_cli(
            "bin-lv-adv", "--n", "16", "--p", "0.25", "--delta", "0.2",
            "--trials", "40", "--seed", "5",
            "--out", str(out), "--format", "json", "--keep-transcripts",
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["results"][0]["n"] == 16
        assert "transcript_sample" in doc

    def test_sweep_emits_row_per_target(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = run_cli(
            "bin-lv-adv", "--n", "6", "--p", "0.25", "--delta", "0.2",
            "--trials", "25", "--seed", "5", "--sweep",
            "--out", str(out),
        )
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 6

    def test_invalid_input_exits_2(self, tmp_path, capsys):
        code = run_cli(
            "graph-adversarial", "--n", "8", "--p", "0.7", "--delta", "0.2",
            "--trials", "5", "--seed", "1", "--gen", "path",
            "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_missing_graph_source_exits_2(self, tmp_path):
        code = run_cli(
            "graph-adversarial", "--n", "8", "--p", "0.3", "--delta", "0.2",
            "--trials", "5", "--seed", "1",
            "--out", str(tmp_path / "x.csv"),
        )
        assert code == 2

    def test_graph_file_flag(self, tmp_path):
        gpath = tmp_path / "g.txt"
        gpath.write_text("3 2\n0 1\n1 2\n")
        out = tmp_path / "res.csv"
        code = run_cli(
            "graph-adversarial", "--n", "3", "--p", "0.25", "--delta", "0.2",
            "--trials", "30", "--seed", "2", "--graph", str(gpath),
            "--out", str(out),
        )
        assert code == 0

    def test_mu_file_flag(self, tmp_path):
        mpath = tmp_path / "mu.txt"
        mpath.write_text("".join(f"{i} {2**-(i+1)}\n" for i in range(8)))
        out = tmp_path / "res.csv"
        code = run_cli(
            "bin-lv-distr", "--n", "8", "--p", "0.25", "--delta", "0.2",
            "--trials", "30", "--seed", "2", "--mu", str(mpath),
            "--out", str(out),
        )
        assert code == 0

    def test_verify_invariants_scenario(self, tmp_path):
        out = tmp_path / "inv.csv"
        code = run_cli(
            "verify-invariants", "--n", "16", "--p", "0.25", "--delta", "0.2",
            "--trials", "20", "--seed", "9",
            "--out", str(out),
        )
        assert code == 0
        with open(out) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0]["bound_satisfied"] == "true"

    def test_unknown_scenario_rejected_by_argparse(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli(
                "warp-search", "--n", "4", "--p", "0.2", "--delta", "0.2",
                "--trials", "5", "--seed", "1", "--out", str(tmp_path / "x.csv"),
            )
        assert exc.value.code == 2
