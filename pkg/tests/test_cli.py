import json

import pytest

from app.main import build_parser, main
from app.services import asymptotics


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def json_lines(text):
    return [json.loads(line) for line in text.splitlines()]


class TestCount:
    def test_natural(self, capsys):
        code, out, _ = run(capsys, "count", "--preset", "natural", "--m", "0", "--n", "4", "--format", "text")
        assert code == 0
        assert out == "3\n"

    def test_binary(self, capsys):
        code, out, _ = run(capsys, "count", "--preset", "binary", "--m", "0", "--n", "4", "--format", "text")
        assert code == 0
        assert out == "1\n"

    def test_json_records(self, capsys):
        code, out, _ = run(capsys, "count", "--spec", "1,1,1,1", "--n-min", "0", "--n-max", "5")
        assert code == 0
        meta, *records = json_lines(out)
        assert meta["meta"]["command"] == "count"
        assert meta["meta"]["spec"] == "1,1,1,1"
        assert [record["count"] for record in records] == ["0", "0", "1", "1", "3", "6"]
        assert records[0]["family"] == "m-open"

    def test_families(self, capsys):
        code, out, _ = run(capsys, "count", "--n", "5", "--normal-form", "--no-meta")
        assert code == 0
        assert json_lines(out)[0]["count"] == "4"
        _, out, _ = run(capsys, "count", "--n", "2", "--unrestricted", "--no-meta")
        assert json_lines(out)[0]["count"] == "2"
        _, out, _ = run(capsys, "count", "--m", "1", "--n", "3", "--max-succ", "1", "--no-meta")
        assert json_lines(out)[0] == {"family": "bounded-h", "m": 1, "n": 3, "count": "2", "params": {"h": 1}}

    def test_csv(self, capsys):
        code, out, _ = run(capsys, "count", "--n-min", "1", "--n-max", "3", "--format", "csv")
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "family,m,n,count,params"
        assert len(lines) == 4

    def test_gcd_violation(self, capsys):
        code, _, err = run(capsys, "count", "--spec", "0,2,2,2", "--n", "4")
        assert code == 2
        assert "GcdViolation" in err

    def test_size_cap(self, capsys):
        code, _, err = run(capsys, "count", "--max-n", "10", "--n", "20")
        assert code == 3
        assert "ResourceLimit" in err

    def test_config_file(self, capsys, tmp_path):
        config = tmp_path / "lambdacount.conf"
        config.write_text("max_n = 10\n", encoding="utf-8")
        code, _, _ = run(capsys, "count", "--config", str(config), "--n", "20")
        assert code == 3

    def test_cache_directory(self, capsys, tmp_path):
        code, _, _ = run(capsys, "count", "--cache-dir", str(tmp_path), "--preset", "binary", "--n", "12")
        assert code == 0
        assert (tmp_path / "m-open_2-1-2-2_-.txt").exists()


class TestTerms:
    def test_encode(self, capsys):
        code, out, _ = run(capsys, "encode", "\\1", "--format", "text")
        assert code == 0
        assert out == "0010\n"

    def test_encode_packed(self, capsys, tmp_path):
        path = tmp_path / "term.blc"
        code, _, _ = run(capsys, "encode", "\\\\2 1", "--packed", str(path))
        assert code == 0
        code, out, _ = run(capsys, "decode", "--packed", str(path), "--format", "text")
        assert out == "λλ2 1\n"

    def test_decode(self, capsys):
        code, out, _ = run(capsys, "decode", "0010", "--preset", "binary", "--no-meta")
        assert code == 0
        assert json_lines(out) == [{"term": "λ1", "successors": "λ0", "length": 4, "size": 4}]

    def test_decode_error(self, capsys):
        code, _, err = run(capsys, "decode", "00100")
        assert code == 2
        assert "TrailingBits" in err

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "stats", "\\(1")
        assert code == 2
        assert "TermSyntaxError" in err

    def test_enumerate(self, capsys):
        code, out, _ = run(capsys, "enumerate", "--preset", "natural", "--m", "0", "--n", "5", "--no-meta")
        assert code == 0
        assert len(out.splitlines()) == 6

    def test_enumerate_beta_normal(self, capsys):
        code, out, _ = run(
            capsys, "enumerate", "--n", "5", "--filter", "beta-normal", "--render", "blc", "--format", "text"
        )
        assert code == 0
        assert sorted(out.split()) == sorted(["0000000010", "000000110", "0000011010", "0001100010"])

    def test_stats(self, capsys):
        code, out, _ = run(capsys, "stats", "\\\\((S0) 0)", "--no-meta")
        assert code == 0
        record = json_lines(out)[0]
        assert record["size"] == 6
        assert record["openness"] == 0
        assert record["normal_form"] is True
        assert record["depth"] == 4

    def test_stats_dot(self, capsys):
        code, out, _ = run(capsys, "stats", "\\1", "--dot", "--format", "text")
        assert code == 0
        assert out.startswith("digraph term {")


class TestAsympt:
    def test_binary_summary(self, capsys):
        code, out, _ = run(capsys, "asympt", "--preset", "binary")
        assert code == 0
        meta, record = json_lines(out)
        assert meta["meta"]["command"] == "asympt"
        assert abs(record["rho"] - 0.509308) < 1e-5
        assert abs(record["ratio"] - 0.967864) < 1e-5

    def test_rho_h_series(self, capsys):
        code, out, _ = run(capsys, "asympt", "--series", "rho-h", "--h-max", "5", "--no-meta")
        assert code == 0
        records = json_lines(out)
        assert [record["h"] for record in records] == [1, 2, 3, 4, 5]
        assert abs(records[0]["rho_h"] - 1 / 3) < 1e-10

    def test_branch_probabilities(self, capsys):
        code, out, _ = run(capsys, "asympt", "--series", "branch-probabilities", "--N", "20", "--format", "csv")
        assert code == 0
        assert len(out.splitlines()) == 22

    def test_q_constants(self, capsys):
        code, out, _ = run(capsys, "asympt", "--m", "1", "--q", "0", "--n", "401", "--no-meta")
        assert code == 0
        record = json_lines(out)[0]
        assert abs(record["q_constant"] - 2 ** 0.5) < 1e-9
        assert record["q_period"] == 2

    def test_arithmetic_failure_exit_code(self, capsys, monkeypatch):
        def broken(*_):
            raise ZeroDivisionError("float division by zero")

        monkeypatch.setattr(asymptotics, "q_abstraction_constants", broken)
        code, out, err = run(capsys, "asympt", "--q", "1", "--no-meta")
        assert code == 1
        assert out == ""
        assert "NumericFailure: ZeroDivisionError" in err


class TestSample:
    def test_unique_term(self, capsys):
        code, out, _ = run(
            capsys, "sample", "--size", "2", "--epsilon", "0", "--seed", "1", "--count", "3",
            "--render", "blc", "--format", "text",
        )
        assert code == 0
        assert out.splitlines() == ["0010"] * 3

    def test_records(self, capsys):
        code, out, _ = run(capsys, "sample", "--min", "10", "--max", "20", "--seed", "4", "--count", "2")
        assert code == 0
        meta, *records = json_lines(out)
        assert meta["meta"]["options"]["seed"] == 4
        assert len(records) == 2
        assert all(10 <= record["size"] <= 20 for record in records)
        assert set(records[0]) == {"size", "attempts", "seed", "rejections", "term"}

    def test_reproducible(self, capsys):
        argv = ("sample", "--size", "40", "--seed", "8", "--count", "3", "--format", "text")
        _, first, _ = run(capsys, *argv)
        _, second, _ = run(capsys, *argv)
        assert first == second

    def test_missing_window(self, capsys):
        code, _, err = run(capsys, "sample", "--seed", "1")
        assert code == 2
        assert "DomainError" in err

    def test_attempt_cap(self, capsys):
        code, _, err = run(capsys, "sample", "--min", "1", "--max", "1", "--max-attempts", "3", "--seed", "1")
        assert code == 3
        assert "AttemptsExhausted" in err


def test_xlsx_needs_output(capsys):
    code, _, _ = run(capsys, "count", "--n", "4", "--format", "xlsx")
    assert code == 2


def test_xlsx_output(capsys, tmp_path):
    path = tmp_path / "counts.xlsx"
    code, _, _ = run(capsys, "count", "--n-min", "0", "--n-max", "6", "--format", "xlsx", "--output", str(path))
    assert code == 0
    assert path.exists()


def test_common_options_follow_the_subcommand():
    args = build_parser().parse_args(["count", "--preset", "binary", "--m", "2", "--n", "7"])
    assert (args.command, args.preset, args.m, args.n) == ("count", "binary", 2, 7)


def test_unknown_preset(capsys):
    code, _, err = run(capsys, "count", "--preset", "foo", "--n", "4")
    assert code == 2
    assert "UnknownPreset" in err


@pytest.mark.slow
def test_selfcheck(capsys):
    code, out, _ = run(capsys, "selfcheck", "--max-n", "8", "--format", "text")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines())


@pytest.mark.slow
def test_selfcheck_detects_a_fault(capsys):
    code, out, err = run(capsys, "selfcheck", "--max-n", "6", "--inject-fault", "--format", "text")
    assert code == 4
    assert "FAIL oracle[natural]" in out
    assert "SelfCheckFailure" in err
