import sys

import pytest

from mentionlink.cli import main
from mentionlink.model import dump_gold, dump_mentions, parse_labeling


@pytest.fixture
def files(tmp_path, fixture_corpus):
    c = fixture_corpus
    paths = {k: tmp_path / f"{k}.jsonl" for k in ("train", "gold", "test", "test_gold")}
    paths["train"].write_text(dump_mentions(c.train))
    paths["gold"].write_text(dump_gold(c.train_gold))
    paths["test"].write_text(dump_mentions(c.test))
    paths["test_gold"].write_text(dump_gold(c.test_gold))
    return paths


def link_args(files, out, *extra):
    return ["link", "--train", str(files["train"]), "--gold", str(files["gold"]),
            "--test", str(files["test"]), "--out", str(out), *extra]


def test_link_then_score(files, tmp_path, capsys):
    pred = tmp_path / "pred.jsonl"
    dumps = {k: tmp_path / k for k in ("abbrev", "ctx", "trace", "blocks", "kb")}
    rc = main(link_args(files, pred, "--mode", "subtask3",
                        "--dump-abbrev", str(dumps["abbrev"]), "--dump-contexts", str(dumps["ctx"]),
                        "--trace-assign", str(dumps["trace"]), "--dump-blocks", str(dumps["blocks"]),
                        "--save-kb", str(dumps["kb"])))
    assert rc == 0
    assert len(parse_labeling(pred.read_text()).labels) == 120
    assert all(p.exists() for p in dumps.values())
    assert dumps["kb"].read_text().startswith("KB 384 40\n")
    assert main(["score", "--gold", str(files["test_gold"]), "--pred", str(pred)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["MUC\t1.0000\t1.0000\t1.0000", "BCUB\t1.0000\t1.0000\t1.0000",
                   "CEAFE\t1.0000\t1.0000\t1.0000", "CONLL\t1.0000"]


def test_config_file_and_override(files, tmp_path):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("mode = subtask3\nblock_limit = 5\n")
    pred = tmp_path / "pred.jsonl"
    assert main(link_args(files, pred, "--config", str(cfg), "--epsilon", "0.2")) == 0


def test_validation_exit_code(files, tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "m1"}\n')
    files["test"] = bad
    assert main(link_args(files, tmp_path / "p")) == 2
    assert "line 1" in capsys.readouterr().err
    assert main(["score", "--gold", str(tmp_path / "missing"), "--pred", str(bad)]) == 2
    cfg = tmp_path / "cfg.txt"
    cfg.write_text("epsilon = -1\n")
    assert main(link_args(files, tmp_path / "p", "--config", str(cfg))) == 2


def test_stage_failure_exit_code(files, tmp_path, capsys):
    child = tmp_path / "child.py"
    child.write_text("import sys\nsys.stdin.readline()\nprint('DIM 7', flush=True)\n")
    enc = f"external:{sys.executable} {child}"
    assert main(link_args(files, tmp_path / "p", "--encoder", enc)) == 3
    assert "stage" in capsys.readouterr().err


def test_bench_synthetic(tmp_path, capsys):
    out = tmp_path / "bench"
    rc = main(["bench", "--synthetic", "120", "--fractions", "0.5,1.0", "--seeds", "42,7",
               "--out", str(out)])
    assert rc == 0
    table = (out / "stage_times.tsv").read_text().splitlines()
    assert len(table) == 3 and table[1].startswith("50%\t60\t")
    assert capsys.readouterr().out.splitlines() == table


def test_bench_needs_inputs(tmp_path):
    assert main(["bench", "--out", str(tmp_path)]) == 2
