import pytest

from mentionlink.bench import (
    DEFAULT_FRACTIONS,
    DEFAULT_SEEDS,
    LONG_HEADER,
    TABLE_HEADER,
    BenchmarkReport,
    BenchRow,
    benchmark,
    emit_report,
    format_long,
    format_table,
    sample_indices,
)
from mentionlink.model import PipelineConfig
from mentionlink.pipeline import StageTimings
from mentionlink.synthetic import scaled_corpus


def test_default_protocol():
    assert DEFAULT_FRACTIONS == (0.10, 0.25, 0.50, 0.75, 1.00)
    assert DEFAULT_SEEDS == (42, 123, 7, 13, 111, 23)


def test_sampling_is_seeded_and_sized():
    assert sample_indices(1000, 0.25, 42) == sample_indices(1000, 0.25, 42)
    assert sample_indices(1000, 0.25, 42) != sample_indices(1000, 0.25, 7)
    for size in (7, 101, 21995):
        for f in DEFAULT_FRACTIONS:
            idx = sample_indices(size, f, 13)
            assert abs(len(idx) - f * size) <= 1
            assert len(set(idx)) == len(idx) and idx == sorted(idx)


def timings(x):
    return StageTimings(x, x, x, x, x, 5 * x)


def test_single_row_table():
    rep = BenchmarkReport(10, [BenchRow(1.0, None, 0, 10, timings(1.0))])
    lines = format_table(rep).splitlines()
    assert lines[0].split("\t") == list(TABLE_HEADER)
    assert lines[1] == "100%\t10\t1.00\t1.00\t1.00\t1.00\t1.00\t5.00"


def test_mean_and_sample_std():
    rows = [BenchRow(0.5, s, 0, 5, timings(x)) for s, x in [(1, 1.0), (2, 2.0), (3, 3.0)]]
    line = format_table(BenchmarkReport(10, rows)).splitlines()[1]
    assert line.split("\t")[:3] == ["50%", "5", "2.00 ± 1.00"]


def test_long_format():
    rep = BenchmarkReport(10, [BenchRow(0.1, 42, 0, 1, timings(0.5))])
    lines = format_long(rep).splitlines()
    assert lines[0].split("\t") == list(LONG_HEADER)
    assert lines[1] == "0.1\t42\t1\tembed\t0.500000"
    assert len(lines) == 1 + 6


@pytest.fixture(scope="module")
def small_report(encoder_module):
    c = scaled_corpus(200, n_identities=60, seed=1)
    return benchmark(PipelineConfig(mode="subtask3"), c.train, c.train_gold, c.test, encoder_module)


@pytest.fixture(scope="module")
def encoder_module():
    from mentionlink.embedding import ReferenceEncoder

    return ReferenceEncoder(384)


def test_full_protocol_layout(small_report):
    rep = small_report
    assert len(rep.rows) == 4 * 6 + 2
    table = format_table(rep).splitlines()
    assert [l.split("\t")[0] for l in table[1:]] == ["10%", "25%", "50%", "75%", "100%"]
    assert [int(l.split("\t")[1]) for l in table[1:]] == [20, 50, 100, 150, 200]
    assert all("±" in c for c in table[1].split("\t")[2:])
    assert "±" not in table[-1]


def test_emit_report(small_report, tmp_path):
    paths = emit_report(small_report, tmp_path / "out")
    assert sorted(paths) == ["long", "table"]
    assert paths["table"].read_text() == format_table(small_report)


def test_emit_report_figure(small_report, tmp_path):
    pytest.importorskip("matplotlib")
    paths = emit_report(small_report, tmp_path / "fig", figure=True)
    assert paths["figure"].read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_emit_report_rejects_empty(tmp_path):
    with pytest.raises(ValueError):
        emit_report(BenchmarkReport(0), tmp_path)


def test_bad_fraction(encoder_module):
    with pytest.raises(ValueError):
        benchmark(PipelineConfig(), [], None, [], encoder_module, fractions=[1.5])
