"""Fraction-sampled scalability runs and their reports."""

from __future__ import annotations

import logging
import random
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .embedding import EncoderBackend
from .errors import ValidationError
from .model import GoldClustering, Mention, PipelineConfig
from .pipeline import REPORT_COLUMNS, StageTimings, run_pipeline

logger = logging.getLogger(__name__)

DEFAULT_FRACTIONS = (0.10, 0.25, 0.50, 0.75, 1.00)
DEFAULT_SEEDS = (42, 123, 7, 13, 111, 23)
TABLE_HEADER = ("Fraction", "n", "Embed", "KB Match", "Canon.", "HDBSCAN", "Merge", "Total")
LONG_HEADER = ("fraction", "seed", "n", "stage", "seconds")


@dataclass
class BenchRow:
    fraction: float
    seed: int | None  # None for unsampled full-corpus repetitions
    repeat: int
    n: int
    timings: StageTimings


@dataclass
class BenchmarkReport:
    corpus_size: int
    rows: list[BenchRow] = field(default_factory=list)

    def fractions(self) -> list[float]:
        return sorted({r.fraction for r in self.rows})

    def aggregate(self) -> list[dict]:
        """Per fraction: n and (mean, std) of every timed column.

        std is the sample standard deviation; 0 with a single run.
        """
        out = []
        for frac in self.fractions():
            rows = [r for r in self.rows if r.fraction == frac]
            agg = {"fraction": frac, "n": rows[0].n, "runs": len(rows)}
            for col in REPORT_COLUMNS:
                vals = [getattr(r.timings, col) for r in rows]
                sd = statistics.stdev(vals) if len(vals) > 1 else 0.0
                agg[col] = (statistics.fmean(vals), sd)
            out.append(agg)
        return out


def sample_indices(size: int, fraction: float, seed: int) -> list[int]:
    """Seeded uniform sample without replacement, returned in corpus order."""
    k = round(fraction * size)
    return sorted(random.Random(seed).sample(range(size), k))


def benchmark(
    cfg: PipelineConfig,
    train: Sequence[Mention],
    train_gold: GoldClustering,
    test: Sequence[Mention],
    backend: EncoderBackend,
    fractions: Sequence[float] = DEFAULT_FRACTIONS,
    seeds: Sequence[int] = DEFAULT_SEEDS,
    full_repeats: int = 2,
) -> BenchmarkReport:
    for f in fractions:
        if not 0 < f <= 1:
            raise ValueError(f"fraction {f} outside (0, 1]")
    report = BenchmarkReport(len(test))
    for frac in fractions:
        if frac == 1.0:
            plan = [(None, rep) for rep in range(full_repeats)]
        else:
            plan = [(seed, 0) for seed in seeds]
        for seed, rep in plan:
            subset = list(test) if seed is None else [test[i] for i in sample_indices(len(test), frac, seed)]
            result = run_pipeline(cfg, train, train_gold, subset, backend)
            report.rows.append(BenchRow(frac, seed, rep, len(subset), result.timings))
            logger.info(
                "fraction %.2f seed %s: n=%d total %.2fs", frac, seed, len(subset),
                result.timings.total_s,
            )
    return report


def _pct(fraction: float) -> str:
    return f"{fraction * 100:g}%"


def format_table(report: BenchmarkReport) -> str:
    lines = ["\t".join(TABLE_HEADER)]
    for agg in report.aggregate():
        cells = [_pct(agg["fraction"]), str(agg["n"])]
        for col in REPORT_COLUMNS:
            mean, sd = agg[col]
            # the full-corpus row reports a plain mean of repetitions
            cells.append(f"{mean:.2f}" if agg["fraction"] == 1.0 else f"{mean:.2f} ± {sd:.2f}")
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def format_long(report: BenchmarkReport) -> str:
    lines = ["\t".join(LONG_HEADER)]
    for r in report.rows:
        seed = "full" if r.seed is None else str(r.seed)
        for col in REPORT_COLUMNS:
            lines.append(f"{r.fraction:g}\t{seed}\t{r.n}\t{col[:-2]}\t{getattr(r.timings, col):.6f}")
    return "\n".join(lines) + "\n"


def plot_runtime(report: BenchmarkReport, path: Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    agg = report.aggregate()
    ns = [a["n"] for a in agg]
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    labels = dict(zip(REPORT_COLUMNS, TABLE_HEADER[2:]))
    for col in REPORT_COLUMNS[:-1]:
        ax.errorbar(ns, [a[col][0] for a in agg], yerr=[a[col][1] for a in agg],
                    marker="o", ms=3, lw=1.2, capsize=2, label=labels[col])
    ax.plot(ns, [a["total_s"][0] for a in agg], color="black", lw=2.5, marker="o", label="Total")
    ax.set_xlabel("mentions (n)")
    ax.set_ylabel("wall-clock time (s)")
    ax.grid(alpha=0.3)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def emit_report(report: BenchmarkReport, out_dir, figure: bool = False) -> dict[str, Path]:
    """Write the stage table, the long-format timings and optionally a figure."""
    if not report.rows:
        raise ValueError("empty benchmark report")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {"table": out / "stage_times.tsv", "long": out / "stage_times_long.tsv"}
        paths["table"].write_text(format_table(report), encoding="utf-8")
        paths["long"].write_text(format_long(report), encoding="utf-8")
        if figure:
            paths["figure"] = plot_runtime(report, out / "runtime_vs_size.png")
    except OSError as exc:
        raise ValidationError(f"cannot write benchmark report under {out}: {exc}") from exc
    return paths
