"""Per-phase compile timings over a directory of ``.qasm`` files."""

from __future__ import annotations

import csv
import io
import logging
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from qasmir.errors import QasmirError
from qasmir.pipeline import PHASES, compile_source

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("file", "parse_ms", "mlirgen_ms", "lower_ms", "emit_ms", "total_ms")


@dataclass
class BenchRow:
    file: str
    phases_ms: Optional[dict[str, float]]
    total_ms: Optional[float]
    error: str = ""


def time_compile(source: str, repetitions: int = 5, filename: str = "<input>", include_dirs: Sequence = ()) -> BenchRow:
    """Median per-phase and total wall time over ``repetitions`` full compiles."""
    if repetitions < 1:
        raise ValueError("repetitions must be positive")
    samples = {p: [] for p in PHASES}
    totals = []
    for _ in range(repetitions):
        result = compile_source(source, filename=filename, include_dirs=include_dirs)
        for p in PHASES:
            samples[p].append(result.timings_ms[p])
        totals.append(result.total_ms)
    return BenchRow(
        filename,
        {p: statistics.median(v) for p, v in samples.items()},
        statistics.median(totals),
    )


def bench_corpus(corpus_dir: str | Path, repetitions: int = 5) -> list[BenchRow]:
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise NotADirectoryError(str(corpus_dir))
    rows = []
    for path in sorted(corpus_dir.glob("*.qasm")):
        try:
            rows.append(time_compile(path.read_text(), repetitions, str(path.name), [corpus_dir]))
        except (QasmirError, OSError, UnicodeDecodeError) as exc:
            logger.warning("skipping %s: %s", path.name, exc)
            rows.append(BenchRow(path.name, None, None, str(exc)))
    return rows


def format_csv(rows: Sequence[BenchRow]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        if row.phases_ms is None:
            writer.writerow([row.file] + [""] * (len(CSV_COLUMNS) - 1))
        else:
            writer.writerow([row.file] + [f"{row.phases_ms[p]:.3f}" for p in PHASES] + [f"{row.total_ms:.3f}"])
    return out.getvalue()
