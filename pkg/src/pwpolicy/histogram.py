"""Attribute histograms and cumulative-frequency multiplier tables.

The core signal for policy inference is the multiplier series of an
attribute histogram. With cum(v) the total multiplicity of records whose
attribute value is <= v, the multiplier at v is cum(v+1) / cum(v). A value
just below an enforced minimum collects only noise, so its cumulative count
is tiny compared to the next one and the multiplier spikes there; inside an
unconstrained region the series hugs 1.

Histograms are plain value -> multiplicity maps and merge by pointwise
addition, which is associative and commutative. That makes partitioned
scans exact: building per-partition histograms and merging them yields
bit-identical tables no matter how (or whether) the input was split.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, Mapping, Sequence

from .attributes import ATTRIBUTES, AttributeId, extract_all
from .corpus import (
    CorpusFormat,
    PasswordRecord,
    ReadStats,
    partition_offsets,
    read_file_partition,
    read_records,
)

_ATTR_INDEX = {attr: i for i, attr in enumerate(ATTRIBUTES)}


@dataclass
class Histogram:
    """Multiplicity-weighted counts of one attribute over a corpus."""

    attribute: AttributeId
    counts: dict[int, int]
    total: int

    def scaled(self, factor: int) -> "Histogram":
        if factor < 1:
            raise ValueError("scale factor must be >= 1")
        return Histogram(
            self.attribute,
            {v: n * factor for v, n in self.counts.items()},
            self.total * factor,
        )


@dataclass(frozen=True)
class MultiplierRow:
    value: int
    frequency: int
    cumulative: int
    multiplier: float | None


@dataclass
class MultiplierTable:
    """Rows spanning [v0, vmax] with cumulative counts and multipliers.

    Unobserved values inside the span appear as zero-frequency rows so the
    multiplier series is defined at every step. Values below the smallest
    observed one are excluded entirely; giving them rows would mean dividing
    by a cumulative count of zero. Exactly the last row has no multiplier.
    """

    attribute: AttributeId
    rows: list[MultiplierRow]
    total: int


# Safety valve for the shape-tuple accumulator below: corpora normally have
# a few thousand distinct attribute shapes, but nothing stops a pathological
# input from having one per record, so spill to the per-attribute dicts
# before the tuple dict can grow past a few tens of megabytes.
_SHAPE_FLUSH = 300_000


def build_histograms(
    records: Iterable[PasswordRecord],
    attributes: Sequence[AttributeId] = ATTRIBUTES,
) -> dict[AttributeId, Histogram]:
    """Single streaming pass over records, one histogram per attribute."""
    plan = [(attr, _ATTR_INDEX[attr], {}) for attr in attributes]
    total = 0
    shapes: dict[tuple, int] = {}
    shape_get = shapes.get
    # Hot loop: runs once per record over corpora of tens of millions.
    # Counting whole attribute tuples first is ~4x cheaper per record than
    # seven separate dict updates because shapes repeat heavily.
    for text, mult in records:
        values = extract_all(text)
        total += mult
        shapes[values] = shape_get(values, 0) + mult
        if len(shapes) >= _SHAPE_FLUSH:
            _flush_shapes(shapes, plan)
            shapes = {}
            shape_get = shapes.get
    _flush_shapes(shapes, plan)
    return {attr: Histogram(attr, counts, total) for attr, _, counts in plan}


def _flush_shapes(shapes: dict, plan: list) -> None:
    for values, mult in shapes.items():
        for _, idx, counts in plan:
            v = values[idx]
            if v in counts:
                counts[v] += mult
            else:
                counts[v] = mult


def merge(a: Histogram, b: Histogram) -> Histogram:
    """Pointwise sum of two histograms of the same attribute."""
    if a.attribute is not b.attribute:
        raise ValueError(
            f"cannot merge histograms of {a.attribute.value} and {b.attribute.value}"
        )
    counts = dict(a.counts)
    for v, n in b.counts.items():
        counts[v] = counts.get(v, 0) + n
    return Histogram(a.attribute, counts, a.total + b.total)


def multiplier_table(hist: Histogram) -> MultiplierTable:
    """Derive the cumulative/multiplier table from one histogram.

    Multipliers are exact integer ratios evaluated in double precision
    (well beyond 15 significant digits for realistic corpus sizes); any
    2-decimal rounding happens only at the display layer.
    """
    if not hist.counts:
        raise ValueError(f"empty histogram for {hist.attribute.value}")
    v0 = min(hist.counts)
    vmax = max(hist.counts)
    rows: list[MultiplierRow] = []
    cum = 0
    cums: list[int] = []
    span = range(v0, vmax + 1)
    for v in span:
        cum += hist.counts.get(v, 0)
        cums.append(cum)
    for i, v in enumerate(span):
        if i + 1 < len(cums):
            mult = cums[i + 1] / cums[i]
        else:
            mult = None
        rows.append(MultiplierRow(v, hist.counts.get(v, 0), cums[i], mult))
    return MultiplierTable(hist.attribute, rows, hist.total)


def format_multiplier(value: float | None) -> str:
    """Render a multiplier with two decimals, rounding halves up."""
    if value is None:
        return ""
    return str(Decimal(value).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def rounded_multiplier(value: float | None) -> float | None:
    """The display rounding as a number, for CSV/JSON parity."""
    if value is None:
        return None
    return float(format_multiplier(value))


def table_to_csv(table: MultiplierTable) -> str:
    """CSV rendering; the last row's multiplier cell is empty."""
    lines = ["value,frequency,cumulative,multiplier"]
    for row in table.rows:
        lines.append(
            f"{row.value},{row.frequency},{row.cumulative},{format_multiplier(row.multiplier)}"
        )
    return "\n".join(lines) + "\n"


def table_rows_json(table: MultiplierTable) -> list[dict]:
    """Row dicts carrying the same numbers as the CSV rendering."""
    return [
        {
            "value": row.value,
            "frequency": row.frequency,
            "cumulative": row.cumulative,
            "multiplier": rounded_multiplier(row.multiplier),
        }
        for row in table.rows
    ]


def _scan_partition(
    path: str,
    start: int,
    end: int,
    kind: str,
    skip_empty: bool,
    tokens: tuple[str, ...],
) -> tuple[dict[str, dict[int, int]], int, tuple[int, int, int, int]]:
    # Worker entry point; must stay module-level and picklable-friendly.
    fmt = CorpusFormat(kind=kind, skip_empty=skip_empty)
    attrs = [AttributeId(t) for t in tokens]
    stats = ReadStats()
    hists = build_histograms(read_file_partition(path, start, end, fmt, stats), attrs)
    total = hists[attrs[0]].total if attrs else 0
    packed = {attr.value: hists[attr].counts for attr in attrs}
    return packed, total, (stats.lines, stats.records, stats.skipped_empty, stats.truncated)


def scan_file(
    path: str,
    fmt: CorpusFormat,
    attributes: Sequence[AttributeId] = ATTRIBUTES,
    threads: int = 1,
    stats: ReadStats | None = None,
) -> dict[AttributeId, Histogram]:
    """Build histograms for a corpus file, optionally in parallel.

    With threads > 1 the file is split into line-aligned byte partitions
    scanned by worker processes and the partial histograms are merged.
    Merging is order-insensitive, so results are identical for any thread
    count. Falls back to one sequential pass for small files.
    """
    if threads < 1:
        raise ValueError("threads must be >= 1")
    size = os.path.getsize(path)
    if threads == 1 or size < (1 << 22):
        local = ReadStats()
        with open(path, "rb") as f:
            hists = build_histograms(read_records(f, fmt, local), attributes)
        if stats is not None:
            stats.add(local)
        return hists
    parts = partition_offsets(path, threads)
    merged: dict[AttributeId, Histogram] = {
        attr: Histogram(attr, {}, 0) for attr in attributes
    }
    tokens = tuple(attr.value for attr in attributes)
    with ProcessPoolExecutor(max_workers=min(threads, len(parts))) as pool:
        futures = [
            pool.submit(_scan_partition, path, start, end, fmt.kind, fmt.skip_empty, tokens)
            for start, end in parts
        ]
        for fut in futures:
            packed, total, st = fut.result()
            for attr in attributes:
                part = Histogram(attr, packed[attr.value], total)
                merged[attr] = merge(merged[attr], part)
            if stats is not None:
                stats.add(ReadStats(*st))
    return merged


def read_corpus_histograms(
    stream,
    fmt: CorpusFormat,
    attributes: Sequence[AttributeId] = ATTRIBUTES,
    stats: ReadStats | None = None,
) -> dict[AttributeId, Histogram]:
    """Sequential histogram build from an already-open binary stream."""
    local = stats if stats is not None else ReadStats()
    return build_histograms(read_records(stream, fmt, local), attributes)
