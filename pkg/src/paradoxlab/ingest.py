"""Edge-list, attribute and lexicon readers, the lexicon SWB scorer, and report writers."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from paradoxlab.errors import IngestError
from paradoxlab.reports import CSV_HEADER, format_cell, metric_rows, to_jsonable

logger = logging.getLogger(__name__)


@dataclass
class EdgeList:
    """Directed edges as two parallel ID arrays plus parse statistics."""

    src: np.ndarray
    dst: np.ndarray
    lines_read: int = 0
    comments: int = 0
    malformed: int = 0
    self_edges: int = 0

    def __len__(self) -> int:
        return len(self.src)

    def __iter__(self) -> Iterator[tuple]:
        return zip(self.src.tolist(), self.dst.tolist())

    @property
    def skipped(self) -> int:
        return self.malformed + self.self_edges


def _id_array(tokens: list[str]) -> np.ndarray:
    try:
        return np.array(tokens, dtype=str).astype(np.int64)
    except (ValueError, OverflowError):
        return np.array(tokens, dtype=object)


def read_edge_list(path: str | Path) -> EdgeList:
    """Read a whitespace-separated directed edge list.

    Lines starting with ``#`` and blank lines are ignored; lines without
    exactly two tokens and self-edges are skipped and counted. IDs are
    parsed as integers when every token allows it, otherwise kept as strings.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read edge list {path}: {exc}") from exc

    src: list[str] = []
    dst: list[str] = []
    lines = comments = malformed = self_edges = 0
    for line in text.splitlines():
        lines += 1
        parts = line.split()
        if not parts:
            continue
        if parts[0].startswith("#"):
            comments += 1
            continue
        if len(parts) != 2:
            malformed += 1
            continue
        a, b = parts
        if a == b:
            self_edges += 1
            continue
        src.append(a)
        dst.append(b)

    ids = _id_array(src + dst)
    k = len(src)
    out = EdgeList(ids[:k], ids[k:], lines, comments, malformed, self_edges)
    logger.info("read %d edges from %s (%d skipped)", len(out), path, out.skipped)
    return out


@dataclass
class AttributeTable:
    """Per-node attribute values keyed by original node ID."""

    values: dict = field(default_factory=dict)
    rejected: int = 0
    duplicates: int = 0

    def __len__(self) -> int:
        return len(self.values)


def _coerce_ids(values: dict) -> dict:
    try:
        return {int(k): v for k, v in values.items()}
    except ValueError:
        return values


def read_attributes_csv(path: str | Path) -> AttributeTable:
    """Read a ``node,value`` CSV; out-of-range or non-finite rows are rejected."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read attributes {path}: {exc}") from exc
    if not rows or [c.strip().lower() for c in rows[0]] != ["node", "value"]:
        raise IngestError(f"{path}: expected header 'node,value'")

    table = AttributeTable()
    for row in rows[1:]:
        if not row:
            continue
        try:
            node, raw = row[0].strip(), float(row[1])
        except (IndexError, ValueError):
            table.rejected += 1
            continue
        if not math.isfinite(raw) or abs(raw) > 1.0 or len(row) != 2:
            table.rejected += 1
            continue
        if node in table.values:
            table.duplicates += 1
        table.values[node] = raw
    if not table.values:
        raise IngestError(f"{path}: no valid attribute rows ({table.rejected} rejected)")
    table.values = _coerce_ids(table.values)
    return table


def write_attributes_csv(values: dict, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "value"])
        for node, value in values.items():
            w.writerow([node, repr(float(value))])


@dataclass(frozen=True)
class Lexicon:
    positive: frozenset
    negative: frozenset

    def __post_init__(self):
        pos = frozenset(t.lower() for t in self.positive)
        neg = frozenset(t.lower() for t in self.negative)
        if pos & neg:
            raise ValueError(f"terms in both polarities: {sorted(pos & neg)[:5]}")
        object.__setattr__(self, "positive", pos)
        object.__setattr__(self, "negative", neg)

    def swapped(self) -> "Lexicon":
        return Lexicon(self.negative, self.positive)


def read_lexicon(path: str | Path) -> Lexicon:
    """Read a ``term,polarity`` CSV with polarity ``pos`` or ``neg``."""
    pos, neg = set(), set()
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            for row in csv.reader(fh):
                if len(row) != 2 or [c.strip().lower() for c in row] == ["term", "polarity"]:
                    continue
                term, polarity = row[0].strip().lower(), row[1].strip().lower()
                if polarity == "pos":
                    pos.add(term)
                elif polarity == "neg":
                    neg.add(term)
    except OSError as exc:
        raise IngestError(f"cannot read lexicon {path}: {exc}") from exc
    return Lexicon(frozenset(pos), frozenset(neg))


def tokenize(text: str) -> list[str]:
    return text.lower().split()


def document_score(tokens: Iterable[str], lex: Lexicon) -> float:
    p = n = 0
    for tok in tokens:
        if tok in lex.positive:
            p += 1
        elif tok in lex.negative:
            n += 1
    return (p - n) / (p + n) if p + n else 0.0


def lexicon_swb_score(documents: Sequence[Sequence[str]], lex: Lexicon) -> float:
    """Mean per-document polarity score in [-1, 1].

    Each document scores (p - n) / (p + n) over its positive and negative
    lexicon hits, or 0 when it has none.
    """
    if len(documents) == 0:
        raise ValueError("at least one document is required")
    return float(np.mean([document_score(doc, lex) for doc in documents]))


def read_corpus(path: str | Path) -> dict:
    """Read ``node<TAB>text`` lines into ``{node: [token list, ...]}``."""
    docs: dict = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                node, sep, text = line.rstrip("\n").partition("\t")
                if not sep or not node.strip():
                    continue
                docs.setdefault(node.strip(), []).append(tokenize(text))
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestError(f"cannot read corpus {path}: {exc}") from exc
    return docs


def render_report(report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(to_jsonable(report), sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in metric_rows(report):
            w.writerow([format_cell(c) for c in row])
        return buf.getvalue()
    raise ValueError(f"unknown report format {fmt!r}")


def write_report(report, path: str | Path, format: str = "json") -> None:
    """Serialize a report with stable key ordering.

    JSON keeps full float precision; CSV emits one metric per row as
    ``name,value,ci_lo,ci_hi,n``.
    """
    text = render_report(report, format)
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot write report {path}: {exc}") from exc
