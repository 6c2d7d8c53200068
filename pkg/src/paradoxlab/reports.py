"""Report containers and their JSON/CSV serialization."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Iterator

import numpy as np

CSV_HEADER = ("name", "value", "ci_lo", "ci_hi", "n")


@dataclass(frozen=True)
class ParadoxReport:
    """A point estimate with its resampled percentile interval."""

    value: float
    ci_lo: float | None = None
    ci_hi: float | None = None
    replicates: int = 0
    name: str = "paradox_fraction"
    level: float | None = None
    eligible: int | None = None
    missing: int = 0

    def to_dict(self) -> dict:
        out = {
            "value": self.value,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
            "replicates": self.replicates,
        }
        if self.level is not None:
            out["level"] = self.level
        if self.eligible is not None:
            out["eligible"] = self.eligible
        if self.missing:
            out["missing"] = self.missing
        return out

    def metric_rows(self, prefix: str = "") -> Iterator[tuple]:
        # inside a container the section key names the metric
        name = prefix.rstrip(".") or self.name
        yield (name, self.value, self.ci_lo, self.ci_hi, self.replicates)


@dataclass
class Report:
    """Top-level report: a reproducibility header plus named sections.

    Sections hold any mix of report objects (anything with ``to_dict`` /
    ``metric_rows``), dataclasses, dicts and scalars.
    """

    kind: str
    header: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "header": to_jsonable(self.header), **to_jsonable(self.sections)}

    def metric_rows(self, prefix: str = "") -> Iterator[tuple]:
        for key, section in self.sections.items():
            yield from metric_rows(section, f"{prefix}{key}.")


def to_jsonable(obj: Any) -> Any:
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def metric_rows(obj: Any, prefix: str = "") -> Iterator[tuple]:
    """Flatten a report into (name, value, ci_lo, ci_hi, n) rows."""
    if hasattr(obj, "metric_rows"):
        yield from obj.metric_rows(prefix)
    elif isinstance(obj, dict):
        for key, value in obj.items():
            yield from metric_rows(value, f"{prefix}{key}.")
    elif isinstance(obj, (int, float)) and not isinstance(obj, bool):
        yield (prefix.rstrip("."), obj, None, None, None)


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float) and math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return str(value)
