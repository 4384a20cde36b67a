"""Tabular reports with CSV and JSON serializers.

CSV output starts with ``#``-prefixed metadata lines; everything after them
(the header and rows) depends only on the resolved config, so repeated runs
produce byte-identical bodies.
"""

from __future__ import annotations

import csv
import io
import json
import math
import platform
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np

from .. import __version__

__all__ = ["Report", "environment_metadata", "format_value"]


def format_value(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return json.dumps(v)
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, Path):
        return str(v)
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def environment_metadata() -> dict[str, str]:
    return {
        "freecov": __version__,
        "numpy": np.__version__,
        "python": platform.python_version(),
    }


@dataclass
class Report:
    kind: str
    columns: list[str]
    rows: list[dict[str, Any]]
    ok: bool = True
    metadata: dict[str, Any] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> list[Any]:
        return [row[name] for row in self.rows]

    def csv_body(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([format_value(row.get(c)) for c in self.columns])
        return buf.getvalue()

    def to_csv(self) -> str:
        meta = dict(self.metadata)
        meta.setdefault("generated", datetime.now(timezone.utc).isoformat(timespec="seconds"))
        lines = [f"# report: {self.kind}", f"# ok: {format_value(self.ok)}"]
        for key in sorted(meta):
            lines.append(f"# {key}: {json.dumps(_jsonable(meta[key]), sort_keys=True)}")
        return "\n".join(lines) + "\n" + self.csv_body()

    def to_json(self) -> str:
        meta = dict(self.metadata)
        meta.setdefault("generated", datetime.now(timezone.utc).isoformat(timespec="seconds"))
        doc = {
            "report": self.kind,
            "ok": self.ok,
            "columns": self.columns,
            "rows": _jsonable(self.rows),
            "summary": _jsonable(self.summary),
            "metadata": _jsonable(meta),
        }
        return json.dumps(doc, indent=2, sort_keys=False) + "\n"

    def write(self, out_dir: str | Path, fmt: str = "csv") -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if fmt == "csv":
            path = out_dir / f"{self.kind}.csv"
            path.write_text(self.to_csv())
        elif fmt == "json":
            path = out_dir / f"{self.kind}.json"
            path.write_text(self.to_json())
        else:
            raise ValueError(f"unknown format {fmt!r}")
        return path
