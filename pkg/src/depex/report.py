"""Render report rows as JSON (canonical), CSV or Markdown."""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone
from typing import Optional, Sequence

FORMATS = ("json", "csv", "markdown")
EXTENSIONS = {"json": "json", "csv": "csv", "markdown": "md"}


def _cell(value) -> str:
    if value is None:
        return "/"  # metric not applicable
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def timestamp() -> str:
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def render(kind: str, columns: Sequence[str], rows: Sequence[dict], fmt: str = "json",
           generated_at: Optional[str] = None) -> str:
    """Render ``rows``; ``generated_at`` adds a header line (a key, for JSON)."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}")
    if fmt == "json":
        doc = {"kind": kind}
        if generated_at:
            doc["generated_at"] = generated_at
        doc["columns"] = list(columns)
        doc["rows"] = [{c: r.get(c) for c in columns} for r in rows]
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    out = io.StringIO()
    if generated_at:
        out.write(f"# generated_at: {generated_at}\n")
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r.get(c)) for c in columns])
    else:
        out.write(f"<!-- {kind} -->\n")
        out.write("| " + " | ".join(columns) + " |\n")
        out.write("|" + "|".join("---" for _ in columns) + "|\n")
        for r in rows:
            out.write("| " + " | ".join(_cell(r.get(c)) for c in columns) + " |\n")
    return out.getvalue()


def load_json_report(path) -> dict:
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict) or "kind" not in doc or "rows" not in doc:
        raise ValueError(f"{path}: not a JSON report")
    return doc
