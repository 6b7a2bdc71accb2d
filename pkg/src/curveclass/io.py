"""Curve file ingestion and atomic report writing."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from typing import List, Sequence

from .errors import EmptyFile, InconsistentLabel, ParseError
from .smoothing import SampledCurve

CSV_HEADER = ["curve_id", "label", "x", "y"]


def ingest_csv(path) -> List[SampledCurve]:
    """Read curves from a CSV file with header ``curve_id,label,x,y``.

    Rows are grouped by curve_id (contiguity not required) in order of first
    appearance. An empty label field makes the whole curve unlabeled; a
    curve_id mixing different labels, or mixing labeled and unlabeled rows,
    is rejected.
    """
    by_id: dict = {}
    order: List[str] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path} is empty") from None
        if header != CSV_HEADER:
            raise ParseError(1, f"expected header {','.join(CSV_HEADER)}")
        n_rows = 0
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4:
                raise ParseError(lineno, f"expected 4 fields, got {len(row)}")
            cid, label_s, x_s, y_s = row
            if not cid:
                raise ParseError(lineno, "empty curve_id")
            if label_s == "":
                label = None
            elif label_s in ("0", "1"):
                label = int(label_s)
            else:
                raise ParseError(lineno, f"label must be 0, 1 or empty, got {label_s!r}")
            try:
                x = float(x_s)
                y = float(y_s)
            except ValueError:
                raise ParseError(lineno, f"non-numeric x or y: {x_s!r}, {y_s!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ParseError(lineno, "x and y must be finite")
            if cid not in by_id:
                by_id[cid] = {"label": label, "x": [], "y": []}
                order.append(cid)
            elif by_id[cid]["label"] != label:
                raise InconsistentLabel(cid)
            by_id[cid]["x"].append(x)
            by_id[cid]["y"].append(y)
            n_rows += 1
    if n_rows == 0:
        raise EmptyFile(f"{path} has no data rows")
    curves = []
    for cid in order:
        rec = by_id[cid]
        if len(rec["x"]) < 2:
            raise ParseError(0, f"curve {cid!r} has fewer than 2 points")
        curves.append(
            SampledCurve(id=cid, x=rec["x"], y=rec["y"], label=rec["label"])
        )
    return curves


def curves_to_csv_text(curves: Sequence[SampledCurve]) -> str:
    """CSV text for curves, with shortest round-trip number formatting."""
    lines = [",".join(CSV_HEADER)]
    for c in curves:
        label = "" if c.label is None else str(c.label)
        for x, y in zip(c.x, c.y):
            lines.append(f"{c.id},{label},{float(x)!r},{float(y)!r}")
    return "\n".join(lines) + "\n"


def atomic_write_text(path, text: str) -> None:
    """Write text via a temp file in the same directory plus atomic rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_report(path, payload: dict) -> None:
    """Serialize a report deterministically (sorted keys, fixed separators)."""
    text = json.dumps(payload, sort_keys=True, indent=2, separators=(",", ": "))
    atomic_write_text(path, text + "\n")
