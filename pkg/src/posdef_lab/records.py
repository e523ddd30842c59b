"""Line-oriented result files with a provenance header.

JSON lines: the first line is ``{"provenance": {...}}``, then one object per
record.  CSV: the first line is ``# `` followed by the provenance JSON, then a
header row and data rows.  Both writers are canonical (sorted keys, ``repr``
floats), so reading a file and writing it back reproduces it byte for byte.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__

__all__ = ["provenance", "dumps", "write_jsonl", "read_jsonl", "write_csv", "read_csv"]


def provenance(run_config: dict, seed: int | None = None) -> dict:
    return {"tool": "posdef-lab", "version": __version__, "run_config": run_config, "seed": seed}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def write_jsonl(path, header: dict, records: Iterable[dict]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps({"provenance": header}) + "\n")
        for rec in records:
            fh.write(dumps(rec) + "\n")
    return path


def read_jsonl(path) -> tuple[dict, list[dict]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty results file")
    first = json.loads(lines[0])
    if "provenance" not in first:
        raise ValueError(f"{path}: missing provenance header")
    return first["provenance"], [json.loads(line) for line in lines[1:] if line.strip()]


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return "" if v is None else str(v)


def _parse_cell(text: str):
    if text == "":
        return None
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def write_csv(path, header: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    buf = io.StringIO()
    buf.write("# " + dumps({"provenance": header}) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    path = Path(path)
    path.write_text(buf.getvalue(), encoding="utf-8")
    return path


def read_csv(path) -> tuple[dict, list[str], list[list]]:
    text = Path(path).read_text(encoding="utf-8")
    first, _, rest = text.partition("\n")
    if not first.startswith("# "):
        raise ValueError(f"{path}: missing provenance header")
    header = json.loads(first[2:])["provenance"]
    reader = csv.reader(io.StringIO(rest))
    columns = next(reader)
    return header, columns, [[_parse_cell(c) for c in row] for row in reader]
