"""CSV ingestion and export."""

from __future__ import annotations

import csv
import math
import os
from importlib import resources

from .errors import EmptyDataset, InputError, IoError, ParseError
from .regress import Dataset


def _parse(cell: str):
    try:
        value = float(cell)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def load_csv(path, drop_na: bool = False) -> Dataset:
    """Read a comma-separated file with a header row into a :class:`Dataset`.

    Rows with a missing or non-numeric cell are dropped when ``drop_na`` is
    set; otherwise :class:`ParseError` is raised naming the first offending
    cell and listing every offending row (1-based, header excluded).
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            records = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError) as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc

    if not records:
        raise EmptyDataset(f"{path} is empty")
    header = [h.strip() for h in records[0]]
    if len(set(header)) != len(header) or not all(header):
        raise InputError(f"{path}: header has empty or duplicate column names")

    columns: list[list[float]] = [[] for _ in header]
    bad: list[tuple[int, str]] = []
    for rownum, rec in enumerate(records[1:], start=1):
        if not rec:
            continue
        parsed = [_parse(c) for c in rec[: len(header)]]
        parsed += [None] * (len(header) - len(parsed))
        if len(rec) > len(header):
            bad.append((rownum, header[-1]))
            continue
        missing = [header[j] for j, v in enumerate(parsed) if v is None]
        if missing:
            bad.append((rownum, missing[0]))
            continue
        for col, v in zip(columns, parsed):
            col.append(v)

    if bad and not drop_na:
        row, column = bad[0]
        raise ParseError(row, column, rows=[r for r, _ in bad])
    if not columns[0]:
        raise EmptyDataset(f"{path} has no usable data rows")
    return Dataset(dict(zip(header, columns)))


def write_csv(data: Dataset, path) -> None:
    """Write with shortest round-trip float formatting, so loading gives back equal data."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(data.names)
        cols = [data[c] for c in data.names]
        for i in range(data.n_rows):
            w.writerow([repr(float(col[i])) for col in cols])


def darfur_path() -> str:
    return str(resources.files("ovb_sense") / "data" / "darfur.csv")


def load_darfur() -> Dataset:
    """Darfur survey data with ``village`` as an integer code."""
    return load_csv(darfur_path())


DARFUR_CONTROLS = ("female", "age", "farmer_dar", "herder_dar", "pastvoted", "hhsize_darfur")
