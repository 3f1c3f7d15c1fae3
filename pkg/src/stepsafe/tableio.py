"""Minimal delimited-text tables: one header row, comma-separated values.

Floats are written with 17 significant digits so they round-trip exactly;
readers parse every cell as float when possible and keep it as text otherwise.
"""

from __future__ import annotations

from pathlib import Path

FLOAT_FMT = "%.17g"


def format_cell(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return FLOAT_FMT % value
    if isinstance(value, int):
        return str(value)
    return str(value)


def parse_cell(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def write_table(path, header, rows, timestamp: str | None = None) -> None:
    path = Path(path)
    with path.open("w") as fh:
        if timestamp is not None:
            fh.write(f"# generated: {timestamp}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(format_cell(v) for v in row) + "\n")


def read_table(path) -> tuple[list[str], list[list]]:
    path = Path(path)
    with path.open() as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise OSError(f"{path} holds no table")
    header = lines[0].split(",")
    rows = [[parse_cell(cell) for cell in ln.split(",")] for ln in lines[1:]]
    return header, rows
