"""Atomic file output: CSV tables, PGM rasters and trajectory logs."""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DECIMALS = 6


def fmt(value) -> str:
    """Locale-independent fixed-point text for numbers; booleans as true/false."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.{DECIMALS}f}"
    return str(value)


def write_atomic(path, data) -> Path:
    """Write text or bytes through a temp file in the same directory, then rename."""
    path = Path(path)
    if path.parent and not path.parent.exists():
        raise FileNotFoundError(f"output directory {path.parent} does not exist")
    mode = "wb" if isinstance(data, (bytes, bytearray)) else "w"
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, mode, **({} if mode == "wb" else {"encoding": "utf-8", "newline": ""})) as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    return write_atomic(path, csv_text(header, rows))


def pgm_bytes(mask: np.ndarray) -> bytes:
    """Plain (P2) PGM, 255 where the mask is set; row 0 is printed last so the
    second coefficient increases upward."""
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError("raster must be 2-D")
    h, w = mask.shape
    lines = ["P2", f"{w} {h}", "255"]
    for row in mask[::-1]:
        lines.append(" ".join("255" if v else "0" for v in row))
    return ("\n".join(lines) + "\n").encode("ascii")


def write_pgm(path, mask: np.ndarray) -> Path:
    return write_atomic(path, pgm_bytes(mask))


def read_pgm(path) -> np.ndarray:
    """Inverse of :func:`write_pgm` for plain PGM files."""
    tokens = []
    for line in Path(path).read_text(encoding="ascii").splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    pix = np.array(tokens[4:4 + w * h], dtype=int).reshape(h, w)
    return (pix[::-1] > maxval // 2)


TRAJECTORY_COLUMNS = ("t", "agent", "x", "y", "v", "theta", "a", "omega")


def trajectory_rows(trajectories, names=("row", "col")):
    """Rows for the trajectory log; the last state of each agent has no control."""
    for name, traj in zip(names, trajectories):
        for k, (x, y, v, th) in enumerate(traj.states):
            if k < len(traj.controls):
                a, om = traj.controls[k]
            else:
                a, om = 0.0, 0.0
            yield k * traj.dt, name, x, y, v, th, a, om


def write_trajectories(path, trajectories, names=("row", "col")) -> Path:
    return write_csv(path, TRAJECTORY_COLUMNS, trajectory_rows(trajectories, names))
