"""Structured CSV output with byte-reproducible formatting.

All values are written with 17 significant digits; row order is fixed
(y-major, then x, then component, then mode index) so identical runs produce
identical files.
"""

from __future__ import annotations

import os

import numpy as np

from .reference import MonteCarloEnvelope, mean_std
from .solver import GpcField


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_lines(path: str, lines) -> None:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="ascii", newline="\n") as handle:
        for line in lines:
            handle.write(line + "\n")


def write_field_csv(field: GpcField, path: str, kinds: tuple[str, ...] = ("mode",)) -> None:
    """Dump a field (and/or its statistics) as CSV.

    Header is ``t,x[,y],component,kind,index,value``; ``kind`` is one of
    mode, mean, std (mean/std always carry index 0).
    """
    grid = field.grid
    two_d = grid.space_dim == 2
    header = "t,x,y,component,kind,index,value" if two_d else "t,x,component,kind,index,value"
    mean = std = None
    if "mean" in kinds or "std" in kinds:
        mean, std = mean_std(field)
    xs = grid.x_centers
    ys = grid.y_centers if two_d else None
    tstr = _fmt(field.time)
    lines = [header]

    def cell_rows(ix, iy, prefix):
        block = field.data[(ix, iy) if two_d else (ix,)]
        for comp in range(block.shape[0]):
            if "mode" in kinds:
                for k in range(block.shape[1]):
                    lines.append(f"{prefix},{comp},mode,{k},{_fmt(block[comp, k])}")
            if "mean" in kinds:
                m = mean[(ix, iy) if two_d else (ix,)][comp]
                lines.append(f"{prefix},{comp},mean,0,{_fmt(m)}")
            if "std" in kinds:
                s = std[(ix, iy) if two_d else (ix,)][comp]
                lines.append(f"{prefix},{comp},std,0,{_fmt(s)}")

    if two_d:
        for iy in range(grid.ny):
            for ix in range(grid.nx):
                cell_rows(ix, iy, f"{tstr},{_fmt(xs[ix])},{_fmt(ys[iy])}")
    else:
        for ix in range(grid.nx):
            cell_rows(ix, None, f"{tstr},{_fmt(xs[ix])}")
    _write_lines(path, lines)


def read_field_csv(path: str):
    """Read a mode-kind field CSV back into (t, xs[, ys], data)."""
    with open(path, encoding="ascii") as handle:
        header = handle.readline().strip().split(",")
        two_d = "y" in header
        rows = [line.rstrip("\n").split(",") for line in handle if line.strip()]
    if not rows:
        raise ValueError(f"{path} holds no data rows")
    t = float(rows[0][0])
    mode_rows = [r for r in rows if r[3 + two_d] == "mode"]
    xs = sorted({float(r[1]) for r in mode_rows})
    ys = sorted({float(r[2]) for r in mode_rows}) if two_d else None
    ncomp = 1 + max(int(r[2 + two_d]) for r in mode_rows)
    nmode = 1 + max(int(r[4 + two_d]) for r in mode_rows)
    xi = {x: i for i, x in enumerate(xs)}
    shape = (len(xs), len(ys), ncomp, nmode) if two_d else (len(xs), ncomp, nmode)
    data = np.zeros(shape)
    if two_d:
        yi = {y: i for i, y in enumerate(ys)}
        for r in mode_rows:
            data[xi[float(r[1])], yi[float(r[2])], int(r[3]), int(r[5])] = float(r[6])
    else:
        for r in mode_rows:
            data[xi[float(r[1])], int(r[2]), int(r[4])] = float(r[5])
    return t, np.asarray(xs), ys if ys is None else np.asarray(ys), data


def write_matrix_csv(matrix: np.ndarray, path: str) -> None:
    """Row-major dump of one dense matrix."""
    lines = [",".join(_fmt(v) for v in row) for row in np.atleast_2d(matrix)]
    _write_lines(path, lines)


def write_table_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    _write_lines(path, lines)


def write_profile_csv(path: str, x: np.ndarray, columns: dict[str, np.ndarray]) -> None:
    header = ["x"] + list(columns)
    lines = [",".join(header)]
    for i in range(len(x)):
        vals = [_fmt(x[i])] + [_fmt(col[i]) for col in columns.values()]
        lines.append(",".join(vals))
    _write_lines(path, lines)


def write_envelope_csv(envelope: MonteCarloEnvelope, path: str) -> None:
    write_profile_csv(path, envelope.x, {
        "min": envelope.minimum, "max": envelope.maximum, "mean": envelope.mean})
