"""Artifact writers: CSV tables, raw binary fields and SVG figures.

Every artifact starts with a header recording the resolved configuration
that produced it.
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .errors import ShapeMismatch

FLOAT_FORMAT = "{:.16e}"
_BIN_HEADER = struct.Struct("<qqqdd")


def config_header(config: dict) -> str:
    """One-line rendering of a resolved configuration."""
    return "; ".join(f"{k}={config[k]}" for k in sorted(config))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT.format(float(v))
    return str(v)


def write_csv(path, columns, rows, config: dict | None = None) -> Path:
    """Comma-separated table; floats in scientific notation with 17 significant digits.

    The first line is ``# config: ...`` when ``config`` is given.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        if config is not None:
            fh.write(f"# config: {config_header(config)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
    return path


def read_csv(path):
    """Inverse of :func:`write_csv`: (header text or None, columns, rows as strings)."""
    with Path(path).open(newline="") as fh:
        lines = fh.read().splitlines()
    header = None
    if lines and lines[0].startswith("# config: "):
        header = lines[0][len("# config: "):]
        lines = lines[1:]
    rows = list(csv.reader(lines))
    return header, rows[0], rows[1:]


def write_field_csv(path, x, y, phi, config: dict | None = None) -> Path:
    """Field as (x, y, phi) rows in row-major node order."""
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (len(x), len(y)):
        raise ShapeMismatch(f"field {phi.shape} vs axes {(len(x), len(y))}")
    xx, yy = np.meshgrid(x, y, indexing="ij")
    rows = zip(xx.ravel(), yy.ravel(), phi.ravel())
    return write_csv(path, ["x", "y", "phi"], rows, config)


def write_field_binary(path, phi, n: int, dx: float, dt: float) -> Path:
    """Little-endian float64 field, row-major, after a (nx, ny, n, dx, dt) header."""
    phi = np.ascontiguousarray(phi, dtype="<f8")
    if phi.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D field, got shape {phi.shape}")
    path = Path(path)
    with path.open("wb") as fh:
        fh.write(_BIN_HEADER.pack(phi.shape[0], phi.shape[1], int(n), float(dx), float(dt)))
        fh.write(phi.tobytes(order="C"))
    return path


def read_field_binary(path):
    """Inverse of :func:`write_field_binary`: (phi, n, dx, dt)."""
    data = Path(path).read_bytes()
    nx, ny, n, dx, dt = _BIN_HEADER.unpack_from(data)
    phi = np.frombuffer(data, dtype="<f8", offset=_BIN_HEADER.size)
    if phi.size != nx * ny:
        raise ShapeMismatch(f"payload has {phi.size} values, header says {nx}x{ny}")
    return phi.reshape(nx, ny).copy(), n, dx, dt


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.fonttype"] = "none"
    matplotlib.rcParams["svg.hashsalt"] = "mrtlb"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path, config):
    meta = {"Date": None}
    if config is not None:
        meta["Description"] = config_header(config)
    fig.savefig(path, format="svg", metadata=meta)


def heatmap_svg(path, x, y, z, title: str = "", label: str = "",
                config: dict | None = None, axes: tuple[str, str] = ("x", "y")) -> Path:
    """Self-contained SVG heat map of z[i, j] over (x[i], y[j])."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    mesh = ax.pcolormesh(x, y, np.asarray(z).T, shading="auto")
    fig.colorbar(mesh, ax=ax, label=label)
    ax.set_xlabel(axes[0])
    ax.set_ylabel(axes[1])
    ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    _save(fig, path, config)
    plt.close(fig)
    return path


def loglog_svg(path, series: dict, title: str = "", config: dict | None = None) -> Path:
    """Log-log RMSE against dx for one or more ladders.

    Args:
        series: {label: (dxs, rmses)}.
    """
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, (dxs, errs) in series.items():
        ax.loglog(dxs, errs, "o-", label=label)
    ax.set_xlabel("dx")
    ax.set_ylabel("RMSE")
    ax.set_title(title)
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    path = Path(path)
    _save(fig, path, config)
    plt.close(fig)
    return path
