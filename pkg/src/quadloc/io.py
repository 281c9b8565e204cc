"""File formats: sweep CSV, 16-bit PGM heatmaps, plain-text intensity grids.

Intensity-grid exchange format (``*.grid``)::

    # quadloc intensity grid v1
    nx 201
    ny 201
    origin -1.0984 -0.9015
    spacing 0.010984 0.009015
    values
    <ny lines of nx whitespace-separated values>

Rows run from the lowest ``y`` upward and values in a row from the lowest
``x`` rightward (row-major, matching ``GridSpec.mesh``).  Nodes outside the
cavity are written as ``nan``.  Values are written with 17 significant
digits so a read reproduces them exactly.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .bem import GridSpec, IntensityField
from .errors import ConfigurationError, DomainError
from .metrics import normalize_series

GRID_MAGIC = "# quadloc intensity grid v1"
RENYI_COLUMNS = (2.0, 1.8, 1.6, 1.4, 1.2, 1.001)
CSV_COLUMNS = (
    ["epsilon", "label", "k", "gap", "ipr", "shannon", "shannon_inv"]
    + [f"renyi_{a}" for a in RENYI_COLUMNS]
    + ["rms_contrast", "ipr_norm", "shannon_inv_norm", "rms_contrast_norm"]
)


def fmt(x: float) -> str:
    """12 significant digits."""
    return f"{float(x):.12g}"


def sweep_rows(result):
    """Rows of the sweep CSV as lists of strings, sorted by (epsilon, label)."""
    pair = result.pair
    entries = []
    for rec in pair.records:
        for label in ("red", "blue"):
            entries.append((rec.epsilon, label, rec))
    norms = {}
    for name in ("ipr", "shannon_inv", "rms_contrast"):
        values = [getattr(rec.report(label), name) for _, label, rec in entries]
        norms[name] = normalize_series(values)
    rows = []
    for i, (eps, label, rec) in enumerate(entries):
        rep = rec.report(label)
        missing = [a for a in RENYI_COLUMNS if a not in rep.renyi]
        if missing:
            raise DomainError(f"report lacks Renyi orders {missing} required by the CSV schema")
        row = [fmt(eps), label, fmt(rec.k(label)), fmt(rec.gap), fmt(rep.ipr),
               fmt(rep.shannon), fmt(rep.shannon_inv)]
        row += [fmt(rep.renyi[a]) for a in RENYI_COLUMNS]
        row += [fmt(rep.rms_contrast), fmt(norms["ipr"][i]),
                fmt(norms["shannon_inv"][i]), fmt(norms["rms_contrast"][i])]
        rows.append((eps, label, row))
    rows.sort(key=lambda t: (t[0], t[1]))
    return [r for _, _, r in rows]


def write_sweep_csv(result, path) -> Path:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_COLUMNS)
            w.writerows(sweep_rows(result))
    except OSError as exc:
        raise OSError(f"cannot write sweep CSV {path}: {exc}") from exc
    return path


def read_sweep_csv(path):
    """Read a sweep CSV back as a list of dicts (floats except ``label``)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_COLUMNS:
            raise DomainError(f"{path}: unexpected columns {reader.fieldnames}")
        return [{k: (v if k == "label" else float(v)) for k, v in row.items()}
                for row in reader]


def heatmap_pixels(field: IntensityField, gamma: float = 0.5) -> np.ndarray:
    """16-bit pixel array, top row = largest y."""
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    img = np.zeros(field.mask.shape)
    top = field.values.max()
    if top > 0:
        img[field.mask] = (field.values / top) ** gamma
    pix = np.rint(65535.0 * img).astype(np.uint16)
    return pix[::-1]


def write_heatmap(field: IntensityField, path, gamma: float = 0.5) -> Path:
    """Binary 16-bit PGM (P5, big-endian samples)."""
    path = Path(path)
    pix = heatmap_pixels(field, gamma)
    h, w = pix.shape
    try:
        with open(path, "wb") as fh:
            fh.write(f"P5\n{w} {h}\n65535\n".encode("ascii"))
            fh.write(pix.astype(">u2").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write heatmap {path}: {exc}") from exc
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise DomainError(f"{path}: not a binary PGM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    dtype = ">u2" if maxval > 255 else "u1"
    return np.frombuffer(parts[4], dtype=dtype, count=w * h).reshape(h, w)


def write_intensity_grid(field: IntensityField, path) -> Path:
    path = Path(path)
    g = field.grid
    full = np.full(field.mask.shape, np.nan)
    full[field.mask] = field.values
    lines = [GRID_MAGIC, f"nx {g.nx}", f"ny {g.ny}",
             f"origin {g.origin[0]!r} {g.origin[1]!r}",
             f"spacing {g.spacing[0]!r} {g.spacing[1]!r}", "values"]
    for row in full:
        lines.append(" ".join("nan" if math.isnan(v) else f"{v:.17g}" for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_intensity_grid(path) -> IntensityField:
    """Parse a grid file; finite values form the mask and are renormalized
    to unit sum."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].strip() != GRID_MAGIC:
        raise ConfigurationError(f"{path}:1: missing header '{GRID_MAGIC}'")
    header = {}
    i = 1
    while i < len(lines) and lines[i].strip() != "values":
        parts = lines[i].split()
        if parts:
            header[parts[0]] = parts[1:]
        i += 1
    try:
        nx, ny = int(header["nx"][0]), int(header["ny"][0])
        origin = tuple(float(v) for v in header["origin"])
        spacing = tuple(float(v) for v in header["spacing"])
    except (KeyError, IndexError, ValueError) as exc:
        raise ConfigurationError(f"{path}: malformed grid header ({exc})") from exc
    body = lines[i + 1:]
    if len(body) < ny:
        raise ConfigurationError(f"{path}: expected {ny} value rows, found {len(body)}")
    arr = np.empty((ny, nx))
    for r, line in enumerate(body[:ny]):
        vals = line.split()
        if len(vals) != nx:
            raise ConfigurationError(
                f"{path}:{i + 2 + r}: expected {nx} values, found {len(vals)}")
        arr[r] = [float(v) for v in vals]
    mask = np.isfinite(arr)
    values = arr[mask]
    if values.size == 0:
        raise DomainError(f"{path}: grid has no inside values")
    if np.any(values < 0):
        raise DomainError(f"{path}: negative intensities")
    total = values.sum()
    if not total > 0:
        raise DomainError(f"{path}: intensities sum to zero")
    grid = GridSpec(nx, ny, origin, spacing)
    return IntensityField(grid=grid, mask=mask, values=values / total,
                          psi=np.sqrt(values / total).astype(complex))
