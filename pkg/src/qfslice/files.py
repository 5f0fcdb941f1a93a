"""Output formats: binary PGM, component tables, metadata sidecars."""

from __future__ import annotations

import csv
import json
import platform
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .discreteness import OracleBudget
from .raster import CELL_NAMES, GRAY_LEVELS, ComponentReport, PixelGrid, SliceSpec

COMPONENT_FIELDS = ["label", "pixels", "bbox", "centroid_re", "centroid_im", "standard"]


def write_pgm(path, gray: np.ndarray) -> Path:
    """8-bit binary (P5) PGM."""
    path = Path(path)
    gray = np.ascontiguousarray(gray, dtype=np.uint8)
    h, w = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())
    return path


def read_pgm(path) -> np.ndarray:
    data = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            pos = data.index(b"\n", pos) + 1
            continue
        start = pos
        while not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos].decode("ascii"))
    if tokens[0] != "P5":
        raise ValueError(f"{path}: not a binary PGM")
    w, h, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"{path}: only 8-bit PGM supported")
    pos += 1
    return np.frombuffer(data[pos:pos + w * h], dtype=np.uint8).reshape(h, w).copy()


def cells_from_gray(gray: np.ndarray) -> np.ndarray:
    cells = np.full(gray.shape, 255, dtype=np.uint8)
    for code, level in enumerate(GRAY_LEVELS):
        cells[gray == level] = code
    if (cells == 255).any():
        raise ValueError("image contains gray levels outside the cell legend")
    return cells


def write_png(path, gray: np.ndarray) -> Path:
    from PIL import Image

    Image.fromarray(np.ascontiguousarray(gray, dtype=np.uint8), mode="L").save(path)
    return Path(path)


def write_components(stem, reports: list[ComponentReport]) -> tuple[Path, Path]:
    stem = Path(stem)
    rows = [r.as_dict() for r in reports]
    json_path = stem.with_name(stem.name + "_components.json")
    json_path.write_text(json.dumps(rows, indent=2))
    csv_path = stem.with_name(stem.name + "_components.csv")
    with open(csv_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(COMPONENT_FIELDS)
        for r in rows:
            wr.writerow([r["label"], r["pixels"], " ".join(map(str, r["bbox"])),
                         repr(r["centroid_re"]), repr(r["centroid_im"]), str(r["standard"]).lower()])
    return json_path, csv_path


def run_metadata(extra: dict | None = None) -> dict:
    meta = {
        "code_version": __version__,
        "python": sys.version.split()[0],
        "platform": platform.platform(),
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "oracle_defaults": OracleBudget().as_dict(),
        "legend": {CELL_NAMES[k]: int(v) for k, v in enumerate(GRAY_LEVELS)},
    }
    if extra:
        meta.update(extra)
    return meta


def write_sidecar(stem, grid: PixelGrid, extra: dict | None = None) -> Path:
    stem = Path(stem)
    meta = run_metadata(extra)
    meta["spec"] = grid.spec.as_dict()
    meta["counts"] = grid.counts()
    meta["shape"] = list(grid.cells.shape)
    path = stem.with_name(stem.name + ".json")
    path.write_text(json.dumps(meta, indent=2))
    return path


def read_sidecar(path) -> tuple[SliceSpec, dict]:
    meta = json.loads(Path(path).read_text())
    return SliceSpec.from_dict(meta["spec"]), meta


def load_grid(pgm_path, sidecar_path=None) -> PixelGrid:
    pgm_path = Path(pgm_path)
    sidecar_path = Path(sidecar_path) if sidecar_path else pgm_path.with_name(pgm_path.stem + ".json")
    spec, _ = read_sidecar(sidecar_path)
    cells = cells_from_gray(read_pgm(pgm_path))
    if cells.shape != (spec.resolution, spec.resolution):
        raise ValueError("PGM size does not match its sidecar")
    return PixelGrid(spec, cells)
