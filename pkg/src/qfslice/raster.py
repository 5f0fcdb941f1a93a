"""Rendering linear slices over a Tr B window and labelling their components."""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import ndimage

try:
    from numba import njit
except ImportError:  # pragma: no cover
    from .discreteness import njit

from . import discreteness as dsc
from .discreteness import OracleBudget, Tag, TraceTriple, bq_search, markov_third_trace
from .words import trace_AnB

# cell codes stored in PixelGrid.cells
DISCRETE_LIKELY, INDISCRETE, INDETERMINATE, OUT_OF_DOMAIN = 0, 1, 2, 3
CELL_NAMES = {
    DISCRETE_LIKELY: "DiscreteLikely",
    INDISCRETE: "Indiscrete",
    INDETERMINATE: "Indeterminate",
    OUT_OF_DOMAIN: "OutOfDomain",
}
# 8-bit gray level written to PGM for each cell code
GRAY_LEVELS = np.array([0, 255, 128, 200], dtype=np.uint8)

ROOT_POLICIES = ("plus", "minus", "both")
_ROOT_CODE = {"plus": 0, "minus": 1, "both": 2}


@dataclass(frozen=True)
class SliceSpec:
    trA: float
    center: complex
    width: float
    resolution: int = 256
    budget: OracleBudget = field(default_factory=OracleBudget)
    root_policy: str = "plus"

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "trA", float(self.trA))
        if not self.trA >= 2:
            raise ValueError("trA must be >= 2 (2 is the Maskit limit)")
        if not self.width > 0:
            raise ValueError("width must be positive")
        if not 16 <= self.resolution <= 16384:
            raise ValueError("resolution must lie in [16, 16384]")
        if self.root_policy not in ROOT_POLICIES:
            raise ValueError(f"root_policy must be one of {ROOT_POLICIES}")

    @property
    def pixel_size(self) -> float:
        return self.width / self.resolution

    def pixel_center(self, row: int, col: int) -> complex:
        """Tr B at the centre of a cell; row 0 is the top (largest Im)."""
        n, h = self.resolution, self.pixel_size
        re = self.center.real + (col + 0.5 - n / 2) * h
        im = self.center.imag + (n / 2 - row - 0.5) * h
        return complex(re, im)

    def to_pixel(self, trB: complex) -> tuple[int, int]:
        n, h = self.resolution, self.pixel_size
        col = math.floor((trB.real - self.center.real) / h + n / 2)
        row = math.floor(n / 2 - (trB.imag - self.center.imag) / h)
        return row, col

    def in_window(self, trB: complex) -> bool:
        row, col = self.to_pixel(trB)
        return 0 <= row < self.resolution and 0 <= col < self.resolution

    def as_dict(self) -> dict:
        out = asdict(self)
        out["center"] = [self.center.real, self.center.imag]
        out["length"] = 2 * math.acosh(self.trA / 2)
        return out

    @classmethod
    def from_dict(cls, d: dict) -> SliceSpec:
        return cls(
            trA=d["trA"],
            center=complex(*d["center"]),
            width=d["width"],
            resolution=d["resolution"],
            budget=OracleBudget(**d["budget"]),
            root_policy=d["root_policy"],
        )


@dataclass
class PixelGrid:
    spec: SliceSpec
    cells: np.ndarray
    component_labels: np.ndarray | None = None

    def gray(self) -> np.ndarray:
        return GRAY_LEVELS[self.cells]

    def counts(self) -> dict[str, int]:
        return {CELL_NAMES[k]: int((self.cells == k).sum()) for k in CELL_NAMES}


@dataclass(frozen=True)
class ComponentReport:
    label: int
    pixel_count: int
    bbox: tuple[int, int, int, int]  # row0, col0, row1, col1 (inclusive)
    centroid: complex
    is_standard: bool
    euler_characteristic: int

    def as_dict(self) -> dict:
        return {
            "label": int(self.label),
            "pixels": int(self.pixel_count),
            "bbox": [int(v) for v in self.bbox],
            "centroid_re": float(self.centroid.real),
            "centroid_im": float(self.centroid.imag),
            "standard": bool(self.is_standard),
            "euler": int(self.euler_characteristic),
        }


# ---------------------------------------------------------------------------
# per-row kernel


@njit(cache=True)
def _third_traces(x, y):
    s = x * y
    disc = np.sqrt(s * s - 4.0 * (x * x + y * y))
    z1 = (s + disc) / 2.0
    z2 = (s - disc) / 2.0
    if abs(z1) < abs(z2):
        z1, z2 = z2, z1
    if z1 != 0:
        z2 = (x * x + y * y) / z1
    return z1, z2


@njit(cache=True)
def _render_row(x, re0, h, im, n, root_code, max_depth, grow, stop, eps, max_nodes, out):
    for j in range(n):
        re = re0 + (j + 0.5) * h
        if re <= 0.0:
            out[j] = OUT_OF_DOMAIN
            continue
        y = complex(re, im)
        zp, zm = _third_traces(x, y)
        if root_code == 1:
            tag = dsc._search(x, y, zm, max_depth, grow, stop, eps, max_nodes)[0]
        else:
            tag = dsc._search(x, y, zp, max_depth, grow, stop, eps, max_nodes)[0]
            if root_code == 2 and tag != dsc.INDISCRETE:
                tag2 = dsc._search(x, y, zm, max_depth, grow, stop, eps, max_nodes)[0]
                if tag2 == dsc.INDISCRETE:
                    tag = dsc.INDISCRETE
                elif tag2 == dsc.INDETERMINATE:
                    tag = dsc.INDETERMINATE
        if tag == dsc.DISCRETE:
            out[j] = DISCRETE_LIKELY
        elif tag == dsc.INDISCRETE:
            out[j] = INDISCRETE
        else:
            out[j] = INDETERMINATE


def _render_rows(spec: SliceSpec, rows: range) -> np.ndarray:
    n, h = spec.resolution, spec.pixel_size
    b = spec.budget
    out = np.empty((len(rows), n), dtype=np.uint8)
    re0 = spec.center.real - (n / 2) * h
    x = complex(spec.trA)
    for k, i in enumerate(rows):
        im = spec.center.imag + (n / 2 - i - 0.5) * h
        _render_row(x, re0, h, im, n, _ROOT_CODE[spec.root_policy], b.max_depth,
                    b.grow_threshold, b.stop_magnitude, b.eps_real, b.max_nodes, out[k])
    return out


def _render_chunk(args):
    spec, start, stop = args
    return start, _render_rows(spec, range(start, stop))


def worker_count() -> int:
    env = os.environ.get("QFSLICE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def render(spec: SliceSpec, workers: int | None = None) -> PixelGrid:
    """Classify every pixel of the window; rows are split across processes."""
    workers = workers or worker_count()
    n = spec.resolution
    cells = np.empty((n, n), dtype=np.uint8)
    if workers <= 1:
        cells[:] = _render_rows(spec, range(n))
        return PixelGrid(spec, cells)
    chunk = max(1, n // (workers * 8))
    jobs = [(spec, s, min(n, s + chunk)) for s in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for start, block in pool.map(_render_chunk, jobs):
            cells[start:start + block.shape[0]] = block
    return PixelGrid(spec, cells)


def classify_point(spec: SliceSpec, trB: complex) -> int:
    """Cell code for a single Tr B value under the slice's oracle settings."""
    trB = complex(trB)
    if trB.real <= 0:
        return OUT_OF_DOMAIN
    b = spec.budget
    out = np.empty(1, dtype=np.uint8)
    # reuse the row kernel with a one-pixel row centred on trB
    _render_row(complex(spec.trA), trB.real - 0.5, 1.0, trB.imag, 1, _ROOT_CODE[spec.root_policy],
                b.max_depth, b.grow_threshold, b.stop_magnitude, b.eps_real, b.max_nodes, out)
    return int(out[0])


# ---------------------------------------------------------------------------
# components

_FOUR = ndimage.generate_binary_structure(2, 1)
_EIGHT = ndimage.generate_binary_structure(2, 2)


def _euler(mask: np.ndarray) -> int:
    """1 - number of holes for a single 4-connected component."""
    padded = np.pad(mask, 1)
    holes = ndimage.binary_fill_holes(padded, structure=_FOUR) & ~padded
    _, nholes = ndimage.label(holes, structure=_EIGHT)
    return 1 - nholes


def flood_components(grid: PixelGrid) -> list[ComponentReport]:
    """4-connected components of DiscreteLikely cells, largest first.

    The component holding a real-axis pixel with Re Tr B > 2 is the standard
    one and gets label 1; the rest are numbered 2, 3, ... by size.
    """
    spec = grid.spec
    mask = grid.cells == DISCRETE_LIKELY
    raw, count = ndimage.label(mask, structure=_FOUR)
    labels = np.zeros_like(raw, dtype=np.int32)
    grid.component_labels = labels
    if count == 0:
        return []

    n, h = spec.resolution, spec.pixel_size
    standard_raw = 0
    for row in range(n):
        im = spec.center.imag + (n / 2 - row - 0.5) * h
        if abs(im) >= h:
            continue
        for col in range(n):
            c = spec.pixel_center(row, col)
            if c.real > 2 and raw[row, col]:
                standard_raw = raw[row, col]
                break
        if standard_raw:
            break

    sizes = ndimage.sum_labels(mask, raw, index=np.arange(1, count + 1)).astype(int)
    order = sorted(range(1, count + 1), key=lambda k: (-sizes[k - 1], k))
    if standard_raw:
        order.remove(standard_raw)
        order.insert(0, standard_raw)
    next_label = 1 if standard_raw else 2

    slices = ndimage.find_objects(raw)
    reports = []
    for k in order:
        label = next_label
        next_label += 1
        sl = slices[k - 1]
        sub = raw[sl] == k
        labels[sl][sub] = label
        rows, cols = np.nonzero(sub)
        rows = rows + sl[0].start
        cols = cols + sl[1].start
        re = spec.center.real + (cols.mean() + 0.5 - n / 2) * h
        im = spec.center.imag + (n / 2 - rows.mean() - 0.5) * h
        reports.append(ComponentReport(
            label=label,
            pixel_count=int(sizes[k - 1]),
            bbox=(sl[0].start, sl[1].start, sl[0].stop - 1, sl[1].stop - 1),
            centroid=complex(re, im),
            is_standard=(k == standard_raw),
            euler_characteristic=_euler(sub),
        ))
    reports.sort(key=lambda r: (not r.is_standard, -r.pixel_count, r.label))
    return reports


# ---------------------------------------------------------------------------
# symmetry and Dehn twist diagnostics


@dataclass
class TwistReport:
    n: int
    samples: int
    checked: int
    consistent: int
    discrepancies: list[dict]
    unresolved: int

    @property
    def discrepancy_rate(self) -> float:
        return len(self.discrepancies) / self.checked if self.checked else 0.0

    def as_dict(self) -> dict:
        out = asdict(self)
        out["discrepancy_rate"] = self.discrepancy_rate
        return out


def pixel_root(spec: SliceSpec, trB: complex) -> complex:
    zp, zm = markov_third_trace(spec.trA, trB)
    return zm if spec.root_policy == "minus" else zp


def dehn_twist_spot_check(grid: PixelGrid, samples: int, n: int,
                          seed: int = 0, max_magnitude: float = 1e12) -> TwistReport:
    """Re-run the oracle at (Tr A, Tr A^n B, Tr A^(n+1) B) for random discrete pixels.

    Twisted triples whose traces exceed ``max_magnitude`` are counted as
    unresolved rather than checked.
    """
    spec = grid.spec
    rows, cols = np.nonzero(grid.cells == DISCRETE_LIKELY)
    rng = random.Random(seed)
    picks = rng.sample(range(len(rows)), min(samples, len(rows)))
    x = complex(spec.trA)
    checked = consistent = unresolved = 0
    bad = []
    for k in picks:
        y = spec.pixel_center(int(rows[k]), int(cols[k]))
        z = pixel_root(spec, y)
        yn = trace_AnB(n, x, y, z)
        zn = trace_AnB(n + 1, x, y, z)
        if max(abs(yn), abs(zn)) > max_magnitude:
            unresolved += 1
            continue
        checked += 1
        verdict = bq_search(TraceTriple(x, yn, zn), spec.budget)
        if verdict.tag is Tag.DISCRETE_LIKELY:
            consistent += 1
        else:
            bad.append({"trB": [y.real, y.imag], "tag": verdict.tag.value})
    return TwistReport(n, samples, checked, consistent, bad, unresolved)


def conjugation_mismatches(grid: PixelGrid) -> tuple[int, int]:
    """(pairs compared, mismatches) between each pixel and its mirror in Im Tr B."""
    spec = grid.spec
    n, h = spec.resolution, spec.pixel_size
    pairs = mismatches = 0
    for row in range(n):
        im = spec.center.imag + (n / 2 - row - 0.5) * h
        mirror = round(n / 2 - (-im - spec.center.imag) / h - 0.5)
        if not 0 <= mirror < n or mirror <= row:
            continue
        pairs += n
        mismatches += int((grid.cells[row] != grid.cells[mirror]).sum())
    return pairs, mismatches


def real_axis_samples(spec: SliceSpec, lo: float, hi: float) -> list[tuple[int, int]]:
    """Pixels whose cell contains the real axis with centre Re in (lo, hi)."""
    n, h = spec.resolution, spec.pixel_size
    out = []
    for row in range(n):
        im = spec.center.imag + (n / 2 - row - 0.5) * h
        if abs(im) > h / 2:
            continue
        for col in range(n):
            re = spec.center.real + (col + 0.5 - n / 2) * h
            if lo < re < hi:
                out.append((row, col))
    return out
