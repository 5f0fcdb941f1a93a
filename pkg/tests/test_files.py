import csv
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from qfslice import files
from qfslice.raster import GRAY_LEVELS, PixelGrid, SliceSpec, flood_components


@given(arrays(np.uint8, st.tuples(st.integers(1, 40), st.integers(1, 40))))
def test_pgm_round_trip(tmp_path_factory, gray):
    path = tmp_path_factory.mktemp("pgm") / "x.pgm"
    files.write_pgm(path, gray)
    assert np.array_equal(files.read_pgm(path), gray)


def test_pgm_header_bytes(tmp_path):
    gray = np.array([[0, 255], [128, 200]], dtype=np.uint8)
    path = files.write_pgm(tmp_path / "a.pgm", gray)
    data = path.read_bytes()
    assert data.startswith(b"P5\n2 2\n255\n")
    assert data[-4:] == bytes([0, 255, 128, 200])


def test_pgm_with_comment(tmp_path):
    path = tmp_path / "c.pgm"
    path.write_bytes(b"P5\n# made by hand\n3 1\n255\n\x00\x80\xff")
    assert files.read_pgm(path).tolist() == [[0, 128, 255]]


def test_pgm_rejects_other_formats(tmp_path):
    path = tmp_path / "p2.pgm"
    path.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(ValueError):
        files.read_pgm(path)
    path.write_bytes(b"P5\n1 1\n65535\n\x00\x00")
    with pytest.raises(ValueError):
        files.read_pgm(path)


def test_cells_from_gray():
    cells = np.array([[0, 1], [2, 3]], dtype=np.uint8)
    assert np.array_equal(files.cells_from_gray(GRAY_LEVELS[cells]), cells)
    with pytest.raises(ValueError):
        files.cells_from_gray(np.array([[7]], dtype=np.uint8))


def test_png(tmp_path):
    gray = np.arange(256, dtype=np.uint8).reshape(16, 16)
    path = files.write_png(tmp_path / "g.png", gray)
    assert np.array_equal(np.asarray(Image.open(path)), gray)


def _grid():
    cells = np.ones((16, 16), dtype=np.uint8)
    cells[6:10, 10:15] = 0
    cells[0:2, 0:2] = 0
    return PixelGrid(SliceSpec(3.0, 4 + 0j, 8.0, 16), cells)


def test_component_tables(tmp_path):
    grid = _grid()
    reps = flood_components(grid)
    j, c = files.write_components(tmp_path / "s", reps)
    rows = json.loads(j.read_text())
    assert [r["pixels"] for r in rows] == [20, 4]
    assert rows[0]["standard"] is True
    with open(c) as fh:
        table = list(csv.reader(fh))
    assert table[0] == ["label", "pixels", "bbox", "centroid_re", "centroid_im", "standard"]
    assert table[1][0] == "1" and table[1][5] == "true"
    assert float(table[1][3]) == pytest.approx(rows[0]["centroid_re"])


def test_sidecar_round_trip(tmp_path):
    grid = _grid()
    files.write_pgm(tmp_path / "s.pgm", grid.gray())
    side = files.write_sidecar(tmp_path / "s", grid, {"command": "test"})
    spec, meta = files.read_sidecar(side)
    assert spec == grid.spec
    assert meta["command"] == "test"
    assert meta["code_version"]
    assert meta["legend"] == {"DiscreteLikely": 0, "Indiscrete": 255,
                              "Indeterminate": 128, "OutOfDomain": 200}
    assert meta["oracle_defaults"]["max_depth"] == 40
    loaded = files.load_grid(tmp_path / "s.pgm")
    assert np.array_equal(loaded.cells, grid.cells) and loaded.spec == grid.spec


def test_load_grid_size_mismatch(tmp_path):
    grid = _grid()
    files.write_sidecar(tmp_path / "s", grid)
    files.write_pgm(tmp_path / "s.pgm", np.zeros((8, 8), dtype=np.uint8))
    with pytest.raises(ValueError):
        files.load_grid(tmp_path / "s.pgm")
