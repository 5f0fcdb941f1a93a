import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qfslice.discreteness import OracleBudget, Tag, probe
from qfslice.raster import (
    DISCRETE_LIKELY,
    GRAY_LEVELS,
    INDETERMINATE,
    INDISCRETE,
    OUT_OF_DOMAIN,
    PixelGrid,
    SliceSpec,
    classify_point,
    conjugation_mismatches,
    dehn_twist_spot_check,
    flood_components,
    real_axis_samples,
    render,
)

_TAG_CODE = {Tag.DISCRETE_LIKELY: DISCRETE_LIKELY, Tag.INDISCRETE: INDISCRETE,
             Tag.INDETERMINATE: INDETERMINATE}


def synthetic(cells, center=0j, width=None):
    n = cells.shape[0]
    spec = SliceSpec(2.5, center, width or float(n), n)
    return PixelGrid(spec, np.asarray(cells, dtype=np.uint8))


# --- window geometry ---------------------------------------------------------


def test_spec_validation():
    for kw in [dict(trA=1.9), dict(width=0), dict(resolution=8), dict(root_policy="left")]:
        args = dict(trA=2.5, center=2.5, width=6, resolution=64)
        args.update(kw)
        with pytest.raises(ValueError):
            SliceSpec(**args)


def test_pixel_orientation():
    spec = SliceSpec(2.5, 0j, 4.0, 16)
    top_left = spec.pixel_center(0, 0)
    assert top_left.real < 0 < top_left.imag
    assert spec.pixel_center(0, 0) == pytest.approx(complex(-2 + 0.125, 2 - 0.125))


@given(st.integers(0, 63), st.integers(0, 63),
       st.floats(-50, 50), st.floats(-50, 50), st.floats(0.5, 100))
def test_pixel_round_trip(row, col, cre, cim, width):
    spec = SliceSpec(3.0, complex(cre, cim), width, 64)
    c = spec.pixel_center(row, col)
    assert spec.to_pixel(c) == (row, col)
    assert spec.in_window(c)


def test_spec_dict_round_trip():
    spec = SliceSpec(8.0, 16 + 2j, 32, 128, OracleBudget(max_depth=20), "both")
    d = spec.as_dict()
    assert d["center"] == [16.0, 2.0]
    assert SliceSpec.from_dict(d) == spec


# --- rendering ---------------------------------------------------------------


def test_render_matches_per_point_oracle():
    spec = SliceSpec(2.5, 2.5 + 0j, 6.0, 32)
    grid = render(spec, workers=1)
    rng = np.random.default_rng(0)
    for row, col in rng.integers(0, 32, size=(40, 2)):
        c = spec.pixel_center(row, col)
        expected = OUT_OF_DOMAIN if c.real <= 0 else _TAG_CODE[probe(2.5, c).tag]
        assert grid.cells[row, col] == expected
        assert classify_point(spec, c) == expected


def test_render_is_deterministic_across_workers():
    spec = SliceSpec(8.0, 8 + 4j, 10.0, 48)
    a = render(spec, workers=1).cells
    b = render(spec, workers=2).cells
    c = render(spec, workers=1).cells
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_left_half_plane_is_out_of_domain():
    grid = render(SliceSpec(2.5, 0j, 4.0, 16), workers=1)
    assert (grid.cells[:, :8] == OUT_OF_DOMAIN).all()
    assert classify_point(grid.spec, -1 + 1j) == OUT_OF_DOMAIN


def test_root_policy_consistency():
    base = dict(trA=8.0, center=8 + 0j, width=16.0, resolution=64)
    plus = render(SliceSpec(**base, root_policy="plus"), workers=1).cells
    minus = render(SliceSpec(**base, root_policy="minus"), workers=1).cells
    both = render(SliceSpec(**base, root_policy="both"), workers=1).cells
    assert not ((both == DISCRETE_LIKELY) & (plus == INDISCRETE)).any()
    assert not ((both == DISCRETE_LIKELY) & (minus == INDISCRETE)).any()


def test_gray_legend():
    grid = synthetic(np.array([[0, 1], [2, 3]] * 8, dtype=np.uint8).repeat(8, axis=1))
    gray = grid.gray()
    assert set(np.unique(gray)) == {0, 128, 200, 255}
    assert list(GRAY_LEVELS) == [0, 255, 128, 200]
    assert sum(grid.counts().values()) == grid.cells.size


# --- components --------------------------------------------------------------


def test_all_indiscrete_has_no_components():
    assert flood_components(synthetic(np.full((16, 16), INDISCRETE))) == []


def test_two_squares():
    cells = np.full((16, 16), INDISCRETE)
    cells[1:4, 1:4] = DISCRETE_LIKELY
    cells[10:15, 9:14] = DISCRETE_LIKELY
    reps = flood_components(synthetic(cells))
    assert [r.pixel_count for r in reps] == [25, 9]
    assert [r.label for r in reps] == [2, 3]  # no standard component here
    assert reps[0].bbox == (10, 9, 14, 13)
    assert all(r.euler_characteristic == 1 for r in reps)


def test_diagonal_pinch_not_merged():
    cells = np.full((16, 16), INDISCRETE)
    cells[2, 2] = cells[3, 3] = DISCRETE_LIKELY
    assert len(flood_components(synthetic(cells))) == 2


def test_hole_detected():
    cells = np.full((16, 16), INDISCRETE)
    cells[2:9, 2:9] = DISCRETE_LIKELY
    cells[4:6, 4:6] = INDETERMINATE
    (rep,) = flood_components(synthetic(cells))
    assert rep.euler_characteristic == 0


def test_standard_flag_on_real_axis():
    # window [0, 8] x [-4, 4]; a band through the real axis right of 2
    cells = np.full((16, 16), INDISCRETE)
    cells[7:9, 6:] = DISCRETE_LIKELY
    cells[0:2, 0:2] = DISCRETE_LIKELY
    grid = synthetic(cells, center=4 + 0j, width=8.0)
    reps = flood_components(grid)
    assert reps[0].is_standard and reps[0].label == 1
    assert not reps[1].is_standard
    assert grid.component_labels[8, 10] == 1


def test_standard_component_trA_25(grid_25):
    reps = flood_components(grid_25)
    standard = [r for r in reps if r.is_standard]
    assert len(standard) == 1
    assert standard[0].euler_characteristic == 1
    labels = {grid_25.component_labels[rc] for rc in real_axis_samples(grid_25.spec, 2.01, 5.5)}
    assert labels == {1}


# --- symmetry and twists -----------------------------------------------------


def test_conjugation_symmetry(grid_25):
    pairs, bad = conjugation_mismatches(grid_25)
    assert pairs > 0 and bad == 0


def test_twist_zero_is_trivial(grid_25):
    rep = dehn_twist_spot_check(grid_25, 30, 0, seed=3)
    assert rep.checked == 30 and rep.discrepancies == []


def test_twist_check_small(grid_25):
    rep = dehn_twist_spot_check(grid_25, 50, 1, seed=4)
    assert rep.checked + rep.unresolved == 50
    assert rep.discrepancy_rate < 0.02
    assert rep.as_dict()["discrepancy_rate"] == rep.discrepancy_rate
