"""Analytic oracles and sampler behaviour for the Biot-Savart solver."""
import math

import numpy as np
import pytest

import motkit as mk
from motkit.errors import EmptySample, InvalidInput, SingularPoint


def test_loop_center_matches_analytic():
    r, current, n = 0.025, 1.0, 1000
    loop = mk.make_loop((0, 0, 0), r, (0, 0, 1), current, n)
    b = mk.field_at(loop, np.zeros(3))
    expected = mk.MU_0 * current / (2.0 * r)
    assert abs(b[2] - expected) / expected < 1e-3
    assert abs(b[0]) < 1e-12 * expected and abs(b[1]) < 1e-12 * expected


def test_loop_polygon_converges_from_above():
    # an inscribed n-gon slightly overshoots the circular-loop field by
    # the known tan(pi/n)/(pi/n) factor
    r, current = 0.025, 1.0
    circular = mk.MU_0 * current / (2.0 * r)
    for n in (16, 64, 256):
        loop = mk.make_loop((0, 0, 0), r, (0, 0, 1), current, n)
        bz = mk.field_at(loop, np.zeros(3))[2]
        factor = math.tan(math.pi / n) / (math.pi / n)
        assert bz == pytest.approx(circular * factor, rel=1e-12)


def test_long_wire_matches_analytic():
    wire = mk.make_free_path([(0, 0, -10.0), (0, 0, 10.0)], 1.0)
    d = 0.010
    b = mk.field_at(wire, np.array([d, 0.0, 0.0]))
    expected = mk.MU_0 * 1.0 / (2.0 * math.pi * d)
    assert abs(np.linalg.norm(b) - expected) / expected < 1e-6
    # right-hand rule: current along +z, field at +x points along +y
    assert b[1] > 0 and abs(b[0]) < 1e-20 and abs(b[2]) < 1e-20


def test_collinear_extension_is_exactly_zero():
    seg = mk.Segment(np.array([0.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), 2.0)
    b = mk.segment_field(seg, np.array([0.0, 0.0, 2.5]))
    assert np.all(b == 0.0)
    b = mk.segment_field(seg, np.array([0.0, 0.0, -1.0]))
    assert np.all(b == 0.0)


def test_point_on_segment_raises_singular():
    segs = mk.make_free_path([(0, 0, 0), (1, 0, 0)], 1.0)
    with pytest.raises(SingularPoint) as err:
        mk.field_at(segs, np.array([0.5, 0.0, 0.0]))
    assert err.value.segment_index == 0


def test_superposition_and_current_linearity():
    a = mk.make_free_path([(0, 0, -1), (0, 0, 1)], 2.0, group_id="a")
    b = mk.make_free_path([(0, 1, -1), (0, 1, 1)], -1.0, group_id="b")
    p = np.array([0.05, 0.3, 0.01])
    combined = mk.field_at(a + b, p)
    assert combined == pytest.approx(mk.field_at(a, p) + mk.field_at(b, p),
                                     rel=1e-12)
    doubled = mk.field_at(a.with_currents_scaled(2.0), p)
    assert doubled == pytest.approx(2.0 * mk.field_at(a, p), rel=1e-15)


def test_opposite_currents_cancel_exactly():
    a = mk.make_free_path([(0, 0, -1), (0, 0, 1)], 1.5, group_id="a")
    b = mk.make_free_path([(0, 0, -1), (0, 0, 1)], -1.5, group_id="b")
    p = np.array([0.02, -0.01, 0.3])
    assert np.all(mk.field_at(a + b, p) == 0.0)


def test_sample_line_positions_and_shape():
    segs = mk.make_anti_helmholtz(0.05, 0.05, 100.0, 60)
    fmap = mk.sample_line(segs, (0, 0, 0), (0, 0, 2.0), 0.004, 9)
    assert fmap.shape == (9,)
    assert fmap.positions.shape == (9, 3)
    assert fmap.positions[0] == pytest.approx([0, 0, -0.004])
    assert fmap.positions[-1] == pytest.approx([0, 0, 0.004])
    # anti-Helmholtz axis: Bz odd in z
    assert fmap.B[0, 2] == pytest.approx(-fmap.B[-1, 2], rel=1e-9)


def test_sample_plane_row_major_order():
    segs = mk.make_free_path([(0, 0, -5), (0, 0, 5)], 1.0)
    fmap = mk.sample_plane(segs, (0.1, 0, 0), (1, 0, 0), (0, 1, 0),
                           0.01, 3, 2)
    assert fmap.shape == (3, 2)
    # row-major: the second axis varies fastest
    assert fmap.positions[0] == pytest.approx([0.09, -0.01, 0.0])
    assert fmap.positions[1] == pytest.approx([0.09, 0.01, 0.0])
    assert fmap.positions[2] == pytest.approx([0.10, -0.01, 0.0])


def test_singular_samples_become_nan_gaps():
    segs = mk.make_free_path([(0, 0, -1), (0, 0, 1)], 1.0)
    fmap = mk.sample_line(segs, (0, 0, 0), (1, 0, 0), 0.01, 5)
    assert np.all(np.isnan(fmap.B[2]))          # the on-axis sample
    assert np.all(np.isfinite(fmap.B[[0, 1, 3, 4]]))
    assert np.isnan(fmap.magnitude[2])


def test_all_singular_raises_empty_sample():
    segs = mk.make_free_path([(0, 0, -1), (0, 0, 1)], 1.0)
    with pytest.raises(EmptySample):
        mk.sample_line(segs, (0, 0, 0), (0, 0, 1.0), 0.5, 11)


def test_thread_count_does_not_change_results():
    segs = mk.make_anti_helmholtz(0.05, 0.05, 100.0, 90)
    serial = mk.sample_plane(segs, (0, 0, 0), (1, 0, 0), (0, 0, 1), 0.004, 7, 7,
                             threads=1)
    threaded = mk.sample_plane(segs, (0, 0, 0), (1, 0, 0), (0, 0, 1), 0.004, 7, 7,
                               threads=4)
    assert np.array_equal(serial.B, threaded.B)
    assert mk.field_map_csv(serial) == mk.field_map_csv(threaded)


def test_csv_header_and_rows():
    segs = mk.make_free_path([(0, 0, -1), (0, 0, 1)], 1.0)
    fmap = mk.sample_line(segs, (0.01, 0, 0), (0, 0, 1), 0.005, 4)
    text = mk.field_map_csv(fmap)
    lines = text.strip().split("\n")
    assert lines[0] == "x_m,y_m,z_m,Bx_T,By_T,Bz_T,Bmag_G"
    assert len(lines) == 5
    first = lines[1].split(",")
    assert len(first) == 7
    assert float(first[0]) == pytest.approx(0.01)


def test_direction_must_be_nonzero():
    segs = mk.make_free_path([(0, 0, -1), (0, 0, 1)], 1.0)
    with pytest.raises(InvalidInput):
        mk.sample_line(segs, (0, 0, 0), (0, 0, 0), 0.01, 5)


def test_field_point_must_be_vector():
    segs = mk.make_free_path([(0, 0, -1), (0, 0, 1)], 1.0)
    with pytest.raises(InvalidInput):
        mk.field_at(segs, np.zeros((2, 3)))
