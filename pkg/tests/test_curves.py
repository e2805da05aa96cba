import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import writhe_lab as W
from writhe_lab.curves import make_random_planar_polygon, random_rotation
from writhe_lab.errors import (DegenerateEdgeError, DisjointnessError,
                               InvalidParameterError)

ORIGIN = (0.0, 0.0, 0.0)
Z = (0.0, 0.0, 1.0)


def test_square_vertices():
    sq = W.make_circle(ORIGIN, Z, 1.0, 4)
    expected = [[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, -1, 0]]
    np.testing.assert_allclose(sq.vertices, expected, atol=1e-15)


def test_triangle_edge_length():
    tri = W.make_circle(ORIGIN, Z, 1.0, 3)
    np.testing.assert_allclose(tri.edge_lengths, math.sqrt(3.0), rtol=1e-15)


def test_circle_writhe_is_exactly_zero():
    assert W.writhe(W.make_circle(ORIGIN, Z, 1.0, 64)) == 0.0


@pytest.mark.parametrize("args", [(ORIGIN, Z, 0.0, 8), (ORIGIN, Z, 1.0, 2),
                                  (ORIGIN, (0, 0, 2.0), 1.0, 8)])
def test_circle_rejects_bad_parameters(args):
    with pytest.raises(InvalidParameterError):
        W.make_circle(*args)


@pytest.mark.parametrize("args", [(1, 0, 2.0, 0.5, 64), (2, 4, 2.0, 0.5, 64),
                                  (2, 3, 0.5, 2.0, 64), (2, 3, 2.0, 0.5, 2)])
def test_torus_knot_rejects_bad_parameters(args):
    with pytest.raises(InvalidParameterError):
        W.make_torus_knot(*args)


def test_torus_knot_lies_on_torus():
    c = W.make_torus_knot(2, 3, 2.0, 0.5, 512)
    rho = np.hypot(c.vertices[:, 0], c.vertices[:, 1])
    np.testing.assert_allclose((rho - 2.0) ** 2 + c.vertices[:, 2] ** 2,
                               0.25, rtol=1e-12)


def test_torus_link_has_gcd_components():
    link = W.make_torus_link(2, 4, 2.0, 0.5, 128)
    assert len(link) == 2
    assert all(c.n == 128 for c in link)


def test_hopf_link_is_positive():
    a, b = W.make_hopf_link(1.0, 1.0, 64)
    assert W.linking_number_gauss(a, b) == pytest.approx(1.0, abs=1e-6)


def test_separated_circles_unlinked():
    a, b = W.make_hopf_link(3.0, 1.0, 64)
    assert W.linking_number_gauss(a, b) == pytest.approx(0.0, abs=1e-9)


def test_random_polygon_is_deterministic():
    a = W.make_random_closed_polygon(50, 9)
    b = W.make_random_closed_polygon(50, 9)
    assert np.array_equal(a.vertices, b.vertices)
    c = W.make_random_closed_polygon(50, 10)
    assert not np.array_equal(a.vertices, c.vertices)


@pytest.mark.parametrize("seed", range(5))
def test_random_triangle_has_zero_writhe(seed):
    assert W.writhe(W.make_random_closed_polygon(3, seed)) == 0.0


def test_zero_length_edge_rejected():
    with pytest.raises(DegenerateEdgeError):
        W.PolygonalCurve([[0, 0, 0], [1, 0, 0], [1, 0, 0], [0, 1, 0]])


def test_nonfinite_vertex_rejected():
    with pytest.raises(InvalidParameterError):
        W.PolygonalCurve([[0, 0, 0], [1, 0, np.nan], [0, 1, 0]])


def test_vertices_are_read_only():
    c = W.make_circle(ORIGIN, Z, 1.0, 8)
    with pytest.raises(ValueError):
        c.vertices[0, 0] = 5.0


def test_curve_system_rejects_touching_components():
    a = W.PolygonalCurve([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]])
    b = W.PolygonalCurve([[1, 1, 0], [2, 1, 0], [2, 2, 0], [1, 2, 0]])
    with pytest.raises(DisjointnessError):
        W.CurveSystem((a, b))


def test_translate_by_zero_is_identity():
    c = W.make_random_closed_polygon(20, 1)
    assert W.translate(c, np.zeros(3)) == c


def test_translation_keeps_writhe():
    c = W.make_random_closed_polygon(40, 2)
    moved = W.translate(c, (3.5, -1e3, 0.25))
    assert W.writhe(moved) == pytest.approx(W.writhe(c), abs=1e-11)


def test_translation_keeps_linking():
    a, b = W.make_hopf_link(1.0, 1.0, 64)
    b2 = W.translate(b, (0.0, 0.0, 0.3))
    assert W.linking_number_gauss(a, b2) == pytest.approx(1.0, abs=1e-6)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31), n=st.integers(4, 40))
def test_rigid_motion_invariance(seed, n):
    c = W.make_random_closed_polygon(n, seed)
    R = random_rotation(seed + 1)
    moved = W.translate(W.rotate(c, R), (1.0, -2.0, 0.5))
    assert W.writhe(moved) == pytest.approx(W.writhe(c), abs=1e-11)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 31), n=st.integers(4, 40))
def test_reversal_keeps_writhe(seed, n):
    c = W.make_random_closed_polygon(n, seed)
    assert W.writhe(c.reversed()) == pytest.approx(W.writhe(c), abs=1e-12)


def test_rotate_rejects_reflection():
    c = W.make_circle(ORIGIN, Z, 1.0, 8)
    with pytest.raises(InvalidParameterError):
        W.rotate(c, np.diag([1.0, 1.0, -1.0]))


def test_resample_square_is_fixed_point():
    sq = W.make_circle(ORIGIN, Z, 1.0, 4)
    np.testing.assert_allclose(W.resample(sq, 4).vertices, sq.vertices,
                               atol=1e-15)


def test_resample_rejects_two_vertices():
    with pytest.raises(InvalidParameterError):
        W.resample(W.make_circle(ORIGIN, Z, 1.0, 8), 2)


def test_resample_refinement_changes_writhe_little():
    tk = W.make_torus_knot(2, 3, 2.0, 0.5, 512)
    w512 = W.writhe(tk)
    w1024 = W.writhe(W.resample(tk, 1024))
    # Recorded values: -3.126811934885546 and -3.1268118862029914.
    assert w512 == pytest.approx(-3.126811934885546, abs=1e-12)
    assert abs(w1024 - w512) < 1e-6


def test_planar_polygon_lies_in_plane():
    n = (1.0, 2.0, 2.0)
    p = make_random_planar_polygon(30, 4, np.array(n) / 3.0)
    heights = p.vertices @ (np.array(n) / 3.0)
    assert np.ptp(heights) < 1e-12


def test_parallel_transport_on_circle_is_constant():
    c = W.make_circle(ORIGIN, Z, 1.0, 64)
    r = W.parallel_transport_frame(c, (0.0, 0.0, 1.0))
    np.testing.assert_allclose(r.framing, np.tile([0, 0, 1.0], (64, 1)),
                               atol=1e-14)
    assert r.holonomy == pytest.approx(0.0, abs=1e-14)
    assert W.twist(r) == pytest.approx(0.0, abs=1e-14)


def test_parallel_transport_twist_is_holonomy():
    tk = W.make_torus_knot(2, 3, 2.0, 0.5, 256)
    t0 = tk.vertex_tangents()[0]
    v0 = np.cross(t0, [0.0, 0.0, 1.0])
    r = W.parallel_transport_frame(tk, v0 / np.linalg.norm(v0))
    assert W.twist(r) == pytest.approx(r.holonomy / (2 * math.pi), abs=1e-12)
    # Tw = T + N with N defined as the remainder.
    assert W.intrinsic_twist(r) == pytest.approx(
        r.holonomy / (2 * math.pi) - W.total_torsion(tk), abs=1e-12)


def test_parallel_transport_rejects_tangent_start():
    c = W.make_circle(ORIGIN, Z, 1.0, 16)
    with pytest.raises(InvalidParameterError):
        W.parallel_transport_frame(c, c.vertex_tangents()[0])


@pytest.mark.parametrize("k", [-2, 0, 1, 3])
def test_uniform_twist_on_circle(k):
    c = W.make_circle(ORIGIN, Z, 1.0, 64)
    r = W.uniform_twist_ribbon(c, (0.0, 0.0, 1.0), k)
    assert W.twist(r) == pytest.approx(k, abs=1e-12)


@pytest.mark.parametrize("k", [-1, 0, 2])
def test_uniform_twist_keeps_holonomy(k):
    tk = W.make_torus_knot(2, 3, 2.0, 0.5, 256)
    v0 = np.cross(tk.vertex_tangents()[0], [0.0, 0.0, 1.0])
    v0 /= np.linalg.norm(v0)
    hol = W.parallel_transport_frame(tk, v0).holonomy
    r = W.uniform_twist_ribbon(tk, v0, k)
    assert W.twist(r) == pytest.approx(k + hol / (2 * math.pi), abs=1e-12)


def test_ribbon_rejects_non_orthogonal_framing():
    c = W.make_circle(ORIGIN, Z, 1.0, 8)
    with pytest.raises(InvalidParameterError):
        W.Ribbon(c, np.tile([1.0, 0.0, 0.0], (8, 1)))


def test_subdivision_keeps_twist():
    c = W.make_circle(ORIGIN, Z, 1.0, 12)
    up = np.tile([0.0, 0.0, 1.0], (12, 1))
    turns = np.zeros(12, dtype=int)
    turns[3] = 2
    r = W.Ribbon(c, up, turns)
    fine = r.subdivided(8)
    assert fine.curve.n == 96
    assert not fine.turns.any()
    assert W.twist(fine) == pytest.approx(2.0, abs=1e-12)


def test_flux_must_be_positive():
    r = W.parallel_transport_frame(W.make_circle(ORIGIN, Z, 1.0, 8), Z)
    with pytest.raises(InvalidParameterError):
        W.FluxTube(r, 0.0)
