import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import special_ortho_group

from vallab.errors import InputError
from vallab.geometry import (Polytope, ball_polytope, box, dumps_polytope, loads_polytope,
                             minkowski_sum, point, project, reflect, scale, standard_simplex,
                             surface_area_measure, translate, unit_cube, volume)


def random_hull(rng, n, m=None):
    return Polytope(rng.standard_normal((m or 2 * n + 3, n)))


coords = st.floats(-10, 10, allow_nan=False, width=64)


def point_clouds(n):
    return arrays(np.float64, st.tuples(st.integers(n + 1, 12), st.just(n)), elements=coords)


# --- oracles: hand-computed values ---------------------------------------

def test_square_plus_origin_is_square():
    assert minkowski_sum(unit_cube(2), point(2)) == unit_cube(2)


def test_square_plus_square():
    S = minkowski_sum(unit_cube(2), unit_cube(2))
    assert S == box([2, 2])
    assert S.volume == pytest.approx(4.0, abs=1e-12)


def test_segments_make_square():
    a = Polytope([[0, 0], [1, 0]])
    b = Polytope([[0, 0], [0, 1]])
    assert minkowski_sum(a, b) == unit_cube(2)


def test_minkowski_dimension_mismatch():
    with pytest.raises(InputError):
        minkowski_sum(unit_cube(2), unit_cube(3))


def test_scale():
    assert scale(unit_cube(3), 2) == box([2, 2, 2])
    assert scale(unit_cube(3), 1) == unit_cube(3)
    z = scale(unit_cube(3), 0)
    assert z == point(3) and z.volume == 0.0
    with pytest.raises(InputError):
        scale(unit_cube(2), -1)


def test_reflect():
    B = box([2, 2], origin=[-1, -1])
    assert reflect(B) == B
    T = Polytope([[0, 0], [1, 0], [0, 1]])
    assert reflect(T) == Polytope([[0, 0], [-1, 0], [0, -1]])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_volume_cube_and_simplex(n):
    assert volume(unit_cube(n)) == pytest.approx(1.0, rel=1e-12)
    assert volume(standard_simplex(n)) == pytest.approx(1 / math.factorial(n), rel=1e-12)


def test_lower_dimensional_volume_is_zero():
    seg = Polytope([[0, 0], [1, 1], [0.5, 0.5]])
    assert seg.volume == 0.0
    assert len(seg.vertices) == 2
    flat = Polytope([[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0], [0.5, 0.5, 0]])
    assert flat.volume == 0.0 and flat.affine_dim == 2 and len(flat.vertices) == 4


def test_canonical_vertices_are_extreme_and_deduplicated():
    P = Polytope([[0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5], [1, 1 + 1e-14]])
    assert P.vertices.shape == (4, 2)


def test_bad_inputs():
    with pytest.raises(InputError):
        Polytope(np.zeros((0, 2)))
    with pytest.raises(InputError):
        Polytope([[0, 0], [1, 0]], dim=3)
    with pytest.raises(InputError):
        Polytope([[np.nan, 0]])


def test_project_cube_onto_plane():
    E = np.eye(3)[:, :2]
    assert project(unit_cube(3), E) == unit_cube(2)
    assert project(unit_cube(3), np.eye(3)) == unit_cube(3)


def test_project_disk_onto_line(rng):
    D = ball_polytope(2, 1.0, 256)
    for _ in range(10):
        u = rng.standard_normal(2)
        seg = project(D, (u / np.linalg.norm(u))[:, None])
        assert seg.vertices[-1, 0] - seg.vertices[0, 0] == pytest.approx(2.0, abs=2e-4)


def test_project_rejects_non_orthonormal():
    with pytest.raises(InputError):
        project(unit_cube(2), np.array([[1.0], [0.1]]))


def test_hexagon():
    H = ball_polytope(2, 1.0, 6)
    assert len(H.vertices) == 6
    assert H.volume == pytest.approx(3 * math.sqrt(3) / 2, rel=1e-12)


def test_ball_resolution_64():
    assert ball_polytope(2, 1.0, 64).volume / math.pi > 0.995


def test_ball_radius_zero_and_minimum():
    assert ball_polytope(3, 0.0, 50) == point(3)
    with pytest.raises(InputError):
        ball_polytope(2, 1.0, 2)
    with pytest.raises(InputError):
        ball_polytope(4, 1.0, 7)


@pytest.mark.parametrize("n,resolutions", [(2, [8, 32, 128, 512]), (3, [50, 200, 800]),
                                           (4, [40, 80, 160])])
def test_ball_volume_increases_to_kappa(n, resolutions):
    kappa = math.pi ** (n / 2) / math.gamma(n / 2 + 1)
    vols = [ball_polytope(n, 1.0, r).volume for r in resolutions]
    assert all(a < b for a, b in zip(vols, vols[1:]))
    assert vols[-1] < kappa


def test_surface_measure_cube():
    sm = surface_area_measure(unit_cube(3))
    assert len(sm) == 6
    np.testing.assert_allclose(sm.masses, 1.0, atol=1e-12)
    expected = np.vstack([np.eye(3), -np.eye(3)])
    got = sorted(map(tuple, np.round(sm.normals, 12)))
    assert got == sorted(map(tuple, expected + 0.0))


def test_surface_measure_square():
    sm = surface_area_measure(unit_cube(2))
    assert len(sm) == 4 and sm.total_mass == pytest.approx(4.0)


def test_surface_measure_needs_full_dimension():
    with pytest.raises(InputError):
        surface_area_measure(Polytope([[0, 0], [1, 1]]))


def test_json_round_trip_exact(rng):
    P = random_hull(rng, 3)
    text = dumps_polytope(P)
    Q = loads_polytope(text)
    assert np.array_equal(P.vertices, Q.vertices)
    assert json.loads(text)["dim"] == 3


def test_json_rejects_malformed():
    with pytest.raises(InputError):
        loads_polytope('{"dim": 2, "vertices": [[0, 0, 0]]}')
    with pytest.raises(InputError):
        loads_polytope('{"vertices": [[0, 0]]}')


# --- properties --------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_brunn_minkowski(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(500):
        P = random_hull(rng, n, n + 2 + rng.integers(6))
        Q = random_hull(rng, n, n + 2 + rng.integers(6))
        lhs = minkowski_sum(P, Q).volume ** (1 / n)
        rhs = P.volume ** (1 / n) + Q.volume ** (1 / n)
        assert lhs >= rhs * (1 - 1e-9)


@given(point_clouds(3), st.integers(0, 2 ** 32 - 1))
def test_volume_rotation_invariant(pts, seed):
    P = Polytope(pts)
    R = special_ortho_group.rvs(3, random_state=seed)
    assert Polytope(pts @ R.T).volume == pytest.approx(P.volume, rel=1e-9, abs=1e-9)


@given(point_clouds(2), st.floats(0.01, 20))
def test_volume_homogeneity(pts, t):
    P = Polytope(pts)
    assert scale(P, t).volume == pytest.approx(t ** 2 * P.volume, rel=1e-9, abs=1e-9)
    assert Polytope(pts * t).volume == pytest.approx(t ** 2 * P.volume, rel=1e-9, abs=1e-9)


@given(point_clouds(3))
def test_reflect_preserves_volume(pts):
    P = Polytope(pts)
    assert reflect(P).volume == pytest.approx(P.volume, rel=1e-12, abs=1e-12)


def test_projection_monotone_under_inclusion(rng):
    for _ in range(30):
        pts = rng.standard_normal((12, 3))
        big, small = Polytope(pts), Polytope(pts[:6])
        E = np.linalg.qr(rng.standard_normal((3, 2)))[0]
        assert project(small, E).volume <= project(big, E).volume + 1e-12


def test_minkowski_relation_and_mass_scaling(rng):
    for n in (2, 3, 4):
        P = random_hull(rng, n)
        sm = surface_area_measure(P)
        np.testing.assert_allclose(np.linalg.norm(sm.normals, axis=1), 1.0, atol=1e-12)
        assert np.abs(sm.masses @ sm.normals).max() <= 1e-9 * sm.total_mass
        t = 1.7
        assert surface_area_measure(scale(P, t)).total_mass == pytest.approx(
            t ** (n - 1) * sm.total_mass, rel=1e-9)


def test_translate_keeps_volume(rng):
    P = random_hull(rng, 3)
    assert translate(P, [1, 2, 3]).volume == pytest.approx(P.volume, rel=1e-12)
