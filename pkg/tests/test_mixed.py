import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vallab.errors import InputError
from vallab.geometry import Polytope, ball_polytope, box, minkowski_sum, translate, unit_cube, volume
from vallab.mixed import (MixedVolumeRequest, box_mixed_volume_oracle, intrinsic_volume_functional,
                          intrinsic_volumes, kappa, lefschetz_derivative, mixed_volume, mu_ball)

edge = st.floats(0.1, 3.0)


def rand_hull(rng, n):
    return Polytope(rng.standard_normal((n + 4, n)))


def test_square_with_itself():
    assert mixed_volume([unit_cube(2)] * 2) == pytest.approx(1.0, rel=1e-12)


def test_square_and_rectangle():
    assert mixed_volume([unit_cube(2), box([2, 3])]) == pytest.approx(2.5, rel=1e-12)


@pytest.mark.parametrize("edges,want", [([[1, 1], [2, 3]], 5 / 2),
                                        (np.eye(3), 1 / 6),
                                        ([[1, 1, 1], [2, 1, 1], [1, 1, 2]], 11 / 6)])
def test_oracle_hand_values(edges, want):
    assert box_mixed_volume_oracle(edges) == pytest.approx(want, rel=1e-14)


def test_oracle_rejects_negative():
    with pytest.raises(InputError):
        box_mixed_volume_oracle([[1, -1], [1, 1]])


@given(st.integers(2, 4).flatmap(lambda n: st.lists(st.lists(edge, min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_fit_matches_permanent(rows):
    got = mixed_volume([box(r) for r in rows])
    assert got == pytest.approx(box_mixed_volume_oracle(rows), rel=1e-7)


def test_request_validation():
    with pytest.raises(InputError):
        MixedVolumeRequest((unit_cube(2),))
    with pytest.raises(InputError):
        MixedVolumeRequest((unit_cube(2), unit_cube(3)))
    with pytest.raises(InputError):
        MixedVolumeRequest((unit_cube(2), unit_cube(2)), fit_grid=2)
    with pytest.raises(InputError):
        mixed_volume([Polytope([[0, 0], [1, 0]]), Polytope([[0, 0], [2, 0]])])


def test_ball_placeholder_resolves():
    req = MixedVolumeRequest((unit_cube(2), "ball"), ball_resolution=256)
    # V(K, D~) = half the perimeter weighted by the polygon support: close to 2
    assert mixed_volume(req) == pytest.approx(2.0, rel=1e-3)


def test_segments():
    a = Polytope([[0, 0], [1, 0]])
    b = Polytope([[0, 0], [0, 1]])
    assert mixed_volume([a, b]) == pytest.approx(0.5, rel=1e-12)


def test_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(100):
        K = [rand_hull(rng, 3) for _ in range(3)]
        base = mixed_volume(K)
        for p in permutations(range(3)):
            assert mixed_volume([K[i] for i in p]) == pytest.approx(base, rel=1e-9)


def test_multilinearity_on_boxes():
    rng = np.random.default_rng(4)
    for _ in range(20):
        a, a2, b, c = (box(rng.uniform(0.2, 2, 3)) for _ in range(4))
        lhs = mixed_volume([minkowski_sum(a, a2), b, c])
        assert lhs == pytest.approx(mixed_volume([a, b, c]) + mixed_volume([a2, b, c]), rel=1e-6)


def test_multilinearity_general_bodies():
    rng = np.random.default_rng(5)
    a, a2, b = (rand_hull(rng, 2) for _ in range(3))
    lhs = mixed_volume([minkowski_sum(a, a2), b])
    assert lhs == pytest.approx(mixed_volume([a, b]) + mixed_volume([a2, b]), rel=1e-8)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_diagonal_is_volume(n):
    K = rand_hull(np.random.default_rng(n), n)
    assert mixed_volume([K] * n) == pytest.approx(K.volume, rel=1e-7)


def test_positivity_and_translation():
    rng = np.random.default_rng(6)
    for _ in range(20):
        K = [rand_hull(rng, 3) for _ in range(3)]
        v = mixed_volume(K)
        assert v > 0
        moved = [K[0], translate(K[1], rng.standard_normal(3)), K[2]]
        assert mixed_volume(moved) == pytest.approx(v, rel=1e-9)


@pytest.mark.parametrize("n", [4, 5])
def test_random_design_for_many_distinct_bodies(n):
    rows = np.random.default_rng(n).uniform(0.3, 2, (n, n))
    assert mixed_volume([box(r) for r in rows]) == pytest.approx(box_mixed_volume_oracle(rows), rel=1e-7)


def test_intrinsic_unit_square():
    mu = intrinsic_volumes(unit_cube(2)).mu
    np.testing.assert_allclose(mu, [1, 2, 1], rtol=1e-4)


def test_intrinsic_unit_cube():
    mu = intrinsic_volumes(unit_cube(3)).mu
    np.testing.assert_allclose(mu, [1, 3, 3, 1], rtol=2e-3)


def test_intrinsic_invariants():
    rng = np.random.default_rng(8)
    for n in (2, 3):
        for _ in range(5):
            st_ = intrinsic_volumes(rand_hull(rng, n))
            assert st_.mu[0] == pytest.approx(1.0, abs=1e-6)
            assert min(st_.mu) >= -1e-9
            assert st_.mu[n] == pytest.approx(st_.mu[n], rel=1e-12)


def test_intrinsic_rejects_flat_body():
    with pytest.raises(InputError):
        intrinsic_volumes(Polytope([[0, 0], [1, 1]]))


def test_mu_ball_values():
    assert mu_ball(2, 1) == pytest.approx(math.pi)
    for n in range(1, 7):
        assert mu_ball(n, 0) == 1.0
        assert mu_ball(n, n) == pytest.approx(kappa(n))
    with pytest.raises(InputError):
        mu_ball(3, 4)


@pytest.mark.parametrize("n", [2, 3])
def test_mu_ball_against_polytopal_ball(n):
    mu = intrinsic_volumes(ball_polytope(n, 1.0, 2048)).mu
    for k in range(n + 1):
        # inscribed polytope: volume deficit of a few 1e-3 at this resolution
        assert mu[k] == pytest.approx(mu_ball(n, k), rel=5e-3)


def test_lefschetz_of_volume_is_half_surface():
    assert lefschetz_derivative(volume, unit_cube(3), ball_resolution=128) == pytest.approx(3.0, rel=0.02)


def test_lefschetz_of_constant_is_zero():
    assert lefschetz_derivative(lambda K: 7.0, unit_cube(2)) == 0.0


def test_lefschetz_rejects_bad_step():
    with pytest.raises(InputError):
        lefschetz_derivative(volume, unit_cube(2), h=0)


def test_lefschetz_ratio_constant_in_plane():
    rng = np.random.default_rng(9)
    phi = intrinsic_volume_functional(2)
    r = [lefschetz_derivative(phi, K) / intrinsic_volume_functional(1)(K)
         for K in (rand_hull(rng, 2) for _ in range(5))]
    assert np.ptp(r) / np.mean(r) < 0.02
