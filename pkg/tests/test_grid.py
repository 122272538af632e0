import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_lab.grid import (GridFunction, build_grid, bump_initial_data, check_multi_index,
                                lp_norm, multi_indices, multinomial)


def test_unit_square_counts():
    g = build_grid("rectangle", 4)
    assert g.size == 9 and g.h == 0.25
    assert build_grid("rectangle", 8).size == 49


def test_disk_matches_lattice_scan():
    g = build_grid("disk", 16, radius=1.0)
    h = 2 / 16
    count = sum(1 for i in range(-20, 21) for j in range(-20, 21) if (i * h) ** 2 + (j * h) ** 2 < 1)
    assert g.size == count
    assert np.all(np.linalg.norm(g.nodes - np.array([1.0, 1.0]), axis=1) < 1)


def test_l_shape_excludes_notch():
    g = build_grid("l_shape", 8)
    assert not np.any(np.all(g.nodes >= 0.5, axis=1))
    assert g.size == 49 - 16


@pytest.mark.parametrize("kind", ["rectangle", "disk", "l_shape"])
def test_index_map_is_bijection(kind):
    g = build_grid(kind, 10)
    assert sorted(g.index_map.values()) == list(range(g.size))
    assert np.all(g.contains(g.nodes))


def test_rectangle_with_aspect_and_interval():
    g = build_grid("rectangle", 4, sides=(1.0, 0.5))
    assert g.size == 3 * 1
    line = build_grid("rectangle", 10, sides=(1.0,))
    assert line.d == 1 and line.size == 9


@pytest.mark.parametrize("kwargs", [{"kind": "triangle", "n": 8}, {"kind": "rectangle", "n": 3},
                                    {"kind": "rectangle", "n": 4, "sides": (1.0, 0.3)}])
def test_rejects_bad_grids(kwargs):
    with pytest.raises(ValueError):
        build_grid(**kwargs)


def test_lp_norm_constants():
    n = 16
    g = build_grid("rectangle", n)
    one = g.function(np.ones(g.size))
    assert lp_norm(one, math.inf) == 1.0
    assert lp_norm(one, 1) == pytest.approx((1 - 1 / n) ** 2, rel=1e-14)
    with pytest.raises(ValueError):
        lp_norm(one, 0.5)


@pytest.mark.parametrize("n", [8, 16, 32])
def test_lp_norm_sine_mode(n):
    # the discrete sum of sin^2 is exact, so the O(h^2) allowance is not even needed
    g = build_grid("rectangle", n)
    f = g.sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    assert lp_norm(f, 2) == pytest.approx(0.5, rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=9, max_size=9), st.sampled_from([1.0, 1.5, 2.0, 3.0, math.inf]))
def test_lp_norm_is_a_norm(vals, p):
    g = build_grid("rectangle", 4)
    f = g.function(vals)
    assert lp_norm(f, p) >= 0
    assert lp_norm(f * 3.0, p) == pytest.approx(3 * lp_norm(f, p), rel=1e-12, abs=1e-300)
    other = g.function(np.arange(9.0))
    assert lp_norm(f + other, p) <= lp_norm(f, p) + lp_norm(other, p) + 1e-12


def test_bump_values_and_support():
    g = build_grid("rectangle", 16)
    u = bump_initial_data(g, (0.5, 0.5), 0.25)
    centre = g.index_map[(8, 8)]
    assert u.values[centre] == pytest.approx(math.exp(-1))
    far = np.linalg.norm(g.nodes - 0.5, axis=1) >= 0.25
    assert np.all(u.values[far] == 0)


def test_bump_l1_agrees_with_fine_quadrature():
    fine = build_grid("rectangle", 512)
    ref = lp_norm(bump_initial_data(fine, (0.5, 0.5), 0.25), 1)
    coarse = build_grid("rectangle", 32)
    assert lp_norm(bump_initial_data(coarse, (0.5, 0.5), 0.25), 1) == pytest.approx(ref, rel=0.02)


@pytest.mark.parametrize("kind,center,radius", [("rectangle", (0.1, 0.5), 0.2),
                                                ("disk", (1.5, 1.0), 0.6),
                                                ("l_shape", (0.4, 0.4), 0.2)])
def test_bump_rejects_boundary_contact(kind, center, radius):
    with pytest.raises(ValueError):
        bump_initial_data(build_grid(kind, 16), center, radius)


def test_multi_indices():
    assert multi_indices(2, 2) == [(2, 0), (1, 1), (0, 2)]
    assert sum(multinomial(g) for g in multi_indices(2, 3)) == 2**3
    with pytest.raises(ValueError):
        check_multi_index((1, -1), 2)
    with pytest.raises(ValueError):
        check_multi_index((1,), 2)


def test_csv_and_json_round_trip(tmp_path):
    g = build_grid("rectangle", 6)
    f = g.sample(lambda x, y: x - 2 * y)
    back = GridFunction.from_json(f.to_json())
    np.testing.assert_array_equal(back.values, f.values)
    np.testing.assert_array_equal(back.grid.nodes, g.nodes)
    path = tmp_path / "f.csv"
    f.to_csv(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 2], f.values)
    z = g.function(f.values * (1 + 2j))
    back = GridFunction.from_json(z.to_json(), g)
    np.testing.assert_array_equal(back.values, z.values)
    json.loads(z.to_json())


def test_grid_function_is_read_only():
    g = build_grid("rectangle", 4)
    f = g.function(np.zeros(g.size))
    with pytest.raises(ValueError):
        f.values[0] = 1.0
    with pytest.raises(ValueError):
        f + build_grid("rectangle", 4).function(np.zeros(9))
