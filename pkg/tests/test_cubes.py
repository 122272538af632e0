import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dirichlet_lab.calculus import heat, multiplier_matrix
from dirichlet_lab.cubes import (block_l2_norms, cube_partition, cube_report_rows, holder_cube_check,
                                 l1l2_norm, weighted_operator_norm)
from dirichlet_lab.derivatives import derivative_matrix
from dirichlet_lab.grid import build_grid, bump_initial_data, lp_norm
from dirichlet_lab.laplacian import assemble_laplacian, eigendecompose


@pytest.fixture(scope="module")
def grid():
    return build_grid("rectangle", 16)


def test_corner_anchor_counts(grid):
    assert cube_partition(grid, 1.0, "corner").count == 1
    assert cube_partition(grid, 0.25, "corner").count == 4


def test_center_anchor_counts(grid):
    # cubes centered on the lattice t^(1/2) Z^2: [-1/4, 1/4), [1/4, 3/4), [3/4, 5/4) per axis
    assert cube_partition(grid, 0.25).count == 9
    assert cube_partition(grid, 4.0).count == 1


@pytest.mark.parametrize("kind", ["rectangle", "disk", "l_shape"])
@pytest.mark.parametrize("t", [0.02, 0.1, 0.3])
def test_partition_covers_every_node_once(kind, t):
    g = build_grid(kind, 32)
    dec = cube_partition(g, t)
    allidx = np.sort(np.concatenate(dec.members))
    assert np.array_equal(allidx, np.arange(g.size))
    assert dec.count <= math.ceil(2 * max(1.0, g.params.get("radius", 1.0)) / math.sqrt(t) + 1) ** 2


def test_rejects_unresolvable_cubes(grid):
    with pytest.raises(ValueError, match="unresolvable"):
        cube_partition(grid, (1.9 * grid.h) ** 2)
    cube_partition(grid, (2 * grid.h) ** 2)
    with pytest.raises(ValueError):
        cube_partition(grid, 0.1, "edge")


def test_l1l2_single_cube_and_support(grid):
    rng = np.random.default_rng(0)
    u = grid.function(rng.standard_normal(grid.size))
    assert l1l2_norm(u, 4.0) == pytest.approx(lp_norm(u, 2), rel=1e-14)
    dec = cube_partition(grid, 0.0625)
    v = np.zeros(grid.size)
    idx = dec.members[5]
    v[idx] = rng.standard_normal(len(idx))
    w = grid.function(v)
    assert l1l2_norm(w, 0.0625, dec) == pytest.approx(lp_norm(w, 2), rel=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([0.02, 0.05, 0.1, 0.25]))
def test_block_norm_bounds_and_holder(seed, t):
    g = build_grid("rectangle", 16)
    u = g.function(np.random.default_rng(seed).standard_normal(g.size))
    dec = cube_partition(g, t)
    total = l1l2_norm(u, t, dec)
    assert lp_norm(u, 2) * (1 - 1e-12) <= total <= math.sqrt(dec.count) * lp_norm(u, 2) * (1 + 1e-12)
    lhs, rhs, ok = holder_cube_check(u, t, dec)
    assert ok


def test_indicator_of_a_full_cube_is_near_equality(grid):
    t = 0.0625
    dec = cube_partition(grid, t)
    c = max(range(dec.count), key=lambda i: len(dec.members[i]))
    chi = np.zeros(grid.size)
    chi[dec.members[c]] = 1.0
    lhs, rhs, ok = holder_cube_check(grid.function(chi), t, dec)
    assert ok and lhs == pytest.approx(rhs, rel=4 * grid.h / math.sqrt(t))


def test_holder_on_smoothed_gradient(grid):
    S = eigendecompose(assemble_laplacian(grid), grid)
    f = bump_initial_data(grid, (0.5, 0.5), 0.3)
    u = grid.function(derivative_matrix(grid, (1, 0)) @ multiplier_matrix(S, heat(0.01)) @ f.values)
    assert holder_cube_check(u, 0.04)[2]


def test_weighted_norm_geometry(grid):
    t = 0.0625
    dec = cube_partition(grid, t)
    eye = np.eye(grid.size)
    val = weighted_operator_norm(eye, 1, t, dec)
    assert val <= math.sqrt(t) * math.sqrt(2) / 2 + grid.h * math.sqrt(2)
    assert weighted_operator_norm(3.0 * eye, 0, t, dec) == pytest.approx(3.0)
    T = np.random.default_rng(1).standard_normal((grid.size, grid.size))
    assert weighted_operator_norm(T, 0, t, dec) <= np.linalg.norm(T, 2) * (1 + 1e-12)
    with pytest.raises(ValueError):
        weighted_operator_norm(eye, -1, t, dec)


def test_report_rows(grid):
    u = grid.function(np.ones(grid.size))
    rows = cube_report_rows(u, np.eye(grid.size), 1, 0.25)
    assert len(rows) == 9
    assert sum(r["l2_block_norm"] ** 2 for r in rows) == pytest.approx(lp_norm(u, 2) ** 2)
    assert np.allclose(block_l2_norms(u, 0.25), [r["l2_block_norm"] for r in rows])
