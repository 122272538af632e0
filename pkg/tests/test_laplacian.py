import math

import numpy as np
import pytest

from dirichlet_lab.calculus import multiplier_matrix, heat
from dirichlet_lab.grid import build_grid
from dirichlet_lab.laplacian import (SpectralError, assemble_laplacian, compare_spectra,
                                     dst_oracle_rectangle, eigendecompose, elliptic_ratio_ensemble,
                                     elliptic_regularity_check, sine_eigenvalue)
from dirichlet_lab.derivatives import sobolev_norm
from dirichlet_lab.grid import lp_norm


def test_stencil_entries():
    A = assemble_laplacian(build_grid("rectangle", 4))
    assert np.all(np.diag(A) == 64)
    assert set(np.unique(A[A != 0])) == {-16.0, 64.0}
    assert np.array_equal(A, A.T)


def test_sine_mode_is_eigenvector():
    g = build_grid("rectangle", 12)
    h = g.h
    s = g.sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y)).values
    lam = 8 / h**2 * math.sin(math.pi * h / 2) ** 2
    np.testing.assert_allclose(assemble_laplacian(g) @ s, lam * s, atol=1e-10)


@pytest.mark.parametrize("kind", ["rectangle", "disk", "l_shape"])
def test_decomposition_invariants(kind):
    g = build_grid(kind, 12)
    A = assemble_laplacian(g)
    S = eigendecompose(A, g)
    assert S.size == g.size
    assert S.lambda_min > 0
    assert S.orthonormality_defect() <= 1e-10
    assert np.abs(A - S.reconstruct()).max() <= 1e-8 * S.lambda_max


def test_first_eigenvalue_n16():
    g = build_grid("rectangle", 16)
    S = eigendecompose(assemble_laplacian(g), g)
    h = g.h
    assert S.lambda_min == pytest.approx(8 / h**2 * math.sin(math.pi * h / 2) ** 2, rel=1e-12)
    assert abs(S.lambda_min - 2 * math.pi**2) < 0.05 * 2 * math.pi**2


def test_oracle_small_case():
    O = dst_oracle_rectangle(4)
    assert O.eigenvalues[0] == pytest.approx(128 * math.sin(math.pi / 8) ** 2, rel=1e-14)
    assert O.orthonormality_defect() <= 1e-12
    # (m,k) <-> (k,m) degeneracy, strictly increasing otherwise
    assert O.eigenvalues[1] == pytest.approx(O.eigenvalues[2], rel=1e-14)
    assert O.eigenvalues[2] < O.eigenvalues[3]


@pytest.mark.parametrize("n,sides", [(8, (1.0, 1.0)), (16, (1.0, 1.0)), (12, (1.0, 0.5)), (20, (2.0, 1.0))])
def test_dense_solver_matches_oracle(n, sides):
    g = build_grid("rectangle", n, sides=sides)
    res = compare_spectra(eigendecompose(assemble_laplacian(g), g), dst_oracle_rectangle(g))
    assert res["max_rel_eigenvalue_error"] <= 1e-9
    assert res["max_subspace_angle"] <= 1e-6


def test_oracle_one_dimensional():
    g = build_grid("rectangle", 10, sides=(1.0,))
    O = dst_oracle_rectangle(g)
    lam = [4 / g.h**2 * math.sin(m * math.pi * g.h / 2) ** 2 for m in range(1, 10)]
    np.testing.assert_allclose(O.eigenvalues, lam, rtol=1e-14)
    res = compare_spectra(eigendecompose(assemble_laplacian(g), g), O)
    assert res["max_rel_eigenvalue_error"] <= 1e-9


def test_oracle_rejects_non_rectangles():
    with pytest.raises(ValueError):
        dst_oracle_rectangle(build_grid("disk", 8))


def test_eigendecompose_rejects_asymmetric():
    g = build_grid("rectangle", 4)
    A = assemble_laplacian(g)
    A[0, 1] += 1.0
    with pytest.raises(SpectralError):
        eigendecompose(A, g)


def test_eigendecompose_is_reproducible():
    g = build_grid("l_shape", 10)
    A = assemble_laplacian(g)
    a, b = eigendecompose(A, g), eigendecompose(A, g)
    assert np.array_equal(a.Q, b.Q)


def test_spectrum_csv(tmp_path):
    g = build_grid("rectangle", 5)
    S = eigendecompose(assemble_laplacian(g), g)
    S.to_csv(tmp_path / "s.csv")
    data = np.loadtxt(tmp_path / "s.csv", delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 1], S.eigenvalues)


def test_heat_norm_is_first_mode_decay():
    g = build_grid("rectangle", 10)
    S = eigendecompose(assemble_laplacian(g), g)
    for t in (0.01, 0.1):
        assert np.linalg.norm(multiplier_matrix(S, heat(t)), 2) == pytest.approx(math.exp(-t * S.lambda_min), rel=1e-10)


def test_elliptic_eigenmode_closed_form():
    g = build_grid("rectangle", 16)
    lam = sine_eigenvalue(g.h, 1, 1)
    s = g.sample(lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y))
    f = s * (-lam)
    expected = sobolev_norm(s, 2, 2) / (lp_norm(s, 2) + sobolev_norm(f, 0, 2))
    assert elliptic_regularity_check(f, 0, 2) == pytest.approx(expected, rel=1e-10)
    assert elliptic_regularity_check(f * 0.0, 1, 2) == 0.0


def test_elliptic_ensemble_is_refinement_stable():
    a = elliptic_ratio_ensemble(build_grid("rectangle", 12), 0, 2, samples=50, seed=1)
    b = elliptic_ratio_ensemble(build_grid("rectangle", 24), 0, 2, samples=50, seed=1)
    assert max(a["max"], b["max"]) / min(a["max"], b["max"]) <= 2.0
