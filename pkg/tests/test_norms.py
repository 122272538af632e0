import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dirichlet_lab.norms import brute_force_norm, induced_norm, p_label, parse_p, spectral_norm

small = arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6)), elements=st.floats(-10, 10))


@settings(max_examples=60, deadline=None)
@given(small)
def test_p1_and_pinf_match_extreme_point_scan(T):
    assert induced_norm(T, 1) == pytest.approx(brute_force_norm(T, 1), rel=1e-14, abs=1e-300)
    assert induced_norm(T, "inf") == pytest.approx(brute_force_norm(T, math.inf), rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(small)
def test_duality_and_two_norm_interpolation(T):
    assert induced_norm(T.T, 1) == pytest.approx(induced_norm(T, math.inf), rel=1e-14, abs=1e-300)
    # Riesz-Thorin at p = 2 between p = 1 and p = inf
    assert induced_norm(T, 2) <= math.sqrt(induced_norm(T, 1) * induced_norm(T, math.inf)) * (1 + 1e-12) + 1e-12


def test_sparse_and_dense_agree():
    rng = np.random.default_rng(3)
    T = rng.standard_normal((30, 20))
    S = sp.csr_matrix(T)
    for p in (1, 2, math.inf):
        assert induced_norm(S, p) == pytest.approx(induced_norm(T, p), rel=1e-12)


def test_large_spectral_norm_uses_lanczos_deterministically():
    rng = np.random.default_rng(0)
    T = sp.random(900, 900, density=0.01, random_state=1) + sp.identity(900)
    a, b = spectral_norm(T), spectral_norm(T)
    assert a == b
    # compare with the dense value
    assert a == pytest.approx(np.linalg.norm(T.toarray(), 2), rel=1e-9)
    del rng


@pytest.mark.parametrize("p", [0.5, 3, "two"])
def test_rejects_other_exponents(p):
    with pytest.raises(ValueError):
        parse_p(p)


def test_labels():
    assert p_label(parse_p("inf")) == "inf"
    assert p_label(parse_p(1)) == "1"
    assert p_label(parse_p("2")) == "2"
