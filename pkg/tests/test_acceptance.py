"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

The lines are collected by ``conftest.py`` and printed in the terminal summary.
Run with ``pytest tests/test_acceptance.py -v`` (about ten minutes on one core).
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from dirichlet_lab.calculus import dyadic_partition
from dirichlet_lab.commutators import (ad3_defect_norm, discrete_ad_table, quadrature_order_study,
                                       check_resolvent_commutator, check_unitary_commutator)
from dirichlet_lab.decay import (SpectralLab, block_bound_p2, dyadic_chain_check, heat_1d_sanity,
                                 holder_sweep, i_function, i_function_max, n_ell_study,
                                 resolvent_decay_check, heat_rate_check, fractional_rate_check,
                                 weighted_bound_sweep)
from dirichlet_lab.grid import build_grid
from dirichlet_lab.laplacian import assemble_laplacian, compare_spectra, dst_oracle_rectangle, eigendecompose

pytestmark = pytest.mark.slow

_LABS: dict = {}


def lab(n):
    if n not in _LABS:
        _LABS[n] = SpectralLab.build(n=n)
    return _LABS[n]


def psd(dim, rng):
    B = rng.standard_normal((dim, dim))
    return B @ B.T / dim, rng.standard_normal(dim)


def fmt(xs):
    return "[" + ", ".join(f"{x:.3g}" for x in xs) + "]"


def test_c01_resolvent_commutator_fuzz(report_line):
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        for dim in (2, 5, 8, 12):
            A, x = psd(dim, rng)
            for M in range(1, 5):
                for ell in range(1, 5):
                    for t in (0.1, 1.0):
                        worst = max(worst, check_resolvent_commutator(A, x, M, ell, t))
                        cases += 1
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-10 and elapsed < 10
    report_line("C1 commutator exactness", ok,
                f"{cases} cases, max rel residual {worst:.2e} (tol 1e-10), {elapsed:.1f}s (< 10s)")
    assert ok


def test_c02_duhamel_identity(report_line):
    start = time.perf_counter()
    worst, ratios = 0.0, []
    rng = np.random.default_rng(2024)
    for k in range(3):
        for M in (1, 2):
            for tau in (0.5, 2.0):
                A, x = psd(8, rng)
                worst = max(worst, check_unitary_commutator(A, x, M, 0.5, tau, k, 512))
                # order check at coarse n_quad: at 512 the residual is already at round-off
                study = quadrature_order_study(A, x, M, 0.5, tau, k, (4, 8, 16))
                ratios += study["ratios"]
    elapsed = time.perf_counter() - start
    order_ok = all(12 <= r <= 20 for r in ratios)
    ok = worst <= 1e-7 and order_ok and elapsed < 30
    report_line("C2 Duhamel identity", ok,
                f"max residual {worst:.2e} at n_quad=512 (tol 1e-7); doubling ratios "
                f"{min(ratios):.2f}..{max(ratios):.2f} (want ~16, accepted 12..20); {elapsed:.1f}s")
    assert ok


def test_c03_discrete_commutator_table(report_line):
    tab = discrete_ad_table(build_grid("rectangle", 16), 0.1, axis=0, center=0.5)
    d1, d2 = tab["ad1_defect"], tab["ad2_defect"]
    n16, n32 = (ad3_defect_norm(build_grid("rectangle", n), 0.1) for n in (16, 32))
    factor = n16 / n32
    plain = [np.linalg.norm(discrete_ad_table(build_grid("rectangle", n), 0.1)["ad3"], 2) for n in (16, 32)]
    ok = d1 <= 1e-13 and d2 <= 1e-13 and abs(factor - 4) <= 0.5
    report_line("C3 discrete Ad table", ok,
                f"Ad1 defect {d1:.1e}, Ad2 defect {d2:.1e}; Ad3 H1->L2 norm factor {factor:.2f} "
                f"under n 16->32 (want 4 +- 0.5; plain 2-norm factor {plain[0] / plain[1]:.2f})")
    assert ok


def test_c04_heat_rates(report_line):
    start = time.perf_counter()
    rep = heat_rate_check([lab(32), lab(48)], ell_max=3, ps=(1, "inf"))
    sanity = heat_1d_sanity(n=200)
    elapsed = time.perf_counter() - start
    parts = [f"l={v['ell']} p={v['p']} slopes {fmt(v['slopes'])} stab {v['stability']:.2f}"
             for v in rep.verdicts]
    ok = rep.passed and sanity["max_rel_deviation"] <= 0.15 and elapsed < 300
    report_line("C4 heat derivative rates", ok,
                "window [4h^2, 0.02] (literal [64h^2, 0.02] is empty for n=32,48); " + "; ".join(parts)
                + f"; 1-D t^(1/2)||d e^(-tA)||_1 off pi^(-1/2) by {100 * sanity['max_rel_deviation']:.2f}%"
                + f"; {elapsed:.0f}s (< 300s)")
    assert ok


def test_c05_fractional_rates(report_line):
    rep3 = fractional_rate_check([lab(32), lab(48)], alphas=(3.0,), k_max=2)
    rep1 = fractional_rate_check([lab(48), lab(64)], alphas=(1.0,), k_max=2)
    same = fractional_rate_check([lab(32)], alphas=(2.0,), k_max=1, ps=(1,), t_max=0.5,
                          windows={32: (4 / 32**2, 0.02)})
    heat = heat_rate_check([lab(32)], ell_max=1, ps=(1,), windows={32: (4 / 32**2, 0.02)})
    bit_identical = [r["norm"] for r in same.rows] == [r["norm"] for r in heat.rows]
    verdicts = rep3.verdicts + rep1.verdicts
    parts = [f"a={v['alpha']:g} k={v['ell']} p={v['p']} slopes {fmt(v['slopes'])}" for v in verdicts]
    ok = all(v["pass"] for v in verdicts) and bit_identical
    report_line("C5 fractional rates", ok,
                "; ".join(parts) + f"; alpha=2 rows bit-identical to heat: {bit_identical}"
                + " (alpha=3 on n=32,48; alpha=1 on n=48,64, window [(4h)^1, 0.02^(1/2)])")
    assert ok


def test_c06_resolvent_stability(report_line):
    rep = resolvent_decay_check([lab(32), lab(48)], M=2, ell_max=4, t_count=12)
    try:
        resolvent_decay_check([lab(32)], M=2, ell_max=5)
        rejected = False
    except ValueError:
        rejected = True
    parts = [f"{v['kind']} l={v['ell']} stab {v['stability']:.2f}" for v in rep.verdicts]
    ok = rep.passed and rejected
    report_line("C6 resolvent powers M=2", ok, "; ".join(parts) + f"; l=5 > 2M rejected: {rejected}")
    assert ok


def test_c07_holder_cubes(report_line):
    g = build_grid("rectangle", 32)
    h = g.h
    ts = [16 * h**2, (6 * h) ** 2, (8 * h) ** 2, 0.12, 0.25]
    rep = holder_sweep(g, ts, samples=100, seed=7)
    rnd, ind = rep.verdicts
    ok = rep.passed
    report_line("C7 l1(L2)_t inequality", ok,
                f"{rnd['checks']} random checks, {rnd['failures']} failures (tol 4h/t^(1/2)); "
                f"cube indicator lhs {ind['lhs']:.6g} vs rhs {ind['rhs']:.6g}")
    assert ok


def test_c08_weighted_bound(report_line):
    rep = weighted_bound_sweep([lab(32), lab(48)], ells=(1, 2), taus=(0.0, 1.0, 4.0), M=2, alpha=1)
    parts = [f"l={v['ell']} C in [{v['min_C']:.3g}, {v['max_C']:.3g}] stab {v['stability']:.2f}"
             for v in rep.verdicts]
    ok = rep.passed
    report_line("C8 weighted norm bound", ok,
                "; ".join(parts) + " (t from 16h^2 to 0.05, tau in {0,1,4}, n=32,48)")
    assert ok


def test_c09_dyadic_machinery(report_line):
    errs = []
    for n in (32, 48):
        S = lab(n).S
        part = dyadic_partition(S.lambda_min, S.lambda_max)
        errs.append(float(np.abs(part.total(np.sqrt(S.eigenvalues)) - 1).max()))
    bound_ok = all(block_bound_p2(j, t, a)["pass"]
                   for a in (1.0, 2.0, 3.0) for t in (0.01, 0.1, 0.5) for j in range(-1, 10))
    chain = dyadic_chain_check(lab(32), 0.01, 1, 2.0, 2)
    bound_ok &= chain["p2_bound_ok"] and chain["reassembly_ok"]
    scaling = max(abs(i_function(2**a * t, k, a) - i_function(t, k, a)) / i_function(t, k, a)
                  for k in (1, 2) for a in (1.0, 2.0, 3.0) for t in (0.1, 0.37, 0.9))
    maxima = {(k, a): i_function_max(k, a)["max"] for k in (1, 2) for a in (1.0, 2.0, 3.0)}
    finite = all(math.isfinite(v) for v in maxima.values())
    ok = max(errs) <= 1e-12 and bound_ok and scaling <= 1e-10 and finite
    report_line("C9 dyadic machinery", ok,
                f"partition sum error {max(errs):.1e}; p=2 block bound (c=2^-alpha) holds: {bound_ok}; "
                f"I(2^a t)/I(t) rel diff {scaling:.1e}; max I on [1,2^a] "
                + ", ".join(f"k={k},a={a:g}:{v:.4g}" for (k, a), v in maxima.items()))
    assert ok


def test_c10_n_ell(report_line):
    rep = n_ell_study([lab(32), lab(48)], ell_max=3)
    parts = [f"l={v['ell']} [{v['min']:.3f}, {v['max']:.3f}] stab {v['stability']:.2f}" for v in rep.verdicts]
    ok = rep.passed
    report_line("C10 N_l bound", ok, "; ".join(parts) + " (5 bump placements, n=32,48)")
    assert ok


def test_c11_oracle_equivalence(report_line):
    worst_l, worst_a = 0.0, 0.0
    for n, sides in ((16, (1.0, 1.0)), (32, (1.0, 1.0)), (48, (1.0, 1.0)), (24, (1.0, 0.5)), (20, (1.0,))):
        if n in (32, 48) and sides == (1.0, 1.0):
            S, g = lab(n).S, lab(n).grid
        else:
            g = build_grid("rectangle", n, sides=sides)
            S = eigendecompose(assemble_laplacian(g), g)
        res = compare_spectra(S, dst_oracle_rectangle(g))
        worst_l = max(worst_l, res["max_rel_eigenvalue_error"])
        worst_a = max(worst_a, res["max_subspace_angle"])
    ok = worst_l <= 1e-9 and worst_a <= 1e-6
    report_line("C11 oracle equivalence", ok,
                f"max rel eigenvalue error {worst_l:.1e} (tol 1e-9), max subspace angle {worst_a:.1e} (tol 1e-6)")
    assert ok


def test_c12_determinism(report_line, tmp_path):
    cases = [["commutator", "--dim", "8", "--M", "3", "--ell", "3", "--seeds", "5", "--k", "1", "--nquad", "64"],
             ["frac", "--n", "16", "--alpha", "3", "--k", "2", "--tmax", "0.02", "--nt", "10", "--refine", "20"],
             ["nell", "--n", "16", "--ell", "2", "--nt", "8"]]
    same = True
    for i, argv in enumerate(cases):
        outs = []
        for workers in ("1", "1", "4"):
            out = tmp_path / f"r{i}_{len(outs)}.json"
            env = {"DIRICHLET_LAB_WORKERS": workers, "PATH": "", "PYTHONHASHSEED": str(len(outs))}
            subprocess.run([sys.executable, "-m", "dirichlet_lab.cli", *argv, "--no-timestamp",
                            "--out", str(out)], env=env, check=False)
            outs.append(out.read_bytes())
        same &= outs[0] == outs[1] == outs[2]
    report_line("C12 determinism", same,
                f"{len(cases)} configs x (2 runs at 1 worker + 1 run at 4 workers): byte-identical "
                f"reports (timestamp omitted): {same}")
    assert same
