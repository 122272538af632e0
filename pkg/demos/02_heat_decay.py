"""Derivative decay of the heat semigroup: ||d^gamma e^{-tA}||_{p->p} against t^{-|gamma|/2}.

Two grids are swept over small t.  Each (order, p) pair gets a log-log slope on
the resolved window and a stability factor: how much sup_t t^{|gamma|/2}||...||
moves when the grid is refined.  A genuine rate keeps both in check.
"""
from dirichlet_lab.decay import SpectralLab, heat_rate_check

# below t ~ 4h^2 the kernel is narrower than two cells and the grid, not the
# semigroup, sets the norm; above t ~ 0.02 the spectral gap takes over
labs = [SpectralLab.build("rectangle", n) for n in (24, 32)]
windows = {lab.grid.n: (4 * lab.h**2, 0.02) for lab in labs}
report = heat_rate_check(labs, ell_max=2, ps=(1, "inf"), windows=windows)

for v in report.verdicts:
    slopes = ", ".join(f"{s:+.2f}" for s in v["slopes"])
    print(f"order {v['ell']} p={v['p']}: slopes [{slopes}] vs {v['expected_slope']:+.2f}, "
          f"stability {v['stability']:.3f} -> {'PASS' if v['pass'] else 'FAIL'}")
print("(the acceptance suite repeats this on n = 32, 48 with orders up to 3)")
