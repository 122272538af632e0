"""Other spectral families: the fractional semigroup e^{-tA^{alpha/2}} and resolvent powers.

alpha = 2 reproduces the heat semigroup bit for bit.  For alpha = 3 the
derivative norms should scale like t^{-k/alpha}.  The resolvent (1 + tA)^{-M}
has no slope prediction; only its refinement stability is checked, and orders
beyond 2M are rejected because the bound no longer applies.
"""
import numpy as np

from dirichlet_lab import fractional_semigroup, heat_semigroup
from dirichlet_lab.decay import SpectralLab, fractional_rate_check, resolvent_decay_check

labs = [SpectralLab.build("rectangle", n) for n in (24, 32)]
print("alpha=2 equals heat:", np.array_equal(fractional_semigroup(labs[0].S, 0.01, 2.0),
                                              heat_semigroup(labs[0].S, 0.01)))

rep = fractional_rate_check(labs, alphas=(3.0,), k_max=2, ps=(1,))
for v in rep.verdicts:
    print(f"alpha=3 order {v['ell']}: slopes {[round(s, 3) for s in v['slopes']]} "
          f"vs {v['expected_slope']:.3f}, stability {v['stability']:.2f}")

rep = resolvent_decay_check(labs, M=2, ell_max=2, t_count=8)
for v in rep.verdicts:
    if "stability" in v:
        norm = f" p={v['p']}" if v.get("p") else ""
        print(f"resolvent M=2 {v['kind']} order {v['ell']}{norm}: stability {v['stability']:.2f}")
try:
    resolvent_decay_check(labs, M=2, ell_max=5)
except ValueError as exc:
    print("order 5 with M=2 rejected:", exc)
