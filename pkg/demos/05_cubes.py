"""Cube decompositions at scale sqrt(t) and the norms built on them.

The l1(l2) norm sums L2 norms over cubes of side sqrt(t), so by Cauchy-Schwarz
it is at most (number of cubes)^{1/2} ||u||_2 times t^{-d/4} bookkeeping.
The weighted operator norm |||T|||_alpha measures how much T leaks mass away
from each cube, weighted by distance^alpha.
"""
from dirichlet_lab import build_grid, cube_partition, holder_cube_check
from dirichlet_lab.calculus import resolvent, unitary
from dirichlet_lab.decay import SpectralLab, holder_sweep, weighted_bound_sweep

g = build_grid("rectangle", 32)
for anchor in ("corner", "center"):
    cubes = cube_partition(g, 0.25, anchor=anchor)
    print(f"t=1/4, {anchor}-anchored: {cubes.count} cubes")

rep = holder_sweep(g, [16 * g.h**2, (8 * g.h) ** 2, 0.12], samples=40)
for v in rep.verdicts:
    print(f"{v['kind']}: {'PASS' if v['pass'] else 'FAIL'}")

labs = [SpectralLab.build("rectangle", 24)]
rep = weighted_bound_sweep(labs, ells=(1,), t_count=5)
for v in rep.verdicts:
    print(f"weighted bound order {v['ell']}: C(t) spread {v['stability']:.2f}")
