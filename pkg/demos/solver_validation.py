"""Validate both forward solvers against analytic oracles.

Darcy: manufactured solution convergence table.
Burgers: comparison with the Cole-Hopf closed form.
"""
import numpy as np

from opsurrogate import (
    BOX2D, TORUS1D, BurgersProblem, GridFunction,
    from_callable, norm, oracle_burgers_colehopf, solve_burgers, solve_poisson,
)

print("Darcy manufactured solution -Lap u = 2 pi^2 sin(pi s1) sin(pi s2)")
errs = []
for n in (17, 33, 65):
    f = from_callable(BOX2D, n, lambda s1, s2:
                      2 * np.pi ** 2 * np.sin(np.pi * s1) * np.sin(np.pi * s2))
    exact = from_callable(BOX2D, n, lambda s1, s2:
                          np.sin(np.pi * s1) * np.sin(np.pi * s2))
    u = solve_poisson(f)
    errs.append(np.max(np.abs(u.values - exact.values)))
    order = "" if len(errs) == 1 else f"  order {np.log2(errs[-2] / errs[-1]):.3f}"
    print(f"  n={n:3d}  max err {errs[-1]:.3e}{order}")

print("\nBurgers vs Cole-Hopf, u0 = sin(2 pi s), beta=0.05, t=0.5, n=1024")
u0 = from_callable(TORUS1D, 1024, lambda s: np.sin(2 * np.pi * s))
p = BurgersProblem(u0, beta=0.05, t_final=0.5)
u = solve_burgers(p)
ref = oracle_burgers_colehopf(p)
rel = norm(GridFunction(TORUS1D, 1024, u.values - ref.values)) / norm(ref)
print(f"  relative L2 error {rel:.3e}")
print(f"  mean drift {abs(np.mean(u.values) - np.mean(u0.values)):.2e}")
