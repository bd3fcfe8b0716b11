import numpy as np
import pytest

from opsurrogate.grid import BOX2D, TORUS1D, GridFunction, from_callable, norm
from opsurrogate.solvers import (
    BurgersProblem,
    DomainError,
    EllipticProblem,
    oracle_burgers_colehopf,
    solve_burgers,
    solve_darcy,
    solve_poisson,
)


def manufactured_error(n):
    f = from_callable(BOX2D, n, lambda s1, s2:
                      2 * np.pi ** 2 * np.sin(np.pi * s1) * np.sin(np.pi * s2))
    exact = from_callable(BOX2D, n, lambda s1, s2:
                          np.sin(np.pi * s1) * np.sin(np.pi * s2))
    u = solve_poisson(f)
    return np.max(np.abs(u.values - exact.values))


def test_darcy_second_order_convergence():
    errs = [manufactured_error(n) for n in (17, 33, 65)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.8) and np.all(orders < 2.2)


def test_zero_forcing_gives_zero_solution():
    f = GridFunction(BOX2D, 17, np.zeros(17 * 17))
    u = solve_poisson(f)
    assert np.max(np.abs(u.values)) < 1e-14


def test_poisson_center_value():
    f = GridFunction(BOX2D, 129, np.ones(129 * 129))
    u = solve_poisson(f)
    mid = (129 // 2) * 129 + 129 // 2
    assert u.values[mid] == pytest.approx(0.07367, abs=1e-3)


def test_poisson_linearity():
    rng = np.random.default_rng(1)
    n = 17
    f1 = GridFunction(BOX2D, n, rng.standard_normal(n * n))
    f2 = GridFunction(BOX2D, n, rng.standard_normal(n * n))
    alpha = 2.5
    combo = GridFunction(BOX2D, n, alpha * f1.values + f2.values)
    lhs = solve_poisson(combo).values
    rhs = alpha * solve_poisson(f1).values + solve_poisson(f2).values
    assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_darcy_maximum_principle():
    rng = np.random.default_rng(2)
    n = 17
    a = GridFunction(BOX2D, n, np.exp(0.5 * rng.standard_normal(n * n)))
    f = GridFunction(BOX2D, n, np.abs(rng.standard_normal(n * n)))
    u = solve_darcy(EllipticProblem(a, f))
    assert np.min(u.values) > -1e-12


def test_darcy_symmetry_under_transpose():
    n = 17
    a = from_callable(BOX2D, n, lambda s1, s2: 1.0 + s1 * s2)
    f = from_callable(BOX2D, n, lambda s1, s2: np.exp(-(s1 - s2) ** 2))
    u = solve_darcy(EllipticProblem(a, f)).values.reshape(n, n)
    assert np.max(np.abs(u - u.T)) < 1e-9


def test_darcy_rejects_nonpositive_coefficient():
    n = 9
    a = GridFunction(BOX2D, n, np.ones(n * n))
    a_bad = GridFunction(BOX2D, n, a.values - 1.0)
    f = GridFunction(BOX2D, n, np.ones(n * n))
    with pytest.raises(DomainError):
        EllipticProblem(a_bad, f)


def test_burgers_zero_fixed_point():
    u0 = GridFunction(TORUS1D, 64, np.zeros(64))
    u = solve_burgers(BurgersProblem(u0, beta=0.01, t_final=1.0))
    assert np.max(np.abs(u.values)) == 0.0


def test_burgers_matches_colehopf():
    u0 = from_callable(TORUS1D, 1024, lambda s: np.sin(2 * np.pi * s))
    p = BurgersProblem(u0, beta=0.05, t_final=0.5)
    u = solve_burgers(p)
    ref = oracle_burgers_colehopf(p)
    rel = norm(GridFunction(TORUS1D, 1024, u.values - ref.values)) / norm(ref)
    assert rel < 1e-6


def test_burgers_mean_conservation():
    rng = np.random.default_rng(4)
    u0 = GridFunction(TORUS1D, 128, 0.3 + 0.5 * rng.standard_normal(128))
    u = solve_burgers(BurgersProblem(u0, beta=0.02, t_final=0.7))
    assert abs(np.mean(u.values) - np.mean(u0.values)) < 1e-12


def test_burgers_energy_dissipation():
    u0 = from_callable(TORUS1D, 256, lambda s: np.sin(2 * np.pi * s) + 0.3 * np.sin(6 * np.pi * s))
    norms = []
    for t in (0.1, 0.3, 0.6, 1.0):
        u = solve_burgers(BurgersProblem(u0, beta=0.01, t_final=t))
        norms.append(norm(u))
    assert norms[0] <= norm(u0) + 1e-12
    assert all(b <= a + 1e-12 for a, b in zip(norms, norms[1:]))


def test_burgers_requires_power_of_two():
    u0 = GridFunction(TORUS1D, 100, np.zeros(100))
    with pytest.raises((DomainError, ValueError)):
        solve_burgers(BurgersProblem(u0, beta=0.01, t_final=1.0))


def test_burgers_problem_invariants():
    u0 = GridFunction(TORUS1D, 64, np.zeros(64))
    with pytest.raises((DomainError, ValueError)):
        BurgersProblem(u0, beta=-1.0, t_final=1.0)
    with pytest.raises((DomainError, ValueError)):
        BurgersProblem(u0, beta=0.01, t_final=0.0)


def test_colehopf_zero_input():
    u0 = GridFunction(TORUS1D, 64, np.zeros(64))
    u = oracle_burgers_colehopf(BurgersProblem(u0, beta=0.05, t_final=0.5))
    assert np.max(np.abs(u.values)) < 1e-13


def test_colehopf_rejects_nonzero_mean():
    u0 = GridFunction(TORUS1D, 64, np.ones(64))
    with pytest.raises(DomainError):
        oracle_burgers_colehopf(BurgersProblem(u0, beta=0.05, t_final=0.5))


def test_colehopf_large_viscosity_linearizes():
    # at beta = 1 and small amplitude the dynamics are essentially the heat
    # equation: u(t) ~ eps * exp(-beta (2pi)^2 t) sin(2pi s)
    eps = 1e-3
    n = 256
    u0 = from_callable(TORUS1D, n, lambda s: eps * np.sin(2 * np.pi * s))
    p = BurgersProblem(u0, beta=1.0, t_final=0.1)
    u = oracle_burgers_colehopf(p)
    lin = from_callable(TORUS1D, n, lambda s:
                        eps * np.exp(-1.0 * (2 * np.pi) ** 2 * 0.1) * np.sin(2 * np.pi * s))
    rel = norm(GridFunction(TORUS1D, n, u.values - lin.values)) / norm(lin)
    assert rel < 1e-2
