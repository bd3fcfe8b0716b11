import numpy as np
import pytest

from opsurrogate.datasets import ProblemConfig
from opsurrogate.harness import FitConfig
from opsurrogate.protocols import (
    run_chkifa_comparison,
    run_rb_timing,
    taylor_tail_decay,
)
from opsurrogate.random_fields import coeff_model_spec


def test_tail_majorant_slope_matches_stechkin():
    budgets, tails, slope, expected = taylor_tail_decay(
        coeff_model_spec(), budgets=(8, 16, 32, 64, 128))
    assert expected == pytest.approx(1.0 - 4.1 / 2.0, rel=1e-12)
    assert np.all(np.diff(tails) < 0)
    assert abs(slope - expected) < 0.3


def test_tail_majorant_rejects_small_pool():
    with pytest.raises(ValueError):
        taylor_tail_decay(coeff_model_spec(), budgets=(8, 2000), pool=4000)


def test_chkifa_comparison_rows():
    base = ProblemConfig(problem="coeff_model", resolution=17, count=0,
                         seed=30, coeff_dim=48)
    rows = run_chkifa_comparison(base, budgets=(8, 16, 32), n_test=24,
                                 test_seed=31)
    assert len(rows) == 6
    hashes = {r["test_hash"] for r in rows}
    assert len(hashes) == 1
    by_budget = {}
    for r in rows:
        by_budget.setdefault(r["budget"], {})[r["method"]] = r["relative_error"]
    for b, pair in by_budget.items():
        assert pair["taylor"] <= pair["pca_linear"]
    taylor_errs = [by_budget[b]["taylor"] for b in (8, 16, 32)]
    assert taylor_errs == sorted(taylor_errs, reverse=True)


def test_chkifa_requires_coeff_model():
    base = ProblemConfig(problem="poisson", resolution=17, count=0, seed=32)
    with pytest.raises(ValueError):
        run_chkifa_comparison(base, budgets=(4,), n_test=4, test_seed=33)


def test_rb_timing_rows():
    base = ProblemConfig(problem="darcy_lognormal", resolution=17, count=24,
                         seed=34)
    fit_cfg = FitConfig(d=4, regressor="linear", epochs=2, hidden=(8, 8),
                        seed=35)
    rows = run_rb_timing(base, d_list=(2, 4), fit_cfg=fit_cfg, n_probe=4)
    assert len(rows) == 6
    for r in rows:
        assert r["online_s"] > 0 and r["offline_s"] > 0
    by_d = {}
    for r in rows:
        by_d.setdefault(r["d"], {})[r["method"]] = r["online_s"]
    for d, t in by_d.items():
        assert t["pca_linear"] == min(t.values())
