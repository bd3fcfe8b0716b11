"""Mesh-independent surrogates for PDE solution maps: PCA dimension
reduction on input/output function spaces composed with a latent-space
regressor (dense SELU network or affine least squares)."""

from .grid import (
    BOX2D,
    TORUS1D,
    GridFunction,
    from_callable,
    inner_product,
    interpolate,
    norm,
    quadrature_weights,
    subsample,
)
from .pca import PcaModel, decode, empirical_projection_error, encode, fit_pca, transfer_basis
from .random_fields import (
    MeasureSpec,
    coeff_model_spec,
    derive_seed,
    mu_b_spec,
    mu_g_spec,
    mu_l_spec,
    mu_p_spec,
    sample_coeff_model,
    sample_field,
)
from .regressors import (
    LinearModel,
    MlpModel,
    TrainConfig,
    fit_linear,
    init_mlp,
    predict,
    selu,
    train_mlp,
)
from .solvers import (
    BurgersProblem,
    EllipticProblem,
    oracle_burgers_colehopf,
    solve_burgers,
    solve_darcy,
    solve_poisson,
)
from .surrogate import (
    Surrogate,
    predict_function,
    psi_pca_error,
    rb_galerkin_solve,
    relative_test_error,
    taylor_truncation_poisson,
)

__version__ = "0.1.0"
