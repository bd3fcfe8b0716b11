"""Composed function-space surrogates and the intrusive baselines.

A Surrogate maps input grid function -> PCA encode -> standardize ->
regressor -> PCA decode -> output grid function. The regressor-free PCA
ceiling, a reduced-basis Galerkin baseline, and the truncated-Taylor
baseline for the linear Poisson model live here too.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import GridFunction, ShapeError, quadrature_weights
from .pca import PcaModel, decode_batch, encode_batch
from .random_fields import MeasureSpec, coeff_model_basis
from .regressors import LinearModel, MlpModel, TrainConfig, fit_linear, predict, train_mlp
from .solvers import NumericalError, solve_poisson


@dataclass
class Surrogate:
    pca_in: PcaModel
    pca_out: PcaModel
    regressor: object  # MlpModel | LinearModel
    input_mean: np.ndarray
    input_std: np.ndarray
    # target-code statistics; None means the regressor works on raw codes
    target_mean: np.ndarray | None = None
    target_std: np.ndarray | None = None

    def standardize(self, codes: np.ndarray) -> np.ndarray:
        return (codes - self.input_mean) / self.input_std

    def destandardize_targets(self, latents: np.ndarray) -> np.ndarray:
        if self.target_mean is None:
            return latents
        return self.target_mean + self.target_std * latents


def _target_weights(model: PcaModel) -> np.ndarray:
    return quadrature_weights(model.domain, model.n) if model.weighted else np.ones(
        model.basis.shape[1]
    )


def standardization_stats(codes: np.ndarray):
    mean = codes.mean(axis=0)
    std = codes.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    return mean, std


def code_scaling_stats(codes: np.ndarray):
    """Center per coordinate but scale by one shared RMS.

    PCA code variances decay like the spectrum. A per-coordinate z-score
    would flatten that decay: on the target side it inflates the
    low-eigenvalue coordinates' weight in the training MSE by
    lambda_1/lambda_d, and on the input side it stretches the latent cloud
    into an isotropic ball too sparse to interpolate at small sample counts.
    A single scalar keeps the geometry and brings the codes to the unit
    scale of the network initialization.
    """
    mean = codes.mean(axis=0)
    centered = codes - mean
    scale = float(np.sqrt(np.mean(centered ** 2)))
    if scale == 0.0:
        scale = 1.0
    return mean, np.full(codes.shape[1], scale)


def fit_surrogate(
    xs: np.ndarray,
    ys: np.ndarray,
    pca_in: PcaModel,
    pca_out: PcaModel,
    regressor_kind: str,
    train_cfg: TrainConfig | None = None,
    init_model: MlpModel | None = None,
    test_metric_fn=None,
):
    """Train a latent regressor on encoded training pairs.

    Input and target codes are centered per coordinate and divided by one
    shared RMS each (the target map is inverted at prediction time). The
    scalar scale matters twice: raw codes sit orders of magnitude below the
    unit-scale network initialization (training on them memorizes without
    generalizing), and a per-coordinate z-score would flatten the spectral
    decay of the codes, leaving an isotropic latent cloud too sparse to
    interpolate at desk-scale sample counts. Returns
    (surrogate, train_result_or_None).
    """
    codes_in = encode_batch(pca_in, xs)
    codes_out = encode_batch(pca_out, ys)
    mean, std = code_scaling_stats(codes_in)
    tmean, tstd = code_scaling_stats(codes_out)
    z = (codes_in - mean) / std
    zt = (codes_out - tmean) / tstd
    if regressor_kind == "linear":
        model = fit_linear(z, zt)
        result = None
    elif regressor_kind == "nn":
        from .regressors import DEFAULT_HIDDEN, init_mlp

        cfg = train_cfg or TrainConfig()
        if init_model is None:
            dims = [pca_in.d, *DEFAULT_HIDDEN, pca_out.d]
            init_model = init_mlp(dims, cfg.seed)
        result = train_mlp(init_model, z, zt, cfg, test_metric_fn)
        model = result.model
    else:
        raise ValueError(f"unknown regressor kind {regressor_kind!r}")
    return Surrogate(pca_in, pca_out, model, mean, std, tmean, tstd), result


def predict_function(sur: Surrogate, x: GridFunction) -> GridFunction:
    if x.domain != sur.pca_in.domain or x.n != sur.pca_in.n:
        raise ShapeError("input does not live on the surrogate's input grid")
    code = encode_batch(sur.pca_in, x.values[None, :])
    latent_out = sur.destandardize_targets(predict(sur.regressor, sur.standardize(code)))
    return GridFunction(
        sur.pca_out.domain, sur.pca_out.n, decode_batch(sur.pca_out, latent_out)[0]
    )


def predict_batch(sur: Surrogate, xs: np.ndarray) -> np.ndarray:
    codes = sur.standardize(encode_batch(sur.pca_in, xs))
    latents = np.atleast_2d(predict(sur.regressor, codes))
    return decode_batch(sur.pca_out, sur.destandardize_targets(latents))


def relative_errors(preds: np.ndarray, ys: np.ndarray, weights: np.ndarray):
    """Per-sample ||pred - y|| / ||y||; zero-norm targets are skipped."""
    err = np.sqrt(np.sum((preds - ys) * weights * (preds - ys), axis=1))
    ynorm = np.sqrt(np.sum(ys * weights * ys, axis=1))
    keep = ynorm > 0.0
    skipped = int(np.sum(~keep))
    if skipped:
        warnings.warn(f"skipped {skipped} zero-norm targets", RuntimeWarning)
    return err[keep] / ynorm[keep], skipped


def relative_test_error(sur: Surrogate, xs: np.ndarray, ys: np.ndarray) -> float:
    """Monte Carlo mean of ||surrogate(x) - y|| / ||y|| over test pairs."""
    if xs.shape[0] == 0:
        raise ValueError("empty test set")
    preds = predict_batch(sur, xs)
    ratios, _ = relative_errors(preds, ys, _target_weights(sur.pca_out))
    return float(np.mean(ratios))


def psi_pca_error(
    pca_in: PcaModel,
    pca_out: PcaModel,
    forward,
    xs: np.ndarray,
    ys: np.ndarray,
    clamp_min: float | None = None,
) -> float:
    """Relative error of the regressor-free composition
    decode_out . encode_out . forward . decode_in . encode_in.

    This is the PCA ceiling used to split error into reconstruction and
    regression parts; `forward` maps a GridFunction to a GridFunction.
    clamp_min floors reconstructed inputs (needed when the forward map
    requires positivity and the projection oscillates below it).
    """
    recon_in = decode_batch(pca_in, encode_batch(pca_in, xs))
    clamped = 0
    if clamp_min is not None:
        below = recon_in < clamp_min
        clamped = int(np.sum(np.any(below, axis=1)))
        recon_in = np.maximum(recon_in, clamp_min)
    if clamped:
        warnings.warn(
            f"floored {clamped} reconstructed inputs at {clamp_min}", RuntimeWarning
        )
    preds = np.empty_like(ys)
    for i, row in enumerate(recon_in):
        y_star = forward(GridFunction(pca_in.domain, pca_in.n, row))
        preds[i] = decode_batch(
            pca_out, encode_batch(pca_out, y_star.values[None, :])
        )[0]
    ratios, _ = relative_errors(preds, ys, _target_weights(pca_out))
    return float(np.mean(ratios))


# ---------------------------------------------------------------------------
# reduced basis baseline

def _basis_gradients(pca_out: PcaModel):
    n = pca_out.n
    h = 1.0 / (n - 1)
    gx = np.empty_like(pca_out.basis)
    gy = np.empty_like(pca_out.basis)
    for j, row in enumerate(pca_out.basis):
        grid = row.reshape(n, n)
        gy[j] = np.gradient(grid, h, axis=0).reshape(-1)
        gx[j] = np.gradient(grid, h, axis=1).reshape(-1)
    return gx, gy


@dataclass
class RbSolver:
    """Galerkin projection of the elliptic weak form onto a PCA basis.

    Precomputes basis gradients offline; each solve assembles the d x d
    reduced stiffness (O(d^2 K)) and solves it (O(d^3))."""

    pca_out: PcaModel
    gx: np.ndarray = field(default=None, repr=False)
    gy: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        if self.gx is None:
            self.gx, self.gy = _basis_gradients(self.pca_out)

    def solve(self, a: GridFunction, f: GridFunction) -> GridFunction:
        if np.min(a.values) <= 0.0:
            raise NumericalError("coefficient must be positive for the weak form")
        w = quadrature_weights(self.pca_out.domain, self.pca_out.n)
        wa = w * a.values
        A = self.gx @ (wa * self.gx).T + self.gy @ (wa * self.gy).T
        b = (self.pca_out.basis * w) @ f.values
        try:
            coeffs = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"singular reduced stiffness matrix: {exc}") from exc
        return GridFunction(
            self.pca_out.domain, self.pca_out.n, coeffs @ self.pca_out.basis
        )


def rb_galerkin_solve(pca_out: PcaModel, a: GridFunction, f: GridFunction) -> GridFunction:
    return RbSolver(pca_out).solve(a, f)


# ---------------------------------------------------------------------------
# truncated Taylor baseline for the linear Poisson coefficient model

@dataclass
class TaylorPredictor:
    """Maps coefficient vectors to sum_{j<=K} xi_j eta_j with precomputed
    eta_j = poisson_solve(phi_j); K PDE solves offline, none online."""

    K: int
    n: int
    etas: np.ndarray = field(repr=False)

    def predict(self, xi: np.ndarray) -> np.ndarray:
        xi = np.atleast_2d(np.asarray(xi, dtype=np.float64))
        m = min(xi.shape[1], self.K)
        return xi[:, :m] @ self.etas[:m]


def taylor_truncation_poisson(
    spec: MeasureSpec, K: int, n: int, rtol: float = 1e-12
) -> TaylorPredictor:
    basis = coeff_model_basis(spec, K, n)
    etas = np.empty((K, n * n))
    for j in range(K):
        etas[j] = solve_poisson(GridFunction("box2d", n, basis[j]), rtol=rtol).values
    return TaylorPredictor(K, n, etas)
