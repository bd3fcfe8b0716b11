"""Non-centered PCA on discretized function spaces.

The spectrum of the empirical second-moment operator is computed with the
snapshot (Gram) method: the N x N matrix of pairwise quadrature-weighted
inner products is eigendecomposed and its eigenvectors are lifted back to
grid functions. No mean is subtracted anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .grid import (
    BOX2D,
    GridFunction,
    ShapeError,
    interpolate,
    quadrature_weights,
    subsample,
)


class RankDeficiencyError(RuntimeError):
    pass


class PcaConfigError(ValueError):
    pass


_RANK_TOL = 1e-14


@dataclass(frozen=True)
class PcaModel:
    """Orthonormal empirical basis of the top-d PCA subspace.

    basis rows are the lifted eigenfunctions (shape (d, num_points));
    eigenvalues holds the full non-increasing spectrum of the Gram matrix.
    weighted selects the quadrature-weighted L2 inner product (default) or
    the plain Euclidean dot product.
    """

    domain: str
    n: int
    d: int
    basis: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    weighted: bool = True

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=np.float64)
        ev = np.asarray(self.eigenvalues, dtype=np.float64)
        b.setflags(write=False)
        ev.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def weights(self) -> np.ndarray:
        if self.weighted:
            return quadrature_weights(self.domain, self.n)
        return np.ones(self.basis.shape[1])

    def gram_residual(self) -> float:
        """max |<phi_i, phi_j> - delta_ij| over the stored basis."""
        G = (self.basis * self.weights) @ self.basis.T
        return float(np.max(np.abs(G - np.eye(self.d))))


def _stack(data: list[GridFunction]) -> tuple[str, int, np.ndarray]:
    first = data[0]
    for u in data[1:]:
        if u.domain != first.domain or u.n != first.n:
            raise ShapeError("all training functions must share domain/resolution")
    return first.domain, first.n, np.stack([u.values for u in data])


def _apply_sign_convention(basis: np.ndarray) -> np.ndarray:
    # entry of largest magnitude (first occurrence) is made positive
    idx = np.argmax(np.abs(basis), axis=1)
    signs = np.sign(basis[np.arange(basis.shape[0]), idx])
    signs[signs == 0] = 1.0
    return basis * signs[:, None]


def fit_pca(data: list[GridFunction], d: int, weighted: bool = True) -> PcaModel:
    """Snapshot-method PCA of N grid functions, retaining the top d modes."""
    N = len(data)
    if d < 1 or d > N:
        raise PcaConfigError(f"need 1 <= d <= N, got d={d}, N={N}")
    domain, n, U = _stack(data)
    w = quadrature_weights(domain, n) if weighted else np.ones(U.shape[1])
    G = (U * w) @ U.T / N
    G = 0.5 * (G + G.T)
    evals, evecs = scipy.linalg.eigh(G)
    order = np.argsort(-evals, kind="stable")
    evals = np.maximum(evals[order], 0.0)
    evecs = evecs[:, order]
    bad = np.nonzero(evals[:d] < _RANK_TOL * max(evals[0], np.finfo(float).tiny))[0]
    if bad.size:
        raise RankDeficiencyError(
            f"eigenvalue {bad[0] + 1} of the requested {d} is below "
            f"{_RANK_TOL:g} * lambda_1: the data has rank < d"
        )
    # lift: phi_j = (N lambda_j)^(-1/2) sum_i v_i^(j) u_i
    scale = 1.0 / np.sqrt(N * evals[:d])
    basis = _apply_sign_convention((evecs[:, :d] * scale).T @ U)
    return PcaModel(domain, n, d, basis, evals, weighted=weighted)


def encode(model: PcaModel, u: GridFunction) -> np.ndarray:
    if u.domain != model.domain or u.n != model.n:
        raise ShapeError("function does not live on the model's grid")
    return (model.basis * model.weights) @ u.values


def encode_batch(model: PcaModel, values: np.ndarray) -> np.ndarray:
    """Encode rows of a (count, num_points) array to (count, d) latent codes."""
    if values.shape[1] != model.basis.shape[1]:
        raise ShapeError("value rows do not match the model's grid size")
    return values @ (model.basis * model.weights).T


def decode(model: PcaModel, s: np.ndarray) -> GridFunction:
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (model.d,):
        raise ShapeError(f"latent vector must have shape ({model.d},)")
    return GridFunction(model.domain, model.n, s @ model.basis)


def decode_batch(model: PcaModel, codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.float64)
    if codes.shape[1] != model.d:
        raise ShapeError(f"latent rows must have length {model.d}")
    return codes @ model.basis


def empirical_projection_error(model: PcaModel, data: list[GridFunction]) -> float:
    """(1/N) sum_j ||u_j - Pi u_j||^2 in the model's inner product."""
    _, _, U = _stack(data)
    codes = encode_batch(model, U)
    resid = U - decode_batch(model, codes)
    w = model.weights
    return float(np.mean(np.sum(resid * w * resid, axis=1)))


def transfer_basis(model: PcaModel, target_n: int) -> tuple[PcaModel, float]:
    """Move the basis to another resolution of the same domain.

    Finer targets use cubic-spline interpolation, coarser targets subsampling
    (grids must nest). The transferred basis is used as-is, without
    re-orthonormalization; the returned Gram residual quantifies the drift.
    """
    if target_n == model.n:
        return model, model.gram_residual()
    if target_n > model.n:
        moved = [
            interpolate(GridFunction(model.domain, model.n, row), target_n).values
            for row in model.basis
        ]
    else:
        if model.domain == BOX2D:
            if (model.n - 1) % (target_n - 1) != 0:
                raise ShapeError(
                    f"coarse target {target_n} does not nest in {model.n}"
                )
            stride = (model.n - 1) // (target_n - 1)
        else:
            if model.n % target_n != 0:
                raise ShapeError(
                    f"coarse target {target_n} does not nest in {model.n}"
                )
            stride = model.n // target_n
        moved = [
            subsample(GridFunction(model.domain, model.n, row), stride).values
            for row in model.basis
        ]
    out = PcaModel(
        model.domain, target_n, model.d, np.stack(moved), model.eigenvalues,
        weighted=model.weighted,
    )
    return out, out.gram_residual()
