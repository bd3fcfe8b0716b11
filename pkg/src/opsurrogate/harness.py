"""Experiment drivers: surrogate fitting/persistence, evaluation, sweeps over
resolution / reduced dimension / sample count, mesh transfer, and CSV/SVG
emission.

Model directories reuse the dataset conventions: a `meta` file plus raw
little-endian float64 tensors, so refits are byte-identical.
"""

from __future__ import annotations

import csv
import os
import time
from dataclasses import dataclass

import numpy as np

from .datasets import (
    Dataset,
    ProblemConfig,
    _read_tensor,
    _write_tensor,
    read_meta,
    subsample_dataset,
    write_meta,
)
from .grid import GridFunction
from .pca import PcaModel, fit_pca, transfer_basis
from .regressors import LinearModel, MlpModel, TrainConfig
from .surrogate import (
    Surrogate,
    fit_surrogate,
    predict_batch,
    relative_errors,
    relative_test_error,
)


@dataclass
class FitConfig:
    d: int
    regressor: str = "nn"           # "nn" | "linear"
    epochs: int = 500
    batch_size: int = 64
    seed: int = 0
    momentum: float = 0.99
    learning_rates: tuple = (1e-2, 5e-3, 1e-3, 5e-4, 1e-4)
    hidden: tuple = (500, 1000, 2000, 1000, 500)
    weighted: bool = True

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            learning_rates=self.learning_rates,
            momentum=self.momentum,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.seed,
        )


def fit_from_dataset(ds: Dataset, fit_cfg: FitConfig, test_ds: Dataset | None = None):
    """Fit input/output PCA and the latent regressor; returns
    (surrogate, train_result_or_None)."""
    pca_in = fit_pca(ds.x_functions(), fit_cfg.d, weighted=fit_cfg.weighted)
    pca_out = fit_pca(ds.y_functions(), fit_cfg.d, weighted=fit_cfg.weighted)
    if fit_cfg.regressor == "nn":
        from .regressors import init_mlp

        dims = [fit_cfg.d, *fit_cfg.hidden, fit_cfg.d]
        init_model = init_mlp(dims, fit_cfg.seed)
    else:
        init_model = None

    test_metric = None
    if test_ds is not None and fit_cfg.regressor == "nn":
        from .pca import decode_batch, encode_batch
        from .regressors import mlp_forward
        from .surrogate import _target_weights, code_scaling_stats

        codes_in = encode_batch(pca_in, ds.xs)
        mean, std = code_scaling_stats(codes_in)
        tmean, tstd = code_scaling_stats(encode_batch(pca_out, ds.ys))
        test_codes = (encode_batch(pca_in, test_ds.xs) - mean) / std
        w = _target_weights(pca_out)

        def test_metric(mlp):
            preds = decode_batch(pca_out, tmean + tstd * mlp_forward(mlp, test_codes))
            ratios, _ = relative_errors(preds, test_ds.ys, w)
            return float(np.mean(ratios))

    return fit_surrogate(
        ds.xs,
        ds.ys,
        pca_in,
        pca_out,
        fit_cfg.regressor,
        fit_cfg.train_config(),
        init_model=init_model,
        test_metric_fn=test_metric,
    )


# ---------------------------------------------------------------------------
# model persistence

def save_surrogate(sur: Surrogate, directory: str, extra_meta: dict | None = None,
                   loss_history=None, test_history=None):
    os.makedirs(directory, exist_ok=True)
    meta = dict(extra_meta or {})
    meta.update(
        {
            "format_version": 1,
            "domain_in": sur.pca_in.domain,
            "domain_out": sur.pca_out.domain,
            "n_in": sur.pca_in.n,
            "n_out": sur.pca_out.n,
            "d_in": sur.pca_in.d,
            "d_out": sur.pca_out.d,
            "weighted": int(sur.pca_in.weighted),
            "n_eigs_in": sur.pca_in.eigenvalues.size,
            "n_eigs_out": sur.pca_out.eigenvalues.size,
        }
    )
    _write_tensor(os.path.join(directory, "basis_in.f64"), sur.pca_in.basis)
    _write_tensor(os.path.join(directory, "basis_out.f64"), sur.pca_out.basis)
    _write_tensor(os.path.join(directory, "eigs_in.f64"), sur.pca_in.eigenvalues)
    _write_tensor(os.path.join(directory, "eigs_out.f64"), sur.pca_out.eigenvalues)
    _write_tensor(os.path.join(directory, "input_mean.f64"), sur.input_mean)
    _write_tensor(os.path.join(directory, "input_std.f64"), sur.input_std)
    if sur.target_mean is not None:
        _write_tensor(os.path.join(directory, "target_mean.f64"), sur.target_mean)
        _write_tensor(os.path.join(directory, "target_std.f64"), sur.target_std)
    if isinstance(sur.regressor, LinearModel):
        meta["regressor"] = "linear"
        _write_tensor(os.path.join(directory, "lin_matrix.f64"), sur.regressor.matrix)
        _write_tensor(os.path.join(directory, "lin_bias.f64"), sur.regressor.bias)
    else:
        meta["regressor"] = "nn"
        meta["layer_dims"] = "x".join(str(v) for v in sur.regressor.dims)
        for i, (W, b) in enumerate(zip(sur.regressor.weights, sur.regressor.biases)):
            _write_tensor(os.path.join(directory, f"w{i}.f64"), W)
            _write_tensor(os.path.join(directory, f"b{i}.f64"), b)
    write_meta(os.path.join(directory, "meta"), meta)
    if loss_history is not None:
        with open(os.path.join(directory, "loss_history.csv"), "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["epoch", "train_mse", "test_relative_error"])
            for i, loss in enumerate(loss_history):
                test_val = (
                    test_history[i] if test_history and i < len(test_history) else ""
                )
                writer.writerow([i, repr(loss), test_val])


def load_surrogate(directory: str) -> Surrogate:
    meta = read_meta(os.path.join(directory, "meta"))
    n_in, n_out = int(meta["n_in"]), int(meta["n_out"])
    d_in, d_out = int(meta["d_in"]), int(meta["d_out"])
    weighted = bool(int(meta["weighted"]))
    pts_in = n_in ** 2 if meta["domain_in"] == "box2d" else n_in
    pts_out = n_out ** 2 if meta["domain_out"] == "box2d" else n_out
    pca_in = PcaModel(
        meta["domain_in"], n_in, d_in,
        _read_tensor(os.path.join(directory, "basis_in.f64"), (d_in, pts_in)),
        _read_tensor(os.path.join(directory, "eigs_in.f64"), (int(meta["n_eigs_in"]),)),
        weighted=weighted,
    )
    pca_out = PcaModel(
        meta["domain_out"], n_out, d_out,
        _read_tensor(os.path.join(directory, "basis_out.f64"), (d_out, pts_out)),
        _read_tensor(os.path.join(directory, "eigs_out.f64"), (int(meta["n_eigs_out"]),)),
        weighted=weighted,
    )
    mean = _read_tensor(os.path.join(directory, "input_mean.f64"), (d_in,))
    std = _read_tensor(os.path.join(directory, "input_std.f64"), (d_in,))
    if meta["regressor"] == "linear":
        reg = LinearModel(
            _read_tensor(os.path.join(directory, "lin_matrix.f64"), (d_out, d_in)),
            _read_tensor(os.path.join(directory, "lin_bias.f64"), (d_out,)),
        )
    else:
        dims = [int(v) for v in meta["layer_dims"].split("x")]
        weights, biases = [], []
        for i, (fi, fo) in enumerate(zip(dims[:-1], dims[1:])):
            weights.append(_read_tensor(os.path.join(directory, f"w{i}.f64"), (fo, fi)))
            biases.append(_read_tensor(os.path.join(directory, f"b{i}.f64"), (fo,)))
        reg = MlpModel(weights, biases)
    tmean = tstd = None
    if os.path.exists(os.path.join(directory, "target_mean.f64")):
        tmean = _read_tensor(os.path.join(directory, "target_mean.f64"), (d_out,))
        tstd = _read_tensor(os.path.join(directory, "target_std.f64"), (d_out,))
    return Surrogate(pca_in, pca_out, reg, mean, std, tmean, tstd)


# ---------------------------------------------------------------------------
# evaluation and transfer

def transfer_surrogate(sur: Surrogate, target_n: int) -> tuple[Surrogate, float]:
    """Move both PCA bases to another mesh; the regressor is untouched."""
    pca_in, res_in = transfer_basis(sur.pca_in, target_n)
    pca_out, res_out = transfer_basis(sur.pca_out, target_n)
    moved = Surrogate(pca_in, pca_out, sur.regressor, sur.input_mean, sur.input_std,
                      sur.target_mean, sur.target_std)
    return moved, max(res_in, res_out)


def evaluate(sur: Surrogate, test_ds: Dataset, allow_transfer: bool = False):
    """Relative test error plus per-prediction online seconds."""
    if test_ds.resolution != sur.pca_in.n:
        if not allow_transfer:
            raise ValueError(
                f"surrogate grid n={sur.pca_in.n} does not match test grid "
                f"n={test_ds.resolution}; pass allow_transfer to move the basis"
            )
        sur, _ = transfer_surrogate(sur, test_ds.resolution)
    t0 = time.perf_counter()
    error = relative_test_error(sur, test_ds.xs, test_ds.ys)
    online = (time.perf_counter() - t0) / test_ds.xs.shape[0]
    return error, online


# ---------------------------------------------------------------------------
# sweeps

SWEEP_AXES = ("resolution", "dimension", "samples")


def run_sweep(
    base: ProblemConfig,
    fit_cfg: FitConfig,
    axis: str,
    values,
    n_test: int,
    test_seed: int,
    regressors=("nn", "linear"),
):
    """Cross-product sweep holding the other axes fixed.

    Data is generated once at the finest resolution and subsampled; failures
    are recorded per cell and the sweep continues. Returns a list of row
    dicts with keys problem, resolution, d, N, regressor, relative_error,
    online_seconds, status.
    """
    from dataclasses import replace

    from .datasets import generate_dataset

    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    values = list(values)
    max_count = base.count if axis != "samples" else max(values)
    train_full = generate_dataset(replace(base, count=max_count))
    test_full = generate_dataset(replace(base, count=n_test, seed=test_seed))
    rows = []
    for value in sorted(values):
        if axis == "resolution":
            train = subsample_dataset(train_full, value)
            test = subsample_dataset(test_full, value)
            cell_fit = fit_cfg
        elif axis == "dimension":
            train, test = train_full, test_full
            cell_fit = replace(fit_cfg, d=value)
        else:
            train = Dataset(
                replace(train_full.config, count=value),
                train_full.xs[:value], train_full.ys[:value],
                xis=None if train_full.xis is None else train_full.xis[:value],
            )
            test = test_full
            cell_fit = fit_cfg
        for reg in regressors:
            row = {
                "problem": base.problem,
                "resolution": train.resolution,
                "d": cell_fit.d,
                "N": train.config.count,
                "regressor": reg,
            }
            try:
                sur, result = fit_from_dataset(train, replace(cell_fit, regressor=reg))
                error, online = evaluate(sur, test)
                row.update(
                    relative_error=error, online_seconds=online, status="ok"
                )
            except Exception as exc:  # record and continue
                row.update(
                    relative_error="", online_seconds="", status=f"failed: {exc}"
                )
            rows.append(row)
    return rows


SWEEP_COLUMNS = (
    "problem", "resolution", "d", "N", "regressor",
    "relative_error", "online_seconds", "status",
)


def write_csv(path: str, rows: list[dict], columns):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(columns))
        writer.writeheader()
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# dependency-free SVG line chart (CSV stays the authoritative output)

def write_svg_lines(path: str, series: dict, xlabel: str, ylabel: str,
                    width: int = 640, height: int = 420):
    """series: name -> (xs, ys). Log-log polyline chart."""
    pad = 60
    pts_all = [(x, y) for xs, ys in series.values() for x, y in zip(xs, ys) if y > 0]
    if not pts_all:
        raise ValueError("nothing to plot")
    lx = [np.log10(p[0]) for p in pts_all]
    ly = [np.log10(p[1]) for p in pts_all]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    x1 += 1e-9
    y1 += 1e-9

    def sx(v):
        return pad + (np.log10(v) - x0) / (x1 - x0) * (width - 2 * pad)

    def sy(v):
        return height - pad - (np.log10(v) - y0) / (y1 - y0) * (height - 2 * pad)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width/2:.0f}" y="{height-15}" text-anchor="middle" '
        f'font-size="13">{xlabel}</text>',
        f'<text x="18" y="{height/2:.0f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {height/2:.0f})">{ylabel}</text>',
    ]
    for i, (name, (xs, ys)) in enumerate(series.items()):
        color = colors[i % len(colors)]
        coords = " ".join(
            f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys) if y > 0
        )
        parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{width-pad+5}" y="{pad + 16*i}" font-size="12" '
            f'fill="{color}">{name}</text>'
        )
    parts.append("</svg>")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
