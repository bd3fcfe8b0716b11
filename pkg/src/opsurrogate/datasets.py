"""Problem definitions, dataset generation, and the on-disk dataset format.

A dataset directory holds a `meta` file (sorted `key = value` lines) and raw
little-endian float64 tensors (`x.f64`, `y.f64`, and `xi.f64` for the
coefficient model) with shapes recorded in `meta`. Writes are deterministic:
regenerating from the same config yields byte-identical files.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace

import numpy as np

from .grid import BOX2D, TORUS1D, GridFunction, subsample
from .random_fields import (
    COEFF_MODEL,
    MeasureSpec,
    coeff_model_basis,
    coeff_model_spec,
    derive_seed,
    mu_b_spec,
    mu_g_spec,
    mu_l_spec,
    mu_p_spec,
    nyquist_cutoff,
    sample_field,
)
from .solvers import EllipticProblem, solve_burgers_batch, solve_darcy, solve_poisson

FORMAT_VERSION = 1

PROBLEMS = (
    "linear_elliptic",
    "poisson",
    "darcy_lognormal",
    "darcy_piecewise",
    "burgers",
    "coeff_model",
)

_AUX_SALT = 0x5EEDC0FFEE  # seed stream for the fixed coefficient draw


@dataclass
class ProblemConfig:
    problem: str
    resolution: int
    count: int
    seed: int
    cutoff: int | None = None       # KL truncation; default = grid Nyquist
    beta: float = 1e-2              # Burgers viscosity
    t_final: float = 1.0
    coeff_dim: int = 64             # modes kept in the coefficient model
    solver_rtol: float = 1e-10

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}; choose from {PROBLEMS}")
        domain = TORUS1D if self.problem == "burgers" else BOX2D
        if self.cutoff is None:
            self.cutoff = nyquist_cutoff(domain, self.resolution)

    @property
    def domain(self) -> str:
        return TORUS1D if self.problem == "burgers" else BOX2D

    def measure(self) -> MeasureSpec:
        k = self.cutoff
        return {
            "linear_elliptic": mu_g_spec(k),
            "poisson": mu_g_spec(k),
            "darcy_lognormal": mu_l_spec(k),
            "darcy_piecewise": mu_p_spec(k),
            "burgers": mu_b_spec(k),
            "coeff_model": coeff_model_spec(k),
        }[self.problem]


@dataclass
class Dataset:
    config: ProblemConfig
    xs: np.ndarray                      # (count, input points)
    ys: np.ndarray                      # (count, output points)
    xis: np.ndarray | None = None       # coefficient model only
    extras: dict = field(default_factory=dict)

    @property
    def resolution(self) -> int:
        return self.config.resolution

    def x_functions(self) -> list[GridFunction]:
        return [GridFunction(self.config.domain, self.resolution, row) for row in self.xs]

    def y_functions(self) -> list[GridFunction]:
        return [GridFunction(self.config.domain, self.resolution, row) for row in self.ys]


def fixed_coefficient(resolution: int, cutoff: int | None = None) -> GridFunction:
    """The single frozen piecewise-constant coefficient of linear_elliptic.

    Deliberately independent of the dataset seed so train and test sets
    share the same operator; the draw uses its own fixed seed stream.
    """
    if cutoff is None:
        cutoff = nyquist_cutoff(BOX2D, resolution)
    spec = mu_p_spec(cutoff)
    return sample_field(spec, resolution, derive_seed(0, _AUX_SALT))


def generate_dataset(cfg: ProblemConfig, progress=None) -> Dataset:
    """Sample inputs, run the ground-truth solver, return paired data.

    Per-sample seeds are derived from the base seed, so samples are
    reproducible individually and safe to generate in parallel.
    """
    n = cfg.resolution
    spec = cfg.measure()
    count = cfg.count
    if cfg.problem == "burgers":
        xs = np.stack(
            [sample_field(spec, n, derive_seed(cfg.seed, i)).values for i in range(count)]
        )
        ys = solve_burgers_batch(xs, cfg.beta, cfg.t_final)
        return Dataset(cfg, xs, ys)

    if cfg.problem == "coeff_model":
        rngs = [np.random.default_rng(derive_seed(cfg.seed, i)) for i in range(count)]
        xis = np.stack([rng.uniform(-1.0, 1.0, size=cfg.coeff_dim) for rng in rngs])
        basis = coeff_model_basis(spec, cfg.coeff_dim, n)
        xs = xis @ basis
        ys = np.empty_like(xs)
        for i in range(count):
            ys[i] = solve_poisson(GridFunction(BOX2D, n, xs[i]), rtol=cfg.solver_rtol).values
            if progress:
                progress(i)
        return Dataset(cfg, xs, ys, xis=xis)

    ones = GridFunction(BOX2D, n, np.ones(n * n))
    a_fixed = (
        fixed_coefficient(n, cfg.cutoff) if cfg.problem == "linear_elliptic" else None
    )
    xs = np.empty((count, n * n))
    ys = np.empty((count, n * n))
    for i in range(count):
        x = sample_field(spec, n, derive_seed(cfg.seed, i))
        xs[i] = x.values
        if cfg.problem == "linear_elliptic":
            prob = EllipticProblem(a_fixed, x)
        elif cfg.problem == "poisson":
            prob = EllipticProblem(ones, x)
        else:  # darcy_lognormal, darcy_piecewise: coefficient -> solution, f = 1
            prob = EllipticProblem(x, ones)
        ys[i] = solve_darcy(prob, rtol=cfg.solver_rtol).values
        if progress:
            progress(i)
    return Dataset(cfg, xs, ys)


def subsample_dataset(ds: Dataset, target_n: int) -> Dataset:
    """Coarser copy by nested-grid subsampling: data at all other mesh
    sizes comes from the finest, so every resolution sees the same
    functions."""
    n = ds.resolution
    domain = ds.config.domain
    if target_n == n:
        return ds
    if domain == BOX2D:
        if (n - 1) % (target_n - 1) != 0:
            raise ValueError(f"{target_n} does not nest in {n}")
        stride = (n - 1) // (target_n - 1)
    else:
        if n % target_n != 0:
            raise ValueError(f"{target_n} does not nest in {n}")
        stride = n // target_n

    def sub(rows):
        return np.stack(
            [subsample(GridFunction(domain, n, r), stride).values for r in rows]
        )

    cfg = replace(ds.config, resolution=target_n, cutoff=ds.config.cutoff)
    return Dataset(cfg, sub(ds.xs), sub(ds.ys), xis=ds.xis)


# ---------------------------------------------------------------------------
# on-disk format

def _format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_meta(path: str, entries: dict):
    lines = [f"{k} = {_format_value(v)}\n" for k, v in sorted(entries.items())]
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(lines)


def read_meta(path: str) -> dict:
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def _write_tensor(path: str, arr: np.ndarray):
    with open(path, "wb") as fh:
        fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def _read_tensor(path: str, shape) -> np.ndarray:
    arr = np.fromfile(path, dtype="<f8")
    return arr.reshape(shape)


def write_dataset(ds: Dataset, directory: str):
    os.makedirs(directory, exist_ok=True)
    cfg = ds.config
    meta = {
        "format_version": FORMAT_VERSION,
        "problem": cfg.problem,
        "resolution": cfg.resolution,
        "count": cfg.count,
        "seed": cfg.seed,
        "cutoff": cfg.cutoff,
        "beta": cfg.beta,
        "t_final": cfg.t_final,
        "coeff_dim": cfg.coeff_dim,
        "solver_rtol": cfg.solver_rtol,
        "x_shape": f"{ds.xs.shape[0]}x{ds.xs.shape[1]}",
        "y_shape": f"{ds.ys.shape[0]}x{ds.ys.shape[1]}",
        "domain": cfg.domain,
    }
    if ds.xis is not None:
        meta["xi_shape"] = f"{ds.xis.shape[0]}x{ds.xis.shape[1]}"
    write_meta(os.path.join(directory, "meta"), meta)
    _write_tensor(os.path.join(directory, "x.f64"), ds.xs)
    _write_tensor(os.path.join(directory, "y.f64"), ds.ys)
    if ds.xis is not None:
        _write_tensor(os.path.join(directory, "xi.f64"), ds.xis)


def _parse_shape(s: str):
    return tuple(int(t) for t in s.split("x"))


def read_dataset(directory: str) -> Dataset:
    meta = read_meta(os.path.join(directory, "meta"))
    if int(meta["format_version"]) != FORMAT_VERSION:
        raise ValueError(f"unsupported dataset format version {meta['format_version']}")
    cfg = ProblemConfig(
        problem=meta["problem"],
        resolution=int(meta["resolution"]),
        count=int(meta["count"]),
        seed=int(meta["seed"]),
        cutoff=int(meta["cutoff"]),
        beta=float(meta["beta"]),
        t_final=float(meta["t_final"]),
        coeff_dim=int(meta["coeff_dim"]),
        solver_rtol=float(meta["solver_rtol"]),
    )
    xs = _read_tensor(os.path.join(directory, "x.f64"), _parse_shape(meta["x_shape"]))
    ys = _read_tensor(os.path.join(directory, "y.f64"), _parse_shape(meta["y_shape"]))
    xis = None
    if "xi_shape" in meta:
        xis = _read_tensor(
            os.path.join(directory, "xi.f64"), _parse_shape(meta["xi_shape"])
        )
    return Dataset(cfg, xs, ys, xis=xis)
