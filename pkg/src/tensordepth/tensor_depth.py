"""Projection depth for matrix and higher-order tensor samples.

The outlyingness of a tensor is the supremum of the standardised distance
of its multilinear projections u_1^T X u_2 ... over unit directions, one
per mode.  It is computed by alternating: with all directions but one held
fixed, the remaining sub-problem is exactly a vector projection depth, so
each step can only increase the objective and the trajectory converges
monotonically.  Multi-restart is available because monotone convergence
does not imply a global optimum for every location/scale pair.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, RankDeficiencyError
from .locscale import LocationScale
from .tensor import DenseTensor, TensorSample
from .vector_depth import (
    SearchBudget,
    VectorSample,
    approx_outlyingness_medmad,
    depth_from_outlyingness,
    rayleigh_outlyingness,
)

__all__ = [
    "TpdConfig",
    "TpdResult",
    "tpd_outlyingness_matrix",
    "tpd_outlyingness_order_k",
    "tpd_outlyingness",
    "tpd_depth",
]


@dataclass(frozen=True)
class TpdConfig:
    """Controls for the alternating solver.

    The first start is always the normalised constant-ones direction; the
    remaining ``restarts - 1`` starts are uniform on the sphere.  A sweep
    updates every mode once; the solver stops when the relative objective
    gain of a full sweep drops below ``tol``.
    """

    kind: LocationScale = LocationScale.MEAN_STD
    restarts: int = 1
    tol: float = 1e-9
    max_iter: int = 200
    budget: SearchBudget = field(default_factory=SearchBudget)
    seed: int = 0

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass(frozen=True)
class TpdResult:
    """Converged objective, its directions and the per-step trajectory."""

    outlyingness: float
    depth: float
    directions: tuple[np.ndarray, ...]
    trajectory: tuple[float, ...]
    iterations: int
    converged: bool


def _ones_direction(dim: int) -> np.ndarray:
    return np.full(dim, 1.0 / math.sqrt(dim))


def _random_direction(dim: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        d = rng.standard_normal(dim)
        nrm = np.linalg.norm(d)
        if nrm > 0.0:
            return d / nrm


def _solve_subproblem(query, points, cfg, rng, warm):
    """One alternation step: a vector projection depth in the free mode."""
    vs = VectorSample(points)
    if cfg.kind is LocationScale.MEAN_STD:
        try:
            res = rayleigh_outlyingness(query, vs)
        except RankDeficiencyError as err:
            raise RankDeficiencyError(
                f"projected covariance along the current directions is "
                f"singular ({err.deficient} flat dimensions); reduce the "
                f"sample with tensor PCA first",
                deficient=err.deficient,
            ) from err
    else:
        warm_dirs = None if warm is None else warm[None, :]
        res = approx_outlyingness_medmad(
            query, vs, cfg.budget, rng=rng, initial_directions=warm_dirs
        )
    return res.value, np.asarray(res.direction)


def _canonical(direction: np.ndarray) -> np.ndarray:
    """Flip sign so the first nonzero coordinate is positive."""
    nz = np.flatnonzero(direction)
    if nz.size and direction[nz[0]] < 0.0:
        direction = -direction
    direction = direction.copy()
    direction.flags.writeable = False
    return direction


def _pick_best(runs) -> tuple:
    """Best restart by objective; near-ties break to the lexicographically
    smallest sign-canonicalised direction tuple."""
    best_value = max(run[0] for run in runs)
    tie_tol = 1e-12 * max(1.0, abs(best_value)) if math.isfinite(best_value) else 0.0
    candidates = [run for run in runs if run[0] >= best_value - tie_tol]
    if math.isinf(best_value):
        candidates = [run for run in runs if math.isinf(run[0])]

    def key(run):
        return tuple(np.concatenate([_canonical(d) for d in run[1]]))

    return min(candidates, key=key)


def _finish(runs) -> TpdResult:
    value, directions, trajectory, iterations, converged = _pick_best(runs)
    return TpdResult(
        outlyingness=value,
        depth=depth_from_outlyingness(value),
        directions=tuple(_canonical(d) for d in directions),
        trajectory=tuple(trajectory),
        iterations=iterations,
        converged=converged,
    )


def _converged(obj: float, base: float, tol: float) -> bool:
    if math.isinf(obj):
        return True
    return obj - base <= tol * max(1.0, abs(obj))


def _check_pair(x: DenseTensor, sample: TensorSample):
    if x.dims != sample.shape:
        raise DimensionError(
            f"query dims {x.dims} do not match sample shape {sample.shape}"
        )


def tpd_outlyingness_matrix(
    x: DenseTensor,
    sample: TensorSample,
    cfg: TpdConfig = TpdConfig(),
    rng: np.random.Generator | None = None,
) -> TpdResult:
    """Alternating outlyingness for order-2 samples.

    Fixing u, the rows x_i = X_i^T u form a vector sample whose projection
    depth yields v; fixing v, the columns X_i v yield u.  Each half-sweep
    value lands in the trajectory.
    """
    if x.order != 2:
        raise DimensionError(f"expected order-2 tensors, got order {x.order}")
    _check_pair(x, sample)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    data = sample.stack                      # (n, n1, n2)
    X = x.array
    n1 = X.shape[0]

    runs = []
    for r in range(cfg.restarts):
        u = _ones_direction(n1) if r == 0 else _random_direction(n1, rng)
        v = None
        trajectory: list[float] = []
        converged = False
        sweeps = 0
        for sweeps in range(1, cfg.max_iter + 1):
            base = trajectory[-1] if trajectory else None
            value, v = _solve_subproblem(
                X.T @ u, np.tensordot(data, u, axes=([1], [0])), cfg, rng, v
            )
            trajectory.append(value)
            if math.isinf(value):
                converged = True
                break
            value, u = _solve_subproblem(
                X @ v, np.tensordot(data, v, axes=([2], [0])), cfg, rng, u
            )
            trajectory.append(value)
            if math.isinf(value):
                converged = True
                break
            if base is None:
                base = trajectory[-2]
            if _converged(value, base, cfg.tol):
                converged = True
                break
        dirs = (u, v if v is not None else _ones_direction(X.shape[1]))
        runs.append((trajectory[-1], dirs, trajectory, sweeps, converged))
    return _finish(runs)


def _contract_all_but(arr: np.ndarray, directions, skip: int) -> np.ndarray:
    """Contract every mode except ``skip`` (1-based); axis 0 is the member
    index and is kept.  Contracting modes in descending order keeps each
    remaining mode at its original axis."""
    out = arr
    k = arr.ndim - 1
    for mode in range(k, 0, -1):
        if mode == skip:
            continue
        out = np.tensordot(out, directions[mode - 1], axes=([mode], [0]))
    return out


def tpd_outlyingness_order_k(
    x: DenseTensor,
    sample: TensorSample,
    cfg: TpdConfig = TpdConfig(),
    rng: np.random.Generator | None = None,
) -> TpdResult:
    """Alternating outlyingness for order-k samples, k >= 2.

    Directions for modes 1..k-1 are initialised and mode k is solved first;
    a sweep then updates modes k, k-1, ..., 1 cyclically, each update being
    a vector projection depth over the mode obtained by contracting the
    query and every member with the other modes' current directions.
    """
    k = x.order
    if k < 2:
        raise DimensionError(
            "order-1 samples are plain vectors: use the vector projection "
            "depth instead"
        )
    _check_pair(x, sample)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    data = sample.stack
    dims = x.dims
    xarr = x.array[None]                      # fake member axis for reuse

    runs = []
    for r in range(cfg.restarts):
        dirs: list[np.ndarray | None] = [None] * k
        for mode in range(1, k):
            dirs[mode - 1] = (
                _ones_direction(dims[mode - 1])
                if r == 0
                else _random_direction(dims[mode - 1], rng)
            )
        trajectory: list[float] = []
        converged = False
        sweeps = 0
        hit_inf = False
        for sweeps in range(1, cfg.max_iter + 1):
            base = trajectory[-1] if trajectory else None
            first_of_sweep = len(trajectory)
            for mode in range(k, 0, -1):
                query = _contract_all_but(xarr, dirs, mode)[0]
                points = _contract_all_but(data, dirs, mode)
                value, dirs[mode - 1] = _solve_subproblem(
                    query, points, cfg, rng, dirs[mode - 1]
                )
                trajectory.append(value)
                if math.isinf(value):
                    hit_inf = True
                    break
            if hit_inf:
                converged = True
                break
            if base is None:
                base = trajectory[first_of_sweep]
            if _converged(trajectory[-1], base, cfg.tol):
                converged = True
                break
        final_dirs = tuple(
            d if d is not None else _ones_direction(dims[m])
            for m, d in enumerate(dirs)
        )
        runs.append((trajectory[-1], final_dirs, trajectory, sweeps, converged))
    return _finish(runs)


def tpd_outlyingness(
    x: DenseTensor,
    sample: TensorSample,
    cfg: TpdConfig = TpdConfig(),
    rng: np.random.Generator | None = None,
) -> TpdResult:
    """Dispatch to the matrix path for order 2, the generic path otherwise."""
    if x.order == 2:
        return tpd_outlyingness_matrix(x, sample, cfg, rng)
    return tpd_outlyingness_order_k(x, sample, cfg, rng)


def tpd_depth(
    x: DenseTensor,
    sample: TensorSample,
    cfg: TpdConfig = TpdConfig(),
    rng: np.random.Generator | None = None,
) -> float:
    """Tensor projection depth 1/(1 + outlyingness)."""
    return tpd_outlyingness(x, sample, cfg, rng).depth
