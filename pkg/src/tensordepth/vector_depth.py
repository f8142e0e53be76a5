"""Projection depth for vector samples.

Outlyingness of a point is the supremum over unit directions of the
standardised distance of its projection from the projected sample's centre;
depth is 1/(1 + outlyingness).  With (mean, std) the supremum has a closed
form: it is the Mahalanobis distance, attained along the direction
B^{-1}(x - mean).  With (median, MAD) the supremum is approximated by a
budgeted random search with local refinement, which is a lower bound on the
true value.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateSampleError, DimensionError, RankDeficiencyError
from .locscale import LocationScale

__all__ = [
    "RANK_RTOL",
    "OutlyingnessResult",
    "SearchBudget",
    "VectorSample",
    "depth_from_outlyingness",
    "rayleigh_outlyingness",
    "projection_depth",
    "approx_outlyingness_medmad",
    "pca_project",
    "principal_basis",
]

# Relative eigenvalue cutoff below which a covariance direction counts as
# carrying no variance.
RANK_RTOL = 1e-10


def depth_from_outlyingness(value: float) -> float:
    """1/(1+O); 0 in the limit O = +infinity."""
    if math.isinf(value):
        return 0.0
    return 1.0 / (1.0 + value)


@dataclass(frozen=True)
class OutlyingnessResult:
    """Optimal (or best-found) standardised distance and its unit direction."""

    value: float
    direction: np.ndarray


@dataclass(frozen=True)
class SearchBudget:
    """Effort knobs for the median/MAD direction search."""

    directions: int = 512
    refine_steps: int = 64
    keep: int = 8

    def __post_init__(self):
        if self.directions < 1 or self.refine_steps < 0 or self.keep < 1:
            raise ValueError(f"invalid search budget {self}")


class VectorSample:
    """n points in R^p with eagerly cached moments and factorisations.

    Immutable after construction: the mean, the population covariance B, its
    eigendecomposition and (when B is positive definite) its Cholesky factor
    are computed once, so per-query work stays O(p^2).
    """

    def __init__(self, points):
        pts = np.array(points, dtype=np.float64)
        if pts.ndim != 2:
            raise DimensionError("expected an (n, p) array of points")
        n, p = pts.shape
        if n < 1 or p < 1:
            raise DimensionError("need at least one point of dimension >= 1")
        pts.flags.writeable = False
        self._points = pts
        self._mean = pts.mean(axis=0)
        centered = pts - self._mean
        cov = centered.T @ centered / n
        cov = (cov + cov.T) / 2.0
        cov.flags.writeable = False
        self._cov = cov
        evals, evecs = np.linalg.eigh(cov)
        self._evals = evals  # ascending
        self._evecs = evecs
        lam_max = float(evals[-1])
        if lam_max > 0.0:
            self._rank = int(np.count_nonzero(evals > RANK_RTOL * lam_max))
        else:
            self._rank = 0
        self._cho = (np.linalg.cholesky(cov), True) if self._rank == p else None

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def n(self) -> int:
        return self._points.shape[0]

    @property
    def dim(self) -> int:
        return self._points.shape[1]

    @property
    def mean(self) -> np.ndarray:
        return self._mean

    @property
    def covariance(self) -> np.ndarray:
        return self._cov

    @property
    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of the covariance, ascending."""
        return self._evals

    @property
    def eigenvectors(self) -> np.ndarray:
        return self._evecs

    @property
    def rank(self) -> int:
        """Number of covariance eigenvalues above the relative cutoff."""
        return self._rank

    def require_positive_definite(self):
        if self._cho is None:
            deficient = self.dim - self._rank
            raise RankDeficiencyError(
                f"covariance is rank deficient: {deficient} of {self.dim} "
                "dimensions carry no variance",
                deficient=deficient,
            )

    def solve_covariance(self, rhs: np.ndarray) -> np.ndarray:
        """B^{-1} rhs via the cached Cholesky factor."""
        self.require_positive_definite()
        return scipy.linalg.cho_solve(self._cho, rhs, check_finite=False)


def _check_query(x, sample: VectorSample) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != sample.dim:
        raise DimensionError(
            f"query dimension {x.shape[0]} does not match sample dimension "
            f"{sample.dim}"
        )
    return x


def rayleigh_outlyingness(x, sample: VectorSample) -> OutlyingnessResult:
    """Exact (mean, std) outlyingness: sqrt((x-m)^T B^{-1} (x-m)).

    The maximising direction is B^{-1}(x-m) normalised; when the query sits
    at the mean every direction is optimal and the first basis vector is
    returned.  Raises :class:`RankDeficiencyError` when B is singular; the
    caller should project onto the principal subspace first.
    """
    x = _check_query(x, sample)
    y = x - sample.mean
    z = sample.solve_covariance(y)
    value = math.sqrt(max(float(y @ z), 0.0))
    nrm = float(np.linalg.norm(z))
    if nrm > 0.0:
        direction = z / nrm
    else:
        direction = np.zeros(sample.dim)
        direction[0] = 1.0
    direction.flags.writeable = False
    return OutlyingnessResult(value, direction)


def projection_depth(
    x,
    sample: VectorSample,
    kind: LocationScale = LocationScale.MEAN_STD,
    budget: SearchBudget | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Depth 1/(1+O) under the chosen location/scale pair.

    MEAN_STD uses the exact closed form; MEDIAN_MAD uses the budgeted
    search, so the depth is an upper bound on the true value.
    """
    if kind is LocationScale.MEAN_STD:
        value = rayleigh_outlyingness(x, sample).value
    else:
        result = approx_outlyingness_medmad(
            x, sample, budget or SearchBudget(), rng=rng
        )
        value = result.value
    return depth_from_outlyingness(value)


def _medmad_values(points: np.ndarray, x: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Median/MAD objective for each row of ``dirs``.

    A direction with MAD = 0 contributes 0 when the numerator also vanishes
    and +inf otherwise.
    """
    proj = points @ dirs.T                       # (n, m)
    med = np.median(proj, axis=0)
    mad = np.median(np.abs(proj - med), axis=0)
    qx = dirs @ x
    num = np.abs(qx - med)
    out = np.empty(dirs.shape[0])
    flat = mad == 0.0
    np.divide(num, mad, out=out, where=~flat)
    if np.any(flat):
        zero_num = num[flat] <= 1e-12 * (1.0 + np.abs(qx[flat]))
        out[flat] = np.where(zero_num, 0.0, np.inf)
    return out


def _refine_direction(points, x, u, value, steps):
    """Coordinate-wise hill climb on the sphere with a shrinking step."""
    p = u.shape[0]
    step = 0.25
    stall = 0
    for it in range(steps):
        j = it % p
        improved = False
        for s in (step, -step):
            cand = u.copy()
            cand[j] += s
            nrm = np.linalg.norm(cand)
            if nrm == 0.0:
                continue
            cand /= nrm
            v = _medmad_values(points, x, cand[None, :])[0]
            if math.isinf(v):
                return v, cand
            if v > value:
                value, u = v, cand
                improved = True
                break
        if improved:
            stall = 0
        else:
            stall += 1
            if stall >= p:
                step *= 0.5
                stall = 0
    return value, u


def approx_outlyingness_medmad(
    x,
    sample: VectorSample,
    budget: SearchBudget = SearchBudget(),
    *,
    rng: np.random.Generator | None = None,
    initial_directions=None,
) -> OutlyingnessResult:
    """Best-found median/MAD outlyingness over a budgeted direction search.

    Samples ``budget.directions`` directions uniformly on the sphere, then
    refines the ``budget.keep`` best by a coordinate-wise hill climb.  The
    result is a lower bound on the true supremum.  Extra starting
    directions (e.g. the previous iterate of an alternating solver) can be
    injected through ``initial_directions``; a direction with zero MAD and a
    nonzero numerator yields +inf and terminates the search immediately.
    """
    x = _check_query(x, sample)
    if sample.n < 2:
        raise DegenerateSampleError("median/MAD search needs at least 2 points")
    if rng is None:
        rng = np.random.default_rng(0)
    p = sample.dim
    dirs = rng.standard_normal((budget.directions, p))
    norms = np.linalg.norm(dirs, axis=1)
    norms[norms == 0.0] = 1.0
    dirs /= norms[:, None]
    if initial_directions is not None:
        extra = np.atleast_2d(np.asarray(initial_directions, dtype=np.float64))
        dirs = np.vstack([extra, dirs])

    points = sample.points
    values = _medmad_values(points, x, dirs)
    inf_hits = np.flatnonzero(np.isinf(values))
    if inf_hits.size:
        d = dirs[inf_hits[0]].copy()
        d.flags.writeable = False
        return OutlyingnessResult(math.inf, d)

    order = np.argsort(values)[::-1][: budget.keep]
    best_value = float(values[order[0]])
    best_dir = dirs[order[0]].copy()
    for i in order:
        value, u = _refine_direction(
            points, x, dirs[i].copy(), float(values[i]), budget.refine_steps
        )
        if value > best_value:
            best_value, best_dir = value, u
        if math.isinf(value):
            break
    best_dir.flags.writeable = False
    return OutlyingnessResult(best_value, best_dir)


def principal_basis(sample: VectorSample, rank_rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (p, r) of the covariance's nonzero eigenspace.

    Columns are ordered by descending eigenvalue.  Raises
    :class:`DegenerateSampleError` when the covariance is identically zero.
    """
    evals = sample.eigenvalues
    lam_max = float(evals[-1])
    if lam_max <= 0.0:
        raise DegenerateSampleError(
            "all points identical: covariance is zero, no subspace to keep"
        )
    keep = np.flatnonzero(evals > rank_rtol * lam_max)[::-1]
    return sample.eigenvectors[:, keep]


def pca_project(
    sample: VectorSample, x=None, rank_rtol: float = RANK_RTOL
):
    """Project the sample (and optionally a query) onto its nonzero subspace.

    Projection is an uncentered change of basis onto the retained
    eigenvectors, so the projected covariance is positive definite and
    depth values computed downstream are unchanged apart from the discarded
    null-space components of the query, which are dropped.
    """
    basis = principal_basis(sample, rank_rtol)
    projected = VectorSample(sample.points @ basis)
    if x is None:
        return projected, None
    x = _check_query(x, sample)
    return projected, basis.T @ x
