"""Mode-wise PCA that removes a tensor sample's null space.

For order-2 samples the scatter matrices are sum_i (X_i - M)(X_i - M)^T and
sum_i (X_i - M)^T (X_i - M); their nonzero eigenspaces give column-orthonormal
bases V (left) and U (right), and members map to V^T X_i U.  Members are
projected uncentered; depth computations re-centre through their own location
measure, so nothing changes downstream.  Higher orders use the mode-l
unfolding scatter per mode with the same eigenvalue cutoff; the order-2 case
is the classical two-sided construction and the extension is mode-wise by
analogy.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSampleError, DimensionError
from .tensor import DenseTensor, TensorSample

__all__ = ["RANK_RTOL", "TensorPcaModel", "fit", "transform", "fit_transform"]

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class TensorPcaModel:
    """Per-mode orthonormal bases spanning the sample's nonzero subspaces."""

    mean: DenseTensor
    bases: tuple[np.ndarray, ...]        # (n_l, r_l), descending eigenvalue
    eigenvalues: tuple[np.ndarray, ...]  # retained scatter spectra, descending

    @property
    def dims(self) -> tuple[int, ...]:
        return self.mean.dims

    @property
    def order(self) -> int:
        return self.mean.order

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.bases)

    @property
    def left_basis(self) -> np.ndarray:
        """Mode-1 basis; for matrices, the rows' V factor."""
        return self.bases[0]

    @property
    def right_basis(self) -> np.ndarray:
        """Mode-2 basis; for matrices, the columns' U factor."""
        if self.order < 2:
            raise DimensionError("right basis defined for order >= 2 only")
        return self.bases[1]

    def to_json(self) -> str:
        doc = {
            "dims": list(self.dims),
            "ranks": list(self.ranks),
            "mean": self.mean.vectorize().tolist(),
            "bases": [b.reshape(-1).tolist() for b in self.bases],
            "eigenvalues": [e.tolist() for e in self.eigenvalues],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "TensorPcaModel":
        doc = json.loads(text)
        dims = tuple(int(d) for d in doc["dims"])
        ranks = tuple(int(r) for r in doc["ranks"])
        mean = DenseTensor(doc["mean"], dims=dims)
        bases = tuple(
            _readonly(np.asarray(flat, dtype=np.float64).reshape(d, r))
            for flat, d, r in zip(doc["bases"], dims, ranks)
        )
        eigenvalues = tuple(
            _readonly(np.asarray(e, dtype=np.float64)) for e in doc["eigenvalues"]
        )
        return cls(mean=mean, bases=bases, eigenvalues=eigenvalues)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def _mode_scatter(centered: np.ndarray, mode: int) -> np.ndarray:
    """sum_i unfold_mode(C_i) unfold_mode(C_i)^T over members C_i."""
    moved = np.moveaxis(centered, mode, 1)
    flat = moved.reshape(moved.shape[0], moved.shape[1], -1)
    scatter = np.einsum("nir,njr->ij", flat, flat)
    return (scatter + scatter.T) / 2.0


def _canonical_columns(basis: np.ndarray) -> np.ndarray:
    """Deterministic column signs: the largest-magnitude entry is positive."""
    basis = basis.copy()
    for j in range(basis.shape[1]):
        lead = int(np.argmax(np.abs(basis[:, j])))
        if basis[lead, j] < 0.0:
            basis[:, j] = -basis[:, j]
    return basis


def fit(sample: TensorSample, rank_rtol: float = RANK_RTOL) -> TensorPcaModel:
    """Eigendecompose each mode's centered scatter and keep its nonzero part.

    Ranks are the counts of eigenvalues above ``rank_rtol`` times the largest
    one, per mode.  Raises :class:`DegenerateSampleError` when all members
    are identical.
    """
    if len(sample) < 2:
        raise DegenerateSampleError("tensor PCA needs at least two members")
    stack = sample.stack
    mean = stack.mean(axis=0)
    centered = stack - mean
    bases = []
    spectra = []
    for mode in range(1, stack.ndim):
        scatter = _mode_scatter(centered, mode)
        evals, evecs = np.linalg.eigh(scatter)
        lam_max = float(evals[-1])
        if lam_max <= 0.0:
            raise DegenerateSampleError(
                "all members identical: every mode scatter is zero"
            )
        keep = np.flatnonzero(evals > rank_rtol * lam_max)[::-1]
        bases.append(_readonly(_canonical_columns(evecs[:, keep])))
        spectra.append(_readonly(evals[keep].copy()))
    return TensorPcaModel(
        mean=DenseTensor(mean), bases=tuple(bases), eigenvalues=tuple(spectra)
    )


def _project(arr: np.ndarray, bases) -> np.ndarray:
    # Contracting axis 1 with each basis in mode order appends the reduced
    # mode at the end, so after k contractions the axes are back in order.
    out = arr
    for basis in bases:
        out = np.tensordot(out, basis, axes=([1], [0]))
    return out


def transform(model: TensorPcaModel, x: DenseTensor) -> DenseTensor:
    """Map a tensor into the retained subspaces: V^T X U for matrices."""
    if x.dims != model.dims:
        raise DimensionError(f"dims {x.dims} do not match model dims {model.dims}")
    return DenseTensor(_project(x.array[None], model.bases)[0])


def fit_transform(
    sample: TensorSample, rank_rtol: float = RANK_RTOL
) -> tuple[TensorPcaModel, TensorSample]:
    """Fit on the sample and map every member; see :func:`transform`."""
    model = fit(sample, rank_rtol)
    return model, TensorSample.from_array(_project(sample.stack, model.bases))
