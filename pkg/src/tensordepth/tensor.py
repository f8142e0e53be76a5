"""Dense tensors and the contractions every depth computation relies on.

Entries are float64 in a fixed row-major layout (last index fastest), so
:func:`vectorize` and :func:`reshape` are exact inverses everywhere in the
library.  Tensors and samples are immutable once built; all operations are
pure functions.  Modes are numbered from 1, as is usual for mode products.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import DimensionError

__all__ = [
    "DenseTensor",
    "TensorSample",
    "inner_product",
    "frobenius_norm",
    "mode_contract",
    "bilinear_project",
    "vectorize",
    "reshape",
]


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class DenseTensor:
    """An order-k real tensor stored as a contiguous float64 array.

    Parameters
    ----------
    values : array_like
        Entries of the tensor.  May be nested sequences, an ndarray, or a
        flat sequence combined with ``dims``.
    dims : sequence of int, optional
        Target dimensions; required when ``values`` is flat and the tensor
        has order > 1.  ``prod(dims)`` must equal the number of entries.
    """

    __slots__ = ("_array",)

    def __init__(self, values, dims=None):
        arr = np.array(values, dtype=np.float64, order="C")
        if dims is not None:
            dims = tuple(int(d) for d in dims)
            if arr.size != math.prod(dims):
                raise DimensionError(
                    f"cannot shape {arr.size} values into dims {dims}"
                )
            arr = arr.reshape(dims)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        if arr.size == 0 or min(arr.shape) < 1:
            raise DimensionError("every tensor dimension must be at least 1")
        self._array = _readonly(np.ascontiguousarray(arr))

    @property
    def array(self) -> np.ndarray:
        """Read-only ndarray view of the entries."""
        return self._array

    @property
    def dims(self) -> tuple[int, ...]:
        return self._array.shape

    @property
    def order(self) -> int:
        return self._array.ndim

    def vectorize(self) -> np.ndarray:
        """Flatten in layout order (last index fastest); read-only view."""
        return self._array.reshape(-1)

    def item(self) -> float:
        """Extract the bare real from a size-1 tensor (full contraction)."""
        if self._array.size != 1:
            raise DimensionError(f"tensor of dims {self.dims} is not a scalar")
        return float(self._array.reshape(-1)[0])

    def __repr__(self) -> str:
        return f"DenseTensor(dims={self.dims})"


class TensorSample:
    """A set of n same-shape tensors, the empirical distribution of the data.

    Internally the members are stacked into one (n, \\*dims) array, exposed
    read-only through :attr:`stack` for vectorised computations.
    """

    __slots__ = ("_stack",)

    def __init__(self, members):
        members = list(members)
        if not members:
            raise DimensionError("a sample needs at least one member")
        shape = members[0].dims
        for i, m in enumerate(members):
            if not isinstance(m, DenseTensor):
                raise DimensionError(f"member {i} is not a DenseTensor")
            if m.dims != shape:
                raise DimensionError(
                    f"member {i} has dims {m.dims}, expected {shape}"
                )
        self._stack = _readonly(np.stack([m.array for m in members]))

    @classmethod
    def from_array(cls, arr) -> "TensorSample":
        """Build a sample from an (n, \\*dims) array, first axis = member."""
        arr = np.array(arr, dtype=np.float64, order="C")
        if arr.ndim < 2:
            raise DimensionError("expected an (n, *dims) array")
        sample = cls.__new__(cls)
        sample._stack = _readonly(arr)
        return sample

    @property
    def stack(self) -> np.ndarray:
        return self._stack

    @property
    def shape(self) -> tuple[int, ...]:
        return self._stack.shape[1:]

    @property
    def order(self) -> int:
        return self._stack.ndim - 1

    def __len__(self) -> int:
        return self._stack.shape[0]

    def __getitem__(self, i: int) -> DenseTensor:
        return DenseTensor(self._stack[i])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def mean_tensor(self) -> DenseTensor:
        return DenseTensor(self._stack.mean(axis=0))

    def vectorized(self) -> np.ndarray:
        """Members flattened in layout order, shape (n, prod(dims))."""
        return self._stack.reshape(len(self), -1)


def inner_product(a: DenseTensor, b: DenseTensor) -> float:
    """Elementwise product sum of two same-shape tensors."""
    if a.dims != b.dims:
        raise DimensionError(f"dims differ: {a.dims} vs {b.dims}")
    return float(np.dot(a.vectorize(), b.vectorize()))


def frobenius_norm(a: DenseTensor) -> float:
    """sqrt of the inner product of a tensor with itself."""
    return float(np.linalg.norm(a.vectorize()))


def mode_contract(t: DenseTensor, mode: int, weights) -> DenseTensor:
    """Contract ``t`` with a vector along one mode, reducing the order by one.

    ``mode`` is 1-based.  Contracting the last remaining mode yields an
    order-1 tensor of size 1; use :meth:`DenseTensor.item` for the scalar.
    """
    if not 1 <= mode <= t.order:
        raise DimensionError(f"mode {mode} out of range for order {t.order}")
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != t.dims[mode - 1]:
        raise DimensionError(
            f"weight length {w.shape} does not match dim {t.dims[mode - 1]} "
            f"of mode {mode}"
        )
    out = np.tensordot(t.array, w, axes=([mode - 1], [0]))
    return DenseTensor(out)


def bilinear_project(x: DenseTensor, u, v) -> float:
    """u^T X v for an order-2 tensor; equals contracting both modes."""
    if x.order != 2:
        raise DimensionError(f"expected an order-2 tensor, got order {x.order}")
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != (x.dims[0],) or v.shape != (x.dims[1],):
        raise DimensionError(
            f"direction lengths {u.shape}, {v.shape} do not match dims {x.dims}"
        )
    return float(u @ x.array @ v)


def vectorize(x: DenseTensor) -> np.ndarray:
    """Flatten a tensor in the library's fixed layout (last index fastest)."""
    return x.vectorize()


def reshape(values, dims) -> DenseTensor:
    """Reinterpret flat values (or another tensor) under new dims."""
    if isinstance(values, DenseTensor):
        values = values.vectorize()
    return DenseTensor(values, dims=dims)
