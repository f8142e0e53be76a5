"""Univariate location/scale pairs used to standardise projections.

Two pairs are supported: (mean, population standard deviation) and
(median, raw median absolute deviation).  Conventions, fixed across the
library: the median of an even-length sequence is the midpoint of the two
central order statistics, the standard deviation divides by n, and the MAD
carries no normal-consistency factor.
"""
from __future__ import annotations

import enum

import numpy as np

__all__ = ["LocationScale", "location", "scale"]


class LocationScale(enum.Enum):
    """Which (location, scale) pair standardises 1-D projections."""

    MEAN_STD = "meanstd"
    MEDIAN_MAD = "medmad"

    @classmethod
    def parse(cls, text: str) -> "LocationScale":
        for kind in cls:
            if kind.value == text:
                return kind
        raise ValueError(f"unknown location/scale kind {text!r}")


def _as_values(values) -> np.ndarray:
    v = np.asarray(values, dtype=np.float64).reshape(-1)
    if v.size == 0:
        raise ValueError("location/scale of an empty sample is undefined")
    return v


def location(values, kind: LocationScale = LocationScale.MEAN_STD) -> float:
    v = _as_values(values)
    if kind is LocationScale.MEAN_STD:
        return float(v.mean())
    return float(np.median(v))


def scale(values, kind: LocationScale = LocationScale.MEAN_STD) -> float:
    v = _as_values(values)
    if kind is LocationScale.MEAN_STD:
        return float(v.std())
    med = np.median(v)
    return float(np.median(np.abs(v - med)))
