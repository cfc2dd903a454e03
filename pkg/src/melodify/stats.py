"""Series summaries that drive the musical mapping.

A quantitative series is reduced to: piecewise-linear trend segments,
a note-density class (points per bar), a spread class (quartile
dispersion mapped to a pitch span), and, for part-to-whole data,
normalized category proportions.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import AllZero, NegativeProportion, TooShort


class TrendDirection(str, Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"
    NEUTRAL = "neutral"


@dataclass(frozen=True)
class TrendSegment:
    """One fitted span; end_index is inclusive and shared with the next
    segment, the way adjacent edges of a polyline share a vertex."""

    start_index: int
    end_index: int
    slope: float
    direction: TrendDirection


class DensityLevel(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class DensityClass:
    level: DensityLevel
    points_per_bar: float


class VarianceLevel(str, Enum):
    NARROW = "narrow"
    MEDIUM = "medium"
    WIDE = "wide"


@dataclass(frozen=True)
class VarianceClass:
    level: VarianceLevel
    semitone_span: int


@dataclass(frozen=True)
class Proportions:
    """Per-category ratios in dataset row order, summing to 1."""

    entries: tuple[tuple[str, float], ...]


SPAN_BY_LEVEL = {
    VarianceLevel.NARROW: 12,
    VarianceLevel.MEDIUM: 24,
    VarianceLevel.WIDE: 36,
}

# Four bars make one phrase; density is measured against that window.
DEFAULT_BAR_COUNT = 4

DENSITY_MEDIUM_AT = 2.0
DENSITY_HIGH_AT = 8.0

VARIANCE_MEDIUM_AT = 0.1
VARIANCE_WIDE_AT = 0.4

DEFAULT_MAX_SEGMENTS = 6
# A fit with fewer segments wins when its cost is within 5% of the best.
SEGMENT_COST_SLACK = 0.05
# Slopes smaller than this fraction of the series' average step are flat.
NEUTRAL_SLOPE_FRACTION = 0.05


def least_squares_slope(series: Sequence[float]) -> float:
    """Ordinary least-squares slope of values against their indices."""
    n = len(series)
    if n < 2:
        raise TooShort(f"need at least 2 points for a slope, got {n}")
    mid = (n - 1) / 2
    numerator = sum((i - mid) * y for i, y in enumerate(series))
    denominator = sum((i - mid) ** 2 for i in range(n))
    return numerator / denominator


def _segment_cost_matrix(values: np.ndarray) -> np.ndarray:
    """cost[a, b] = squared residual of the best line over points a..b.

    Computed with prefix sums so each entry is O(1); only spans of at
    least two points are filled. Values are pre-shifted by the caller so
    the sums stay well conditioned.
    """
    n = values.size
    idx = np.arange(n, dtype=float)
    c_y = np.concatenate(([0.0], np.cumsum(values)))
    c_iy = np.concatenate(([0.0], np.cumsum(idx * values)))
    c_y2 = np.concatenate(([0.0], np.cumsum(values * values)))

    cost = np.full((n, n), np.inf)
    for a in range(n - 1):
        b = np.arange(a + 1, n)
        m = (b - a + 1).astype(float)
        s_y = c_y[b + 1] - c_y[a]
        s_xy = (c_iy[b + 1] - c_iy[a]) - a * s_y
        s_y2 = c_y2[b + 1] - c_y2[a]
        s_x = m * (m - 1) / 2.0
        s_x2 = (m - 1) * m * (2 * m - 1) / 6.0
        sxx = s_x2 - s_x * s_x / m
        sxy = s_xy - s_x * s_y / m
        syy = s_y2 - s_y * s_y / m
        cost[a, a + 1 :] = np.maximum(syy - sxy * sxy / sxx, 0.0)
    return cost


def segment_trends(
    series: Sequence[float], max_segments: int = DEFAULT_MAX_SEGMENTS
) -> list[TrendSegment]:
    """Split a series into contiguous least-squares line segments.

    Dynamic programming over breakpoint positions minimizes the total
    squared residual; among segment counts up to ``max_segments`` the
    smallest count whose optimal cost is within a 5% slack of the best
    achievable cost is returned. Adjacent segments share their boundary
    index and every segment covers at least two points.
    """
    n = len(series)
    if n < 2:
        raise TooShort(f"need at least 2 points to segment, got {n}")
    if max_segments < 1:
        raise ValueError("max_segments must be positive")

    # Shifting by the first value keeps the DP identical under constant
    # offsets of the input (exactly so for integer-valued data).
    values = np.asarray([v - series[0] for v in series], dtype=float)
    cost = _segment_cost_matrix(values)

    centered = values - values.mean()
    tolerance = 1e-12 * max(1.0, float(np.dot(centered, centered)))
    cost[cost < tolerance] = 0.0

    k_max = min(max_segments, n - 1)
    best = np.full((k_max + 1, n), np.inf)
    parent = np.zeros((k_max + 1, n), dtype=int)
    best[1, 1:] = cost[0, 1:]
    for k in range(2, k_max + 1):
        for end in range(k, n):
            lo = k - 1
            candidates = best[k - 1, lo:end] + cost[lo:end, end]
            i = int(np.argmin(candidates))
            best[k, end] = candidates[i]
            parent[k, end] = lo + i

    exact = best[1 : k_max + 1, n - 1]
    cumulative = np.minimum.accumulate(exact)
    target = (1.0 + SEGMENT_COST_SLACK) * cumulative[-1]
    k_star = int(np.nonzero(cumulative <= target)[0][0]) + 1
    chosen = int(np.nonzero(exact[:k_star] == cumulative[k_star - 1])[0][0]) + 1

    boundaries = [n - 1]
    end = n - 1
    for k in range(chosen, 1, -1):
        end = int(parent[k, end])
        boundaries.append(end)
    boundaries.append(0)
    boundaries.reverse()

    span = max(series) - min(series)
    epsilon = NEUTRAL_SLOPE_FRACTION * span / (n - 1)
    segments = []
    for a, b in zip(boundaries[:-1], boundaries[1:]):
        slope = least_squares_slope(series[a : b + 1])
        if abs(slope) <= epsilon:
            direction = TrendDirection.NEUTRAL
        elif slope > 0:
            direction = TrendDirection.ASCENDING
        else:
            direction = TrendDirection.DESCENDING
        segments.append(TrendSegment(a, b, slope, direction))
    return segments


def compute_density(series_length: int, bar_count: int = DEFAULT_BAR_COUNT) -> DensityClass:
    """Classify how many points must sound per bar of the phrase."""
    if bar_count < 1:
        raise ValueError("bar_count must be positive")
    per_bar = series_length / bar_count
    if per_bar < DENSITY_MEDIUM_AT:
        level = DensityLevel.LOW
    elif per_bar < DENSITY_HIGH_AT:
        level = DensityLevel.MEDIUM
    else:
        level = DensityLevel.HIGH
    return DensityClass(level, per_bar)


def compute_variance(series: Sequence[float]) -> VarianceClass:
    """Classify spread by the coefficient of quartile dispersion.

    Quartiles use linear interpolation over the sorted sample. When the
    quartiles sum to zero the range-to-mean-absolute ratio stands in; a
    constant series is always narrow.
    """
    n = len(series)
    if n < 2:
        raise TooShort(f"need at least 2 points to classify spread, got {n}")
    arr = np.asarray(series, dtype=float)
    low, high = float(arr.min()), float(arr.max())
    if low == high:
        return VarianceClass(VarianceLevel.NARROW, SPAN_BY_LEVEL[VarianceLevel.NARROW])
    q1, q3 = (float(q) for q in np.percentile(arr, [25.0, 75.0]))
    if q1 + q3 != 0:
        dispersion = (q3 - q1) / abs(q3 + q1)
    else:
        mean_abs = float(np.mean(np.abs(arr)))
        dispersion = (high - low) / mean_abs if mean_abs > 0 else 0.0
    if dispersion < VARIANCE_MEDIUM_AT:
        level = VarianceLevel.NARROW
    elif dispersion < VARIANCE_WIDE_AT:
        level = VarianceLevel.MEDIUM
    else:
        level = VarianceLevel.WIDE
    return VarianceClass(level, SPAN_BY_LEVEL[level])


def proportions(pairs: Iterable[tuple[str, float]]) -> Proportions:
    """Normalize (category, value) pairs into ratios summing to one."""
    items = list(pairs)
    for name, value in items:
        if value < 0:
            raise NegativeProportion(f"category {name!r} has negative value {value}")
    total = sum(value for _, value in items)
    if total <= 0:
        raise AllZero("proportions need at least one positive value")
    return Proportions(tuple((name, value / total) for name, value in items))
