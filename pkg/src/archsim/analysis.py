"""Statistics over sweep measurements.

Ordinary least squares via the normal equations, a fixed two-sided
critical-t table for significance calls, per-(c, w) aggregation of
replicate measurements, and the three trend correlations that summarize
how onset time and arch axes scale with crowd size and exit width:
T against 1/(c*w), M against c/w, and m against c*w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateInputError

# Two-sided critical values of Student's t.  Rows are df 1..30; larger
# df falls back to the asymptotic (normal) row.
_T_CRIT = {
    0.05: [
        12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
        2.201, 2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
        2.080, 2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042,
    ],
    0.01: [
        63.657, 9.925, 5.841, 4.604, 4.032, 3.707, 3.499, 3.355, 3.250, 3.169,
        3.106, 3.055, 3.012, 2.977, 2.947, 2.921, 2.898, 2.878, 2.861, 2.845,
        2.831, 2.819, 2.807, 2.797, 2.787, 2.779, 2.771, 2.763, 2.756, 2.750,
    ],
}
_T_CRIT_INF = {0.05: 1.960, 0.01: 2.576}


def critical_t(df: int, alpha: float = 0.05) -> float:
    if alpha not in _T_CRIT:
        raise ConfigError(f"alpha={alpha} not tabulated (use 0.05 or 0.01)")
    if df < 1:
        raise DegenerateInputError(f"df={df} must be >= 1")
    if df > len(_T_CRIT[alpha]):
        return _T_CRIT_INF[alpha]
    return _T_CRIT[alpha][df - 1]


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    n: int
    slope_se: float | None = None
    t_stat: float | None = None

    def predict(self, x: float) -> float:
        return self.slope * x + self.intercept

    def significant(self, alpha: float = 0.05):
        """True/False per the t-test on the slope, None when untestable."""
        if self.t_stat is None:
            return None
        return abs(self.t_stat) > critical_t(self.n - 2, alpha)


def ols_fit(points) -> RegressionFit:
    """Least-squares line y = slope*x + intercept over (x, y) pairs.

    R^2 is clamped to [0, 1] and defined as 0 when y has no variance.
    The slope t statistic needs n >= 3 and a nonzero standard error;
    otherwise it is left as None.
    """
    pts = np.asarray(list(points), dtype=float)
    if pts.size == 0:
        raise DegenerateInputError("need at least 2 points, got 0")
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise DegenerateInputError("points must be (x, y) pairs")
    x, y = pts[:, 0], pts[:, 1]
    n = len(x)
    if n < 2:
        raise DegenerateInputError(f"need at least 2 points, got {n}")
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise DegenerateInputError("all x values identical, slope undefined")
    sxy = float(np.sum((x - x.mean()) * (y - y.mean())))
    slope = sxy / sxx
    intercept = float(y.mean()) - slope * float(x.mean())
    sse = float(np.sum((y - (slope * x + intercept)) ** 2))
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        r_squared = 0.0
    else:
        r_squared = min(1.0, max(0.0, 1.0 - sse / sst))
    slope_se = None
    t_stat = None
    if n >= 3:
        slope_se = math.sqrt(sse / (n - 2) / sxx)
        if slope_se > 0.0:
            t_stat = slope / slope_se
    return RegressionFit(slope, intercept, r_squared, n, slope_se, t_stat)


def trend_correlation(xs, ys) -> float:
    """Pearson correlation coefficient in [-1, 1]."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) != len(y) or len(x) < 3:
        raise DegenerateInputError("need two equal-length sequences of >= 3 points")
    sxx = float(np.sum((x - x.mean()) ** 2))
    syy = float(np.sum((y - y.mean()) ** 2))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("zero variance, correlation undefined")
    sxy = float(np.sum((x - x.mean()) * (y - y.mean())))
    return sxy / math.sqrt(sxx * syy)


def _mean_sd(values) -> tuple[float, float]:
    vals = [float(v) for v in values]
    mean = sum(vals) / len(vals)
    if len(vals) == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in vals) / (len(vals) - 1)
    return mean, math.sqrt(var)


@dataclass
class CellStats:
    """Replicate statistics for one (c, w) factorial cell."""

    c: int
    w: int
    W: int
    n_replicates: int
    n_detected: int
    T_mean: float | None = None
    T_sd: float | None = None
    M_mean: float | None = None
    M_sd: float | None = None
    m_mean: float | None = None
    m_sd: float | None = None

    @property
    def arch_rate(self) -> float:
        return self.n_detected / self.n_replicates

    @property
    def saturated(self) -> bool:
        """Arch width pinned against the corridor walls."""
        return self.m_mean is not None and self.m_mean >= self.W - 1


def aggregate(rows) -> list[CellStats]:
    """Collapse per-replicate measurements to per-(c, w) statistics.

    T/M/m statistics are over the replicates where an arch was detected;
    cells with no detection keep them as None.  Sorted by (c, w).
    """
    by_cell: dict[tuple[int, int], list] = {}
    for row in rows:
        by_cell.setdefault((row.c, row.w), []).append(row)
    assert len({row.W for row in rows}) <= 1, "rows mix different corridor widths"
    out = []
    for (c, w) in sorted(by_cell):
        cell_rows = by_cell[(c, w)]
        detected = [r for r in cell_rows if r.arch_detected]
        stats = CellStats(
            c=c,
            w=w,
            W=cell_rows[0].W,
            n_replicates=len(cell_rows),
            n_detected=len(detected),
        )
        if detected:
            stats.T_mean, stats.T_sd = _mean_sd(r.T for r in detected)
            stats.M_mean, stats.M_sd = _mean_sd(r.M for r in detected)
            stats.m_mean, stats.m_sd = _mean_sd(r.m for r in detected)
        out.append(stats)
    return out


@dataclass
class TrendReport:
    T_vs_inverse_cw: float
    M_vs_c_over_w: float
    m_vs_cw: float
    n_cells: int
    n_saturated_excluded: int


def compute_trends(rows, include_saturated: bool = False) -> TrendReport:
    """Pearson correlations of cell means against the scaling predictors.

    Cells where the arch spans the whole corridor (mean m >= W - 1) are
    excluded by default: their width is set by the walls, not by c and w.
    """
    cells = [s for s in aggregate(rows) if s.n_detected > 0]
    usable = cells if include_saturated else [s for s in cells if not s.saturated]
    n_saturated = len(cells) - len(usable)
    if len(usable) < 3:
        raise DegenerateInputError(
            f"only {len(usable)} usable cells with detections, need >= 3"
        )
    cw = [s.c * s.w for s in usable]
    return TrendReport(
        T_vs_inverse_cw=trend_correlation([1.0 / v for v in cw], [s.T_mean for s in usable]),
        M_vs_c_over_w=trend_correlation([s.c / s.w for s in usable], [s.M_mean for s in usable]),
        m_vs_cw=trend_correlation(cw, [s.m_mean for s in usable]),
        n_cells=len(usable),
        n_saturated_excluded=n_saturated,
    )


def regression_by_c(rows, per_replicate: bool = False) -> dict[int, RegressionFit]:
    """Fit mean onset time T against exit width w, one line per crowd size.

    per_replicate=True fits the raw detected replicates instead of the
    cell means.  Crowd sizes whose points are degenerate (fewer than two
    distinct widths with detections) are skipped.
    """
    fits: dict[int, RegressionFit] = {}
    if per_replicate:
        points: dict[int, list[tuple[int, float]]] = {}
        for row in rows:
            if row.arch_detected:
                points.setdefault(row.c, []).append((row.w, float(row.T)))
    else:
        points = {}
        for s in aggregate(rows):
            if s.n_detected > 0:
                points.setdefault(s.c, []).append((s.w, s.T_mean))
    for c in sorted(points):
        try:
            fits[c] = ols_fit(sorted(points[c]))
        except DegenerateInputError:
            continue
    return fits
