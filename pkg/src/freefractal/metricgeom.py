"""Finite-scale packing, cover, and volume estimators on point clouds.

Estimator conventions, fixed so bound directions never flip:

* ``packing_number`` returns the size of a greedy 2*eps-separated subset of
  the sample (centers of mutually disjoint open eps-balls). It is a lower
  bound for the packing number of the underlying space.
* ``greedy_cover`` picks the first uncovered point as a center and covers
  everything within eps of it, so realized cell diameters stay <= 2*eps.
  Cover sums are therefore upper bounds for the Hausdorff pre-measure of the
  sample at diameter scale 2*eps.
* Exponents of size r*k^2 are never exponentiated: pow-sums of diameters run
  in log space via log-sum-exp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateGridError,
    EmptyCloudError,
    NonpositiveStatisticError,
    PackingPremiseError,
    ZeroHitsError,
)
from .matrixcore import MatrixTuple, rng_from_seed


class PointCloud:
    """Finite sample of a metric space.

    Points are stored as rows of a real coordinate array whenever the metric
    is (or embeds into) a Euclidean one; matrix tuples embed via
    ``MatrixTuple.flatten`` so that Euclidean distance equals the normalized
    Hilbert-Schmidt distance. An arbitrary distance callback is accepted as
    a fallback; it costs O(N^2) python-level calls.
    """

    def __init__(
        self,
        vectors: np.ndarray | None = None,
        metric: Callable[[int, int], float] | None = None,
        size: int | None = None,
    ):
        if vectors is not None:
            self.vectors = np.asarray(vectors, dtype=float)
            if self.vectors.ndim != 2:
                raise ValueError("vectors must be a 2-d array of row points")
            self.size = self.vectors.shape[0]
            self._dist = None
        else:
            if metric is None or size is None:
                raise ValueError("need either vectors or (metric, size)")
            self.vectors = None
            self.size = size
            self._dist = metric
        self._matrix_cache: np.ndarray | None = None

    @classmethod
    def from_tuples(cls, tuples: Sequence[MatrixTuple]) -> "PointCloud":
        if not tuples:
            return cls(vectors=np.zeros((0, 1)))
        return cls(vectors=np.vstack([t.flatten() for t in tuples]))

    def distance_matrix(self) -> np.ndarray:
        if self._matrix_cache is None:
            if self.vectors is not None:
                v = self.vectors
                n, dim = v.shape
                out = np.empty((n, n))
                # direct differences (chunked) stay accurate for near-equal
                # points where the gram-matrix shortcut loses digits
                chunk = max(1, 4_000_000 // max(n * dim, 1))
                for lo in range(0, n, chunk):
                    hi = min(lo + chunk, n)
                    diff = v[lo:hi, None, :] - v[None, :, :]
                    out[lo:hi] = np.sqrt(np.sum(diff * diff, axis=2))
                self._matrix_cache = out
            else:
                m = np.zeros((self.size, self.size))
                for i in range(self.size):
                    for j in range(i + 1, self.size):
                        m[i, j] = m[j, i] = self._dist(i, j)
                self._matrix_cache = m
        return self._matrix_cache

    def check_metric_axioms(self, trials: int = 64, seed: int = 0) -> bool:
        """Spot-check symmetry, nonnegativity and triangles on sampled triples."""
        if self.size < 3:
            return True
        d = self.distance_matrix()
        rng = rng_from_seed(seed)
        idx = rng.integers(0, self.size, size=(trials, 3))
        for i, j, k in idx:
            if d[i, j] < -1e-12 or abs(d[i, j] - d[j, i]) > 1e-9:
                return False
            if d[i, j] > d[i, k] + d[k, j] + 1e-9:
                return False
        return True


def packing_number(cloud: PointCloud, eps: float, order=None) -> int:
    """Greedy count of centers of mutually disjoint open eps-balls."""
    if cloud.size == 0:
        raise EmptyCloudError("packing_number on an empty cloud")
    if eps <= 0:
        raise ValueError("eps must be positive")
    sequence = range(cloud.size) if order is None else order
    sep = 2.0 * eps
    if cloud.vectors is not None and cloud._matrix_cache is None:
        # matrix-free path: distances to kept centers only
        v = cloud.vectors
        kept_rows: list[np.ndarray] = []
        count = 0
        block: np.ndarray | None = None
        for i in sequence:
            if count:
                if block is None or block.shape[0] != count:
                    block = np.vstack(kept_rows)
                diff = block - v[i]
                if float(np.min(np.einsum("ij,ij->i", diff, diff))) < sep * sep:
                    continue
            kept_rows.append(v[i])
            count += 1
            block = None
        return count
    d = cloud.distance_matrix()
    kept: list[int] = []
    for i in sequence:
        if not kept or np.min(d[i, kept]) >= sep:
            kept.append(i)
    return len(kept)


@dataclass(frozen=True)
class Cover:
    """A greedy ball cover: cell membership and realized diameters."""

    eps: float
    cells: tuple[tuple[int, ...], ...]
    diameters: tuple[float, ...]

    @property
    def count(self) -> int:
        return len(self.cells)

    def pow_sum(self, s: float, min_diameter: float = 0.0) -> float:
        """sum of diameter^s with cells inflated to at least min_diameter."""
        total = 0.0
        for diam in self.diameters:
            d = max(diam, min_diameter)
            if s == 0.0:
                total += 1.0
            elif d > 0.0:
                total += d**s
        return total

    def log_pow_sum(self, s: float, min_diameter: float = 0.0) -> float:
        """log of pow_sum computed by log-sum-exp; safe for s ~ r*k^2."""
        terms = []
        for diam in self.diameters:
            d = max(diam, min_diameter)
            if s == 0.0:
                terms.append(0.0)
            elif d > 0.0:
                terms.append(s * math.log(d))
        if not terms:
            return -math.inf
        top = max(terms)
        return top + math.log(sum(math.exp(t - top) for t in terms))


def greedy_cover(cloud: PointCloud, eps: float, order=None) -> Cover:
    """First-uncovered-point greedy cover by balls of radius eps.

    Cells are full eps-balls around their centers (cells may overlap), so
    realized diameters approach the 2*eps cap instead of being clipped to
    the uncovered remainder.
    """
    if cloud.size == 0:
        raise EmptyCloudError("greedy_cover on an empty cloud")
    if eps <= 0:
        raise ValueError("eps must be positive")
    d = cloud.distance_matrix()
    uncovered = np.ones(cloud.size, dtype=bool)
    cells, diams = [], []
    sequence = range(cloud.size) if order is None else order
    for i in sequence:
        if not uncovered[i]:
            continue
        mask = d[i] <= eps
        members = np.nonzero(mask)[0]
        uncovered[mask] = False
        cells.append(tuple(int(j) for j in members))
        if members.size > 1:
            diams.append(float(d[np.ix_(members, members)].max()))
        else:
            diams.append(0.0)
    return Cover(eps=eps, cells=tuple(cells), diameters=tuple(diams))


def best_cover(cloud: PointCloud, eps: float, s: float, restarts: int = 16,
               seed: int = 0, min_diameter: float = 0.0) -> Cover:
    """Randomized-greedy restarts; keeps the cover with the smallest pow-sum.

    The true infimum over covers is intractable; restarts over shuffled point
    orders give a measurable approximation gap.
    """
    best, best_val = None, math.inf
    rng = rng_from_seed(seed)
    for r in range(max(1, restarts)):
        order = None if r == 0 else rng.permutation(cloud.size)
        cov = greedy_cover(cloud, eps, order=order)
        val = cov.pow_sum(s, min_diameter=min_diameter)
        if val < best_val:
            best, best_val = cov, val
    return best


def cover_sum(cloud: PointCloud, eps: float, s: float, restarts: int = 16,
              seed: int = 0) -> float:
    """Upper bound for the diameter-2*eps Hausdorff s-pre-measure of the sample."""
    if s < 0:
        raise ValueError("s must be >= 0")
    cov = best_cover(cloud, eps, s, restarts=restarts, seed=seed)
    return cov.pow_sum(s)


def constrained_cover_sum(cloud: PointCloud, delta: float, eps: float, s: float,
                          restarts: int = 16, seed: int = 0) -> float:
    """Cover sum with cells inflated to diameter at least delta.

    Upper bound for the (delta < .)-constrained Hausdorff sum of the sample
    at diameter scale 2*eps; as delta -> 0 it agrees with ``cover_sum`` on
    the same greedy covers.
    """
    if not 0.0 < delta < eps:
        raise ValueError("need 0 < delta < eps")
    cov = best_cover(cloud, eps, s, restarts=restarts, seed=seed,
                     min_diameter=delta)
    return cov.pow_sum(s, min_diameter=delta)


def monotone_cover_sums(cloud: PointCloud, eps_grid: Sequence[float], s: float,
                        restarts: int = 16, seed: int = 0) -> list[float]:
    """Cover sums over a descending eps grid, monotone by construction.

    Any cover admissible at a smaller eps is admissible at a larger one, so
    the infimum form is non-increasing in eps; the estimator restores that by
    taking running minima from the smallest scale upward.
    """
    desc = list(eps_grid)
    if any(e2 >= e1 for e1, e2 in zip(desc, desc[1:])):
        raise ValueError("eps grid must be strictly descending")
    raw = [cover_sum(cloud, e, s, restarts=restarts, seed=seed) for e in desc]
    out = raw[:]
    for i in range(len(out) - 2, -1, -1):
        out[i] = min(out[i], out[i + 1])
    return out


def normalized_log_entropy(values: Sequence[float], k_grid: Sequence[int]) -> list[float]:
    """k^-2 * log(statistic) per k; raises on nonpositive statistics."""
    if len(values) != len(k_grid):
        raise ValueError("values and k_grid must have equal length")
    out = []
    for v, k in zip(values, k_grid):
        if v <= 0:
            raise NonpositiveStatisticError(f"statistic {v} is not positive")
        out.append(math.log(v) / (k * k))
    return out


def normalized_log_entropy_from_logs(log_values: Sequence[float],
                                     k_grid: Sequence[int]) -> list[float]:
    """k^-2 * log-statistic per k for statistics already held in log space."""
    if len(log_values) != len(k_grid):
        raise ValueError("log_values and k_grid must have equal length")
    return [lv / (k * k) for lv, k in zip(log_values, k_grid)]


@dataclass(frozen=True)
class DimensionEstimate:
    """A scaling exponent fitted from log statistics over an eps grid."""

    eps_grid: tuple[float, ...]
    k_grid: tuple[int, ...]
    log_counts: tuple[tuple[float, ...], ...]
    slope: float
    stderr: float
    residuals: tuple[float, ...] = ()
    intercept: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.slope):
            raise ValueError("fitted slope must be finite")


def fit_log_slope(x: Sequence[float], y: Sequence[float]):
    """Least squares slope/intercept/stderr/residuals of y against x."""
    xa, ya = np.asarray(x, float), np.asarray(y, float)
    n = xa.size
    xm, ym = xa.mean(), ya.mean()
    sxx = float(np.sum((xa - xm) ** 2))
    if sxx <= 0:
        raise DegenerateGridError("scales do not vary")
    slope = float(np.sum((xa - xm) * (ya - ym)) / sxx)
    intercept = ym - slope * xm
    resid = ya - (slope * xa + intercept)
    dof = max(n - 2, 1)
    stderr = math.sqrt(float(np.sum(resid**2)) / dof / sxx)
    return slope, intercept, stderr, resid


def scaling_exponent(
    eps_grid: Sequence[float],
    log_stats: Sequence[float],
    k_grid: Sequence[int] | None = None,
) -> DimensionEstimate:
    """Fit of (k^-2-normalized) log statistics against |log eps|.

    Requires at least 3 strictly descending scales spanning a decade. The
    statistics may be a flat list (one per scale) or one list per k; per-k
    rows are averaged after normalization.
    """
    eps = [float(e) for e in eps_grid]
    if len(eps) < 3:
        raise DegenerateGridError("need at least 3 scales")
    if any(e2 >= e1 for e1, e2 in zip(eps, eps[1:])):
        raise DegenerateGridError("eps grid must be strictly descending")
    if eps[-1] <= 0 or eps[0] / eps[-1] < 10.0 - 1e-9:
        raise DegenerateGridError("scales must span at least a decade")

    rows = np.asarray(log_stats, dtype=float)
    if rows.ndim == 1:
        table = rows[None, :]
        ks = (0,) if k_grid is None else tuple(k_grid)
    else:
        table = rows
        ks = tuple(k_grid) if k_grid is not None else tuple(range(table.shape[0]))
    if table.shape[-1] != len(eps):
        raise DegenerateGridError("statistics do not match the eps grid")

    x = [abs(math.log(e)) for e in eps]
    y = table.mean(axis=0)
    slope, intercept, stderr, resid = fit_log_slope(x, y)
    return DimensionEstimate(
        eps_grid=tuple(eps),
        k_grid=ks,
        log_counts=tuple(tuple(r) for r in table),
        slope=slope,
        stderr=stderr,
        residuals=tuple(float(r) for r in resid),
        intercept=intercept,
    )


def minkowski_log_volume(
    cloud: PointCloud,
    eps: float,
    ambient_dim: int | None = None,
    trials: int = 100_000,
    seed: int = 0,
    log_k_normalization: float = 0.0,
):
    """Monte Carlo log-volume of the eps-neighborhood of the sample.

    Hit-tests uniform draws from the bounding box inflated by eps. Returns
    (log_volume, (lo, hi)) where the interval is the Wilson 95% band mapped
    to log space. ``log_k_normalization`` is added verbatim; callers supply
    (n/2)*log(k) when working in matrix coordinates.
    """
    if cloud.vectors is None:
        raise ValueError("volume estimation needs coordinate vectors")
    if cloud.size == 0:
        raise EmptyCloudError("minkowski_log_volume on an empty cloud")
    if eps <= 0:
        raise ValueError("eps must be positive")
    v = cloud.vectors
    dim = v.shape[1] if ambient_dim is None else ambient_dim
    if dim != v.shape[1]:
        raise ValueError("ambient_dim does not match stored coordinates")
    lo = v.min(axis=0) - eps
    hi = v.max(axis=0) + eps
    widths = hi - lo
    log_box = float(np.sum(np.log(widths)))
    rng = rng_from_seed(seed)

    hits = 0
    chunk = max(256, 2_000_000 // max(cloud.size, 1))
    done = 0
    while done < trials:
        count = min(chunk, trials - done)
        draws = lo + rng.random((count, dim)) * widths
        sq = np.sum(draws * draws, axis=1)[:, None] + np.sum(v * v, axis=1)[None, :]
        sq -= 2.0 * draws @ v.T
        hits += int(np.sum(np.min(sq, axis=1) <= eps * eps))
        done += count
    if hits == 0:
        raise ZeroHitsError("no Monte Carlo hits; widen the box or add trials")

    p = hits / trials
    z = 1.959963984540054
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    p_lo, p_hi = max(center - half, 1e-300), min(center + half, 1.0)
    log_vol = math.log(p) + log_box + log_k_normalization
    return log_vol, (
        math.log(p_lo) + log_box + log_k_normalization,
        math.log(p_hi) + log_box + log_k_normalization,
    )


def packing_measure_transfer(
    packing_scan: Sequence[tuple[float, int]],
    C: float,
    alpha: float,
    eps0: float,
    measure_ratio: float,
) -> float:
    """Certified lower bound C * ratio for a constrained Hausdorff sum.

    Premises: the space is homogeneous (caller's responsibility; unitary
    orbits qualify) and the packing scan certifies P_eps > C * eps^-alpha at
    every tested scale below eps0. The conclusion transfers the scan constant
    to any subset carrying the given fraction of the invariant measure.
    """
    if not C > 1.0 or not 0.0 < eps0 < 1.0:
        raise PackingPremiseError("need C > 1 > eps0 > 0")
    if not 0.0 <= measure_ratio <= 1.0:
        raise ValueError("measure ratio must lie in [0, 1]")
    tested = [(e, c) for e, c in packing_scan if e < eps0]
    if not tested:
        raise PackingPremiseError("no scan scales below eps0")
    for e, count in tested:
        if not count > C * e ** (-alpha):
            raise PackingPremiseError(
                f"packing premise fails at eps={e}: {count} <= {C * e**-alpha:.3f}"
            )
    return C * measure_ratio
