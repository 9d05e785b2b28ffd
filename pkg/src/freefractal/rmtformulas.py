"""Closed-form random-matrix and geometric constants, all in log space.

Everything here is a deterministic formula: Vandermonde densities, the
joint-eigenvalue normalization constant, the Selberg box integral, the
isodiametric ratio, the single-variable free entropy (logarithmic energy
plus a universal constant), and the orbit-neighborhood volume lower bound
assembled from them. Gamma and factorial arithmetic goes through
``math.lgamma`` so arguments up to 1e7 are safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .spectral import QuantilePlan, SpectralMeasure, near_pair_bound, near_pair_count


def vandermonde_sq_log(values: Sequence[float]) -> float:
    """log of the squared Vandermonde product; -inf on ties."""
    v = list(values)
    total = 0.0
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            diff = abs(v[i] - v[j])
            if diff == 0.0:
                return -math.inf
            total += 2.0 * math.log(diff)
    return total


def mehta_constant_log(k: int) -> float:
    """log D_k with D_k = pi^(k(k-1)/2) / prod_{j=1}^k j!.

    D_k normalizes the squared-Vandermonde eigenvalue density against
    entrywise Lebesgue measure (prod dx_ii prod dRe dIm) integrated over
    unordered eigenvalue tuples: vol{x : spectrum in E} = k! D_k times the
    integral over the ordered region. Volumes in the orthonormal coordinates
    of the Tr inner product carry the extra factor 2^(k(k-1)/2); see
    ``mehta_trace_coordinates_log_factor``.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    return 0.5 * k * (k - 1) * math.log(math.pi) - sum(
        math.lgamma(j + 1) for j in range(1, k + 1)
    )


def mehta_trace_coordinates_log_factor(k: int) -> float:
    """log 2^(k(k-1)/2): entry-Lebesgue to Tr-inner-product Lebesgue."""
    return 0.5 * k * (k - 1) * math.log(2.0)


def selberg_box_log(p: int, eps: float) -> float:
    """log of the squared-Vandermonde integral over the box [-eps, eps]^p.

    Uses the quadrature-calibrated product
    (2 eps)^(p^2) * prod_{j=1}^p Gamma(j)^2 Gamma(j+1) / Gamma(p+j);
    see ``selberg_box_quadrature_log`` for the independent oracle.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    if eps <= 0:
        raise ValueError("eps must be positive")
    total = p * p * math.log(2.0 * eps)
    for j in range(1, p + 1):
        total += 2.0 * math.lgamma(j) + math.lgamma(j + 1) - math.lgamma(p + j)
    return total


def gauss_legendre_nodes(n: int, lo: float, hi: float):
    """Nodes and weights on [lo, hi]; exact for polynomials of degree 2n-1."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
    return mid + half * x, half * w


def selberg_box_quadrature_log(p: int, eps: float, nodes: int = 8) -> float:
    """Tensor Gauss-Legendre evaluation of the same box integral.

    The integrand is a polynomial of per-variable degree 2(p-1), so 8 nodes
    per axis integrate it exactly for p <= 4. Serves as the independent
    calibration oracle for ``selberg_box_log``.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    x, w = gauss_legendre_nodes(nodes, -eps, eps)
    if p == 1:
        return math.log(float(np.sum(w)))
    grids = np.meshgrid(*([x] * p), indexing="ij")
    weight = np.ones_like(grids[0])
    for wi, g in zip(range(p), grids):
        shape = [1] * p
        shape[wi] = nodes
        weight = weight * w.reshape(shape)
    integrand = np.ones_like(grids[0])
    for i in range(p):
        for j in range(i + 1, p):
            integrand = integrand * (grids[i] - grids[j]) ** 2
    return math.log(float(np.sum(weight * integrand)))


def isodiametric_log_ratio(d: int) -> float:
    """log(2^d Gamma(d/2 + 1) / pi^(d/2)).

    Multiplying a Borel set's volume by this ratio bounds diameter^d from
    below (isodiametric inequality). The matrix-coordinate normalization
    -(d/2) log k is the caller's to add.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    return d * math.log(2.0) + math.lgamma(0.5 * d + 1.0) - 0.5 * d * math.log(math.pi)


def hausdorff_entropy_constant(n: int) -> float:
    """(n/2) log(2n / (pi e)): offset between n-entropy and free entropy."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 0.5 * n * math.log(2.0 * n / (math.pi * math.e))


_CHI_CONSTANT = 0.75 + 0.5 * math.log(2.0 * math.pi)


def _segment_pair_log_energy(a1, b1, a2, b2) -> float:
    """Exact double integral of log|s - t| over [a1,b1] x [a2,b2].

    K(u) = u^2 log|u| / 2 - 3 u^2 / 4 satisfies K'' = log|u|, so the integral
    is the alternating corner sum of K over the rectangle.
    """

    def K(u: float) -> float:
        if u == 0.0:
            return 0.0
        return 0.5 * u * u * math.log(abs(u)) - 0.75 * u * u

    return K(b1 - a2) - K(b1 - b2) - K(a1 - a2) + K(a1 - b2)


def log_energy(mu: SpectralMeasure) -> float:
    """Double integral of log|s - t| d nu d nu; -inf if mu has atoms."""
    if mu.atoms:
        return -math.inf
    segs = mu.diffuse_segments()
    if not segs:
        return 0.0
    a = np.array([s[0] for s in segs])
    b = np.array([s[1] for s in segs])
    r = np.array([s[2] for s in segs])

    def K(u: np.ndarray) -> np.ndarray:
        out = np.zeros_like(u)
        nz = u != 0.0
        un = u[nz]
        out[nz] = 0.5 * un * un * np.log(np.abs(un)) - 0.75 * un * un
        return out

    corner = (
        K(b[:, None] - a[None, :])
        - K(b[:, None] - b[None, :])
        - K(a[:, None] - a[None, :])
        + K(a[:, None] - b[None, :])
    )
    return float(np.sum(r[:, None] * r[None, :] * corner))


def log_energy_quadrature(mu: SpectralMeasure, nodes: int = 512) -> float:
    """Independent numeric oracle for the logarithmic energy.

    Reduces each segment pair to a difference-variable integral evaluated by
    Gauss-Legendre, split at zero so the log singularity sits at an endpoint.
    Vectorized over the second segment index, so many-segment measures (fine
    piecewise-linear approximations) stay tractable.
    """
    if mu.atoms:
        return -math.inf
    segs = mu.diffuse_segments()
    if not segs:
        return 0.0
    a = np.array([s[0] for s in segs])
    b = np.array([s[1] for s in segs])
    r = np.array([s[2] for s in segs])
    xi, wi = np.polynomial.legendre.leggauss(nodes)

    def clipped(lo: np.ndarray, hi: np.ndarray, a1, b1) -> np.ndarray:
        """Integrals of overlap(u) * log|u| over [lo_j, hi_j], vectorized in j."""
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        active = half > 0
        out = np.zeros_like(lo)
        if not np.any(active):
            return out
        x = mid[active, None] + half[active, None] * xi[None, :]
        w = half[active, None] * wi[None, :]
        # overlap of [u + a_j, u + b_j] with [a1, b1] along the difference line
        length = np.minimum(b1, x + b[active, None]) - np.maximum(a1, x + a[active, None])
        np.clip(length, 0.0, None, out=length)
        vals = np.where(x != 0.0, np.log(np.abs(x) + 1e-300), 0.0)
        out[active] = np.sum(w * length * vals, axis=1)
        return out

    total = 0.0
    for i in range(len(segs)):
        a1, b1, r1 = a[i], b[i], r[i]
        lo = a1 - b
        hi = b1 - a
        neg = clipped(lo, np.minimum(hi, 0.0), a1, b1)
        pos = clipped(np.maximum(lo, 0.0), hi, a1, b1)
        total += float(np.sum(r1 * r * (neg + pos)))
    return total


def chi_single(mu: SpectralMeasure) -> float:
    """Free entropy of one selfadjoint: log energy + 3/4 + log(2 pi)/2.

    Returns -inf whenever the measure has an atom (the diagonal divergence).
    """
    e = log_energy(mu)
    if e == -math.inf:
        return -math.inf
    return e + _CHI_CONSTANT


@dataclass(frozen=True)
class OrbitVolumeBound:
    """Lower bound vol(neighborhood_eps of the orbit) > exp(log_L + beta k^2 log eps).

    Valid for eps < eps0; monotone non-decreasing in eps since beta k^2 > 0.
    ``degenerate`` marks plans whose retained block is a scalar (the orbit is
    one point and the Vandermonde factor collapses).
    """

    k: int
    p_k: int
    beta: float
    log_L: float
    eps0: float
    near_pairs: int
    degenerate: bool = False

    def log_volume_lower(self, eps: float) -> float:
        if not 0.0 < eps < self.eps0:
            raise ValueError(f"bound valid only for eps in (0, {self.eps0})")
        if self.degenerate:
            return -math.inf
        return self.log_L + self.beta * self.k**2 * math.log(eps)

    def log_packing_lower(self, eps: float) -> float:
        """Packing count lower bound derived from the volume bound.

        log P_eps >= log_L + (beta k^2 - p_k^2) log eps + log Gamma(p_k^2/2+1)
                     - k^2 log 4 - (p_k^2/2) log(pi k),
        so the scaling exponent in |log eps| is (p_k^2 - beta k^2) / k^2.
        """
        if self.degenerate:
            return -math.inf
        if not 0.0 < eps < self.eps0:
            raise ValueError(f"bound valid only for eps in (0, {self.eps0})")
        d = self.p_k**2
        return (
            self.log_L
            + (self.beta * self.k**2 - d) * math.log(eps)
            + math.lgamma(0.5 * d + 1.0)
            - self.k**2 * math.log(4.0)
            - 0.5 * d * math.log(math.pi * self.k)
        )


def orbit_volume_lower_bound(
    plan: QuantilePlan, a_k_eigenvalues: Sequence[float], eps0: float | None = None
) -> OrbitVolumeBound:
    """Assemble the neighborhood-volume lower bound constant for a plan.

    log L = log D_{p_k} + k^2 log eps0 - log(p_k!) - k^2 log 2
            + sum_{j=1}^{p_k} log[ Gamma(j+2) Gamma(j+1)^2 / Gamma(p_k+j+1) ].

    The near-pair count of the eigenvalue list is checked against the
    beta k^2 budget; exceeding it would invalidate the exponent.
    """
    eps0 = plan.eps0 if eps0 is None else eps0
    k, p = plan.k, plan.p_k
    vals = sorted(a_k_eigenvalues)
    if len(vals) != p:
        raise ValueError(f"expected {p} eigenvalues, got {len(vals)}")
    pairs = near_pair_count(plan, vals)
    degenerate = p <= 1 or len(set(vals)) <= 1
    if not degenerate and pairs >= near_pair_bound(plan):
        raise ValueError(
            f"near pairs {pairs} exceed the budget {near_pair_bound(plan):.1f}"
        )
    tail = sum(
        math.lgamma(j + 2) + 2.0 * math.lgamma(j + 1) - math.lgamma(p + j + 1)
        for j in range(1, p + 1)
    )
    log_L = (
        mehta_constant_log(max(p, 1))
        + k * k * math.log(eps0)
        - math.lgamma(p + 1)
        - k * k * math.log(2.0)
        + tail
    )
    return OrbitVolumeBound(
        k=k,
        p_k=p,
        beta=plan.beta,
        log_L=log_L,
        eps0=eps0,
        near_pairs=pairs,
        degenerate=degenerate,
    )


def selberg_tail_log(p: int) -> float:
    """log prod_{j=1}^p Gamma(j+2) Gamma(j+1)^2 / Gamma(p+j+1)."""
    return sum(
        math.lgamma(j + 2) + 2.0 * math.lgamma(j + 1) - math.lgamma(p + j + 1)
        for j in range(1, p + 1)
    )


def superfactorial_log(p: int) -> float:
    """log prod_{j=1}^p j!."""
    return sum(math.lgamma(j + 1) for j in range(1, p + 1))


def constants_reference_table() -> list[dict]:
    """Small CSV-ready table of the exported constants for documentation."""
    rows = []
    for n in (1, 2, 3, 4):
        rows.append(
            {"name": f"hausdorff_entropy_constant({n})",
             "value": hausdorff_entropy_constant(n)}
        )
    for k in (1, 2, 3, 8):
        rows.append({"name": f"mehta_constant_log({k})", "value": mehta_constant_log(k)})
    for p in (1, 2, 3):
        rows.append({"name": f"selberg_box_log({p}, 1.0)",
                     "value": selberg_box_log(p, 1.0)})
    for d in (1, 2, 4, 1024):
        rows.append({"name": f"isodiametric_log_ratio({d})",
                     "value": isodiametric_log_ratio(d)})
    rows.append({"name": "chi_single(uniform[0,1])",
                 "value": chi_single(SpectralMeasure.uniform(0.0, 1.0))})
    return rows
