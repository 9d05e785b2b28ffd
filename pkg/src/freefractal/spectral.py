"""Spectral measures of single selfadjoints and their quantile plans.

A measure is stored as atoms plus a diffuse part given by a piecewise-linear
CDF on the support interval. The piecewise-linear restriction makes every
quantity here exactly computable: moments, quantile inversion (largest point
on a plateau), and the band mass (nu x nu)({|s-t| < delta}) all reduce to
closed-form segment arithmetic.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import PlanInfeasibleError

_FLOOR_GUARD = 1e-12


def _guarded_floor(x: float) -> int:
    """floor with a tiny guard so 0.1*30 = 2.9999999999999996 floors to 3."""
    return int(math.floor(x + _FLOOR_GUARD))


@dataclass(frozen=True)
class SpectralMeasure:
    """Compactly supported probability law: atoms + piecewise-linear diffuse CDF.

    Invariants enforced at construction:

    * atom masses sum with the diffuse mass to 1;
    * atom locations lie in [support_lo, support_hi], pairwise distinct;
    * atoms are sorted by non-increasing mass, ties broken by location;
    * the diffuse CDF is non-decreasing and continuous with F(a)=0, F(b)=c.
    """

    support_lo: float
    support_hi: float
    atoms: tuple[tuple[float, float], ...]
    diffuse_cdf: tuple[tuple[float, float], ...]

    def __init__(self, support_lo, support_hi, atoms=(), diffuse_cdf=None):
        a, b = float(support_lo), float(support_hi)
        if not a <= b:
            raise ValueError("support endpoints must satisfy a <= b")
        at = tuple((float(r), float(c)) for r, c in atoms)
        for r, c in at:
            if not a - 1e-12 <= r <= b + 1e-12:
                raise ValueError(f"atom location {r} outside support [{a}, {b}]")
            if not 0.0 < c <= 1.0:
                raise ValueError(f"atom mass {c} outside (0, 1]")
        if len({r for r, _ in at}) != len(at):
            raise ValueError("atom locations must be pairwise distinct")
        at = tuple(sorted(at, key=lambda rc: (-rc[1], rc[0])))

        atom_mass = sum(c for _, c in at)
        if diffuse_cdf is None:
            cdf = ((a, 0.0), (b, 0.0)) if a < b else ((a, 0.0),)
        else:
            cdf = tuple((float(x), float(f)) for x, f in diffuse_cdf)
        if len(cdf) < 1:
            raise ValueError("diffuse CDF needs at least one breakpoint")
        xs = [x for x, _ in cdf]
        fs = [f for _, f in cdf]
        if any(x2 < x1 for x1, x2 in zip(xs, xs[1:])):
            raise ValueError("CDF breakpoints must be non-decreasing in x")
        if any(f2 < f1 - 1e-15 for f1, f2 in zip(fs, fs[1:])):
            raise ValueError("CDF values must be non-decreasing")
        if abs(xs[0] - a) > 1e-12 or abs(xs[-1] - b) > 1e-12:
            raise ValueError("CDF must span the support interval")
        if abs(fs[0]) > 1e-12:
            raise ValueError("CDF must start at 0")
        c_total = fs[-1]
        if abs(atom_mass + c_total - 1.0) > 1e-9:
            raise ValueError(
                f"atom mass {atom_mass} plus diffuse mass {c_total} must equal 1"
            )
        object.__setattr__(self, "support_lo", a)
        object.__setattr__(self, "support_hi", b)
        object.__setattr__(self, "atoms", at)
        object.__setattr__(self, "diffuse_cdf", cdf)

    # -- basic structure ---------------------------------------------------

    @property
    def diffuse_mass(self) -> float:
        return self.diffuse_cdf[-1][1]

    def cdf_value(self, x: float) -> float:
        """Diffuse CDF evaluated at x (clamped to the support)."""
        pts = self.diffuse_cdf
        if x <= pts[0][0]:
            return pts[0][1]
        if x >= pts[-1][0]:
            return pts[-1][1]
        for (x0, f0), (x1, f1) in zip(pts, pts[1:]):
            if x0 <= x <= x1:
                if x1 == x0:
                    return f1
                return f0 + (f1 - f0) * (x - x0) / (x1 - x0)
        return pts[-1][1]

    def diffuse_segments(self) -> list[tuple[float, float, float]]:
        """(x0, x1, density) triples for segments carrying diffuse mass."""
        segs = []
        for (x0, f0), (x1, f1) in zip(self.diffuse_cdf, self.diffuse_cdf[1:]):
            if x1 > x0 and f1 > f0:
                segs.append((x0, x1, (f1 - f0) / (x1 - x0)))
        return segs

    def diffuse_interval_mass(self, lo: float, hi: float) -> float:
        """nu([lo, hi]); exact for the piecewise-linear CDF."""
        if hi < lo:
            return 0.0
        return self.cdf_value(hi) - self.cdf_value(lo)

    def moment(self, j: int) -> float:
        """Exact j-th moment: atoms plus segment integrals of t^j."""
        if j < 0:
            raise ValueError("moment order must be >= 0")
        total = sum(c * r**j for r, c in self.atoms)
        for x0, x1, rho in self.diffuse_segments():
            total += rho * (x1 ** (j + 1) - x0 ** (j + 1)) / (j + 1)
        return total

    def band_mass(self, delta: float) -> float:
        """(nu x nu) of the band {(s, t): |s - t| < delta}, exactly.

        Splits the product of density segments into rectangles and integrates
        the band-overlap length, a piecewise-linear function of s, by exact
        trapezoids between its breakpoints.
        """
        if delta <= 0:
            return 0.0
        segs = self.diffuse_segments()
        total = 0.0
        for (ax0, ax1, rho_a) in segs:
            for (bx0, bx1, rho_b) in segs:
                total += rho_a * rho_b * _band_rectangle_area(ax0, ax1, bx0, bx1, delta)
        return total

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "support": [self.support_lo, self.support_hi],
            "atoms": [[r, c] for r, c in self.atoms],
            "diffuse_cdf": [[x, f] for x, f in self.diffuse_cdf],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SpectralMeasure":
        return cls(
            support_lo=doc["support"][0],
            support_hi=doc["support"][1],
            atoms=doc.get("atoms", []),
            diffuse_cdf=doc.get("diffuse_cdf"),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "SpectralMeasure":
        return cls.from_dict(json.loads(text))

    # -- convenience constructors -------------------------------------------

    @classmethod
    def point_mass(cls, location: float) -> "SpectralMeasure":
        return cls(location, location, atoms=[(location, 1.0)],
                   diffuse_cdf=[(location, 0.0)])

    @classmethod
    def atomic(cls, atoms) -> "SpectralMeasure":
        locs = [r for r, _ in atoms]
        lo, hi = min(locs), max(locs)
        return cls(lo, hi, atoms=atoms, diffuse_cdf=[(lo, 0.0), (hi, 0.0)])

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "SpectralMeasure":
        return cls(lo, hi, atoms=[], diffuse_cdf=[(lo, 0.0), (hi, 1.0)])


def _band_rectangle_area(x0, x1, y0, y1, delta) -> float:
    """Area of {(s, t) in [x0,x1] x [y0,y1] : |s - t| < delta}.

    The overlap length of [s-delta, s+delta] with [y0, y1] is piecewise
    linear in s, so a trapezoid rule over its breakpoints is exact.
    """
    if x1 <= x0 or y1 <= y0:
        return 0.0
    crit = {x0, x1, y0 - delta, y0 + delta, y1 - delta, y1 + delta}
    knots = sorted(c for c in crit if x0 <= c <= x1)
    if not knots or knots[0] > x0:
        knots.insert(0, x0)
    if knots[-1] < x1:
        knots.append(x1)

    def overlap(s: float) -> float:
        return max(0.0, min(s + delta, y1) - max(s - delta, y0))

    area = 0.0
    for a, b in zip(knots, knots[1:]):
        if b > a:
            area += 0.5 * (overlap(a) + overlap(b)) * (b - a)
    return area


def delta0_single(mu: SpectralMeasure) -> float:
    """Free entropy dimension of one selfadjoint: 1 - sum of squared atom masses."""
    return 1.0 - sum(c * c for _, c in mu.atoms)


def quantiles(mu: SpectralMeasure, k: int) -> list[float]:
    """Largest lambda_{jk} with nu([a, lambda]) = j/k, for j = 1..floor(c*k).

    On plateaus of the CDF the right endpoint is returned. Returns an empty
    list when the diffuse part vanishes.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    c = mu.diffuse_mass
    if c <= 0.0:
        return []
    n_q = _guarded_floor(c * k)
    pts = mu.diffuse_cdf
    out = []
    for j in range(1, n_q + 1):
        t = j / k
        out.append(_largest_preimage(pts, min(t, c)))
    return out


def _largest_preimage(pts, t: float) -> float:
    """Rightmost x with F(x) = t on a piecewise-linear non-decreasing F."""
    best = None
    for (x0, f0), (x1, f1) in zip(pts, pts[1:]):
        if f0 - 1e-15 <= t <= f1 + 1e-15:
            if f1 == f0:
                best = x1
            elif abs(t - f1) <= 1e-15:
                best = x1
            else:
                best = x0 + (t - f0) * (x1 - x0) / (f1 - f0)
        if f0 > t + 1e-15:
            break
    if best is None:
        best = pts[-1][0] if t >= pts[-1][1] else pts[0][0]
    return best


@dataclass(frozen=True)
class QuantilePlan:
    """Retained quantiles and atom multiplicities for one matrix size k.

    ``kept_indices`` are 0-based positions into ``lambdas`` (the full quantile
    list); every kept quantile has successor gap < eps0 and sits at distance
    >= 3*eps0 from each retained atom location. ``gap_pass_indices`` is the
    larger set that passed the gap test alone, kept for the discarded-count
    inequality #(discarded) < (b - a)/eps0.
    """

    k: int
    tau: float
    eps0: float
    lambdas: tuple[float, ...]
    kept_indices: tuple[int, ...]
    gap_pass_indices: tuple[int, ...]
    l: int
    atom_count_per_atom: tuple[int, ...]
    retained_atoms: tuple[tuple[float, float], ...]
    tail_atoms: tuple[tuple[float, float], ...]
    p_k: int
    degenerate: bool = False
    feasible: bool = True

    @property
    def kept_values(self) -> list[float]:
        return [self.lambdas[i] for i in self.kept_indices]

    @property
    def beta(self) -> float:
        """tau + sum over retained atoms of c_i^2 (near-pair density bound)."""
        return self.tau + sum(c * c for _, c in self.retained_atoms)

    @property
    def discarded_count(self) -> int:
        return len(self.lambdas) - len(self.gap_pass_indices)


def _eps0_constraints_ok(mu: SpectralMeasure, tau: float, l: int, eps: float) -> bool:
    """Band mass, atom-neighborhood mass, and atom separation at scale eps."""
    if eps <= 0 or eps >= 1:
        return False
    if mu.band_mass(3.0 * eps) >= tau:
        return False
    retained = mu.atoms[:l]
    if l >= 1:
        bound = tau / (3.0 * l)
        for r, _ in retained:
            if mu.diffuse_interval_mass(r - eps, r + eps) >= bound:
                return False
    for i in range(len(retained)):
        for j in range(i + 1, len(retained)):
            if abs(retained[i][0] - retained[j][0]) <= 3.0 * eps:
                return False
    return True


def _gap_and_atom_selection(mu: SpectralMeasure, lam, l: int, eps: float):
    """(gap-passing indices, atom-cleared indices) at cutoff eps."""
    gap_pass = []
    for i in range(len(lam)):
        succ = lam[i + 1] if i + 1 < len(lam) else mu.support_hi
        if abs(lam[i] - succ) < eps:
            gap_pass.append(i)
    retained = mu.atoms[:l]
    kept = [
        i for i in gap_pass
        if all(abs(lam[i] - r) >= 3.0 * eps for r, _ in retained)
    ]
    return gap_pass, kept


def _select_eps0(mu: SpectralMeasure, tau: float, l: int, lam, k: int) -> float:
    """Largest dyadic eps0 meeting the separation constraints and retention.

    The three separation constraints are monotone in eps0, but retention is
    not: a larger eps0 passes more successor-gap tests while its 3*eps0 atom
    clearance discards more quantiles. A descending scan over the dyadic
    grid picks the largest scale at which the retained-count bound is also
    met, falling back to the best retention seen.
    """
    n_q = len(lam)
    bound = n_q - tau * n_q / 3.0 - tau * k / 3.0
    best_eps, best_kept = None, -1
    for j in range(1, 51):
        eps = 2.0**-j
        if not _eps0_constraints_ok(mu, tau, l, eps):
            continue
        if n_q == 0:
            return eps
        _, kept = _gap_and_atom_selection(mu, lam, l, eps)
        if len(kept) > bound:
            return eps
        if len(kept) > best_kept:
            best_eps, best_kept = eps, len(kept)
    if best_eps is not None:
        return best_eps
    return 2.0**-50


def build_quantile_plan(mu: SpectralMeasure, k: int, tau: float) -> QuantilePlan:
    """Select retained quantiles G_k, atom multiplicities, and eps0.

    Raises PlanInfeasibleError when the greedy selection falls below the
    cardinality bound #G_k > [ck] - tau*[ck]/3 - tau*k/3. Purely atomic
    measures with at most one atom trivialize; they come back flagged
    ``degenerate`` instead of raising, since every downstream formula
    degenerates with them in a controlled way.
    """
    if not 0.0 < tau < 0.5:
        raise ValueError("tau must lie in (0, 1/2)")
    if k < 1:
        raise ValueError("k must be >= 1")

    # smallest l with the tail atom mass below tau/3
    tail = sum(c for _, c in mu.atoms)
    l = 0
    for _, c in mu.atoms:
        if tail < tau / 3.0:
            break
        tail -= c
        l += 1

    lam = quantiles(mu, k)
    c = mu.diffuse_mass
    n_q = len(lam)

    # gap test uses the boundary extension lambda_{[ck]+1} := b
    eps0 = _select_eps0(mu, tau, l, lam, k)
    gap_pass, kept = _gap_and_atom_selection(mu, lam, l, eps0)

    retained = mu.atoms[:l]
    counts = tuple(_guarded_floor(cm * k) for _, cm in retained)
    p_k = len(kept) + sum(counts)
    degenerate = c <= 0.0 and len(mu.atoms) <= 1

    bound = n_q - tau * n_q / 3.0 - tau * k / 3.0
    feasible = len(kept) > bound or n_q == 0
    if not feasible and not degenerate:
        raise PlanInfeasibleError(
            f"kept {len(kept)} of {n_q} quantiles at k={k}, below the bound "
            f"{bound:.2f}; increase k or tau"
        )

    return QuantilePlan(
        k=k,
        tau=tau,
        eps0=eps0,
        lambdas=tuple(lam),
        kept_indices=tuple(kept),
        gap_pass_indices=tuple(gap_pass),
        l=l,
        atom_count_per_atom=counts,
        retained_atoms=tuple(retained),
        tail_atoms=tuple(mu.atoms[l:]),
        p_k=p_k,
        degenerate=degenerate,
        feasible=feasible,
    )


def near_pair_count(plan: QuantilePlan, eigenvalues) -> int:
    """#W_k: pairs i < j with |a_i - a_j| < eps0 among sorted eigenvalues."""
    vals = list(eigenvalues)
    n = len(vals)
    count = 0
    j = 0
    for i in range(n):
        if j < i + 1:
            j = i + 1
        while j < n and vals[j] - vals[i] < plan.eps0:
            j += 1
        count += j - i - 1
    return count


def near_pair_bound(plan: QuantilePlan) -> float:
    """The bound beta * k^2 that #W_k must stay below."""
    return plan.beta * plan.k**2
