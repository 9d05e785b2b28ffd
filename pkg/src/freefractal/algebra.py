"""Finite-dimensional tracial algebras and trace-preserving block representations.

An algebra is a direct sum of matrix blocks M_{n_i} with trace weights
alpha_i summing to 1. ``plan_representation`` embeds it into M_k by
repeating each block l_i times plus a zero corner, choosing the
multiplicities so that the represented trace approximates the weights and
the commutant stays small; ``represent`` realizes the embedding on concrete
block elements.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import PlanSizeError, ShapeMismatchError
from .matrixcore import require_selfadjoint

_INT_TOL = 1e-9


@dataclass(frozen=True)
class FiniteDimAlgebra:
    """Direct sum of full matrix blocks with trace weights.

    blocks: tuple of (n_i, alpha_i); sum of alpha_i must be 1, all n_i >= 1.
    """

    blocks: tuple[tuple[int, float], ...]

    def __init__(self, blocks):
        bl = tuple((int(n), float(a)) for n, a in blocks)
        if not bl:
            raise ValueError("algebra needs at least one block")
        if any(n < 1 for n, _ in bl):
            raise ValueError("block sizes must be >= 1")
        if any(a <= 0.0 for _, a in bl):
            raise ValueError("trace weights must be positive")
        if abs(sum(a for _, a in bl) - 1.0) > 1e-9:
            raise ValueError("trace weights must sum to 1")
        object.__setattr__(self, "blocks", bl)

    @property
    def p(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> list[int]:
        return [n for n, _ in self.blocks]

    @property
    def weights(self) -> list[float]:
        return [a for _, a in self.blocks]

    def to_dict(self) -> dict:
        return {"blocks": [[n, a] for n, a in self.blocks]}

    @classmethod
    def from_dict(cls, doc: dict) -> "FiniteDimAlgebra":
        return cls(doc["blocks"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "FiniteDimAlgebra":
        return cls.from_dict(json.loads(text))


def delta0_fd(algebra: FiniteDimAlgebra) -> float:
    """Free entropy dimension of the algebra: 1 - sum alpha_i^2 / n_i^2."""
    return 1.0 - sum(a * a / (n * n) for n, a in algebra.blocks)


@dataclass(frozen=True)
class RepresentationPlan:
    """Block multiplicities embedding the algebra into M_k.

    multiplicities[i] copies of block i plus a zero corner of size `corner`;
    sum(l_i * n_i) + corner = k exactly. ``trace_error`` is the dual norm of
    the difference between the represented trace and the algebra trace,
    i.e. the sum over blocks of |l_i n_i / k - alpha_i|.
    """

    k: int
    multiplicities: tuple[int, ...]
    corner: int
    exact: bool
    trace_error: float
    n: int = 0
    d: int = 0
    m: tuple[int, ...] = ()

    def weights(self, algebra: FiniteDimAlgebra) -> list[float]:
        return [
            l * n / self.k for l, (n, _) in zip(self.multiplicities, algebra.blocks)
        ]


def commutant_unitary_dim(plan: RepresentationPlan) -> int:
    """dim H_k = corner^2 + sum l_i^2; the orbit manifold has dim k^2 - this."""
    return plan.corner**2 + sum(l * l for l in plan.multiplicities)


def _trace_error(algebra: FiniteDimAlgebra, mult, corner, k) -> float:
    return sum(
        abs(l * n / k - a) for l, (n, a) in zip(mult, algebra.blocks)
    )


def _largest_remainder(n: int, weights) -> list[int]:
    """Apportion n among the weights; deterministic largest-remainder rule."""
    raw = [n * w for w in weights]
    base = [int(math.floor(r)) for r in raw]
    short = n - sum(base)
    order = sorted(
        range(len(weights)), key=lambda i: (raw[i] - base[i], -i), reverse=True
    )
    for i in order[:short]:
        base[i] += 1
    return base


def _exact_multiplicities(algebra: FiniteDimAlgebra, k: int):
    """l_i = k alpha_i / n_i when they are all integers, else None."""
    mult = []
    for n, a in algebra.blocks:
        l = k * a / n
        if abs(l - round(l)) > _INT_TOL * max(1.0, abs(l)):
            return None
        mult.append(int(round(l)))
    if sum(l * n for l, (n, _) in zip(mult, algebra.blocks)) != k:
        return None
    return mult


def _proportional_weights(algebra: FiniteDimAlgebra) -> bool:
    """alpha_i n_j^2 == alpha_j n_i^2 for all pairs, within 1e-12."""
    bl = algebra.blocks
    for i in range(len(bl)):
        for j in range(i + 1, len(bl)):
            ni, ai = bl[i]
            nj, aj = bl[j]
            if abs(ai * nj * nj - aj * ni * ni) > 1e-12:
                return False
    return True


def _perturbed_weights(algebra: FiniteDimAlgebra, eps: float):
    """Shift mass between the most lopsided pair of blocks.

    Picks the largest dyadic eps1 <= eps/4 that strictly decreases
    sum beta_i^2/n_i^2; returns (beta, eps1, delta) with delta the largest
    dyadic margin below the achieved decrease.
    """
    bl = algebra.blocks
    base = sum(a * a / (n * n) for n, a in bl)
    best_pair, best_gap = None, 0.0
    for i in range(len(bl)):
        for j in range(len(bl)):
            if i == j:
                continue
            ni, ai = bl[i]
            nj, aj = bl[j]
            gap = ai * nj * nj - aj * ni * ni
            if gap > best_gap:
                best_gap, best_pair = gap, (i, j)
    if best_pair is None:
        return None
    i, j = best_pair  # moving mass from block i to block j decreases the sum
    for a_exp in range(1, 61):
        eps1 = 2.0**-a_exp
        if eps1 > eps / 4.0 or eps1 > bl[i][1]:
            continue
        beta = list(algebra.weights)
        beta[i] -= eps1
        beta[j] += eps1
        s = sum(b * b / (n * n) for b, (n, _) in zip(beta, bl))
        if s < base:
            delta = 0.0
            for b_exp in range(1, 61):
                cand = 2.0**-b_exp
                if cand < eps and s < base - cand:
                    delta = cand
                    break
            return beta, eps1, delta
    return None


def plan_representation(
    algebra: FiniteDimAlgebra, k: int, eps: float
) -> RepresentationPlan:
    """Plan an approximately trace-preserving embedding into M_k.

    Three regimes, tried in order:

    * exact: all k*alpha_i/n_i integral -> zero corner, zero trace error
      (covers commensurate weights at aligned k);
    * perturbed: some pair has alpha_i n_j^2 != alpha_j n_i^2, so the weights
      can be nudged to strictly shrink sum beta_i^2/n_i^2, rationalized by
      largest-remainder apportionment over n = floor(k / prod n_i) units;
    * rounded fallback at non-aligned k when no perturbation helps.

    Every returned plan is verified to satisfy trace_error < eps,
    corner < prod(n_i), and dim H_k <= k^2 * sum alpha_i^2/n_i^2; if the
    verification fails the k is below this construction's threshold and
    PlanSizeError is raised.
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    if k < 1:
        raise PlanSizeError("k must be >= 1")
    bl = algebra.blocks
    prod_n = math.prod(n for n, _ in bl)

    mult = _exact_multiplicities(algebra, k)
    if mult is not None:
        plan = RepresentationPlan(
            k=k,
            multiplicities=tuple(mult),
            corner=0,
            exact=True,
            trace_error=_trace_error(algebra, mult, 0, k),
        )
        _verify_plan(algebra, plan, eps)
        return plan

    if not _proportional_weights(algebra):
        if k < prod_n:
            raise PlanSizeError(
                f"k={k} below the minimum block period {prod_n} of this algebra"
            )
        perturbed = _perturbed_weights(algebra, eps)
        if perturbed is not None:
            beta, _eps1, _delta = perturbed
            n_units = k // prod_n
            d = n_units * prod_n
            m = _largest_remainder(n_units, beta)
            mult = [mi * (prod_n // n) for mi, (n, _) in zip(m, bl)]
            corner = k - sum(l * n for l, (n, _) in zip(mult, bl))
            plan = RepresentationPlan(
                k=k,
                multiplicities=tuple(mult),
                corner=corner,
                exact=False,
                trace_error=_trace_error(algebra, mult, corner, k),
                n=n_units,
                d=d,
                m=tuple(m),
            )
            _verify_plan(algebra, plan, eps)
            return plan

    # commensurate weights but k misaligned: round down per block
    mult = [int(math.floor(k * a / n + _INT_TOL)) for n, a in bl]
    corner = k - sum(l * n for l, (n, _) in zip(mult, bl))
    plan = RepresentationPlan(
        k=k,
        multiplicities=tuple(mult),
        corner=corner,
        exact=False,
        trace_error=_trace_error(algebra, mult, corner, k),
    )
    _verify_plan(algebra, plan, eps)
    return plan


def _verify_plan(algebra: FiniteDimAlgebra, plan: RepresentationPlan, eps: float):
    k = plan.k
    total = sum(l * n for l, (n, _) in zip(plan.multiplicities, algebra.blocks))
    if total + plan.corner != k or plan.corner < 0 or min(plan.multiplicities) < 0:
        raise PlanSizeError(f"multiplicities do not tile k={k}")
    prod_n = math.prod(n for n, _ in algebra.blocks)
    if not plan.exact and plan.corner >= prod_n:
        raise PlanSizeError(
            f"corner {plan.corner} >= {prod_n} at k={k}; k below the threshold"
        )
    if plan.trace_error >= eps:
        raise PlanSizeError(
            f"trace error {plan.trace_error:.4f} >= eps={eps} at k={k}; "
            "k below the threshold for this accuracy"
        )
    budget = k * k * sum(a * a / (n * n) for n, a in algebra.blocks)
    if commutant_unitary_dim(plan) > budget * (1.0 + 1e-12) + 1e-9:
        raise PlanSizeError(
            f"commutant dim {commutant_unitary_dim(plan)} exceeds {budget:.2f} "
            f"at k={k}; k below the threshold"
        )


def represent(
    plan: RepresentationPlan, algebra: FiniteDimAlgebra, element
) -> np.ndarray:
    """Block-diagonal image of a per-block element under the planned embedding.

    Each block contributes kron(x_i, I_{l_i}); the corner is zero. The map is
    multiplicative and star-preserving, and its normalized trace differs from
    the algebra trace by at most the plan's trace_error.
    """
    xs = list(element)
    if len(xs) != algebra.p:
        raise ShapeMismatchError(
            f"expected {algebra.p} block elements, got {len(xs)}"
        )
    parts = []
    for x, l, (n, _) in zip(xs, plan.multiplicities, algebra.blocks):
        a = require_selfadjoint(x)
        if a.shape[0] != n:
            raise ShapeMismatchError(f"block element is {a.shape[0]}x, expected {n}")
        if l > 0:
            parts.append(np.kron(a, np.eye(l, dtype=np.complex128)))
    if plan.corner > 0:
        parts.append(np.zeros((plan.corner, plan.corner), dtype=np.complex128))
    out = np.zeros((plan.k, plan.k), dtype=np.complex128)
    pos = 0
    for blockmat in parts:
        w = blockmat.shape[0]
        out[pos : pos + w, pos : pos + w] = blockmat
        pos += w
    return out


def standard_generators(algebra: FiniteDimAlgebra) -> list[list[np.ndarray]]:
    """A fixed two-element generating family, as per-block matrices.

    First generator: diagonal with globally distinct entries spread over
    [-1, 1], so its spectral projections separate all diagonal matrix units.
    Second: the symmetric path adjacency within each block, connecting the
    diagonal units into the full block.
    """
    total = sum(n for n, _ in algebra.blocks)
    values = np.linspace(-1.0, 1.0, total) if total > 1 else np.array([1.0])
    g_diag, g_path = [], []
    pos = 0
    for n, _ in algebra.blocks:
        g_diag.append(np.diag(values[pos : pos + n]).astype(np.complex128))
        adj = np.zeros((n, n), dtype=np.complex128)
        for i in range(n - 1):
            adj[i, i + 1] = adj[i + 1, i] = 1.0
        g_path.append(adj)
        pos += n
    return [g_diag, g_path]
