"""Microstate membership, quantile microstates, orbit sampling, freeness.

The membership test checks operator-norm caps and word-moment targets up to
a word length m within tolerance gamma. Quantile microstates realize a
spectral measure as a diagonal matrix of CDF quantiles plus atoms with
proportional multiplicities; their unitary orbits are the sampling grounds
for all dimension experiments.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    EpsTooLargeError,
    ShapeMismatchError,
    SingletonOrbitError,
)
from .matrixcore import (
    MatrixTuple,
    conjugate_tuple,
    hs_distance,
    rng_from_seed,
    sample_gue,
    sample_haar_unitary,
    spawn_seeds,
    word_moment,
)
from .spectral import QuantilePlan, SpectralMeasure, build_quantile_plan


def all_words(arity: int, max_len: int) -> list[tuple[int, ...]]:
    """Every word of length 1..max_len over a 0-based alphabet."""
    out = []
    for q in range(1, max_len + 1):
        out.extend(itertools.product(range(arity), repeat=q))
    return out


@dataclass(frozen=True)
class MicrostateSpec:
    """Approximation parameters (R, m, gamma, k) plus word-moment targets.

    ``targets`` maps every word of length <= m over the alphabet to the trace
    value it must approximate; completeness is validated at construction.
    """

    R: float
    m: int
    gamma: float
    k: int
    arity: int
    targets: dict

    def __init__(self, R, m, gamma, k, arity, targets):
        if R <= 0 or gamma <= 0 or m < 1 or k < 1 or arity < 1:
            raise ValueError("R, gamma positive and m, k, arity >= 1 required")
        want = all_words(arity, m)
        missing = [w for w in want if tuple(w) not in targets]
        if missing:
            raise ValueError(f"missing target for word {missing[0]}")
        object.__setattr__(self, "R", float(R))
        object.__setattr__(self, "m", int(m))
        object.__setattr__(self, "gamma", float(gamma))
        object.__setattr__(self, "k", int(k))
        object.__setattr__(self, "arity", int(arity))
        object.__setattr__(
            self, "targets", {tuple(w): complex(v) for w, v in targets.items()}
        )

    @classmethod
    def from_measure(cls, mu: SpectralMeasure, R, m, k, gamma) -> "MicrostateSpec":
        """Single-variable targets: exact moments of the measure."""
        targets = {}
        for q in range(1, m + 1):
            targets[tuple([0] * q)] = mu.moment(q)
        return cls(R=R, m=m, gamma=gamma, k=k, arity=1, targets=targets)

    @classmethod
    def from_tuple(cls, x: MatrixTuple, R, m, gamma) -> "MicrostateSpec":
        """Targets read off a model tuple's own word moments."""
        targets = {w: word_moment(x, w) for w in all_words(x.arity, m)}
        return cls(R=R, m=m, gamma=gamma, k=x.k, arity=x.arity, targets=targets)

    def to_dict(self) -> dict:
        return {
            "R": self.R,
            "m": self.m,
            "gamma": self.gamma,
            "k": self.k,
            "arity": self.arity,
            "targets": [
                {"word": list(w), "value": [v.real, v.imag]}
                for w, v in sorted(self.targets.items())
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MicrostateSpec":
        targets = {
            tuple(e["word"]): complex(e["value"][0], e["value"][1])
            for e in doc["targets"]
        }
        return cls(doc["R"], doc["m"], doc["gamma"], doc["k"], doc["arity"], targets)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MicrostateSpec":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class MembershipReport:
    ok: bool
    max_operator_norm: float
    worst_word: tuple[int, ...] | None
    worst_moment_error: float

    def __bool__(self) -> bool:  # pragma: no cover - convenience
        return self.ok


def is_microstate(x: MatrixTuple, spec: MicrostateSpec) -> MembershipReport:
    """Membership in the microstate space, with the worst violation reported."""
    if x.k != spec.k:
        raise ShapeMismatchError(f"tuple size {x.k} != spec size {spec.k}")
    if x.arity != spec.arity:
        raise ShapeMismatchError(f"tuple arity {x.arity} != spec arity {spec.arity}")
    max_norm = max(x.operator_norms())
    worst_word, worst_err = None, 0.0
    for w, target in spec.targets.items():
        err = abs(word_moment(x, w) - target)
        if err > worst_err:
            worst_err, worst_word = err, w
    ok = max_norm <= spec.R and worst_err < spec.gamma
    return MembershipReport(ok, max_norm, worst_word, worst_err)


@dataclass(frozen=True)
class QuantileMicrostate:
    """Diagonal microstate diag(A_k, B_k) assembled from a quantile plan.

    A_k holds kept quantiles ascending, then retained atoms with
    multiplicities [c_i k]; B_k holds discarded quantiles ascending, tail
    atoms, and zero padding. beta = tau + sum of retained squared masses.
    """

    plan: QuantilePlan
    a_diag: tuple[float, ...]
    b_diag: tuple[float, ...]

    @property
    def k(self) -> int:
        return self.plan.k

    @property
    def beta(self) -> float:
        return self.plan.beta

    @property
    def y_diag(self) -> np.ndarray:
        return np.array(self.a_diag + self.b_diag, dtype=float)

    @property
    def matrix(self) -> np.ndarray:
        return np.diag(self.y_diag).astype(np.complex128)

    def as_tuple(self) -> MatrixTuple:
        return MatrixTuple([self.matrix])

    def orbit_dimension(self) -> int:
        """Real dimension of the unitary orbit: k^2 - sum of multiplicity^2."""
        counts: dict[float, int] = {}
        for v in self.y_diag:
            counts[v] = counts.get(v, 0) + 1
        return self.k**2 - sum(m * m for m in counts.values())


def build_quantile_microstate(
    mu: SpectralMeasure, k: int, tau: float, plan: QuantilePlan | None = None
) -> QuantileMicrostate:
    """Assemble the diagonal microstate for mu at size k.

    Propagates plan infeasibility. The layout follows the plan exactly, so
    eigenvalue multiplicities (and hence the orbit dimension) are read off
    the diagonal.
    """
    if plan is None:
        plan = build_quantile_plan(mu, k, tau)
    a_part = sorted(plan.kept_values)
    for (r, _), cnt in zip(plan.retained_atoms, plan.atom_count_per_atom):
        a_part.extend([r] * cnt)

    kept = set(plan.kept_indices)
    discarded = sorted(
        plan.lambdas[i] for i in range(len(plan.lambdas)) if i not in kept
    )
    b_part = list(discarded)
    for r, c in plan.tail_atoms:
        b_part.extend([r] * int(math.floor(c * k + 1e-12)))
    pad = k - plan.p_k - len(b_part)
    if pad < 0:
        b_part = b_part[: k - plan.p_k]
        pad = 0
    b_part.extend([0.0] * pad)
    return QuantileMicrostate(plan=plan, a_diag=tuple(a_part), b_diag=tuple(b_part))


@dataclass(frozen=True)
class OrbitSample:
    """Haar-conjugated copies of a base tuple, with the seeds that made them."""

    base: MatrixTuple
    points: tuple[MatrixTuple, ...]
    seeds: tuple[int, ...]


def orbit_sample(x: MatrixTuple, count: int, seed: int) -> OrbitSample:
    """count independent Haar conjugations of x."""
    if count < 1:
        raise ValueError("count must be >= 1")
    seeds = spawn_seeds(seed, count)
    points = tuple(
        conjugate_tuple(x, sample_haar_unitary(x.k, s)) for s in seeds
    )
    return OrbitSample(base=x, points=points, seeds=tuple(seeds))


def product_orbit_sample(
    bases: list[MatrixTuple], count: int, seed: int
) -> list[MatrixTuple]:
    """Joined tuples with each factor conjugated by its own Haar unitary.

    Realizes sampling of the product of the factors' orbits; the resulting
    law is invariant under rotating any single factor.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if not bases:
        raise ShapeMismatchError("need at least one base tuple")
    k = bases[0].k
    if any(b.k != k for b in bases):
        raise ShapeMismatchError("all bases must share one matrix size")
    seeds = spawn_seeds(seed, count * len(bases))
    out = []
    for j in range(count):
        comps = []
        for i, b in enumerate(bases):
            u = sample_haar_unitary(k, seeds[j * len(bases) + i])
            comps.extend(conjugate_tuple(b, u).components)
        out.append(MatrixTuple(comps))
    return out


def is_scalar_tuple(x: MatrixTuple, tol: float = 1e-12) -> bool:
    for c in x.components:
        lam = np.trace(c) / x.k
        if np.max(np.abs(c - lam * np.eye(x.k))) > tol:
            return False
    return True


def orbit_point_at_distance(
    x: MatrixTuple, eps: float, seed: int, tol: float = 1e-9, retries: int = 8
) -> MatrixTuple:
    """A point on the orbit of x at hs distance eps, via path bisection.

    Conjugates by exp(itH) along a Haar-sampled selfadjoint direction H and
    bisects t until the achieved distance is within tol of eps. The result
    is a conjugation, hence exactly on the orbit. Raises SingletonOrbitError
    for scalar tuples and EpsTooLargeError when no bracket exists by t = pi
    for any of the retried directions.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")
    if eps == 0.0:
        return x
    if is_scalar_tuple(x):
        raise SingletonOrbitError("orbit of a scalar tuple is a single point")

    for attempt, s in enumerate(spawn_seeds(seed, retries)):
        h = sample_gue(x.k, s)
        lam, vec = np.linalg.eigh(h)

        def point_at(t: float) -> MatrixTuple:
            u = (vec * np.exp(1j * t * lam)) @ vec.conj().T
            return conjugate_tuple(x, u)

        def dist(t: float) -> float:
            return hs_distance(point_at(t), x)

        # bracket the first crossing of eps on (0, pi]
        grid = np.linspace(0.0, math.pi, 65)
        lo, hi = 0.0, None
        for t in grid[1:]:
            if dist(t) >= eps:
                hi = t
                break
            lo = t
        if hi is None:
            continue
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            d = dist(mid)
            if abs(d - eps) <= tol:
                return point_at(mid)
            if d < eps:
                lo = mid
            else:
                hi = mid
        # bisection exhausted without hitting tol; try another direction
    raise EpsTooLargeError(
        f"no path bracket reached distance {eps} within {retries} directions"
    )


def sorted_eigenvalue_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Normalized l2 distance of sorted spectra: sqrt(sum (dx_i)^2 / k).

    This is the membership test for the eigenvalue-box neighborhood of an
    orbit: a matrix is within eps when this distance is <= eps. It lower
    bounds the hs distance (Hoffman-Wielandt).
    """
    ex = np.linalg.eigvalsh(np.asarray(x, dtype=np.complex128))
    ey = np.linalg.eigvalsh(np.asarray(y, dtype=np.complex128))
    if ex.shape != ey.shape:
        raise ShapeMismatchError("matrices differ in size")
    return float(np.sqrt(np.sum((ex - ey) ** 2) / ex.shape[0]))


def _centered_monomials(group: MatrixTuple, max_deg: int) -> dict[int, list[np.ndarray]]:
    """Centered monomials of each degree over one group's components."""
    k = group.k
    eye = np.eye(k, dtype=np.complex128)
    by_deg: dict[int, list[np.ndarray]] = {}
    for d in range(1, max_deg + 1):
        mats = []
        for idx in itertools.product(range(group.arity), repeat=d):
            prod = group.components[idx[0]]
            for i in idx[1:]:
                prod = prod @ group.components[i]
            mats.append(prod - (np.trace(prod) / k) * eye)
        by_deg[d] = mats
    return by_deg


def freeness_defect(groups: list[MatrixTuple], m: int) -> float:
    """Worst alternating centered word moment of total degree <= m.

    Letters are centered monomials in a single group's variables; consecutive
    letters come from different groups. The groups are (m, gamma)-free
    exactly when the returned defect is below gamma.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if not groups:
        raise ShapeMismatchError("need at least one group")
    k = groups[0].k
    if any(g.k != k for g in groups):
        raise ShapeMismatchError("groups must share one matrix size")

    letters = [_centered_monomials(g, m) for g in groups]
    worst = 0.0

    def extend(prod: np.ndarray | None, last: int, used: int):
        nonlocal worst
        for g in range(len(groups)):
            if g == last:
                continue
            for d in range(1, m - used + 1):
                for mat in letters[g][d]:
                    nxt = mat if prod is None else prod @ mat
                    tr = abs(np.trace(nxt)) / k
                    if tr > worst:
                        worst = tr
                    extend(nxt, g, used + d)

    extend(None, -1, 0)
    return worst
