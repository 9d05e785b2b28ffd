"""Selfadjoint matrix tuples, norms, sampling, and word moments.

Geometry conventions used throughout the library:

* ``hs_norm`` is the normalized Hilbert-Schmidt tuple norm
  ``|x|_2 = (sum_i tr_k(x_i^2))^(1/2)`` with ``tr_k`` the normalized trace.
* ``unnormalized_norm`` is ``sqrt(k) * hs_norm``; Lebesgue volume statements
  are taken with respect to the inner product of the unnormalized norm.
* Randomness is counter based: every sampler takes an explicit 64-bit seed
  and builds a ``numpy.random.Philox`` generator from it, so runs are
  bit-reproducible and parallel maps over seeds are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeMismatchError, WordIndexError

SELFADJOINT_TOL = 1e-12
UNITARY_TOL = 1e-10


def rng_from_seed(seed: int) -> np.random.Generator:
    """Philox counter-based generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def spawn_seeds(seed: int, count: int) -> list[int]:
    """Derive `count` child seeds from a master seed, deterministically."""
    state = np.random.SeedSequence(entropy=int(seed)).generate_state(count, np.uint64)
    return [int(s) for s in state]


def require_selfadjoint(x: np.ndarray, tol: float = SELFADJOINT_TOL) -> np.ndarray:
    """Validate a square array as selfadjoint and return it as complex128."""
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {a.shape}")
    defect = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    if defect > tol * scale:
        raise ShapeMismatchError(f"matrix is not selfadjoint (defect {defect:.3e})")
    return a


def require_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    a = np.asarray(u, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {a.shape}")
    defect = np.linalg.norm(a @ a.conj().T - np.eye(a.shape[0]), 2)
    if defect > tol:
        raise ShapeMismatchError(f"matrix is not unitary (defect {defect:.3e})")
    return a


@dataclass(frozen=True)
class MatrixTuple:
    """An n-tuple of k x k selfadjoint complex matrices.

    Components are validated and frozen at construction; instances are
    immutable and safe to share across threads.
    """

    components: tuple[np.ndarray, ...]

    def __init__(self, components: Iterable[np.ndarray]):
        comps = []
        for c in components:
            a = require_selfadjoint(c).copy()
            a.setflags(write=False)
            comps.append(a)
        if not comps:
            raise ShapeMismatchError("a matrix tuple needs at least one component")
        k = comps[0].shape[0]
        if any(c.shape[0] != k for c in comps):
            raise ShapeMismatchError("all components must share one matrix size")
        object.__setattr__(self, "components", tuple(comps))

    @property
    def k(self) -> int:
        return self.components[0].shape[0]

    @property
    def arity(self) -> int:
        return len(self.components)

    def flatten(self) -> np.ndarray:
        """Real coordinates in which Euclidean distance equals hs distance."""
        parts = []
        for c in self.components:
            parts.append(c.real.ravel())
            parts.append(c.imag.ravel())
        return np.concatenate(parts) / math.sqrt(self.k)

    def operator_norms(self) -> list[float]:
        return [float(np.abs(np.linalg.eigvalsh(c)).max()) for c in self.components]


def hs_norm(x: MatrixTuple) -> float:
    """Normalized Hilbert-Schmidt tuple norm |x|_2."""
    total = sum(float(np.vdot(c, c).real) for c in x.components)
    return math.sqrt(total / x.k)


def hs_distance(x: MatrixTuple, y: MatrixTuple) -> float:
    if x.k != y.k or x.arity != y.arity:
        raise ShapeMismatchError("tuples differ in size or arity")
    total = 0.0
    for a, b in zip(x.components, y.components):
        d = a - b
        total += float(np.vdot(d, d).real)
    return math.sqrt(total / x.k)


def unnormalized_norm(x: MatrixTuple) -> float:
    """The norm ||x||_2 = sqrt(k) * |x|_2 fixing the volume normalization."""
    return math.sqrt(x.k) * hs_norm(x)


def log_ball_volume(d: int, r: float) -> float:
    """log of the Euclidean d-ball volume of radius r, stable to d ~ 1e6."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if r <= 0:
        raise ValueError("radius must be positive")
    return 0.5 * d * math.log(math.pi) + d * math.log(r) - math.lgamma(0.5 * d + 1.0)


def ball_volume(d: int, r: float) -> float:
    return math.exp(log_ball_volume(d, r))


def sample_gue(k: int, seed: int) -> np.ndarray:
    """GUE-distributed selfadjoint with tr_k(x^2) -> 1 in expectation.

    Off-diagonal entries have E|x_ij|^2 = 1/k, diagonal variance 1/k, so the
    spectral law converges to the semicircle of radius 2.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = rng_from_seed(seed)
    g = rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))
    return (g + g.conj().T) / (2.0 * math.sqrt(k))


def sample_haar_unitary(k: int, seed: int) -> np.ndarray:
    """Haar-distributed unitary via Ginibre QR with phase normalization."""
    if k < 1:
        raise ValueError("k must be >= 1")
    rng = rng_from_seed(seed)
    z = (rng.standard_normal((k, k)) + 1j * rng.standard_normal((k, k))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def eigenvalues(x: np.ndarray) -> np.ndarray:
    """Ascending eigenvalues, with multiplicity, of a selfadjoint matrix."""
    return np.linalg.eigvalsh(require_selfadjoint(x))


def word_moment(x: MatrixTuple, word: Sequence[int]) -> complex:
    """tr_k of the product x_{i_1} ... x_{i_q}; word letters are 0-based."""
    if len(word) < 1:
        raise WordIndexError("word must have length >= 1")
    for i in word:
        if not 0 <= i < x.arity:
            raise WordIndexError(f"letter {i} outside alphabet of size {x.arity}")
    prod = x.components[word[0]]
    for i in word[1:]:
        prod = prod @ x.components[i]
    return complex(np.trace(prod)) / x.k


def conjugate_tuple(x: MatrixTuple, u: np.ndarray) -> MatrixTuple:
    """Componentwise u x_i u*; an hs-isometry preserving all word moments."""
    uu = require_unitary(u)
    if uu.shape[0] != x.k:
        raise ShapeMismatchError("unitary size does not match tuple size")
    uh = uu.conj().T
    return MatrixTuple(uu @ c @ uh for c in x.components)


def matrices_to_json(x: MatrixTuple) -> dict:
    """Debug serialization: flat row-major [re, im] pairs per component."""
    return {
        "k": x.k,
        "components": [
            [[float(v.real), float(v.imag)] for v in c.ravel()] for c in x.components
        ],
    }


def matrices_from_json(doc: dict) -> MatrixTuple:
    k = int(doc["k"])
    comps = []
    for flat in doc["components"]:
        a = np.array([complex(re, im) for re, im in flat], dtype=np.complex128)
        comps.append(a.reshape(k, k))
    return MatrixTuple(comps)
