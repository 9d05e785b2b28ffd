"""Microstate membership, quantile microstates, orbits, freeness."""

import math

import numpy as np
import pytest

from freefractal.errors import (
    EpsTooLargeError,
    ShapeMismatchError,
    SingletonOrbitError,
)
from freefractal.matrixcore import (
    MatrixTuple,
    hs_distance,
    sample_gue,
    sample_haar_unitary,
    conjugate_tuple,
)
from freefractal.microstates import (
    MicrostateSpec,
    build_quantile_microstate,
    freeness_defect,
    is_microstate,
    orbit_point_at_distance,
    orbit_sample,
    product_orbit_sample,
    sorted_eigenvalue_distance,
)
from freefractal.spectral import SpectralMeasure

TWO_ATOM = SpectralMeasure.atomic([(0.0, 0.5), (1.0, 0.5)])
UNIFORM = SpectralMeasure.uniform(0.0, 1.0)


class TestMembership:
    def test_scalar_is_member(self):
        lam = 0.7
        spec = MicrostateSpec.from_measure(
            SpectralMeasure.point_mass(lam), R=1.0, m=4, k=6, gamma=0.01
        )
        x = MatrixTuple([lam * np.eye(6)])
        assert is_microstate(x, spec).ok

    def test_norm_violation(self):
        spec = MicrostateSpec.from_measure(UNIFORM, R=1.0, m=2, k=4, gamma=0.5)
        x = MatrixTuple([np.diag([2.0, 0.0, 0.0, 0.0])])
        rep = is_microstate(x, spec)
        assert not rep.ok
        assert rep.max_operator_norm == pytest.approx(2.0)

    def test_quantile_microstate_membership(self):
        ms = build_quantile_microstate(UNIFORM, 200, 0.4)
        spec = MicrostateSpec.from_measure(UNIFORM, R=2.0, m=3, k=200, gamma=0.05)
        rep = is_microstate(ms.as_tuple(), spec)
        assert rep.ok
        assert rep.worst_moment_error < 0.05

    def test_conjugation_invariance(self):
        ms = build_quantile_microstate(TWO_ATOM, 32, 0.3)
        spec = MicrostateSpec.from_measure(TWO_ATOM, R=2.0, m=3, k=32, gamma=0.05)
        x = ms.as_tuple()
        u = sample_haar_unitary(32, 17)
        assert is_microstate(x, spec).ok == is_microstate(conjugate_tuple(x, u), spec).ok

    def test_spec_requires_complete_targets(self):
        with pytest.raises(ValueError):
            MicrostateSpec(R=1.0, m=2, gamma=0.1, k=4, arity=1, targets={(0,): 0.0})

    def test_spec_round_trip(self):
        spec = MicrostateSpec.from_measure(UNIFORM, R=2.0, m=3, k=8, gamma=0.1)
        back = MicrostateSpec.from_json(spec.to_json())
        assert back.targets == spec.targets
        assert (back.R, back.m, back.gamma, back.k) == (2.0, 3, 0.1, 8)


class TestQuantileMicrostate:
    def test_point_mass(self):
        ms = build_quantile_microstate(SpectralMeasure.point_mass(0.3), 9, 0.3)
        assert np.allclose(ms.y_diag, 0.3)
        assert ms.b_diag == ()
        assert ms.orbit_dimension() == 0

    def test_two_atom_layout(self):
        ms = build_quantile_microstate(TWO_ATOM, 16, 0.3)
        assert list(ms.a_diag) == [0.0] * 8 + [1.0] * 8
        assert ms.b_diag == ()
        assert ms.orbit_dimension() == 16**2 // 2

    def test_two_atom_odd_k_padding(self):
        ms = build_quantile_microstate(TWO_ATOM, 9, 0.3)
        assert len(ms.a_diag) + len(ms.b_diag) == 9
        assert list(ms.b_diag) == [0.0]

    def test_uniform_kolmogorov_distance(self):
        ms = build_quantile_microstate(UNIFORM, 100, 0.4)
        vals = np.sort(ms.y_diag)
        ecdf = np.arange(1, 101) / 100
        ks = float(np.max(np.abs(vals - ecdf)))  # F(x) = x on [0,1]
        assert ks < 0.05

    def test_beta_value(self):
        ms = build_quantile_microstate(TWO_ATOM, 20, 0.3)
        assert ms.beta == pytest.approx(0.3 + 0.25 + 0.25, abs=1e-12)


class TestOrbitSample:
    def test_count_and_reproducibility(self):
        base = build_quantile_microstate(TWO_ATOM, 8, 0.3).as_tuple()
        s1 = orbit_sample(base, 5, 99)
        s2 = orbit_sample(base, 5, 99)
        for a, b in zip(s1.points, s2.points):
            assert np.array_equal(a.components[0], b.components[0])

    def test_eigenvalues_preserved(self):
        base = build_quantile_microstate(TWO_ATOM, 12, 0.3).as_tuple()
        sample = orbit_sample(base, 10, 5)
        want = np.linalg.eigvalsh(base.components[0])
        for p in sample.points:
            got = np.linalg.eigvalsh(p.components[0])
            assert np.max(np.abs(got - want)) < 1e-8

    def test_membership_preserved(self):
        ms = build_quantile_microstate(TWO_ATOM, 16, 0.3)
        spec = MicrostateSpec.from_measure(TWO_ATOM, R=2.0, m=3, k=16, gamma=0.05)
        sample = orbit_sample(ms.as_tuple(), 8, 3)
        assert all(is_microstate(p, spec).ok for p in sample.points)

    def test_diameter_bound(self):
        base = MatrixTuple([np.diag([1.0, -1.0])])
        sample = orbit_sample(base, 20, 1)
        for i, p in enumerate(sample.points):
            for q in sample.points[i + 1:]:
                assert hs_distance(p, q) <= 2.0 + 1e-12


class TestOrbitPointAtDistance:
    def test_zero_distance(self):
        x = build_quantile_microstate(TWO_ATOM, 8, 0.3).as_tuple()
        assert orbit_point_at_distance(x, 0.0, 1) is x

    def test_exact_distance(self):
        x = MatrixTuple([np.diag([1.0, -1.0])])
        y = orbit_point_at_distance(x, 0.1, seed=2)
        assert abs(hs_distance(x, y) - 0.1) <= 1e-9

    def test_result_on_orbit(self):
        x = build_quantile_microstate(TWO_ATOM, 10, 0.3).as_tuple()
        y = orbit_point_at_distance(x, 0.25, seed=3)
        assert sorted_eigenvalue_distance(
            x.components[0], y.components[0]
        ) < 1e-10

    def test_scalar_orbit_rejected(self):
        with pytest.raises(SingletonOrbitError):
            orbit_point_at_distance(MatrixTuple([np.eye(4)]), 0.1, 1)

    def test_eps_beyond_diameter(self):
        x = MatrixTuple([np.diag([1.0, -1.0])])
        with pytest.raises(EpsTooLargeError):
            orbit_point_at_distance(x, 5.0, seed=1)


class TestSortedEigenvalueDistance:
    def test_identical(self):
        x = sample_gue(6, 1)
        assert sorted_eigenvalue_distance(x, x) == 0.0

    def test_permuted_diagonal(self):
        assert sorted_eigenvalue_distance(np.diag([0.0, 1.0]), np.diag([1.0, 0.0])) == 0.0

    def test_conjugation_invariant(self):
        x = sample_gue(40, 2)
        u = sample_haar_unitary(40, 3)
        y = u @ x @ u.conj().T
        assert sorted_eigenvalue_distance(x, (y + y.conj().T) / 2) < 1e-8

    def test_lower_bounds_hs_distance(self):
        # Hoffman-Wielandt direction on random pairs
        for s in range(10):
            x, y = sample_gue(15, s), sample_gue(15, 1000 + s)
            lhs = sorted_eigenvalue_distance(x, y)
            rhs = hs_distance(MatrixTuple([x]), MatrixTuple([y]))
            assert lhs <= rhs + 1e-10


class TestFreeness:
    def test_identical_pair_fails(self):
        ms = build_quantile_microstate(TWO_ATOM, 16, 0.3)
        x = ms.as_tuple()
        defect = freeness_defect([x, x], 2)
        # centered square trace: tr (x - 1/2)^2 = 1/4
        assert defect >= 0.25 - 1e-12

    def test_scalar_groups_vanish(self):
        a = MatrixTuple([0.4 * np.eye(8)])
        b = MatrixTuple([1.5 * np.eye(8)])
        assert freeness_defect([a, b], 3) == pytest.approx(0.0, abs=1e-14)

    def test_rotated_gue_pairs_nearly_free(self):
        passes = 0
        trials = 20
        for s in range(trials):
            x = MatrixTuple([sample_gue(200, 2 * s)])
            y = conjugate_tuple(
                MatrixTuple([sample_gue(200, 2 * s + 1)]),
                sample_haar_unitary(200, 777 + s),
            )
            if freeness_defect([x, y], 3) < 0.05:
                passes += 1
        assert passes >= 0.95 * trials

    def test_symmetry_under_group_swap(self):
        x = MatrixTuple([sample_gue(30, 1)])
        y = MatrixTuple([sample_gue(30, 2)])
        assert freeness_defect([x, y], 3) == pytest.approx(
            freeness_defect([y, x], 3), abs=1e-12
        )

    def test_simultaneous_conjugation_invariance(self):
        x = MatrixTuple([sample_gue(30, 5)])
        y = MatrixTuple([sample_gue(30, 6)])
        u = sample_haar_unitary(30, 7)
        d0 = freeness_defect([x, y], 3)
        d1 = freeness_defect([conjugate_tuple(x, u), conjugate_tuple(y, u)], 3)
        assert d1 == pytest.approx(d0, abs=1e-9)


class TestProductOrbitSample:
    def test_single_base_matches_orbit_sample(self):
        base = build_quantile_microstate(TWO_ATOM, 8, 0.3).as_tuple()
        joined = product_orbit_sample([base], 4, 11)
        assert all(j.arity == base.arity for j in joined)
        want = np.linalg.eigvalsh(base.components[0])
        for j in joined:
            assert np.allclose(np.linalg.eigvalsh(j.components[0]), want, atol=1e-8)

    def test_two_bases_concatenate(self):
        b1 = build_quantile_microstate(TWO_ATOM, 8, 0.3).as_tuple()
        b2 = MatrixTuple([sample_gue(8, 1)])
        joined = product_orbit_sample([b1, b2], 3, 2)
        assert all(j.arity == 2 for j in joined)

    def test_freeness_pass_rate(self):
        b1 = MatrixTuple([sample_gue(200, 21)])
        b2 = MatrixTuple([sample_gue(200, 22)])
        joined = product_orbit_sample([b1, b2], 20, 5)
        passes = sum(
            1
            for j in joined
            if freeness_defect(
                [MatrixTuple([j.components[0]]), MatrixTuple([j.components[1]])], 3
            )
            < 0.05
        )
        assert passes >= 0.9 * len(joined)

    def test_size_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            product_orbit_sample(
                [MatrixTuple([np.eye(4)]), MatrixTuple([np.eye(5)])], 2, 1
            )
