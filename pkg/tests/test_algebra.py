"""Finite-dimensional algebras and block representation plans."""

import math

import numpy as np
import pytest

from freefractal.algebra import (
    FiniteDimAlgebra,
    commutant_unitary_dim,
    delta0_fd,
    plan_representation,
    represent,
    standard_generators,
)
from freefractal.errors import PlanSizeError, ShapeMismatchError

M2 = FiniteDimAlgebra([(2, 1.0)])
C_PLUS_M2 = FiniteDimAlgebra([(1, 0.2), (2, 0.8)])
TWO_POINTS = FiniteDimAlgebra([(1, 0.5), (1, 0.5)])
M2_PLUS_M3 = FiniteDimAlgebra([(2, 0.3), (3, 0.7)])


class TestDelta0FD:
    def test_m2(self):
        assert delta0_fd(M2) == pytest.approx(0.75, abs=1e-15)

    def test_two_points(self):
        assert delta0_fd(TWO_POINTS) == pytest.approx(0.5, abs=1e-15)

    def test_trivial(self):
        assert delta0_fd(FiniteDimAlgebra([(1, 1.0)])) == 0.0

    def test_c_plus_m2(self):
        assert delta0_fd(C_PLUS_M2) == pytest.approx(0.8, abs=1e-12)


class TestPlanRepresentation:
    def test_exact_branch_c_plus_m2(self):
        plan = plan_representation(C_PLUS_M2, 5, 0.05)
        assert plan.multiplicities == (1, 2)
        assert plan.corner == 0
        assert plan.exact
        assert plan.trace_error <= 1e-12
        assert commutant_unitary_dim(plan) == 5
        assert 25 - commutant_unitary_dim(plan) == 20  # 0.8 * 25

    def test_single_block_m2(self):
        plan = plan_representation(M2, 6, 0.05)
        assert plan.multiplicities == (3,)
        assert commutant_unitary_dim(plan) == 9
        assert 36 - 9 == 27  # 0.75 * 36

    def test_general_branch_m2_m3(self):
        plan = plan_representation(M2_PLUS_M3, 500, 0.05)
        k = 500
        total = sum(l * n for l, (n, _) in zip(plan.multiplicities, M2_PLUS_M3.blocks))
        assert total + plan.corner == k
        assert plan.trace_error < 0.05
        assert plan.corner < 6
        ratio = (k * k - commutant_unitary_dim(plan)) / (k * k)
        assert ratio >= 1 - (0.09 / 4 + 0.49 / 9) - 1e-12

    def test_k_too_small(self):
        with pytest.raises(PlanSizeError):
            plan_representation(M2_PLUS_M3, 3, 0.05)

    def test_misaligned_k_raises_at_tight_eps(self):
        # M2 at odd k cannot meet a 1% trace accuracy
        with pytest.raises(PlanSizeError):
            plan_representation(M2, 7, 0.01)

    def test_misaligned_k_rounded_fallback(self):
        plan = plan_representation(M2, 7, 0.2)
        assert plan.multiplicities == (3,)
        assert plan.corner == 1
        assert plan.trace_error == pytest.approx(1 / 7, abs=1e-12)
        assert commutant_unitary_dim(plan) <= 49 * 0.25 + 1e-9

    @pytest.mark.parametrize(
        "algebra,k",
        [
            (M2, 50),
            (C_PLUS_M2, 100),
            (TWO_POINTS, 64),
            (M2_PLUS_M3, 120),
            (FiniteDimAlgebra([(4, 1.0)]), 64),
        ],
    )
    def test_invariants_hold(self, algebra, k):
        plan = plan_representation(algebra, k, 0.05)
        total = sum(l * n for l, (n, _) in zip(plan.multiplicities, algebra.blocks))
        assert total + plan.corner == k
        prod_n = math.prod(n for n, _ in algebra.blocks)
        if not plan.exact:
            assert plan.corner < prod_n
        budget = k * k * sum(a * a / (n * n) for n, a in algebra.blocks)
        assert commutant_unitary_dim(plan) <= budget * (1 + 1e-12) + 1e-9


class TestCommutantDim:
    def test_values(self):
        class P:
            pass

        for mult, corner, want in [((3,), 0, 9), ((1, 2), 0, 5), ((2, 2), 1, 9)]:
            p = P()
            p.multiplicities = mult
            p.corner = corner
            assert commutant_unitary_dim(p) == want


class TestRepresent:
    def test_identity_trace(self):
        plan = plan_representation(C_PLUS_M2, 5, 0.05)
        ident = [np.eye(1), np.eye(2)]
        img = represent(plan, C_PLUS_M2, ident)
        assert np.trace(img).real / 5 == pytest.approx((5 - plan.corner) / 5)

    def test_block_scalar_example(self):
        plan = plan_representation(C_PLUS_M2, 5, 0.05)
        img = represent(plan, C_PLUS_M2, [np.array([[1.0]]), np.zeros((2, 2))])
        assert np.allclose(np.diag(img), [1, 0, 0, 0, 0])
        assert np.trace(img).real / 5 == pytest.approx(0.2)

    def test_zero_element(self):
        plan = plan_representation(M2, 6, 0.05)
        img = represent(plan, M2, [np.zeros((2, 2))])
        assert np.allclose(img, 0.0)

    def test_multiplicative_on_random_pairs(self):
        rng = np.random.Generator(np.random.Philox(key=np.uint64(4)))
        plan = plan_representation(M2_PLUS_M3, 100, 0.05)

        def rand_block(n):
            g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            return g + g.conj().T

        for _ in range(5):
            x = [rand_block(2), rand_block(3)]
            y = [rand_block(2), rand_block(3)]
            xy = [a @ b for a, b in zip(x, y)]
            lhs = represent(plan, M2_PLUS_M3, x) @ represent(plan, M2_PLUS_M3, y)
            # products of selfadjoints need the raw block embedding
            rhs = np.zeros_like(lhs)
            pos = 0
            for blk, l, (n, _) in zip(xy, plan.multiplicities, M2_PLUS_M3.blocks):
                if l:
                    w = l * n
                    rhs[pos:pos + w, pos:pos + w] = np.kron(blk, np.eye(l))
                    pos += w
            assert np.max(np.abs(lhs - rhs)) <= 1e-10

    def test_trace_matches_weights(self):
        plan = plan_representation(M2_PLUS_M3, 500, 0.05)
        rng = np.random.Generator(np.random.Philox(key=np.uint64(9)))
        for _ in range(3):
            blocks = []
            for n, _ in M2_PLUS_M3.blocks:
                g = rng.standard_normal((n, n))
                blocks.append((g + g.T) / 2)
            img = represent(plan, M2_PLUS_M3, blocks)
            want = sum(
                w * np.trace(b).real / n
                for w, b, (n, _) in zip(
                    plan.weights(M2_PLUS_M3), blocks, M2_PLUS_M3.blocks
                )
            )
            assert np.trace(img).real / 500 == pytest.approx(want, abs=1e-12)

    def test_shape_mismatch(self):
        plan = plan_representation(M2, 6, 0.05)
        with pytest.raises(ShapeMismatchError):
            represent(plan, M2, [np.eye(3)])


class TestGenerators:
    def test_two_generators_per_algebra(self):
        gens = standard_generators(M2_PLUS_M3)
        assert len(gens) == 2
        diag, path = gens
        vals = np.concatenate([np.diag(d).real for d in diag])
        assert len(set(np.round(vals, 12))) == len(vals)
        for p, (n, _) in zip(path, M2_PLUS_M3.blocks):
            assert np.allclose(p, p.conj().T)

    def test_generators_generate_block(self):
        # diagonal with distinct entries + path adjacency spans M_n
        gens = standard_generators(M2)
        d, a = gens[0][0], gens[1][0]
        basis = [np.eye(2), d, a, d @ a - a @ d]
        stacked = np.stack([b.ravel() for b in basis])
        assert np.linalg.matrix_rank(stacked) == 4
