"""Operator calculus: normal form, composition, adjoints, action soundness."""

import numpy as np
import pytest

from nckahler.ncdiff import HVector, NCDiffOp, TorusMatrix, inner_product
from nckahler.torus import DimensionMismatch, ThetaMatrix, TorusElement

RNG = np.random.default_rng(100)
THETA = ThetaMatrix.random(2, RNG)
ZERO2 = (0, 0)


def random_op(seed, m=2, max_degree=1):
    return NCDiffOp.random(THETA, m, np.random.default_rng(seed), max_degree=max_degree)


def basis_vectors(theta, m, radius):
    from itertools import product
    for mode in product(range(-radius, radius + 1), repeat=theta.n):
        for i in range(m):
            yield HVector.basis(theta, m, i, exponent=mode)


class TestCompose:
    def test_leibniz_with_multiplication(self):
        # del_1 . mult_b = mult_{del_1 b} + mult_b . del_1
        b = TorusElement.random(THETA, np.random.default_rng(1))
        d1 = NCDiffOp.derivation(THETA, 1, 1)
        mb = NCDiffOp.mult(b, 1)
        lhs = d1.compose(mb)
        rhs = NCDiffOp.mult(b.derive(1), 1) + mb.compose(d1)
        assert (lhs - rhs).residual_norm() < 1e-12

    def test_constant_coefficient_product(self):
        # two constant-matrix degree-1 operators: pure degree-2, no correction
        A = np.array([[0, 1], [1, 0]], dtype=complex)
        B = np.array([[1, 0], [0, -1]], dtype=complex)
        P = NCDiffOp.derivation(THETA, 2, 1, mat=A)
        Q = NCDiffOp.derivation(THETA, 2, 2, mat=B)
        out = P.compose(Q)
        assert set(out.terms) == {(1, 1)}
        assert np.abs(out.terms[(1, 1)].blocks[ZERO2] - A @ B).max() < 1e-15

    def test_action_oracle(self):
        for seed in range(10):
            P, Q = random_op(seed), random_op(seed + 50)
            v = HVector.random(THETA, 2, np.random.default_rng(seed + 100))
            lhs = P.compose(Q).apply(v)
            rhs = P.apply(Q.apply(v))
            assert lhs.close_to(rhs, 1e-9)

    def test_ring_axioms(self):
        P, Q, R = random_op(1), random_op(2), random_op(3)
        assert (P.compose(Q.compose(R)) - P.compose(Q).compose(R)).residual_norm() < 1e-9
        assert ((P + Q).compose(R) - (P.compose(R) + Q.compose(R))).residual_norm() < 1e-9

    def test_jacobi_identity(self):
        P, Q, R = random_op(4), random_op(5), random_op(6)
        total = (P.commutator(Q.commutator(R))
                 + Q.commutator(R.commutator(P))
                 + R.commutator(P.commutator(Q)))
        assert total.residual_norm() < 1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            NCDiffOp.identity(THETA, 2).compose(NCDiffOp.identity(THETA, 3))


class TestApply:
    def test_identity(self):
        v = HVector.random(THETA, 3, np.random.default_rng(7))
        assert NCDiffOp.identity(THETA, 3).apply(v).close_to(v)

    def test_derivation_eigenvector(self):
        u1 = TorusElement.generator(THETA, 1)
        v = HVector([u1, TorusElement.zero(THETA)])
        out = NCDiffOp.derivation(THETA, 2, 1).apply(v)
        assert out.entries[0].close_to(2j * np.pi * u1, 1e-12)
        assert out.entries[1].is_zero()

    def test_linearity(self):
        P = random_op(8)
        rng = np.random.default_rng(9)
        v, w = HVector.random(THETA, 2, rng), HVector.random(THETA, 2, rng)
        lhs = P.apply(v + w.scale(2.5j))
        rhs = P.apply(v) + P.apply(w).scale(2.5j)
        assert lhs.close_to(rhs, 1e-10)


class TestAdjoint:
    def test_derivation_skew(self):
        d1 = NCDiffOp.derivation(THETA, 2, 1)
        assert (d1.adjoint() + d1).residual_norm() < 1e-15

    def test_multiplication(self):
        a = TorusElement.random(THETA, np.random.default_rng(10))
        ma = NCDiffOp.mult(a, 2)
        assert (ma.adjoint() - NCDiffOp.mult(a.star(), 2)).residual_norm() < 1e-12

    def test_involutive(self):
        for seed in range(5):
            P = random_op(seed, max_degree=2)
            assert (P.adjoint().adjoint() - P).residual_norm() < 1e-10

    def test_antihomomorphism(self):
        P, Q = random_op(11), random_op(12)
        lhs = P.compose(Q).adjoint()
        rhs = Q.adjoint().compose(P.adjoint())
        assert (lhs - rhs).residual_norm() < 1e-9

    def test_formal_adjoint_contract(self):
        # <Px, y> = <x, P*y> on the dense domain
        for seed in range(8):
            P = random_op(seed + 20, max_degree=2)
            rng = np.random.default_rng(seed + 200)
            x = HVector.random(THETA, 2, rng)
            y = HVector.random(THETA, 2, rng)
            lhs = inner_product(P.apply(x), y)
            rhs = inner_product(x, P.adjoint().apply(y))
            assert abs(lhs - rhs) < 1e-8 * max(1.0, abs(lhs))


class TestNormalFormSoundness:
    def test_residual_norm_basics(self):
        assert NCDiffOp.zero(THETA, 2).residual_norm() == 0.0
        assert NCDiffOp.identity(THETA, 2).residual_norm() == 1.0
        P = random_op(13)
        assert (P - P).residual_norm() < 1e-15

    def test_normal_form_equality_iff_equal_action(self):
        # operators agreeing on all basis vectors in a box agree in normal form
        P, Q = random_op(14), random_op(15)
        diff = P - Q
        action_max = max(
            diff.apply(v).norm() for v in basis_vectors(THETA, 2, 3)
        )
        assert diff.residual_norm() > 1e-3  # random pair: genuinely different
        assert action_max > 1e-3
        same = P - P
        assert same.residual_norm() < 1e-15
        assert max(same.apply(v).norm() for v in basis_vectors(THETA, 2, 3)) < 1e-15


class TestInnerProduct:
    def test_orthonormal_basis(self):
        for i in range(3):
            for j in range(3):
                ei = HVector.basis(THETA, 3, i)
                ej = HVector.basis(THETA, 3, j)
                assert abs(inner_product(ei, ej) - (1.0 if i == j else 0.0)) < 1e-15

    def test_positivity(self):
        x = HVector.random(THETA, 2, np.random.default_rng(16))
        val = inner_product(x, x)
        assert val.real >= 0 and abs(val.imag) < 1e-12

    def test_tensor_form(self):
        # <xi tensor eta, xi' tensor eta'> = sum_{l,j} tau(eta_l* xi_j* xi'_j eta'_l)
        rng = np.random.default_rng(17)
        xi = [TorusElement.random(THETA, rng) for _ in range(2)]
        eta = [TorusElement.random(THETA, rng) for _ in range(2)]
        xi2 = [TorusElement.random(THETA, rng) for _ in range(2)]
        eta2 = [TorusElement.random(THETA, rng) for _ in range(2)]
        flat1 = HVector([xi[j] * eta[l] for j in range(2) for l in range(2)])
        flat2 = HVector([xi2[j] * eta2[l] for j in range(2) for l in range(2)])
        direct = sum(
            (eta[l].star() * xi[j].star() * xi2[j] * eta2[l]).trace()
            for j in range(2) for l in range(2)
        )
        assert abs(inner_product(flat1, flat2) - direct) < 1e-9


class TestSerialization:
    def test_roundtrip(self):
        P = random_op(18, m=2, max_degree=2)
        Q = NCDiffOp.from_json(THETA, P.to_json())
        assert (P - Q).residual_norm() < 1e-15

    def test_entry_extraction(self):
        a = TorusElement.random(THETA, np.random.default_rng(19))
        M = TorusMatrix.scalar_element(a, 2)
        assert M.entry(0, 0).close_to(a, 1e-15)
        assert M.entry(0, 1).is_zero()
