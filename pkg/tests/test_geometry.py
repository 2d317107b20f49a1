import os
import sys
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

# Add the src directory to the path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), 'src'))

from semiclassical.errors import ConstraintViolation, DimensionError, GeometryError
from semiclassical.geometry import (
    SiegelPoint,
    SymplecticMatrix2d,
    check_rotation,
    constraint_residuals,
    diamond,
    hat,
    quotient_map,
    random_rotation,
    random_siegel_point,
    random_symplectic,
    random_unitary,
    siegel_action,
    siegel_to_qp,
    so_action_reduced,
    so_action_sp,
    so_basis,
    so_components,
    so_pairing,
    standard_symplectic_form,
    symmetric_matrix,
    transitivity_factor,
    unitary_embedding,
    vee,
)
from semiclassical.wavepacket import ReducedState


class TestHatAndDiamond(unittest.TestCase):
    def test_hat_of_unit_z(self):
        """hat(e_3) is the generator of rotations about the z axis"""
        expected = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        assert_array_equal(hat([0.0, 0.0, 1.0]), expected)

    def test_hat_of_zero(self):
        """hat(0) is the zero matrix"""
        assert_array_equal(hat(np.zeros(3)), np.zeros((3, 3)))

    def test_hat_is_cross_product(self):
        """hat(v) w = v x w and vee inverts hat"""
        rng = np.random.default_rng(1)
        v, w = rng.normal(size=3), rng.normal(size=3)
        assert_allclose(hat(v) @ w, np.cross(v, w), atol=1e-15)
        assert_allclose(vee(hat(v)), v, atol=0)

    def test_hat_rejects_wrong_length(self):
        """hat needs a 3-vector"""
        with self.assertRaises(DimensionError):
            hat([1.0, 2.0])

    def test_components_need_antisymmetric_input(self):
        """vee and so_components refuse matrices outside so(d)"""
        with self.assertRaises(GeometryError):
            vee(np.eye(3))
        with self.assertRaises(GeometryError):
            so_components(np.ones((4, 4)))

    def test_diamond_d3_matches_cross_product(self):
        """q <> p = hat(q x p) in three dimensions"""
        rng = np.random.default_rng(2)
        q, p = rng.normal(size=3), rng.normal(size=3)
        assert_allclose(diamond(q, p), hat(np.cross(q, p)), atol=1e-15)

    def test_diamond_d2_scalar(self):
        """The d=2 component is q1 p2 - q2 p1"""
        J = diamond([1.0, 0.0], [0.0, 1.0])
        self.assertEqual(so_components(J)[0], 1.0)
        assert_array_equal(J, -J.T)

    def test_diamond_shape_mismatch(self):
        """Vectors of different length are rejected"""
        with self.assertRaises(DimensionError):
            diamond([1.0, 0.0], [0.0, 1.0, 0.0])

    def test_so_basis_pairing(self):
        """Components of an so(d) element are its pairings with E_jk"""
        rng = np.random.default_rng(3)
        d = 4
        J = diamond(rng.normal(size=d), rng.normal(size=d))
        for (j, k), E in so_basis(d).items():
            self.assertAlmostEqual(so_pairing(E, E), 1.0)
            self.assertAlmostEqual(so_pairing(J, E), J[j, k], places=14)


class TestValueTypes(unittest.TestCase):
    def test_symmetric_matrix_rejects_asymmetry(self):
        """A 1e-6 asymmetry is rejected"""
        with self.assertRaises(GeometryError):
            symmetric_matrix([[1.0, 1e-6], [0.0, 1.0]])

    def test_siegel_point_rejects_indefinite_b(self):
        """B must be positive-definite"""
        with self.assertRaises(GeometryError):
            SiegelPoint(np.zeros((2, 2)), np.diag([1.0, -1.0]))

    def test_siegel_point_rejects_shape_mismatch(self):
        """A and B must share a dimension"""
        with self.assertRaises(DimensionError):
            SiegelPoint(np.zeros((2, 2)), np.eye(3))

    def test_siegel_point_is_read_only(self):
        """Stored matrices cannot be modified in place"""
        Z = SiegelPoint(np.zeros((2, 2)), np.eye(2))
        with self.assertRaises(ValueError):
            Z.B[0, 0] = 2.0

    def test_standard_form_is_symplectic(self):
        """J itself satisfies J^T J J = J"""
        Y = SymplecticMatrix2d(standard_symplectic_form(3))
        self.assertEqual(Y.symplectic_residual(), 0.0)

    def test_symplectic_matrix_rejects_non_symplectic(self):
        """2I is not symplectic"""
        with self.assertRaises(GeometryError):
            SymplecticMatrix2d(2.0 * np.eye(4))

    def test_symplectic_block_views(self):
        """Q and P are read from the row blocks of Y"""
        Q = np.array([[1.0 + 1.0j]])
        P = np.array([[0.5 + 1.0j]])
        Y = SymplecticMatrix2d.from_qp(Q, P, validate=False)
        assert_array_equal(Y.Y, [[1.0, 1.0], [0.5, 1.0]])
        assert_array_equal(Y.Q, Q)
        assert_array_equal(Y.P, P)


class TestSiegelAction(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(11)

    def test_quotient_of_transitivity_factor(self):
        """The factorization moves iI to Z"""
        for d in (1, 2, 3):
            Z = random_siegel_point(self.rng, d)
            C = quotient_map(transitivity_factor(Z)).C
            assert_allclose(C, Z.C, atol=1e-12)

    def test_quotient_is_action_on_identity(self):
        """quotient_map(Y) equals the action of Y on iI"""
        Y = random_symplectic(self.rng, 3)
        base = SiegelPoint(np.zeros((3, 3)), np.eye(3))
        assert_allclose(quotient_map(Y).C, siegel_action(Y, base).C, atol=1e-12)

    def test_action_composes(self):
        """Psi_{XY} = Psi_X o Psi_Y"""
        X = random_symplectic(self.rng, 2)
        Y = random_symplectic(self.rng, 2)
        Z = random_siegel_point(self.rng, 2)
        XY = SymplecticMatrix2d(X.Y @ Y.Y)
        assert_allclose(siegel_action(XY, Z).C, siegel_action(X, siegel_action(Y, Z)).C, atol=1e-10)

    def test_identity_fixes_points(self):
        """The identity acts trivially"""
        Z = random_siegel_point(self.rng, 3)
        assert_allclose(siegel_action(SymplecticMatrix2d(np.eye(6)), Z).C, Z.C, atol=1e-14)

    def test_unitary_stabilizer(self):
        """Right multiplication by embedded unitaries leaves the quotient unchanged"""
        Y = random_symplectic(self.rng, 3)
        W = random_unitary(self.rng, 3)
        E = unitary_embedding(W)
        assert_allclose(E.Q, W, atol=1e-14)
        moved = SymplecticMatrix2d(Y.Y @ E.Y)
        assert_allclose(moved.Q, Y.Q @ W, atol=1e-12)
        assert_allclose(quotient_map(moved).C, quotient_map(Y).C, atol=1e-10)

    def test_singular_q_is_rejected(self):
        """A Y with singular Q cannot be projected"""
        zero, eye = np.zeros((2, 2)), np.eye(2)
        Y = SymplecticMatrix2d(np.block([[zero, zero], [eye, eye]]), validate=False)
        with self.assertRaises(ConstraintViolation):
            quotient_map(Y)

    def test_dimension_mismatch(self):
        """X and Z must act on the same dimension"""
        with self.assertRaises(DimensionError):
            siegel_action(random_symplectic(self.rng, 2), random_siegel_point(self.rng, 3))

    def test_canonical_lift_satisfies_constraints(self):
        """(B^{-1/2}, C B^{-1/2}) obeys both constraints and projects to C"""
        Z = random_siegel_point(self.rng, 3)
        Q, P = siegel_to_qp(Z)
        r1, r2 = constraint_residuals(Q, P)
        self.assertLess(max(r1, r2), 1e-12)
        assert_allclose(quotient_map(SymplecticMatrix2d.from_qp(Q, P)).C, Z.C, atol=1e-12)

    def test_constraints_hold_for_symplectic_matrices(self):
        """Every symplectic Y yields an admissible (Q, P)"""
        Y = random_symplectic(self.rng, 3)
        self.assertLess(max(constraint_residuals(Y.Q, Y.P)), 1e-12)


class TestRotations(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(5)

    def test_reflection_is_rejected(self):
        """det R = -1 is not a rotation"""
        with self.assertRaises(GeometryError):
            check_rotation(np.diag([1.0, -1.0]))

    def test_reduced_action(self):
        """Gamma_R rotates q, p and conjugates A, B"""
        R = random_rotation(self.rng, 3)
        w = ReducedState(self.rng.normal(size=3), self.rng.normal(size=3), random_siegel_point(self.rng, 3))
        rotated = so_action_reduced(R, w)
        assert_allclose(rotated.q, R @ w.q, atol=1e-14)
        assert_allclose(rotated.B, R @ w.B @ R.T, atol=1e-14)
        assert_allclose(diamond(rotated.q, rotated.p), R @ diamond(w.q, w.p) @ R.T, atol=1e-13)

    def test_sp_action_is_compatible_with_quotient(self):
        """Projecting diag(R, R) Y diag(R, R)^T gives R C R^T"""
        R = random_rotation(self.rng, 2)
        Y = random_symplectic(self.rng, 2)
        moved = so_action_sp(R, Y)
        self.assertLess(moved.symplectic_residual(), 1e-12)
        assert_allclose(quotient_map(moved).C, R @ quotient_map(Y).C @ R.T, atol=1e-12)

    def test_rotation_dimension_mismatch(self):
        """R must match the state dimension"""
        w = ReducedState([0.0, 0.0], [0.0, 0.0], SiegelPoint(np.zeros((2, 2)), np.eye(2)))
        with self.assertRaises(DimensionError):
            so_action_reduced(np.eye(3), w)


if __name__ == '__main__':
    unittest.main()
