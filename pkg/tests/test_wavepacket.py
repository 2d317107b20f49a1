import os
import sys
import unittest

import numpy as np
from numpy.testing import assert_allclose

# Add the src directory to the path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), 'src'))

from semiclassical.config import SimulationConfig
from semiclassical.errors import ConstraintViolation, DimensionError, GeometryError
from semiclassical.geometry import SiegelPoint, random_unitary, unitary_embedding
from semiclassical.wavepacket import (
    DetQBranch,
    FullState,
    HagedornState,
    ReducedState,
    chi_norm_squared,
    evaluate_hagedorn_ground,
    evaluate_psi0,
    full_to_reduced,
    hagedorn_to_reduced,
    random_reduced_state,
    reduced_to_full,
    reduced_to_hagedorn,
    unit_norm_delta,
)


class TestStates(unittest.TestCase):
    def test_reduced_state_dimension_check(self):
        """q must match the width dimension"""
        with self.assertRaises(DimensionError):
            ReducedState([0.0, 0.0, 0.0], [0.0, 0.0], SiegelPoint(np.zeros((2, 2)), np.eye(2)))

    def test_full_state_views(self):
        """A full state exposes its reduced part"""
        w = random_reduced_state(np.random.default_rng(0), 2)
        y = reduced_to_full(w, phi=0.3, delta=-0.1)
        self.assertIsInstance(y, FullState)
        assert_allclose(y.reduced.as_vector(), w.as_vector())
        assert_allclose(full_to_reduced(y).as_vector(), w.as_vector())
        self.assertEqual(y.as_vector()[-2:].tolist(), [0.3, -0.1])

    def test_hagedorn_state_rejects_bad_pair(self):
        """Q = P = I violates Q^* P - P^* Q = 2iI"""
        with self.assertRaises(ConstraintViolation):
            HagedornState.from_qp([0.0], [0.0], np.eye(1), np.eye(1))

    def test_with_vector_keeps_layout(self):
        """with_vector reads q, p, Y and S from the flat vector"""
        w = random_reduced_state(np.random.default_rng(1), 2)
        h = reduced_to_hagedorn(w, S=0.25)
        v = h.as_vector()
        self.assertEqual(v.shape, (2 + 2 + 16 + 1,))
        again = h.with_vector(v)
        assert_allclose(again.Y.Y, h.Y.Y)
        self.assertEqual(again.S, 0.25)


class TestNormalization(unittest.TestCase):
    def test_unit_norm_delta(self):
        """delta* makes |chi|^2 equal to one"""
        cfg = SimulationConfig(hbar=0.005, dimension=2)
        w = random_reduced_state(np.random.default_rng(2), 2)
        y = reduced_to_full(w, delta=unit_norm_delta(w.B, cfg.hbar))
        self.assertAlmostEqual(chi_norm_squared(y, cfg), 1.0, places=12)

    def test_psi0_is_normalized(self):
        """The 1-d Gaussian integrates to one on a fine grid"""
        cfg = SimulationConfig(hbar=1.0, dimension=1)
        w = ReducedState([0.3], [0.7], SiegelPoint([[0.4]], [[1.3]]))
        x = np.linspace(-12.0, 12.0, 4001).reshape(-1, 1)
        density = np.abs(evaluate_psi0(w, cfg, x)) ** 2
        self.assertAlmostEqual(float(np.sum(density) * (x[1, 0] - x[0, 0])), 1.0, places=10)

    def test_psi0_scalar_point(self):
        """A single point returns a scalar"""
        cfg = SimulationConfig(hbar=1.0, dimension=2)
        w = random_reduced_state(np.random.default_rng(3), 2)
        self.assertTrue(np.isscalar(evaluate_psi0(w, cfg, w.q)))


class TestHagedornConversions(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(9)
        self.cfg = SimulationConfig(hbar=0.1, dimension=3)

    def test_round_trip(self):
        """Projecting the canonical lift returns the reduced state"""
        w = random_reduced_state(self.rng, 3)
        back = hagedorn_to_reduced(reduced_to_hagedorn(w))
        assert_allclose(back.C.C, w.C.C, atol=1e-12)
        assert_allclose(back.q, w.q)

    def test_projection_ignores_unitary_freedom(self):
        """(Q W, P W) projects to the same width"""
        w = random_reduced_state(self.rng, 3)
        h = reduced_to_hagedorn(w)
        W = random_unitary(self.rng, 3)
        moved = HagedornState.from_qp(h.q, h.p, h.Q @ W, h.P @ W)
        assert_allclose(hagedorn_to_reduced(moved).C.C, w.C.C, atol=1e-11)
        assert_allclose(moved.Y.Y, h.Y.Y @ unitary_embedding(W).Y, atol=1e-12)

    def test_ground_state_matches_gaussian(self):
        """On the canonical section phi_0 equals psi_0"""
        w = random_reduced_state(self.rng, 3)
        h = reduced_to_hagedorn(w)
        x = w.q + 0.2 * self.rng.normal(size=(5, 3))
        assert_allclose(
            evaluate_hagedorn_ground(h, self.cfg, x), evaluate_psi0(w, self.cfg, x), rtol=1e-10
        )

    def test_ground_state_modulus_is_section_independent(self):
        """|phi_0| does not depend on the unitary factor"""
        w = random_reduced_state(self.rng, 2)
        h = reduced_to_hagedorn(w)
        W = random_unitary(self.rng, 2)
        moved = HagedornState.from_qp(h.q, h.p, h.Q @ W, h.P @ W)
        cfg = SimulationConfig(hbar=0.1, dimension=2)
        x = w.q + 0.1 * self.rng.normal(size=(4, 2))
        assert_allclose(
            np.abs(evaluate_hagedorn_ground(moved, cfg, x)),
            np.abs(evaluate_hagedorn_ground(h, cfg, x)),
            rtol=1e-10,
        )


class TestDetQBranch(unittest.TestCase):
    def test_unwraps_through_pi(self):
        """A slowly turning det Q is followed past the principal range"""
        branch = DetQBranch(np.eye(1, dtype=complex))
        for theta in np.linspace(0.0, 3.0 * np.pi, 301)[1:]:
            branch.follow(np.exp(1j * theta) * np.eye(1))
        self.assertAlmostEqual(branch.angle, 3.0 * np.pi, places=10)

    def test_rejects_large_jump(self):
        """An increment above the limit signals a too large step"""
        branch = DetQBranch(np.eye(1, dtype=complex))
        with self.assertRaises(GeometryError):
            branch.follow(np.exp(0.95j * np.pi) * np.eye(1))

    def test_starts_on_principal_branch(self):
        """The initial angle is the principal value"""
        branch = DetQBranch(np.exp(-0.5j) * np.eye(2))
        self.assertAlmostEqual(branch.angle, -1.0)


if __name__ == '__main__':
    unittest.main()
