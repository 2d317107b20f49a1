import os
import sys
import unittest

import numpy as np
from numpy.testing import assert_allclose

# Add the src directory to the path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), 'src'))

from semiclassical.config import SimulationConfig
from semiclassical.conservation import (
    AngularMomentumMap,
    LinearMomentumMap,
    angular_momentum_components,
    chart_gradient,
    classical_angular_momentum,
    drift_report,
    equivariance_residual,
    expected_angular_momentum,
    first_variation_noether,
    hagedorn_noether,
    hagedorn_so3_invariant,
    hamiltonian_vector_field,
    invariance_residual,
    lift_consistency_residual,
    poisson_bracket,
    s1_momentum_map,
    semiclassical_angular_momentum,
)
from semiclassical.dynamics import heller_asymptotic_rhs, reduced_hamiltonian
from semiclassical.errors import BracketError, DimensionError
from semiclassical.geometry import SiegelPoint, random_rotation, so_components, vee
from semiclassical.integrators import hagedorn_verlet_step, integrate, variational_splitting_step
from semiclassical.potentials import AxisymmetricQuartic, PolynomialPotential
from semiclassical.records import InvariantSeries
from semiclassical.wavepacket import (
    ReducedState,
    random_reduced_state,
    reduced_to_full,
    reduced_to_hagedorn,
    unit_norm_delta,
)


def reference_state():
    C = SiegelPoint([[1.0, 0.5], [0.5, 1.0]], [[1.0, 0.5], [0.5, 1.0]])
    return ReducedState([1.0, 0.0], [0.0, 1.0], C)


class TestAngularMomentum(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(41)

    def test_reference_initial_value(self):
        """J_hbar = J_0 = 1 when A and B commute"""
        w = reference_state()
        self.assertAlmostEqual(so_components(semiclassical_angular_momentum(w, 0.005))[0], 1.0, places=15)
        self.assertEqual(angular_momentum_components(classical_angular_momentum(w.q, w.p))[0], 1.0)

    def test_hbar_correction(self):
        """The width term is -(hbar/2)[B^{-1}, A]"""
        w = random_reduced_state(self.rng, 3)
        N = np.linalg.inv(w.B)
        expected = classical_angular_momentum(w.q, w.p) - 0.5 * 0.3 * (N @ w.A - w.A @ N)
        assert_allclose(semiclassical_angular_momentum(w, 0.3), expected, atol=1e-12)

    def test_equivariance(self):
        """J_hbar(Gamma_R w) = R J_hbar(w) R^T"""
        for d in (2, 3, 4):
            w = random_reduced_state(self.rng, d)
            R = random_rotation(self.rng, d)
            self.assertLess(equivariance_residual(w, R, 0.7), 1e-12)

    def test_expectation_matches_momentum_map(self):
        """<x x p> in the normalized Gaussian is vee(J_hbar)"""
        cfg = SimulationConfig(hbar=0.4, dimension=3)
        for _ in range(5):
            w = random_reduced_state(self.rng, 3)
            L = expected_angular_momentum(w, cfg)
            assert_allclose(L, vee(semiclassical_angular_momentum(w, cfg.hbar)), atol=1e-12)

    def test_expectation_by_quadrature(self):
        """Quadrature and closed-form moments agree"""
        cfg = SimulationConfig(hbar=0.4, dimension=2)
        w = random_reduced_state(self.rng, 2)
        a = expected_angular_momentum(w, cfg)
        b = expected_angular_momentum(w, cfg, method="quadrature", order=4)
        self.assertAlmostEqual(a, b, places=11)

    def test_expectation_dimension(self):
        """Only d = 2 and d = 3 have a vector angular momentum"""
        cfg = SimulationConfig(hbar=1.0, dimension=4)
        with self.assertRaises(DimensionError):
            expected_angular_momentum(random_reduced_state(self.rng, 4), cfg)

    def test_hamiltonian_invariance(self):
        """Radial potentials give rotation-invariant Hamiltonians; others do not"""
        cfg = SimulationConfig(hbar=0.5, dimension=2)
        w = random_reduced_state(self.rng, 2)
        R = random_rotation(self.rng, 2)
        radial = AxisymmetricQuartic(2)
        broken = PolynomialPotential(2, [(0.8, (2, 0)), (0.5, (0, 2)), (0.25, (4, 0))])
        for variant in ("exact", "asymptotic"):
            self.assertLess(invariance_residual(variant, w, R, radial, cfg), 1e-12)
        self.assertGreater(invariance_residual("asymptotic", w, R, broken, cfg), 1e-3)


class TestBracket(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(42)
        self.hbar = 0.5

    def test_canonical_pairs(self):
        """{q_i, p_j} = delta_ij"""
        w = random_reduced_state(self.rng, 2)
        value = poisson_bracket(lambda s: s.q[0], lambda s: s.p[0], w, self.hbar)
        self.assertAlmostEqual(value, 1.0, places=8)
        self.assertAlmostEqual(poisson_bracket(lambda s: s.q[0], lambda s: s.p[1], w, self.hbar), 0.0, places=8)

    def test_width_pairs(self):
        """{B^{-1}_11, A_11} = 4/hbar"""
        w = random_reduced_state(self.rng, 2)
        value = poisson_bracket(
            lambda s: np.linalg.inv(s.B)[0, 0], lambda s: s.A[0, 0], w, self.hbar
        )
        self.assertAlmostEqual(value, 4.0 / self.hbar, places=5)

    def test_so3_relations(self):
        """{J_1, J_2} = J_3 for the semiclassical angular momentum"""
        w = random_reduced_state(self.rng, 3)
        grads = [
            chart_gradient(lambda s, i=i: vee(semiclassical_angular_momentum(s, self.hbar))[i], w)
            for i in range(3)
        ]
        J = vee(semiclassical_angular_momentum(w, self.hbar))
        self.assertAlmostEqual(poisson_bracket(grads[0], grads[1], w, self.hbar), J[2], places=6)
        self.assertAlmostEqual(poisson_bracket(grads[1], grads[2], w, self.hbar), J[0], places=6)

    def test_angular_momentum_commutes_with_energy(self):
        """{J_hbar, H} = 0 for a radial potential"""
        cfg = SimulationConfig(hbar=self.hbar, dimension=2)
        model = AxisymmetricQuartic(2)
        w = random_reduced_state(self.rng, 2)
        value = poisson_bracket(
            lambda s: so_components(semiclassical_angular_momentum(s, self.hbar))[0],
            lambda s: reduced_hamiltonian(s, model, cfg),
            w,
            self.hbar,
        )
        self.assertLess(abs(value), 1e-6)

    def test_vector_field_matches_equations_of_motion(self):
        """The bracket generates the asymptotic equations"""
        cfg = SimulationConfig(hbar=self.hbar, dimension=2)
        model = AxisymmetricQuartic(2)
        w = random_reduced_state(self.rng, 2)
        field = hamiltonian_vector_field(lambda s: reduced_hamiltonian(s, model, cfg), w, self.hbar)
        rhs = heller_asymptotic_rhs(w, model, cfg)
        assert_allclose(field.as_vector(), rhs.as_vector(), atol=1e-5)

    def test_zero_hbar(self):
        """The matrix part does not exist at hbar = 0"""
        w = random_reduced_state(self.rng, 2)
        with self.assertRaises(BracketError):
            poisson_bracket(lambda s: s.q[0], lambda s: s.p[0], w, 0.0)


class TestMomentumMaps(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(43)

    def test_angular_jacobian(self):
        """The analytic Jacobian matches finite differences"""
        J = AngularMomentumMap(3)
        z = self.rng.normal(size=6)
        h = 1e-6
        fd = np.column_stack([(J.value(z + h * e) - J.value(z - h * e)) / (2 * h) for e in np.eye(6)])
        assert_allclose(J.jacobian(z), fd, atol=1e-8)

    def test_linear_momentum(self):
        """Translations have the momentum as momentum map"""
        J = LinearMomentumMap(2)
        z = np.array([1.0, 2.0, 3.0, 4.0])
        assert_allclose(J.value(z), [3.0, 4.0])
        assert_allclose(first_variation_noether(z, np.ones(4), J), [1.0, 1.0])

    def test_hagedorn_noether_is_conserved(self):
        """DJ(z) Y and hat(q) P - hat(p) Q stay constant under the leapfrog"""
        cfg = SimulationConfig(hbar=0.01, dimension=3)
        model = AxisymmetricQuartic(3)
        h = reduced_to_hagedorn(random_reduced_state(self.rng, 3))
        J = AngularMomentumMap(3)
        start = hagedorn_noether(np.concatenate([h.q, h.p]), h.Y, J)
        start_so3 = hagedorn_so3_invariant(h.q, h.p, h.Q, h.P)
        for _ in range(300):
            h = hagedorn_verlet_step(h, 0.01, model, cfg)
        assert_allclose(hagedorn_noether(np.concatenate([h.q, h.p]), h.Y, J), start, atol=1e-11)
        assert_allclose(hagedorn_so3_invariant(h.q, h.p, h.Q, h.P), start_so3, atol=1e-11)

    def test_so3_invariant_needs_three_dimensions(self):
        """hat is only defined for d = 3"""
        with self.assertRaises(DimensionError):
            hagedorn_so3_invariant(np.zeros(2), np.zeros(2), np.eye(2), 1j * np.eye(2))

    def test_s1_momentum_of_normalized_packet(self):
        """J_M = -hbar for a unit-norm packet"""
        cfg = SimulationConfig(hbar=0.02, dimension=2)
        w = reference_state()
        y = reduced_to_full(w, delta=unit_norm_delta(w.B, cfg.hbar))
        self.assertAlmostEqual(s1_momentum_map(y, cfg), -0.02, places=14)


class TestDriftAndLift(unittest.TestCase):
    def test_drift_report(self):
        """Absolute, relative and peak-to-peak statistics"""
        series = InvariantSeries("E")
        for t, value in enumerate([2.0, 2.5, 1.5, 2.0]):
            series.append(t, value)
        report = drift_report(series)
        self.assertEqual(report.max_abs, 0.5)
        self.assertEqual(report.max_rel, 0.25)
        self.assertEqual(report.peak_to_peak, 1.0)
        self.assertEqual(report.to_dict()["name"], "E")

    def test_zero_reference(self):
        """A zero reference reports absolute drift as relative"""
        series = InvariantSeries("J")
        series.append(0.0, 0.0)
        series.append(1.0, 1e-3)
        with self.assertLogs("semiclassical.conservation", level="WARNING"):
            report = drift_report(series)
        self.assertEqual(report.max_rel, 1e-3)

    def test_empty_series(self):
        """Drift of nothing is an error"""
        with self.assertRaises(ValueError):
            drift_report(InvariantSeries("empty"))

    def test_lift_consistency_of_matched_integrators(self):
        """Leapfrog widths project onto the uncorrected splitting"""
        cfg = SimulationConfig(
            hbar=0.005, dimension=2, dt=0.01, t_end=1.0,
            potential={"type": "quartic_radial"},
        )
        model = cfg.model()
        w0 = reference_state()
        hagedorn = integrate(lambda h, dt: hagedorn_verlet_step(h, dt, model, cfg), reduced_to_hagedorn(w0), cfg)
        reduced = integrate(
            lambda w, dt: variational_splitting_step(w, dt, model, cfg, quantum_correction=False), w0, cfg
        )
        residual = lift_consistency_residual(hagedorn, reduced)
        self.assertEqual(residual.shape, (11,))
        self.assertLess(residual.max(), 1e-12)

    def test_lift_consistency_needs_common_grid(self):
        """Records on different grids cannot be compared"""
        cfg = SimulationConfig(hbar=0.005, dimension=2, dt=0.01, t_end=0.5, potential={"type": "harmonic"})
        other = cfg.resolved(record_stride=5)
        model = cfg.model()
        w0 = reference_state()
        a = integrate(lambda h, dt: hagedorn_verlet_step(h, dt, model, cfg), reduced_to_hagedorn(w0), cfg)
        b = integrate(lambda w, dt: variational_splitting_step(w, dt, model, cfg), w0, other)
        with self.assertRaises(DimensionError):
            lift_consistency_residual(a, b)


if __name__ == '__main__':
    unittest.main()
