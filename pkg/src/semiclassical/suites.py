"""
Property suites run by the `check` command.

Each suite returns a SuiteReport listing the quantities it measured, the
thresholds they were held to and whether they passed. Negative controls
(symmetry-broken potentials) pass when the quantity does NOT stay conserved.
"""

import logging
import os
from dataclasses import asdict, dataclass, field

import numpy as np

from . import constants as C
from .config import SimulationConfig, load_config
from .conservation import (
    AngularMomentumMap,
    chart_gradient,
    classical_angular_momentum,
    drift_report,
    equivariance_residual,
    expected_angular_momentum,
    first_variation_noether,
    hagedorn_so3_invariant,
    invariance_residual,
    lift_consistency_residual,
    poisson_bracket,
    s1_momentum_map,
    semiclassical_angular_momentum,
)
from .dynamics import (
    FirstVariationState,
    first_variation_rhs,
    harmonic_hagedorn_flow,
    harmonic_riccati_flow,
    heller_asymptotic_rhs,
    reduced_hamiltonian,
)
from .errors import ConfigError
from .geometry import quotient_map, random_rotation, so_components, vee
from .integrators import (
    build_initial_state,
    hagedorn_verlet_step,
    integrate,
    make_stepper,
    rk4_step,
    variational_splitting_step,
)
from .potentials import AxisymmetricQuartic, Harmonic
from .wavepacket import as_reduced, random_reduced_state, reduced_to_hagedorn

logger = logging.getLogger(__name__)

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "fixtures")
DEFAULT_SEED = 7


@dataclass
class Check:
    quantity: str
    observed: float
    threshold: object
    relation: str
    passed: bool


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def at_most(self, quantity, observed, threshold):
        self._add(quantity, observed, threshold, "<=", observed <= threshold)

    def at_least(self, quantity, observed, threshold):
        self._add(quantity, observed, threshold, ">=", observed >= threshold)

    def within(self, quantity, observed, bounds):
        low, high = bounds
        self._add(quantity, observed, list(bounds), "in", low <= observed <= high)

    def _add(self, quantity, observed, threshold, relation, passed):
        observed = float(observed)
        level = logging.INFO if passed else logging.WARNING
        logger.log(level, "%s: %s %.3e %s %s", self.suite, quantity, observed, relation, threshold)
        self.checks.append(Check(quantity, observed, threshold, relation, bool(passed)))

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_dict(self):
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [asdict(c) for c in self.checks],
        }


def fixture_path(name):
    return os.path.normpath(os.path.join(FIXTURE_DIR, f"{name}.json"))


def load_fixture(name):
    """Load a bundled fixture by name, e.g. 'quartic2d'."""
    return name, load_config(fixture_path(name))


def _angular_invariants(cfg):
    def j_hbar(state):
        return so_components(semiclassical_angular_momentum(as_reduced(state), cfg.hbar))

    def j_zero(state):
        return so_components(classical_angular_momentum(state.q, state.p))

    return {"J_hbar": j_hbar, "J0": j_zero}


def _require_dimension(label, cfg, allowed):
    if cfg.dimension not in allowed:
        raise ConfigError(f"{label}: suite needs d in {sorted(allowed)}, fixture has d={cfg.dimension}")


def _splitting_run(cfg, invariants):
    cfg = cfg.resolved(integrator="variational_splitting")
    model = cfg.model()
    return integrate(make_stepper(cfg.integrator, model, cfg), build_initial_state(cfg), cfg, invariants)


def noether_reduced(fixtures=None, seed=None):
    """J_hbar conserved by the splitting while J_0 oscillates."""
    report = SuiteReport("noether-reduced")
    controls = []
    if fixtures is None:
        fixtures = [load_fixture("quartic2d")]
        controls = [load_fixture("broken2d")]
    for label, cfg in fixtures:
        _require_dimension(label, cfg, range(2, 17))
        record = _splitting_run(cfg, _angular_invariants(cfg))
        report.at_most(
            f"{label}: J_hbar relative drift",
            drift_report(record["J_hbar"]).max_rel,
            C.NOETHER_REDUCED_REL_DRIFT,
        )
        report.at_least(
            f"{label}: J0 peak-to-peak",
            drift_report(record["J0"]).peak_to_peak,
            C.CLASSICAL_PEAK_TO_PEAK_MIN,
        )
    for label, cfg in controls:
        record = _splitting_run(cfg, _angular_invariants(cfg))
        report.at_least(
            f"{label} (negative control): J_hbar relative drift",
            drift_report(record["J_hbar"]).max_rel,
            C.NEGATIVE_CONTROL_MIN_DRIFT,
        )
    return report


def _hagedorn_run(cfg, invariants):
    cfg = cfg.resolved(integrator="hagedorn_verlet")
    model = cfg.model()
    return integrate(make_stepper(cfg.integrator, model, cfg), build_initial_state(cfg), cfg, invariants)


def _so3_invariant(state):
    return hagedorn_so3_invariant(state.q, state.p, state.Q, state.P)


def noether_hagedorn(fixtures=None, seed=None):
    """hat(q) P - hat(p) Q conserved by the Hagedorn leapfrog for d = 3."""
    report = SuiteReport("noether-hagedorn")
    controls = []
    if fixtures is None:
        fixtures = [load_fixture("harmonic3d"), load_fixture("quartic3d")]
        controls = [load_fixture("broken3d")]
    for label, cfg in fixtures:
        _require_dimension(label, cfg, {3})
        record = _hagedorn_run(cfg, {"J_cal": _so3_invariant})
        report.at_most(
            f"{label}: SO(3) invariant absolute drift",
            drift_report(record["J_cal"]).max_abs,
            C.NOETHER_HAGEDORN_ABS_DRIFT,
        )
    for label, cfg in controls:
        record = _hagedorn_run(cfg, {"J_cal": _so3_invariant})
        report.at_least(
            f"{label} (negative control): SO(3) invariant absolute drift",
            drift_report(record["J_cal"]).max_abs,
            C.NEGATIVE_CONTROL_MIN_DRIFT,
        )
    return report


def constraints(fixtures=None, seed=None):
    """Hagedorn constraint residuals after a long leapfrog run."""
    report = SuiteReport("constraints")
    if fixtures is None:
        fixtures = [load_fixture("harmonic2d"), load_fixture("quartic2d")]
    for label, cfg in fixtures:
        record = _hagedorn_run(cfg, {"residuals": lambda h: h.residuals()})
        residuals = record["residuals"].as_array()
        report.at_most(
            f"{label}: max constraint residual over {cfg.n_steps} steps",
            residuals.max(),
            C.CONSTRAINT_MAX_RESIDUAL,
        )
    return report


def _lift_pair(cfg, dt, stride):
    """Hagedorn leapfrog and uncorrected splitting over t in [0, 10]."""
    run_cfg = cfg.resolved(dt=dt, t_end=10.0, record_stride=stride)
    model = run_cfg.model()
    w0 = build_initial_state(run_cfg.resolved(integrator="variational_splitting"))
    hagedorn = integrate(
        lambda h, step: hagedorn_verlet_step(h, step, model, run_cfg),
        reduced_to_hagedorn(w0),
        run_cfg,
    )
    reduced = integrate(
        lambda w, step: variational_splitting_step(w, step, model, run_cfg, quantum_correction=False),
        w0,
        run_cfg,
    )
    return hagedorn, reduced


def lift_consistency(fixtures=None, seed=None):
    """Projected Hagedorn widths against reduced width trajectories."""
    report = SuiteReport("lift-consistency")
    if fixtures is None:
        fixtures = [load_fixture("harmonic2d"), load_fixture("quartic2d")]
    for label, cfg in fixtures:
        model = cfg.model()
        if isinstance(model, Harmonic) and model.axisymmetric:
            w0 = build_initial_state(cfg.resolved(integrator="variational_splitting"))
            h0 = reduced_to_hagedorn(w0)
            residual = max(
                float(
                    np.abs(
                        quotient_map(harmonic_hagedorn_flow(h0, t, model, cfg).Y).C
                        - harmonic_riccati_flow(w0.C, t, model, cfg).C
                    ).max()
                )
                for t in np.linspace(0.0, 10.0, 101)
            )
            report.at_most(f"{label}: analytic flows", residual, C.LIFT_ANALYTIC_MAX)

        hagedorn, reduced = _lift_pair(cfg, 0.01, 10)
        matched = lift_consistency_residual(hagedorn, reduced)
        report.at_most(f"{label}: leapfrog vs splitting at dt=0.01", matched.max(), C.LIFT_NUMERICAL_MAX)

        hagedorn_b, reduced_b = _lift_pair(cfg.resolved(hbar=10.0 * cfg.hbar), 0.01, 10)
        spread = np.abs(lift_consistency_residual(hagedorn_b, reduced_b) - matched).max()
        report.at_most(f"{label}: hbar-dependence of the residual", spread, 1e-12)

        coarse = _order_residual(cfg, 0.01, 10)
        fine = _order_residual(cfg, 0.005, 20)
        report.at_most(
            f"{label}: leapfrog vs RK4 reference at dt=0.01", coarse.max(), C.LIFT_ORDER_MAGNITUDE
        )
        report.at_most(
            f"{label}: leapfrog vs RK4 reference at t=10, dt=0.01", coarse[-1], C.LIFT_ORDER_MAGNITUDE
        )
        report.within(
            f"{label}: residual ratio dt / (dt/2)", coarse.max() / fine.max(), C.ORDER_TWO_RATIO
        )
    return report


def _order_residual(cfg, dt, stride):
    """Per-sample leapfrog residual against an RK4 reference of the Riccati system."""
    run_cfg = cfg.resolved(dt=dt, t_end=10.0, record_stride=stride)
    model = run_cfg.model()
    w0 = build_initial_state(run_cfg.resolved(integrator="variational_splitting"))
    hagedorn = integrate(
        lambda h, step: hagedorn_verlet_step(h, step, model, run_cfg), reduced_to_hagedorn(w0), run_cfg
    )
    ref_cfg = run_cfg.resolved(dt=0.0025, record_stride=40)
    reference = integrate(
        lambda w, step: rk4_step(lambda s: heller_asymptotic_rhs(s, model, ref_cfg, False), w, step),
        w0,
        ref_cfg,
    )
    return lift_consistency_residual(hagedorn, reference)


def _energy_drift(cfg):
    model = cfg.model()
    invariants = {"H1": lambda w: reduced_hamiltonian(w, model, cfg, "asymptotic")}
    record = _splitting_run(cfg, invariants)
    H = record["H1"].as_array()
    return np.abs(H - H[0]) / abs(H[0])


def energy(fixtures=None, seed=None):
    """Bounded, second-order energy error of the splitting."""
    report = SuiteReport("energy")
    if fixtures is None:
        fixtures = [load_fixture("quartic2d")]
    for label, cfg in fixtures:
        coarse = _energy_drift(cfg)
        fine = _energy_drift(cfg.resolved(dt=0.5 * cfg.dt, record_stride=2 * cfg.record_stride))
        report.at_most(f"{label}: H1 relative drift", coarse.max(), C.ENERGY_REL_DRIFT)
        half = len(coarse) // 2
        first, second = coarse[: half + 1].max(), coarse[half:].max()
        report.at_most(f"{label}: late / early drift maximum", second / max(first, 1e-300), 2.0)
        report.within(f"{label}: drift ratio dt / (dt/2)", coarse.max() / fine.max(), C.ORDER_TWO_RATIO)
    return report


def brackets(fixtures=None, seed=None):
    """Finite-difference brackets of J_hbar components reproduce so(d)."""
    report = SuiteReport("brackets")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    hbar = fixtures[0][1].hbar if fixtures else 1.0

    worst = 0.0
    for _ in range(50):
        w = random_reduced_state(rng, 3)
        grads = [
            chart_gradient(lambda s, i=i: vee(semiclassical_angular_momentum(s, hbar))[i], w)
            for i in range(3)
        ]
        J = vee(semiclassical_angular_momentum(w, hbar))
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            worst = max(worst, abs(poisson_bracket(grads[i], grads[j], w, hbar) - J[k]))
    report.at_most("{J_i, J_j} - J_k at 50 random d=3 states", worst, C.BRACKET_FD_TOL)

    worst = 0.0
    d = 4
    for _ in range(50):
        w = random_reduced_state(rng, d)
        j, k, r, s = (int(n) for n in rng.integers(0, d, size=4))
        M = semiclassical_angular_momentum(w, hbar)
        expected = (
            (k == r) * M[j, s] - (k == s) * M[j, r] + (j == s) * M[k, r] - (j == r) * M[k, s]
        )
        bracket = poisson_bracket(
            lambda x: semiclassical_angular_momentum(x, hbar)[j, k],
            lambda x: semiclassical_angular_momentum(x, hbar)[r, s],
            w,
            hbar,
        )
        worst = max(worst, abs(bracket - expected))
    report.at_most("{J^jk, J^rs} relation at 50 random d=4 tuples", worst, C.BRACKET_FD_TOL)
    return report


def expectation_identity(fixtures=None, seed=None):
    """Gaussian expectation of x x p equals J_hbar."""
    report = SuiteReport("expectation-identity")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    if fixtures is None:
        fixtures = [load_fixture("quartic2d")]
        w = build_initial_state(fixtures[0][1].resolved(integrator="variational_splitting"))
        report.at_most(
            "quartic2d: |<x x p> - 1| at the initial state",
            abs(expected_angular_momentum(w, fixtures[0][1]) - 1.0),
            C.EXPECTATION_TOL,
        )
    cfg3 = SimulationConfig(hbar=fixtures[0][1].hbar, dimension=3)
    worst = 0.0
    for _ in range(50):
        w = random_reduced_state(rng, 3)
        L = expected_angular_momentum(w, cfg3)
        worst = max(worst, float(np.abs(L - vee(semiclassical_angular_momentum(w, cfg3.hbar))).max()))
    report.at_most("<x x p> - vee(J_hbar) at 50 random d=3 states", worst, C.EXPECTATION_TOL)

    for label, cfg in fixtures:
        if cfg.dimension not in (2, 3):
            continue
        w = build_initial_state(cfg.resolved(integrator="variational_splitting"))
        L = expected_angular_momentum(w, cfg)
        J = so_components(semiclassical_angular_momentum(w, cfg.hbar))
        report.at_most(
            f"{label}: <x x p> - J_hbar at the initial state",
            float(np.abs(np.asarray(L) - (J[0] if cfg.dimension == 2 else J)).max()),
            C.EXPECTATION_TOL,
        )
    return report


def equivariance(fixtures=None, seed=None):
    """Equivariance of J_hbar and SO(d)-invariance of both Hamiltonians."""
    report = SuiteReport("equivariance")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    for d in (2, 3):
        cfg = SimulationConfig(hbar=0.5, dimension=d)
        model = AxisymmetricQuartic(d)
        worst_j = worst_h = 0.0
        for _ in range(50):
            R = random_rotation(rng, d)
            w = random_reduced_state(rng, d)
            worst_j = max(worst_j, equivariance_residual(w, R, cfg.hbar))
            for variant in ("exact", "asymptotic"):
                worst_h = max(worst_h, invariance_residual(variant, w, R, model, cfg))
        report.at_most(f"d={d}: J_hbar equivariance residual", worst_j, C.EQUIVARIANCE_TOL)
        report.at_most(f"d={d}: Hamiltonian invariance residual", worst_h, C.EQUIVARIANCE_TOL)

    label, broken = (fixtures or [load_fixture("broken2d")])[0]
    model = broken.model()
    worst = 0.0
    for _ in range(50):
        R = random_rotation(rng, broken.dimension)
        w = random_reduced_state(rng, broken.dimension)
        worst = max(worst, invariance_residual("asymptotic", w, R, model, broken))
    report.at_least(f"{label} (negative control): invariance residual", worst, C.NEGATIVE_CONTROL_MIN_DRIFT)
    return report


def s1_momentum(fixtures=None, seed=None):
    """J_M = -hbar |chi|^2 conserved along the full system."""
    report = SuiteReport("s1-momentum")
    if fixtures is None:
        fixtures = [load_fixture("harmonic2d")]
    for label, cfg in fixtures:
        run_cfg = cfg.resolved(integrator="rk4_full", dt=0.001, t_end=10.0, record_stride=100)
        model = run_cfg.model()
        record = integrate(
            make_stepper(run_cfg.integrator, model, run_cfg),
            build_initial_state(run_cfg),
            run_cfg,
            {"J_M": lambda y: s1_momentum_map(y, run_cfg)},
        )
        report.at_most(f"{label}: J_M relative drift", drift_report(record["J_M"]).max_rel, C.S1_REL_DRIFT)
    return report


def first_variation(fixtures=None, seed=None):
    """dJ . dz conservation and dz(t) = Y(t) Y(0)^{-1} dz(0)."""
    report = SuiteReport("first-variation")
    rng = np.random.default_rng(DEFAULT_SEED if seed is None else seed)
    if fixtures is None:
        fixtures = [load_fixture("harmonic2d")]
    for label, cfg in fixtures:
        _require_dimension(label, cfg, range(2, 17))
        run_cfg = cfg.resolved(dt=0.005, t_end=5.0, record_stride=10)
        model = run_cfg.model()
        d = run_cfg.dimension
        w0 = build_initial_state(run_cfg.resolved(integrator="variational_splitting"))
        s0 = FirstVariationState(np.concatenate([w0.q, w0.p]), rng.normal(size=2 * d))
        J = AngularMomentumMap(d)
        variation = integrate(
            lambda s, step: rk4_step(lambda x: first_variation_rhs(x, model, run_cfg), s, step),
            s0,
            run_cfg,
            {"J_tilde": lambda s: first_variation_noether(s.z, s.dz, J)},
        )
        report.at_most(
            f"{label}: dJ . dz absolute drift",
            drift_report(variation["J_tilde"]).max_abs,
            C.FIRST_VARIATION_DRIFT,
        )

        h0 = reduced_to_hagedorn(w0)
        hagedorn = integrate(make_stepper("rk4_hagedorn", model, run_cfg), h0, run_cfg)
        coefficients = np.linalg.solve(h0.Y.Y, s0.dz)
        worst = max(
            float(np.abs(h.Y.Y @ coefficients - s.dz).max())
            for h, s in zip(hagedorn.states, variation.states)
        )
        report.at_most(f"{label}: Y(t) Y(0)^-1 dz(0) vs direct integration", worst, C.FIRST_VARIATION_MATCH)
    return report


SUITES = {
    "noether-reduced": noether_reduced,
    "noether-hagedorn": noether_hagedorn,
    "lift-consistency": lift_consistency,
    "brackets": brackets,
    "expectation-identity": expectation_identity,
    "constraints": constraints,
    "energy": energy,
    "equivariance": equivariance,
    "s1-momentum": s1_momentum,
    "first-variation": first_variation,
}


def run_suite(name, fixture=None, seed=None):
    """
    Run a named suite.

    Args:
        name (str): Key of SUITES
        fixture (str): Optional config path replacing the suite's default fixtures
        seed (int): Random seed for sampled suites

    Returns:
        SuiteReport: The report
    """
    if name not in SUITES:
        raise ConfigError(f"unknown suite '{name}'; choose from {', '.join(SUITES)}")
    fixtures = None
    if fixture is not None:
        fixtures = [(os.path.splitext(os.path.basename(fixture))[0], load_config(fixture))]
    logger.info("Running suite %s", name)
    return SUITES[name](fixtures, seed)
