"""
Fixed-step time steppers and the trajectory driver.
"""

import logging

import numpy as np

from .errors import ConfigError, ConstraintViolation, GeometryError, GWPError, NumericalFailure
from .dynamics import (
    hagedorn_rhs,
    heller_asymptotic_rhs,
    heller_full_rhs,
    heller_reduced_rhs,
    quantum_force,
)
from .geometry import SiegelPoint, SymplecticMatrix2d, symmetrize
from .records import InvariantSeries, TrajectoryRecord
from .wavepacket import (
    ClassicalState,
    DetQBranch,
    FullState,
    HagedornState,
    ReducedState,
    reduced_to_hagedorn,
    unit_norm_delta,
)

logger = logging.getLogger(__name__)


def stormer_verlet_step(z, dt, model, cfg):
    """
    Kick-drift-kick step of the classical system.

    Args:
        z (tuple): (q, p)
        dt (float): Time step, may be negative
        model (PotentialModel): Potential
        cfg (SimulationConfig): Supplies mass

    Returns:
        tuple: New (q, p)
    """
    q, p = (np.asarray(v, dtype=float) for v in z)
    p_half = p - 0.5 * dt * model.gradient(q)
    q_new = q + dt * p_half / cfg.mass
    p_new = p_half - 0.5 * dt * model.gradient(q_new)
    return q_new, p_new


def hagedorn_verlet_step(h, dt, model, cfg):
    """
    Leapfrog step of the Hagedorn system.

    Kicks act on (p, P) through (grad V(q), hess V(q) Q), drifts on (q, Q).
    Every substep multiplies Y by a symplectic matrix, so the (Q, P)
    constraints hold to roundoff.
    """
    m = cfg.mass
    d = h.d
    half = 0.5 * dt
    Y = np.array(h.Y.Y)
    q = h.q

    p_half = h.p - half * model.gradient(q)
    Y[d:] -= half * model.hessian(q) @ Y[:d]

    q_new = q + dt * p_half / m
    Y[:d] += (dt / m) * Y[d:]

    p_new = p_half - half * model.gradient(q_new)
    Y[d:] -= half * model.hessian(q_new) @ Y[:d]

    S = h.S + dt * (float(p_half @ p_half) / (2.0 * m) - 0.5 * (model.value(q) + model.value(q_new)))
    return HagedornState(q_new, p_new, SymplecticMatrix2d(Y, validate=False), S)


def potential_flow(w, t, model, cfg, quantum_correction=True):
    """Exact flow of V(q) + (hbar/4) tr(B^{-1} hess V(q)) for time t; q and B are frozen."""
    force = model.gradient(w.q)
    if quantum_correction:
        force = force + quantum_force(w, model, cfg.hbar)
    A = symmetrize(w.A - t * model.hessian(w.q))
    return ReducedState(w.q, w.p - t * force, SiegelPoint(A, w.B))


def kinetic_flow(w, t, cfg):
    """Exact kinetic flow: q += t p/m and C <- C (I + (t/m) C)^{-1}."""
    m = cfg.mass
    C = w.C.C
    M = np.eye(w.d) + (t / m) * C
    try:
        C_new = np.linalg.solve(M.T, C.T).T
    except np.linalg.LinAlgError as exc:
        raise GeometryError(f"kinetic flow hit a singular I + tC/m: {exc}")
    return ReducedState(w.q + t * w.p / m, w.p, SiegelPoint.from_complex(C_new))


def variational_splitting_step(w, dt, model, cfg, quantum_correction=None):
    """
    Strang splitting W/2, T, W/2 of the asymptotic semiclassical Hamiltonian.

    Args:
        w (ReducedState): Current state
        dt (float): Time step, may be negative
        model (PotentialModel): Potential with third derivatives
        cfg (SimulationConfig): Supplies hbar, mass and the default quantum_correction
        quantum_correction (bool): Override cfg.quantum_correction

    Returns:
        ReducedState: State after one step
    """
    if quantum_correction is None:
        quantum_correction = cfg.quantum_correction
    half = 0.5 * dt
    w = potential_flow(w, half, model, cfg, quantum_correction)
    w = kinetic_flow(w, dt, cfg)
    return potential_flow(w, half, model, cfg, quantum_correction)


def rk4_step(rhs, state, dt):
    """
    Classical fourth-order Runge-Kutta step.

    Args:
        rhs (callable): state -> tangent (or ndarray -> ndarray)
        state: ndarray, or a record with as_vector()/with_vector()
        dt (float): Time step

    Returns:
        Same type as state
    """
    if isinstance(state, np.ndarray):
        k1 = rhs(state)
        k2 = rhs(state + 0.5 * dt * k1)
        k3 = rhs(state + 0.5 * dt * k2)
        k4 = rhs(state + dt * k3)
        return state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def f(v):
        return np.asarray(rhs(state.with_vector(v, validate=False)).as_vector())

    y = state.as_vector()
    k1 = np.asarray(rhs(state).as_vector())
    k2 = f(y + 0.5 * dt * k1)
    k3 = f(y + 0.5 * dt * k2)
    k4 = f(y + dt * k3)
    return state.with_vector(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))


STATE_KINDS = {
    "variational_splitting": "reduced",
    "rk4_asymptotic": "reduced",
    "rk4_exact": "reduced",
    "rk4_full": "full",
    "hagedorn_verlet": "hagedorn",
    "rk4_hagedorn": "hagedorn",
    "stormer_verlet": "classical",
}


def make_stepper(name, model, cfg):
    """
    Stepper callable (state, dt) -> state for an integrator name.
    """
    if name == "variational_splitting":
        return lambda w, dt: variational_splitting_step(w, dt, model, cfg)
    if name == "rk4_asymptotic":
        rhs = lambda w: heller_asymptotic_rhs(w, model, cfg, cfg.quantum_correction)
    elif name == "rk4_exact":
        rhs = lambda w: heller_reduced_rhs(w, model, cfg)
    elif name == "rk4_full":
        rhs = lambda y: heller_full_rhs(y, model, cfg)
    elif name == "hagedorn_verlet":
        return lambda h, dt: hagedorn_verlet_step(h, dt, model, cfg)
    elif name == "rk4_hagedorn":
        rhs = lambda h: hagedorn_rhs(h, model, cfg)
    elif name == "stormer_verlet":
        return lambda z, dt: ClassicalState(*stormer_verlet_step((z.q, z.p), dt, model, cfg))
    else:
        raise ConfigError(f"unknown integrator '{name}'")
    return lambda state, dt: rk4_step(rhs, state, dt)


def build_initial_state(cfg):
    """
    Initial state of the kind the configured integrator advances.

    delta defaults to the unit-norm value, phi and S to zero. The classical
    integrator keeps only (q, p).
    """
    init = cfg.initial
    if init is None:
        raise ConfigError("configuration has no initial state")
    if STATE_KINDS[cfg.integrator] == "classical":
        return ClassicalState(init["q"], init["p"])
    w = ReducedState(init["q"], init["p"], SiegelPoint(init["A"], init["B"]))
    kind = STATE_KINDS[cfg.integrator]
    if kind == "reduced":
        return w
    if kind == "full":
        delta = init.get("delta")
        if delta is None:
            delta = unit_norm_delta(w.B, cfg.hbar)
        return FullState(w.q, w.p, w.C, init.get("phi", 0.0), delta)
    return reduced_to_hagedorn(w, init.get("S", 0.0))


def _record(record, t, state, invariants, branch):
    record.times.append(t)
    record.states.append(state)
    for name, fn in invariants.items():
        record.series[name].append(t, fn(state))
    if branch is not None:
        record.series["arg_det_Q"].append(t, branch.angle)


def integrate(stepper, state0, cfg, invariants=None):
    """
    Advance state0 for cfg.n_steps steps of size cfg.dt.

    A sample is taken at t = 0 and after every cfg.record_stride steps, so
    the record holds floor(n_steps / stride) + 1 samples.

    Args:
        stepper (callable): (state, dt) -> state
        state0: Initial state
        cfg (SimulationConfig): Supplies dt, n_steps, record_stride, tolerances
        invariants (dict): name -> callable(state), evaluated at every sample

    Returns:
        TrajectoryRecord: Times, states and invariant series
    """
    invariants = dict(invariants or {})
    dt = cfg.dt
    n_steps = cfg.n_steps
    stride = cfg.record_stride
    record = TrajectoryRecord(series={name: InvariantSeries(name) for name in invariants})
    branch = None
    if isinstance(state0, HagedornState):
        branch = DetQBranch(state0.Q)
        record.series["arg_det_Q"] = InvariantSeries("arg_det_Q")

    logger.info("Integrating %d steps of dt=%g (stride %d)", n_steps, dt, stride)
    state = state0
    _record(record, 0.0, state, invariants, branch)
    for step in range(1, n_steps + 1):
        try:
            state = stepper(state, dt)
            if not np.all(np.isfinite(state.as_vector())):
                raise GeometryError("state has non-finite entries")
            if branch is not None:
                branch.follow(state.Q)
                residual = max(state.residuals())
                if residual > cfg.tolerances.hagedorn:
                    raise ConstraintViolation(f"constraint residual {residual:.3e}")
            if step % stride == 0:
                _record(record, step * dt, state, invariants, branch)
        except (GWPError, np.linalg.LinAlgError, FloatingPointError) as exc:
            logger.error("Integration failed at step %d (t=%g): %s", step, (step - 1) * dt, exc)
            raise NumericalFailure(str(exc), step=step, time=(step - 1) * dt) from exc
    logger.info("Recorded %d samples", len(record))
    return record
