"""
Vector fields and Hamiltonians of the semiclassical, Hagedorn and
first variation systems.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .geometry import SiegelPoint, symmetrize
from .potentials import contract_third, gaussian_average
from .wavepacket import HagedornState

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TangentReduced:
    q: np.ndarray
    p: np.ndarray
    A: np.ndarray
    B: np.ndarray

    def as_vector(self):
        return np.concatenate([self.q, self.p, self.A.ravel(), self.B.ravel()])


@dataclass(frozen=True, eq=False)
class TangentFull:
    q: np.ndarray
    p: np.ndarray
    A: np.ndarray
    B: np.ndarray
    phi: float
    delta: float

    @property
    def reduced(self):
        return TangentReduced(self.q, self.p, self.A, self.B)

    def as_vector(self):
        return np.concatenate(
            [self.q, self.p, self.A.ravel(), self.B.ravel(), [self.phi, self.delta]]
        )


@dataclass(frozen=True, eq=False)
class TangentHagedorn:
    q: np.ndarray
    p: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    S: float

    def as_vector(self):
        Ydot = np.block([[self.Q.real, self.Q.imag], [self.P.real, self.P.imag]])
        return np.concatenate([self.q, self.p, Ydot.ravel(), [self.S]])


@dataclass(frozen=True, eq=False)
class FirstVariationState:
    """
    A classical phase point z = (q, p) together with a variation dz.

    The same record carries the time derivative returned by
    first_variation_rhs.
    """

    z: np.ndarray
    dz: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=float)
        dz = np.array(self.dz, dtype=float)
        if z.ndim != 1 or z.shape != dz.shape or z.shape[0] % 2:
            raise DimensionError(f"z and dz must be equal 2d-vectors, got {z.shape} and {dz.shape}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "dz", dz)

    @property
    def d(self):
        return self.z.shape[0] // 2

    def as_vector(self):
        return np.concatenate([self.z, self.dz])

    def with_vector(self, v, validate=True):
        n = self.z.shape[0]
        return FirstVariationState(v[:n], v[n:])


def _kinetic_width_terms(A, B, mass):
    # d/dt of (A, B) under the kinetic part
    A_dot = -(A @ A - B @ B) / mass
    B_dot = -(A @ B + B @ A) / mass
    return A_dot, B_dot


def heller_full_rhs(y, model, cfg):
    """
    Right-hand side of the full Gaussian wave packet system (q, p, A, B, phi, delta).

    Args:
        y (FullState): Current state
        model (PotentialModel): Potential
        cfg (SimulationConfig): Supplies hbar, mass and quadrature_order

    Returns:
        TangentFull: Time derivatives
    """
    hbar, m = cfg.hbar, cfg.mass
    A, B = y.A, y.B
    B_inv = y.C.B_inv
    V_avg, grad_avg, hess_avg = gaussian_average(model, y.q, B, hbar, cfg.quadrature_order)
    A_dot, B_dot = _kinetic_width_terms(A, B, m)
    phi_dot = (
        float(y.p @ y.p) / (2.0 * m)
        - V_avg
        - hbar / (2.0 * m) * float(np.trace(B))
        + 0.25 * hbar * float(np.sum(B_inv * hess_avg))
    )
    delta_dot = hbar / (2.0 * m) * float(np.trace(A))
    return TangentFull(
        y.p / m, -grad_avg, symmetrize(A_dot - hess_avg), symmetrize(B_dot), phi_dot, delta_dot
    )


def heller_reduced_rhs(w, model, cfg):
    """Reduced system with exact Gaussian averages <grad V>, <hess V>."""
    A, B = w.A, w.B
    _, grad_avg, hess_avg = gaussian_average(model, w.q, B, cfg.hbar, cfg.quadrature_order)
    A_dot, B_dot = _kinetic_width_terms(A, B, cfg.mass)
    return TangentReduced(w.p / cfg.mass, -grad_avg, symmetrize(A_dot - hess_avg), symmetrize(B_dot))


def quantum_force(w, model, hbar):
    """(hbar/4) grad_q tr(B^{-1} hess V(q)), the correction to the classical force."""
    if hbar == 0.0:
        return np.zeros(w.d)
    return 0.25 * hbar * contract_third(w.C.B_inv, model.third(w.q))


def heller_asymptotic_rhs(w, model, cfg, quantum_correction=True):
    """
    Reduced system of the asymptotic Hamiltonian: pointwise derivatives of V
    at q, with the hbar-correction to the momentum equation.
    """
    A, B = w.A, w.B
    force = -model.gradient(w.q)
    if quantum_correction:
        force = force - quantum_force(w, model, cfg.hbar)
    A_dot, B_dot = _kinetic_width_terms(A, B, cfg.mass)
    return TangentReduced(
        w.p / cfg.mass, force, symmetrize(A_dot - model.hessian(w.q)), symmetrize(B_dot)
    )


def riccati_rhs(C, q, model, cfg):
    """
    Right-hand side -C^2/m - hess V(q) of the width Riccati equation.

    Returns:
        ndarray: Complex symmetric d x d matrix
    """
    Z = C.C
    return -(Z @ Z) / cfg.mass - model.hessian(np.asarray(q, dtype=float))


def hagedorn_rhs(h, model, cfg):
    """
    q' = p/m, p' = -grad V(q), Q' = P/m, P' = -hess V(q) Q, S' = p^2/2m - V(q).
    """
    m = cfg.mass
    H = model.hessian(h.q)
    S_dot = float(h.p @ h.p) / (2.0 * m) - model.value(h.q)
    return TangentHagedorn(h.p / m, -model.gradient(h.q), h.P / m, -H @ h.Q, S_dot)


def xi_matrix(q, model, cfg):
    """The linearization [[0, I/m], [-hess V(q), 0]] of the classical flow."""
    d = q.shape[0]
    return np.block(
        [[np.zeros((d, d)), np.eye(d) / cfg.mass], [-model.hessian(q), np.zeros((d, d))]]
    )


def first_variation_rhs(s, model, cfg):
    """Classical flow of z coupled with its linearization dz' = xi(z) dz."""
    d = s.d
    q, p = s.z[:d], s.z[d:]
    z_dot = np.concatenate([p / cfg.mass, -model.gradient(q)])
    return FirstVariationState(z_dot, xi_matrix(q, model, cfg) @ s.dz)


def classical_hamiltonian(q, p, model, cfg):
    return float(p @ p) / (2.0 * cfg.mass) + model.value(q)


def tangent_hamiltonian(s, model, cfg):
    """The tangent-lifted Hamiltonian dH(z) . dz of the first variation system."""
    d = s.d
    q, p = s.z[:d], s.z[d:]
    dH = np.concatenate([model.gradient(q), p / cfg.mass])
    return float(dH @ s.dz)


def reduced_hamiltonian(w, model, cfg, variant="asymptotic"):
    """
    Semiclassical Hamiltonian of a reduced state.

    Args:
        w (ReducedState): State
        model (PotentialModel): Potential
        cfg (SimulationConfig): Supplies hbar, mass, quadrature_order
        variant (str): "exact" uses <V>; "asymptotic" expands V around q

    Returns:
        float: Energy
    """
    hbar, m = cfg.hbar, cfg.mass
    A, B = w.A, w.B
    B_inv = w.C.B_inv
    kinetic = float(w.p @ w.p) / (2.0 * m)
    width = float(np.sum(B_inv * (A @ A + B @ B)))
    if variant == "exact":
        V_avg, _, _ = gaussian_average(model, w.q, B, hbar, cfg.quadrature_order)
        return kinetic + 0.25 * hbar / m * width + V_avg
    if variant == "asymptotic":
        curvature = float(np.sum(B_inv * model.hessian(w.q)))
        return kinetic + model.value(w.q) + 0.25 * hbar * (width / m + curvature)
    raise ValueError(f"unknown Hamiltonian variant '{variant}'")


def harmonic_frequency(model, cfg):
    """omega = sqrt(k/m) of an isotropic harmonic model."""
    K = model.K
    k = K[0, 0]
    if not np.allclose(K, k * np.eye(K.shape[0])):
        raise ValueError("analytic flows need an isotropic harmonic potential")
    return np.sqrt(k / cfg.mass)


def harmonic_hagedorn_flow(h0, t, model, cfg):
    """
    Exact Hagedorn flow for V = k|x|^2/2, a rotation in each (x, m omega^{-1} p) plane.

    S is not advanced.
    """
    omega = harmonic_frequency(model, cfg)
    m = cfg.mass
    c, s = np.cos(omega * t), np.sin(omega * t)
    q = c * h0.q + s / (m * omega) * h0.p
    p = -m * omega * s * h0.q + c * h0.p
    Q = c * h0.Q + s / (m * omega) * h0.P
    P = -m * omega * s * h0.Q + c * h0.P
    return HagedornState.from_qp(q, p, Q, P, h0.S)


def harmonic_riccati_flow(C0, t, model, cfg):
    """
    Exact solution of the width Riccati equation for V = k|x|^2/2:
    C(t) = (c C0 - m omega s I)(c I + s C0 / (m omega))^{-1}.
    """
    omega = harmonic_frequency(model, cfg)
    m = cfg.mass
    c, s = np.cos(omega * t), np.sin(omega * t)
    eye = np.eye(C0.d)
    top = c * C0.C - m * omega * s * eye
    bottom = c * eye + s / (m * omega) * C0.C
    return SiegelPoint.from_complex(np.linalg.solve(bottom.T, top.T).T)
