"""
Momentum maps, Noether quantities, the semiclassical Poisson bracket and
drift reporting.

so(d)-valued quantities are antisymmetric matrices; the entry (j, k) is the
pairing with the basis element E_jk under <xi, eta> = tr(xi^T eta) / 2.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np

from .constants import BRACKET_STEP
from .dynamics import TangentReduced, reduced_hamiltonian
from .errors import BracketError, DimensionError
from .geometry import (
    SiegelPoint,
    diamond,
    hat,
    quotient_map,
    so_action_reduced,
    so_components,
    so_index_pairs,
    symmetrize,
)
from .potentials import gauss_hermite_expectation
from .wavepacket import ReducedState, chi_norm_squared

logger = logging.getLogger(__name__)


def classical_angular_momentum(q, p):
    """J_0 = q <> p."""
    return diamond(q, p)


def semiclassical_angular_momentum(w, hbar):
    """
    J_hbar = q <> p - (hbar/2) [B^{-1}, A].

    Args:
        w (ReducedState): State
        hbar (float): Semiclassical parameter

    Returns:
        ndarray: Antisymmetric d x d matrix
    """
    M = w.C.B_inv @ w.A
    # [B^{-1}, A] = M - M^T for symmetric A and B^{-1}
    return diamond(w.q, w.p) - 0.5 * hbar * (M - M.T)


def angular_momentum_components(J):
    """Component vector of an angular momentum matrix: scalar for d = 2, vee for d = 3."""
    return so_components(J)


class AngularMomentumMap:
    """
    J_0(q, p) = q <> p as a component vector, with its Jacobian in z = (q, p).
    """

    def __init__(self, dimension):
        self.dimension = dimension
        self.pairs = so_index_pairs(dimension)

    def value(self, z):
        d = self.dimension
        return so_components(diamond(z[:d], z[d:]))

    def jacobian(self, z):
        d = self.dimension
        q, p = z[:d], z[d:]
        D = np.zeros((len(self.pairs), 2 * d))
        # J^{jk} = q_k p_j - q_j p_k
        for row, (j, k) in enumerate(self.pairs):
            D[row, k] += p[j]
            D[row, j] -= p[k]
            D[row, d + j] += q[k]
            D[row, d + k] -= q[j]
        return D


class LinearMomentumMap:
    """J(q, p) = p, the momentum map of translations."""

    def __init__(self, dimension):
        self.dimension = dimension

    def value(self, z):
        return np.array(z[self.dimension :], dtype=float)

    def jacobian(self, z):
        d = self.dimension
        return np.hstack([np.zeros((d, d)), np.eye(d)])


def hagedorn_noether(z, Y, J):
    """
    The matrix DJ(z) . Y whose columns are conserved along Hagedorn flows
    with the symmetry of J.

    Args:
        z (ndarray): Classical phase point (q, p)
        Y (SymplecticMatrix2d): Hagedorn matrix
        J: Momentum map model with jacobian(z)

    Returns:
        ndarray: dim(g*) x 2d matrix
    """
    D = J.jacobian(np.asarray(z, dtype=float))
    if D.shape[1] != Y.Y.shape[0]:
        raise DimensionError(f"momentum map Jacobian has {D.shape[1]} columns, Y has {Y.Y.shape[0]} rows")
    return D @ Y.Y


def hagedorn_so3_invariant(q, p, Q, P):
    """hat(q) P - hat(p) Q, conserved for rotation-invariant potentials in d = 3."""
    q = np.asarray(q, dtype=float)
    if q.shape != (3,):
        raise DimensionError(f"the SO(3) invariant needs d = 3, got d = {q.shape[0]}")
    return hat(q) @ np.asarray(P) - hat(p) @ np.asarray(Q)


def s1_momentum_map(y, cfg):
    """J_M = -hbar |chi|^2, the momentum map of the global phase."""
    return -cfg.hbar * chi_norm_squared(y, cfg)


@dataclass
class ChartGradient:
    """Gradient in the (q, p, A, B^{-1}) chart; matrix parts are symmetrized."""

    q: np.ndarray
    p: np.ndarray
    A: np.ndarray
    N: np.ndarray


def _state_from_chart(q, p, A, N):
    return ReducedState(q, p, SiegelPoint(symmetrize(A), symmetrize(np.linalg.inv(N))))


def chart_gradient(F, w, step=BRACKET_STEP):
    """
    Central-difference gradient of an observable in the (q, p, A, B^{-1}) chart.

    Off-diagonal matrix entries are perturbed in symmetric pairs and the
    derivative halved, so the gradient pairs with symmetric variations
    through the entrywise product.

    Args:
        F (callable): ReducedState -> float
        w (ReducedState): Evaluation point
        step (float): Relative step, h = step * (1 + |coordinate|)

    Returns:
        ChartGradient: The gradient
    """
    d = w.d
    q, p, A = np.array(w.q), np.array(w.p), np.array(w.A)
    N = symmetrize(np.linalg.inv(w.B))

    def vector_part(x, build):
        g = np.empty(d)
        for i in range(d):
            h = step * (1.0 + abs(x[i]))
            e = np.zeros(d)
            e[i] = h
            g[i] = (F(build(x + e)) - F(build(x - e))) / (2.0 * h)
        return g

    def matrix_part(X, build):
        G = np.empty((d, d))
        for i in range(d):
            for j in range(i, d):
                h = step * (1.0 + abs(X[i, j]))
                E = np.zeros((d, d))
                E[i, j] = h
                E[j, i] = h
                derivative = (F(build(X + E)) - F(build(X - E))) / (2.0 * h)
                G[i, j] = G[j, i] = derivative if i == j else 0.5 * derivative
        return G

    return ChartGradient(
        q=vector_part(q, lambda x: _state_from_chart(x, p, A, N)),
        p=vector_part(p, lambda x: _state_from_chart(q, x, A, N)),
        A=matrix_part(A, lambda X: _state_from_chart(q, p, X, N)),
        N=matrix_part(N, lambda X: _state_from_chart(q, p, A, X)),
    )


def poisson_bracket(F, G, w, hbar):
    """
    Semiclassical bracket

        {F, G} = F_q . G_p - G_q . F_p + (4/hbar) (F_N : G_A - G_N : F_A)

    in the chart (q, p, A, N = B^{-1}).

    Args:
        F, G: Observables (callables on ReducedState) or ChartGradient instances
        w (ReducedState): Evaluation point
        hbar (float): Semiclassical parameter, must be positive

    Returns:
        float: The bracket
    """
    if hbar == 0.0:
        raise BracketError("the matrix part of the bracket is undefined at hbar = 0; use the canonical part")
    gF = F if isinstance(F, ChartGradient) else chart_gradient(F, w)
    gG = G if isinstance(G, ChartGradient) else chart_gradient(G, w)
    canonical = float(gF.q @ gG.p - gG.q @ gF.p)
    matrix = float(np.sum(gF.N * gG.A) - np.sum(gG.N * gF.A))
    return canonical + 4.0 / hbar * matrix


def hamiltonian_vector_field(H, w, hbar):
    """
    Vector field of an observable H under the semiclassical bracket,
    returned in (q, p, A, B) coordinates.
    """
    if hbar == 0.0:
        raise BracketError("the semiclassical bracket needs hbar > 0")
    g = chart_gradient(H, w)
    N_dot = 4.0 / hbar * g.A
    B_dot = -w.B @ N_dot @ w.B
    return TangentReduced(g.p, -g.q, -4.0 / hbar * g.N, symmetrize(B_dot))


def _moment_matrix(w, hbar):
    # <x_j p_k> = q_j p_k + (C Sigma)_kj with Sigma = (hbar/2) B^{-1}
    cov = 0.5 * hbar * w.C.B_inv
    return np.outer(w.q, w.p) + (w.C.C @ cov).T


def expected_angular_momentum(w, cfg, method="moments", order=None):
    """
    Expectation of the angular momentum operator in the normalized Gaussian of w.

    Args:
        w (ReducedState): State with d in {2, 3}
        cfg (SimulationConfig): Supplies hbar
        method (str): "moments" (closed form) or "quadrature"
        order (int): Quadrature order, defaults to cfg.quadrature_order or 8

    Returns:
        float for d = 2, 3-vector for d = 3
    """
    d = w.d
    if d not in (2, 3):
        raise DimensionError(f"expected angular momentum is defined for d = 2, 3, got {d}")
    if method == "moments":
        X = _moment_matrix(w, cfg.hbar)
    elif method == "quadrature":
        order = order or cfg.quadrature_order or 8
        C = w.C.C

        def integrand(x):
            # x_j (p + C (x - q))_k
            return np.outer(x, w.p + C @ (x - w.q))

        X = gauss_hermite_expectation(integrand, w.q, w.B, cfg.hbar, order)
    else:
        raise ValueError(f"unknown method '{method}'")
    # L_jk = <x_k p_j - x_j p_k>
    L = np.real(X.T - X)
    components = so_components(L)
    return float(components[0]) if d == 2 else components


def first_variation_noether(z, dz, J):
    """dJ(z) . dz, conserved along first variation flows with the symmetry of J."""
    return J.jacobian(np.asarray(z, dtype=float)) @ np.asarray(dz, dtype=float)


def equivariance_residual(w, R, hbar):
    """max |J_hbar(Gamma_R w) - R J_hbar(w) R^T|."""
    rotated = semiclassical_angular_momentum(so_action_reduced(R, w), hbar)
    expected = R @ semiclassical_angular_momentum(w, hbar) @ R.T
    return float(np.abs(rotated - expected).max())


def invariance_residual(variant, w, R, model, cfg):
    """|H(Gamma_R w) - H(w)| for the given Hamiltonian variant."""
    before = reduced_hamiltonian(w, model, cfg, variant)
    after = reduced_hamiltonian(so_action_reduced(R, w), model, cfg, variant)
    return abs(after - before)


def lift_consistency_residual(hagedorn_record, reduced_record, tol=1e-12):
    """
    Per-sample distance between the projected Hagedorn widths and a reduced trajectory.

    Args:
        hagedorn_record (TrajectoryRecord): Hagedorn states
        reduced_record (TrajectoryRecord): ReducedState (or FullState) samples
        tol (float): Allowed mismatch of sample times

    Returns:
        ndarray: max |P Q^{-1} - C| at each sample
    """
    t_h = np.asarray(hagedorn_record.times)
    t_r = np.asarray(reduced_record.times)
    if t_h.shape != t_r.shape or np.abs(t_h - t_r).max(initial=0.0) > tol:
        raise DimensionError("trajectories are recorded on different time grids")
    residuals = [
        float(np.abs(quotient_map(h.Y).C - w.C.C).max())
        for h, w in zip(hagedorn_record.states, reduced_record.states)
    ]
    return np.array(residuals)


@dataclass
class DriftReport:
    name: str
    max_abs: float
    max_rel: float
    peak_to_peak: float

    def to_dict(self):
        return asdict(self)


def drift_report(series):
    """
    Drift statistics of a series against its t = 0 value.

    Relative drift divides by the largest entry of the reference; a zero
    reference reports the absolute drift.
    """
    if len(series) == 0:
        raise ValueError(f"series '{series.name}' is empty")
    values = series.as_array()
    reference = values[0]
    max_abs = float(np.abs(values - reference).max(initial=0.0))
    scale = float(np.abs(reference).max(initial=0.0))
    if scale > 0.0:
        max_rel = max_abs / scale
    else:
        logger.warning("series '%s' has a zero reference; relative drift is absolute", series.name)
        max_rel = max_abs
    flat = values.reshape(len(values), -1)
    spread = np.ptp(flat.real, axis=0)
    if np.iscomplexobj(flat):
        spread = np.maximum(spread, np.ptp(flat.imag, axis=0))
    peak_to_peak = float(spread.max(initial=0.0))
    return DriftReport(series.name, max_abs, max_rel, peak_to_peak)
