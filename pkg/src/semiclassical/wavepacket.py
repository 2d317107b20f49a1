"""
Wave packet state records, normalization, pointwise evaluation and the
conversions between the reduced (Siegel) and Hagedorn parametrizations.
"""

import logging
from dataclasses import InitVar, dataclass

import numpy as np

from .constants import BRANCH_STEP_LIMIT, HAGEDORN_TOL
from .errors import ConstraintViolation, DimensionError, GeometryError
from .geometry import (
    SiegelPoint,
    SymplecticMatrix2d,
    constraint_residuals,
    quotient_map,
    random_siegel_point,
    siegel_to_qp,
    symmetrize,
)

logger = logging.getLogger(__name__)


def _vector(v, name, d=None):
    v = np.array(v, dtype=float, ndmin=1)
    if v.ndim != 1 or (d is not None and v.shape[0] != d):
        raise DimensionError(f"{name} must be a {d}-vector, got shape {v.shape}")
    v.setflags(write=False)
    return v


def _unpack_matrices(v, d, start):
    size = d * d
    A = v[start : start + size].reshape(d, d)
    B = v[start + size : start + 2 * size].reshape(d, d)
    return symmetrize(A), symmetrize(B)


@dataclass(frozen=True, eq=False)
class ReducedState:
    """
    Phase point (q, p, C) of the reduced semiclassical system.

    Attributes:
        q (ndarray): Position
        p (ndarray): Momentum
        C (SiegelPoint): Width matrix A + iB
    """

    q: np.ndarray
    p: np.ndarray
    C: SiegelPoint

    def __post_init__(self):
        d = self.C.d
        object.__setattr__(self, "q", _vector(self.q, "q", d))
        object.__setattr__(self, "p", _vector(self.p, "p", d))

    @property
    def d(self):
        return self.C.d

    @property
    def A(self):
        return self.C.A

    @property
    def B(self):
        return self.C.B

    def as_vector(self):
        return np.concatenate([self.q, self.p, self.A.ravel(), self.B.ravel()])

    def with_vector(self, v, validate=True):
        d = self.d
        A, B = _unpack_matrices(v, d, 2 * d)
        return ReducedState(v[:d], v[d : 2 * d], SiegelPoint(A, B, validate=validate))


@dataclass(frozen=True, eq=False)
class FullState:
    """
    Reduced state plus the phase phi and the log-norm parameter delta.

    phi is stored unwrapped.
    """

    q: np.ndarray
    p: np.ndarray
    C: SiegelPoint
    phi: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        d = self.C.d
        object.__setattr__(self, "q", _vector(self.q, "q", d))
        object.__setattr__(self, "p", _vector(self.p, "p", d))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "delta", float(self.delta))

    @property
    def d(self):
        return self.C.d

    @property
    def A(self):
        return self.C.A

    @property
    def B(self):
        return self.C.B

    @property
    def reduced(self):
        return ReducedState(self.q, self.p, self.C)

    def as_vector(self):
        return np.concatenate(
            [self.q, self.p, self.A.ravel(), self.B.ravel(), [self.phi, self.delta]]
        )

    def with_vector(self, v, validate=True):
        d = self.d
        A, B = _unpack_matrices(v, d, 2 * d)
        return FullState(
            v[:d], v[d : 2 * d], SiegelPoint(A, B, validate=validate), v[-2], v[-1]
        )


@dataclass(frozen=True, eq=False)
class HagedornState:
    """
    Hagedorn parameters (q, p, Q, P, S) with (Q, P) stored in a real Y.

    Attributes:
        q (ndarray): Position
        p (ndarray): Momentum
        Y (SymplecticMatrix2d): [[Re Q, Im Q], [Re P, Im P]]
        S (float): Action phase
    """

    q: np.ndarray
    p: np.ndarray
    Y: SymplecticMatrix2d
    S: float = 0.0
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        d = self.Y.d
        object.__setattr__(self, "q", _vector(self.q, "q", d))
        object.__setattr__(self, "p", _vector(self.p, "p", d))
        object.__setattr__(self, "S", float(self.S))
        if validate:
            r1, r2 = self.residuals()
            if max(r1, r2) > HAGEDORN_TOL:
                raise ConstraintViolation(
                    f"Hagedorn constraints violated (residuals {r1:.3e}, {r2:.3e})"
                )

    @classmethod
    def from_qp(cls, q, p, Q, P, S=0.0, validate=True):
        return cls(q, p, SymplecticMatrix2d.from_qp(Q, P, validate=False), S, validate=validate)

    @property
    def d(self):
        return self.Y.d

    @property
    def Q(self):
        return self.Y.Q

    @property
    def P(self):
        return self.Y.P

    def residuals(self):
        return constraint_residuals(self.Q, self.P)

    def as_vector(self):
        return np.concatenate([self.q, self.p, self.Y.Y.ravel(), [self.S]])

    def with_vector(self, v, validate=True):
        d = self.d
        n = 2 * d
        Y = SymplecticMatrix2d(v[n : n + n * n].reshape(n, n), validate=False)
        return HagedornState(v[:d], v[d:n], Y, v[-1], validate=validate)


@dataclass(frozen=True, eq=False)
class ClassicalState:
    """Classical phase point (q, p), the centre of a packet without its width."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = _vector(self.q, "q")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", _vector(self.p, "p", q.shape[0]))

    @property
    def d(self):
        return self.q.shape[0]

    def as_vector(self):
        return np.concatenate([self.q, self.p])

    def with_vector(self, v, validate=True):
        d = self.d
        return ClassicalState(v[:d], v[d : 2 * d])


def _gaussian_exponent(C, q, p, x, hbar):
    y = np.atleast_2d(np.asarray(x, dtype=float)) - q
    quad = np.einsum("ni,ij,nj->n", y, C, y)
    return (1j / hbar) * (0.5 * quad + y @ p)


def evaluate_psi0(w, cfg, x):
    """
    Evaluate the normalized Gaussian psi_0 of a reduced state.

    Args:
        w (ReducedState): Wave packet parameters
        cfg (SimulationConfig): Supplies hbar
        x (array_like): A d-vector, or an (n, d) array of points

    Returns:
        complex or ndarray: psi_0 at x
    """
    hbar = cfg.hbar
    d = w.d
    norm = np.linalg.det(w.B) ** 0.25 * (np.pi * hbar) ** (-d / 4.0)
    values = norm * np.exp(_gaussian_exponent(w.C.C, w.q, w.p, x, hbar))
    return values[0] if np.ndim(x) <= 1 else values


def chi_norm_squared(y, cfg):
    """
    Squared norm sqrt((pi hbar)^d / det B) exp(-2 delta / hbar) of the
    unnormalized Gaussian chi.
    """
    hbar = cfg.hbar
    return float(
        np.sqrt((np.pi * hbar) ** y.d / np.linalg.det(y.B)) * np.exp(-2.0 * y.delta / hbar)
    )


def unit_norm_delta(B, hbar):
    """delta with chi_norm_squared equal to one: (hbar/4) ln((pi hbar)^d / det B)."""
    B = np.asarray(B, dtype=float)
    d = B.shape[0]
    return 0.25 * hbar * np.log((np.pi * hbar) ** d / np.linalg.det(B))


class DetQBranch:
    """
    Continuous branch of arg det Q along a trajectory.

    The angle starts on the principal branch and is unwrapped by the
    principal-value increment between consecutive calls to follow().
    """

    def __init__(self, Q, limit=BRANCH_STEP_LIMIT):
        self.limit = limit
        self.angle = float(np.angle(np.linalg.det(Q)))

    def follow(self, Q):
        """
        Advance to a new Q and return the unwrapped arg det Q.

        Args:
            Q (ndarray): Complex d x d matrix close to the previous one

        Returns:
            float: The continuous angle
        """
        det = np.linalg.det(Q)
        if det == 0:
            raise ConstraintViolation("det Q vanished")
        increment = float(np.angle(det * np.exp(-1j * self.angle)))
        if abs(increment) > self.limit:
            raise GeometryError(
                f"arg det Q jumped by {increment:.3f} rad in one step; reduce the step size"
            )
        if abs(increment) > 0.5 * self.limit:
            logger.warning("arg det Q increment %.3f rad is close to the limit", increment)
        self.angle += increment
        return self.angle


def evaluate_hagedorn_ground(h, cfg, x, branch=None):
    """
    Evaluate the Hagedorn ground state phi_0 of h at x.

    (det Q)^{-1/2} is taken on the branch carried by `branch`; without a
    token the principal branch is used.
    """
    hbar = cfg.hbar
    d = h.d
    Q = h.Q
    det = np.linalg.det(Q)
    if det == 0:
        raise ConstraintViolation("det Q vanished")
    angle = branch.follow(Q) if branch is not None else float(np.angle(det))
    inv_sqrt_det = abs(det) ** -0.5 * np.exp(-0.5j * angle)
    try:
        C = np.linalg.solve(Q.T, h.P.T).T
    except np.linalg.LinAlgError as exc:
        raise ConstraintViolation(f"singular Q: {exc}")
    norm = (np.pi * hbar) ** (-d / 4.0) * inv_sqrt_det
    values = norm * np.exp(_gaussian_exponent(C, h.q, h.p, x, hbar))
    return values[0] if np.ndim(x) <= 1 else values


def hagedorn_to_reduced(h, tol=HAGEDORN_TOL):
    """
    Reduced state (q, p, P Q^{-1}) of a Hagedorn state.

    Also checks Im(P Q^{-1}) Q Q^* = I.
    """
    C = quotient_map(h.Y)
    residual = float(np.abs(C.B @ h.Q @ h.Q.conj().T - np.eye(h.d)).max())
    if residual > tol:
        raise ConstraintViolation(f"Im(PQ^-1) QQ^* deviates from I by {residual:.3e}")
    return ReducedState(h.q, h.p, C)


def reduced_to_hagedorn(w, S=0.0):
    """Hagedorn state over w on the canonical section Q = B^{-1/2}."""
    Q, P = siegel_to_qp(w.C)
    return HagedornState.from_qp(w.q, w.p, Q, P, S)


def reduced_to_full(w, phi=0.0, delta=0.0):
    return FullState(w.q, w.p, w.C, phi, delta)


def full_to_reduced(y):
    return y.reduced


def as_reduced(state):
    """The reduced state behind a reduced, full or Hagedorn state."""
    if isinstance(state, HagedornState):
        return hagedorn_to_reduced(state)
    if isinstance(state, FullState):
        return state.reduced
    return state


def random_reduced_state(rng, d, scale=1.0):
    """Random reduced state with normal q, p and a well-conditioned C."""
    return ReducedState(
        scale * rng.normal(size=d), scale * rng.normal(size=d), random_siegel_point(rng, d)
    )
