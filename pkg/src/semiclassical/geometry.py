"""
Small dense matrix geometry: the Siegel upper half space, the real symplectic
group, the hat/diamond maps and the rotation actions on both.

Complex d x d pairs (Q, P) live inside a real 2d x 2d array

    Y = [[Re Q, Im Q],
         [Re P, Im P]]

so that the block views of a SymplecticMatrix2d are slices, not copies.
"""

import dataclasses
import logging
from dataclasses import InitVar, dataclass

import numpy as np
from scipy.linalg import expm
from scipy.stats import special_ortho_group, unitary_group

from .constants import (
    DEGENERACY_RATIO,
    ROTATION_TOL,
    SP_GENERATOR_SCALE,
    SYMMETRY_TOL,
    SYMPLECTIC_TOL,
)
from .errors import ConstraintViolation, DimensionError, GeometryError

logger = logging.getLogger(__name__)


def _readonly(array):
    array.setflags(write=False)
    return array


def symmetric_matrix(M, name="matrix", tol=SYMMETRY_TOL):
    """
    Validate a real symmetric matrix and return it as a read-only float array.

    Args:
        M (array_like): Candidate d x d matrix
        name (str): Name used in error messages
        tol (float): Allowed |M_ij - M_ji|, scaled by max(1, |M|_max)

    Returns:
        ndarray: The validated matrix
    """
    M = np.array(M, dtype=float, ndmin=2)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    residual = float(np.abs(M - M.T).max(initial=0.0))
    if residual > tol * scale:
        raise GeometryError(f"{name} is not symmetric (residual {residual:.3e})")
    return _readonly(M)


def antisymmetric_matrix(M, name="matrix", tol=SYMMETRY_TOL):
    """Validate a real antisymmetric matrix."""
    M = np.array(M, dtype=float, ndmin=2)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    residual = float(np.abs(M + M.T).max(initial=0.0))
    if residual > tol * scale:
        raise GeometryError(f"{name} is not antisymmetric (residual {residual:.3e})")
    return _readonly(M)


def symmetrize(M):
    return 0.5 * (M + M.T)


def symmetric_sqrt(B, ratio=DEGENERACY_RATIO):
    """
    Square root of a symmetric positive-definite matrix and its inverse.

    Args:
        B (ndarray): Symmetric positive-definite matrix
        ratio (float): Smallest admissible eigenvalue relative to the largest

    Returns:
        tuple: (B^{1/2}, B^{-1/2})
    """
    evals, evecs = np.linalg.eigh(B)
    largest = evals[-1]
    if largest <= 0.0 or evals[0] <= ratio * largest:
        raise GeometryError(
            f"matrix is not positive-definite (eigenvalues {evals[0]:.3e} .. {largest:.3e})"
        )
    root = np.sqrt(evals)
    sqrt_b = (evecs * root) @ evecs.T
    inv_sqrt_b = (evecs / root) @ evecs.T
    return symmetrize(sqrt_b), symmetrize(inv_sqrt_b)


@dataclass(frozen=True, eq=False)
class SiegelPoint:
    """
    A point C = A + iB of the Siegel upper half space.

    A and B are real symmetric and B is positive-definite.
    """

    A: np.ndarray
    B: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        if validate:
            A = symmetric_matrix(self.A, "A")
            B = symmetric_matrix(self.B, "B")
            if A.shape != B.shape:
                raise DimensionError(f"A has shape {A.shape} but B has shape {B.shape}")
            sqrt_b, _ = symmetric_sqrt(B)
            error = float(np.abs(sqrt_b @ sqrt_b - B).max())
            if error > 1e-10 * max(1.0, float(np.abs(B).max())):
                raise GeometryError(f"factorization of B failed (reconstruction error {error:.3e})")
        else:
            A = _readonly(np.array(self.A, dtype=float, ndmin=2))
            B = _readonly(np.array(self.B, dtype=float, ndmin=2))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)

    @classmethod
    def from_complex(cls, C, validate=True):
        C = np.asarray(C, dtype=complex)
        return cls(symmetrize(C.real), symmetrize(C.imag), validate=validate)

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def C(self):
        return self.A + 1j * self.B

    @property
    def B_inv(self):
        return symmetrize(np.linalg.inv(self.B))


def standard_symplectic_form(d):
    """The 2d x 2d matrix J with +I upper-right and -I lower-left."""
    eye = np.eye(d)
    zero = np.zeros((d, d))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True, eq=False)
class SymplecticMatrix2d:
    """
    A real symplectic matrix Y with block views (ReQ, ImQ; ReP, ImP).
    """

    Y: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate):
        Y = np.array(self.Y, dtype=float, ndmin=2)
        if Y.ndim != 2 or Y.shape[0] != Y.shape[1] or Y.shape[0] % 2:
            raise DimensionError(f"Y must be 2d x 2d, got shape {Y.shape}")
        object.__setattr__(self, "Y", _readonly(Y))
        if validate:
            residual = self.symplectic_residual()
            if residual > SYMPLECTIC_TOL:
                raise GeometryError(f"Y is not symplectic (residual {residual:.3e})")

    @classmethod
    def from_qp(cls, Q, P, validate=True):
        Q = np.asarray(Q, dtype=complex)
        P = np.asarray(P, dtype=complex)
        if Q.shape != P.shape:
            raise DimensionError(f"Q has shape {Q.shape} but P has shape {P.shape}")
        Y = np.block([[Q.real, Q.imag], [P.real, P.imag]])
        return cls(Y, validate=validate)

    @property
    def d(self):
        return self.Y.shape[0] // 2

    @property
    def ReQ(self):
        return self.Y[: self.d, : self.d]

    @property
    def ImQ(self):
        return self.Y[: self.d, self.d :]

    @property
    def ReP(self):
        return self.Y[self.d :, : self.d]

    @property
    def ImP(self):
        return self.Y[self.d :, self.d :]

    @property
    def Q(self):
        return self.ReQ + 1j * self.ImQ

    @property
    def P(self):
        return self.ReP + 1j * self.ImP

    def symplectic_residual(self):
        J = standard_symplectic_form(self.d)
        return float(np.abs(self.Y.T @ J @ self.Y - J).max())


def hat(v):
    """
    Map a 3-vector to its cross-product matrix, hat(v) w = v x w.

    Args:
        v (array_like): Real 3-vector

    Returns:
        ndarray: Antisymmetric 3 x 3 matrix
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise DimensionError(f"hat expects a 3-vector, got shape {v.shape}")
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def vee(M):
    """Inverse of hat."""
    M = np.asarray(M)
    if M.shape != (3, 3):
        raise DimensionError(f"vee expects a 3 x 3 matrix, got shape {M.shape}")
    M = antisymmetric_matrix(M, "vee argument")
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def diamond(q, p):
    """
    The antisymmetric matrix (q <> p)_ij = q_j p_i - q_i p_j.

    Args:
        q (array_like): Real d-vector
        p (array_like): Real d-vector

    Returns:
        ndarray: Antisymmetric d x d matrix
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    if q.shape != p.shape or q.ndim != 1:
        raise DimensionError(f"diamond needs two d-vectors, got {q.shape} and {p.shape}")
    return np.outer(p, q) - np.outer(q, p)


def so_index_pairs(d):
    """
    Matrix entries that carry the components of an so(d) element.

    d = 2 uses the single (2,1) entry, d = 3 the vee ordering and larger d
    the upper triangle.
    """
    if d == 2:
        return [(1, 0)]
    if d == 3:
        return [(2, 1), (0, 2), (1, 0)]
    return [(j, k) for j in range(d) for k in range(j + 1, d)]


def so_components(M):
    """Component vector of an antisymmetric matrix (see so_index_pairs)."""
    M = antisymmetric_matrix(M, "so(d) element")
    return np.array([M[j, k] for j, k in so_index_pairs(M.shape[0])])


def so_basis(d):
    """
    Basis elements E_jk = e_j e_k^T - e_k e_j^T of so(d), j < k.

    Returns:
        dict: (j, k) -> d x d matrix
    """
    basis = {}
    for j in range(d):
        for k in range(j + 1, d):
            E = np.zeros((d, d))
            E[j, k] = 1.0
            E[k, j] = -1.0
            basis[(j, k)] = E
    return basis


def so_pairing(xi, eta):
    """The inner product <xi, eta> = tr(xi^T eta) / 2 on so(d)."""
    return 0.5 * float(np.trace(np.asarray(xi).T @ np.asarray(eta)))


def _mobius(X, Z, singular_error):
    d = X.d
    Y = X.Y
    a, b = Y[:d, :d], Y[:d, d:]
    c, e = Y[d:, :d], Y[d:, d:]
    bottom = c + e @ Z
    top = a + b @ Z
    try:
        # bottom @ inv(top)
        result = np.linalg.solve(top.T, bottom.T).T
    except np.linalg.LinAlgError as exc:
        raise singular_error(f"singular denominator in linear fractional map: {exc}")
    if not np.all(np.isfinite(result)):
        raise singular_error("linear fractional map produced non-finite entries")
    return result


def siegel_action(X, Z):
    """
    Act on the Siegel upper half space by (C + DZ)(A + BZ)^{-1}.

    Args:
        X (SymplecticMatrix2d): Group element with blocks [[A, B], [C, D]]
        Z (SiegelPoint): Point to move

    Returns:
        SiegelPoint: The image of Z
    """
    if X.d != Z.d:
        raise DimensionError(f"X acts on dimension {X.d} but Z has dimension {Z.d}")
    return SiegelPoint.from_complex(_mobius(X, Z.C, GeometryError))


def quotient_map(Y):
    """
    Project a symplectic matrix to the Siegel upper half space, Y -> P Q^{-1}.

    Args:
        Y (SymplecticMatrix2d): Matrix holding (Q, P)

    Returns:
        SiegelPoint: P Q^{-1}, equal to siegel_action(Y, iI)
    """
    base = 1j * np.eye(Y.d)
    return SiegelPoint.from_complex(_mobius(Y, base, ConstraintViolation))


def siegel_to_qp(Z):
    """
    Canonical (Q, P) over a Siegel point: Q = B^{-1/2}, P = (A + iB) B^{-1/2}.

    Args:
        Z (SiegelPoint): Point to lift

    Returns:
        tuple: Complex d x d arrays (Q, P)
    """
    _, inv_sqrt_b = symmetric_sqrt(Z.B)
    Q = inv_sqrt_b.astype(complex)
    P = Z.C @ inv_sqrt_b
    return Q, P


def transitivity_factor(Z):
    """
    The symplectic matrix [[B^{-1/2}, 0], [A B^{-1/2}, B^{1/2}]] that moves iI to Z.
    """
    sqrt_b, inv_sqrt_b = symmetric_sqrt(Z.B)
    zero = np.zeros_like(sqrt_b)
    X = np.block([[inv_sqrt_b, zero], [Z.A @ inv_sqrt_b, sqrt_b]])
    return SymplecticMatrix2d(X)


def unitary_embedding(W):
    """Embed a unitary W = U + iV into Sp(2d, R) as [[U, V], [-V, U]]."""
    W = np.asarray(W, dtype=complex)
    U, V = W.real, W.imag
    return SymplecticMatrix2d(np.block([[U, V], [-V, U]]))


def check_rotation(R, tol=ROTATION_TOL):
    """
    Validate a rotation matrix.

    Args:
        R (array_like): Candidate d x d matrix
        tol (float): Allowed deviation of R^T R from I and of det R from 1

    Returns:
        ndarray: R as a float array
    """
    R = np.array(R, dtype=float, ndmin=2)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise DimensionError(f"rotation must be square, got shape {R.shape}")
    orth = float(np.abs(R.T @ R - np.eye(R.shape[0])).max())
    det = float(np.linalg.det(R))
    if orth > tol or abs(det - 1.0) > tol:
        raise GeometryError(
            f"not a rotation (orthogonality residual {orth:.3e}, det {det:.12f})"
        )
    return R


def so_action_reduced(R, w):
    """
    Rotate a wave packet state: (q, p, A, B) -> (Rq, Rp, RAR^T, RBR^T).

    Works on any state record carrying q, p and a SiegelPoint C; the remaining
    fields are carried over unchanged.
    """
    R = check_rotation(R)
    if R.shape[0] != w.q.shape[0]:
        raise DimensionError(f"rotation has dimension {R.shape[0]}, state has {w.q.shape[0]}")
    C = SiegelPoint(symmetrize(R @ w.C.A @ R.T), symmetrize(R @ w.C.B @ R.T))
    return dataclasses.replace(w, q=R @ w.q, p=R @ w.p, C=C)


def so_action_sp(R, Y):
    """Conjugate by the block-diagonal rotation diag(R, R)."""
    R = check_rotation(R)
    if R.shape[0] != Y.d:
        raise DimensionError(f"rotation has dimension {R.shape[0]}, Y has {Y.d}")
    zero = np.zeros_like(R)
    R2 = np.block([[R, zero], [zero, R]])
    return SymplecticMatrix2d(R2 @ Y.Y @ R2.T, validate=False)


def constraint_residuals(Q, P):
    """
    Residuals of the two (Q, P) constraints.

    Returns:
        tuple: (max|Q^T P - P^T Q|, max|Q^* P - P^* Q - 2iI|)
    """
    Q = np.asarray(Q, dtype=complex)
    P = np.asarray(P, dtype=complex)
    if Q.shape != P.shape:
        raise DimensionError(f"Q has shape {Q.shape} but P has shape {P.shape}")
    d = Q.shape[0]
    r1 = float(np.abs(Q.T @ P - P.T @ Q).max())
    r2 = float(np.abs(Q.conj().T @ P - P.conj().T @ Q - 2j * np.eye(d)).max())
    return r1, r2


# Random samplers for property checks

def random_symplectic(rng, d, scale=SP_GENERATOR_SCALE):
    """exp(scale * J S) with S symmetric, entries of S uniform in [-1, 1]."""
    S = rng.uniform(-1.0, 1.0, size=(2 * d, 2 * d))
    S = symmetrize(S)
    return SymplecticMatrix2d(expm(scale * standard_symplectic_form(d) @ S))


def random_spd(rng, d, floor=0.5):
    M = rng.normal(size=(d, d))
    return symmetrize(M @ M.T / d + floor * np.eye(d))


def random_symmetric(rng, d):
    return symmetrize(rng.normal(size=(d, d)))


def random_siegel_point(rng, d):
    return SiegelPoint(random_symmetric(rng, d), random_spd(rng, d))


def random_rotation(rng, d):
    if d == 1:
        return np.eye(1)
    return special_ortho_group.rvs(d, random_state=rng)


def random_unitary(rng, d):
    if d == 1:
        return np.exp(1j * rng.uniform(0.0, 2.0 * np.pi)) * np.eye(1)
    return unitary_group.rvs(d, random_state=rng)
