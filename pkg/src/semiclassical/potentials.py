"""
Potential models with derivatives up to third order and Gaussian averages.

Averages are taken against the Gaussian exp(-(x-q)^T B (x-q) / hbar), i.e.
mean q and covariance Sigma = (hbar/2) B^{-1}.
"""

import itertools
import logging

import numpy as np

from .constants import (
    HIGH_DIM_THRESHOLD,
    MAX_QUADRATURE_ORDER_HIGH_DIM,
    THIRD_DERIVATIVE_STEP,
)
from .errors import ConfigError, DimensionError, PotentialError
from .geometry import symmetric_sqrt, symmetrize

logger = logging.getLogger(__name__)


class PotentialModel:
    """
    Interface for potentials V(x) on R^d.

    Subclasses supply value, gradient and hessian. third() falls back to
    central differences of the hessian. Models with closed-form Gaussian
    averages set analytic_averages and override averages().
    """

    analytic_averages = False
    axisymmetric = False

    def __init__(self, dimension):
        self.dimension = int(dimension)

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def hessian(self, x):
        raise NotImplementedError

    def third(self, x):
        """
        Third derivative tensor by central differences of the hessian.

        Args:
            x (ndarray): Evaluation point

        Returns:
            ndarray: Symmetric d x d x d tensor
        """
        x = np.asarray(x, dtype=float)
        d = x.shape[0]
        T = np.empty((d, d, d))
        for k in range(d):
            h = THIRD_DERIVATIVE_STEP * (1.0 + abs(x[k]))
            e = np.zeros(d)
            e[k] = h
            T[:, :, k] = (self.hessian(x + e) - self.hessian(x - e)) / (2.0 * h)
        return _symmetrize_tensor(T)

    def averages(self, q, cov):
        raise PotentialError(f"{type(self).__name__} has no closed-form Gaussian averages")

    def to_spec(self):
        raise NotImplementedError


def _symmetrize_tensor(T):
    perms = [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)]
    return sum(np.transpose(T, p) for p in perms) / 6.0


class Harmonic(PotentialModel):
    """V = x^T K x / 2 with K symmetric positive-definite."""

    analytic_averages = True

    def __init__(self, dimension, stiffness=1.0):
        super().__init__(dimension)
        K = np.asarray(stiffness, dtype=float)
        if K.ndim == 0:
            K = float(K) * np.eye(self.dimension)
        if K.shape != (self.dimension, self.dimension):
            raise DimensionError(f"stiffness must be {self.dimension}x{self.dimension}")
        if np.abs(K - K.T).max() > 1e-12 * max(1.0, np.abs(K).max()):
            raise PotentialError("stiffness matrix is not symmetric")
        if np.linalg.eigvalsh(K)[0] <= 0.0:
            raise PotentialError("stiffness matrix is not positive-definite")
        self.K = symmetrize(K)
        self.axisymmetric = bool(np.allclose(self.K, self.K[0, 0] * np.eye(self.dimension)))

    def value(self, x):
        return 0.5 * float(x @ self.K @ x)

    def gradient(self, x):
        return self.K @ x

    def hessian(self, x):
        return self.K.copy()

    def third(self, x):
        return np.zeros((self.dimension,) * 3)

    def averages(self, q, cov):
        V = self.value(q) + 0.5 * float(np.sum(self.K * cov))
        return V, self.K @ q, self.K.copy()

    def to_spec(self):
        return {"type": "harmonic", "stiffness": self.K.tolist()}


class AxisymmetricQuartic(PotentialModel):
    """V = a r^2 / 2 + b r^4 / 4 in any dimension."""

    analytic_averages = True
    axisymmetric = True

    def __init__(self, dimension, quadratic=1.0, quartic=1.0):
        super().__init__(dimension)
        self.a = float(quadratic)
        self.b = float(quartic)

    def value(self, x):
        r2 = float(x @ x)
        return 0.5 * self.a * r2 + 0.25 * self.b * r2 * r2

    def gradient(self, x):
        return (self.a + self.b * float(x @ x)) * x

    def hessian(self, x):
        d = x.shape[0]
        return (self.a + self.b * float(x @ x)) * np.eye(d) + 2.0 * self.b * np.outer(x, x)

    def third(self, x):
        d = x.shape[0]
        eye = np.eye(d)
        return 2.0 * self.b * (
            np.einsum("k,ij->ijk", x, eye)
            + np.einsum("i,jk->ijk", x, eye)
            + np.einsum("j,ik->ijk", x, eye)
        )

    def averages(self, q, cov):
        d = q.shape[0]
        q2 = float(q @ q)
        tr = float(np.trace(cov))
        qSq = float(q @ cov @ q)
        r2 = q2 + tr
        r4 = r2 * r2 + 2.0 * float(np.sum(cov * cov)) + 4.0 * qSq
        V = 0.5 * self.a * r2 + 0.25 * self.b * r4
        grad = self.a * q + self.b * (q * r2 + 2.0 * cov @ q)
        hess = (self.a + self.b * r2) * np.eye(d) + 2.0 * self.b * (np.outer(q, q) + cov)
        return V, grad, symmetrize(hess)

    def to_spec(self):
        return {"type": "quartic_radial", "quadratic": self.a, "quartic": self.b}


def _isserlis(indices, cov):
    """E[y_i1 ... y_in] for zero-mean Gaussian y with covariance cov."""
    if not indices:
        return 1.0
    if len(indices) % 2:
        return 0.0
    first, rest = indices[0], indices[1:]
    total = 0.0
    for pos, other in enumerate(rest):
        total += cov[first, other] * _isserlis(rest[:pos] + rest[pos + 1 :], cov)
    return total


def monomial_moment(powers, q, cov):
    """
    E[prod_i x_i^{powers_i}] for x ~ N(q, cov).

    The product of (q_i + y_i) factors is expanded over the subsets of
    factors carrying the fluctuation y.
    """
    indices = tuple(i for i, n in enumerate(powers) for _ in range(n))
    total = 0.0
    for size in range(0, len(indices) + 1, 2):
        for chosen in itertools.combinations(range(len(indices)), size):
            mean_part = 1.0
            for pos, i in enumerate(indices):
                if pos not in chosen:
                    mean_part *= q[i]
            total += mean_part * _isserlis(tuple(indices[c] for c in chosen), cov)
    return total


class PolynomialPotential(PotentialModel):
    """
    Sum of monomials c * prod_i x_i^{n_i} of total degree at most four.

    Args:
        dimension (int): Dimension d
        terms (list): (coefficient, powers) pairs, powers a length-d sequence
    """

    analytic_averages = True
    MAX_DEGREE = 4

    def __init__(self, dimension, terms):
        super().__init__(dimension)
        self.terms = []
        for coefficient, powers in terms:
            powers = tuple(int(n) for n in powers)
            if len(powers) != self.dimension:
                raise DimensionError(f"monomial powers {powers} do not match dimension {dimension}")
            if any(n < 0 for n in powers):
                raise PotentialError(f"negative power in {powers}")
            if sum(powers) > self.MAX_DEGREE:
                raise PotentialError(f"monomial degree {sum(powers)} exceeds {self.MAX_DEGREE}")
            self.terms.append((float(coefficient), powers))

    @staticmethod
    def _derivative(coefficient, powers, axes):
        powers = list(powers)
        for k in axes:
            if powers[k] == 0:
                return 0.0, None
            coefficient *= powers[k]
            powers[k] -= 1
        return coefficient, tuple(powers)

    def _evaluate(self, x, axes):
        total = 0.0
        for coefficient, powers in self.terms:
            c, reduced = self._derivative(coefficient, powers, axes)
            if c:
                total += c * float(np.prod(np.power(x, reduced)))
        return total

    def _moment(self, q, cov, axes):
        total = 0.0
        for coefficient, powers in self.terms:
            c, reduced = self._derivative(coefficient, powers, axes)
            if c:
                total += c * monomial_moment(reduced, q, cov)
        return total

    def value(self, x):
        return self._evaluate(x, ())

    def gradient(self, x):
        return np.array([self._evaluate(x, (k,)) for k in range(self.dimension)])

    def hessian(self, x):
        d = self.dimension
        H = np.empty((d, d))
        for i in range(d):
            for j in range(i, d):
                H[i, j] = H[j, i] = self._evaluate(x, (i, j))
        return H

    def third(self, x):
        d = self.dimension
        T = np.empty((d, d, d))
        for i, j, k in itertools.product(range(d), repeat=3):
            T[i, j, k] = self._evaluate(x, (i, j, k))
        return T

    def averages(self, q, cov):
        d = self.dimension
        V = self._moment(q, cov, ())
        grad = np.array([self._moment(q, cov, (k,)) for k in range(d)])
        hess = np.empty((d, d))
        for i in range(d):
            for j in range(i, d):
                hess[i, j] = hess[j, i] = self._moment(q, cov, (i, j))
        return V, grad, hess

    def to_spec(self):
        return {
            "type": "polynomial",
            "terms": [{"coefficient": c, "powers": list(n)} for c, n in self.terms],
        }


def potential_derivatives(model, x):
    """
    Value and derivatives of a model at x.

    Returns:
        tuple: (V, grad V, hess V, third V)
    """
    x = np.asarray(x, dtype=float)
    return model.value(x), model.gradient(x), model.hessian(x), model.third(x)


def contract_third(B_inv, T):
    """sum_ij (B^{-1})_ij T_ijk, the q-gradient of tr(B^{-1} hess V(q))."""
    return np.einsum("ij,ijk->k", B_inv, T)


def gauss_hermite_expectation(f, q, B, hbar, order):
    """
    Tensor-product Gauss-Hermite expectation of f under the Gaussian (q, B, hbar).

    Points are x = q + sqrt(hbar) B^{-1/2} u with u on the Hermite grid.

    Args:
        f (callable): Function of a d-vector; may return an array
        q (ndarray): Center
        B (ndarray): Symmetric positive-definite width matrix
        hbar (float): Semiclassical parameter
        order (int): Nodes per axis

    Returns:
        float or ndarray: The expectation
    """
    q = np.asarray(q, dtype=float)
    d = q.shape[0]
    order = int(order)
    if order < 1:
        raise PotentialError(f"quadrature order must be at least 1, got {order}")
    if d > HIGH_DIM_THRESHOLD and order > MAX_QUADRATURE_ORDER_HIGH_DIM:
        raise PotentialError(
            f"quadrature with {order}^{d} nodes refused; lower the order for d > {HIGH_DIM_THRESHOLD}"
        )
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    _, inv_sqrt_b = symmetric_sqrt(np.asarray(B, dtype=float))
    scale = np.sqrt(hbar) * inv_sqrt_b
    total = 0.0
    for index in itertools.product(range(order), repeat=d):
        u = nodes[list(index)]
        w = float(np.prod(weights[list(index)]))
        total = total + w * np.asarray(f(q + scale @ u))
    return total / np.pi ** (d / 2.0)


def gaussian_average(model, q, B, hbar, order=None):
    """
    Gaussian averages (<V>, <grad V>, <hess V>) over covariance (hbar/2) B^{-1}.

    Closed-form moments are used when the model has them, quadrature of the
    given order otherwise.
    """
    q = np.asarray(q, dtype=float)
    B = np.asarray(B, dtype=float)
    if model.analytic_averages:
        cov = 0.5 * hbar * symmetrize(np.linalg.inv(B))
        V, grad, hess = model.averages(q, cov)
        return float(V), np.asarray(grad, dtype=float), symmetrize(np.asarray(hess, dtype=float))
    if order is None:
        raise PotentialError(
            f"{type(model).__name__} needs quadrature_order for Gaussian averages"
        )
    V = gauss_hermite_expectation(model.value, q, B, hbar, order)
    grad = gauss_hermite_expectation(model.gradient, q, B, hbar, order)
    hess = gauss_hermite_expectation(model.hessian, q, B, hbar, order)
    return float(V), grad, symmetrize(hess)


_SPEC_KEYS = {
    "harmonic": {"stiffness"},
    "quartic_radial": {"quadratic", "quartic"},
    "polynomial": {"terms"},
}


def build_potential(spec, dimension):
    """
    Build a potential from its configuration mapping.

    Args:
        spec (dict): {"type": ..., parameters}
        dimension (int): Dimension d

    Returns:
        PotentialModel: The configured model
    """
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError("potential must be an object with a 'type' key")
    kind = spec["type"]
    if kind not in _SPEC_KEYS:
        raise ConfigError(f"unknown potential type '{kind}'")
    unknown = set(spec) - _SPEC_KEYS[kind] - {"type"}
    if unknown:
        raise ConfigError(f"unknown keys in {kind} potential: {sorted(unknown)}")
    try:
        if kind == "harmonic":
            return Harmonic(dimension, spec.get("stiffness", 1.0))
        if kind == "quartic_radial":
            return AxisymmetricQuartic(
                dimension, spec.get("quadratic", 1.0), spec.get("quartic", 1.0)
            )
        terms = []
        for term in spec.get("terms", []):
            extra = set(term) - {"coefficient", "powers"}
            if extra:
                raise ConfigError(f"unknown keys in polynomial term: {sorted(extra)}")
            terms.append((term["coefficient"], term["powers"]))
        return PolynomialPotential(dimension, terms)
    except (KeyError, TypeError, ValueError, PotentialError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Error building {kind} potential: {e}")
