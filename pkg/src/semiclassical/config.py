"""
Experiment configuration: global parameters, tolerances and the JSON loader.
"""

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np

from .constants import (
    DEFAULT_INTEGRATOR,
    DEFAULT_RECORD_STRIDE,
    DEGENERACY_RATIO,
    HAGEDORN_TOL,
    ROTATION_TOL,
    STEP_MULTIPLE_TOL,
    SYMMETRY_TOL,
    SYMPLECTIC_TOL,
)
from .errors import ConfigError, GeometryError
from .geometry import SiegelPoint
from .potentials import build_potential

logger = logging.getLogger(__name__)

INTEGRATORS = (
    "variational_splitting",
    "rk4_asymptotic",
    "rk4_exact",
    "rk4_full",
    "hagedorn_verlet",
    "rk4_hagedorn",
    "stormer_verlet",
)
INITIAL_KEYS = {"q", "p", "A", "B", "phi", "delta", "S"}
SWEEP_KEYS = {"hbar", "dt"}


@dataclass(frozen=True)
class Tolerances:
    symmetry: float = SYMMETRY_TOL
    symplectic: float = SYMPLECTIC_TOL
    hagedorn: float = HAGEDORN_TOL
    rotation: float = ROTATION_TOL
    degeneracy: float = DEGENERACY_RATIO


@dataclass(frozen=True, eq=False)
class SimulationConfig:
    """
    Global parameters of one simulation.

    Attributes:
        hbar (float): Semiclassical parameter; zero gives the classical limit
        mass (float): Particle mass
        dimension (int): Configuration space dimension d
        dt (float): Time step
        t_end (float): Final time, an integer multiple of dt
        potential (dict): Potential specification, see build_potential
        integrator (str): One of INTEGRATORS
        record_stride (int): Steps between recorded samples
        initial (dict): Initial q, p, A, B and optional phi, delta, S
        quadrature_order (int): Gauss-Hermite order for models without closed-form averages
        quantum_correction (bool): Include the hbar-term of the momentum equation
        tolerances (Tolerances): Validation tolerances
        sweep (dict): Optional {"hbar": [...]} or {"dt": [...]}
    """

    hbar: float = 1.0
    mass: float = 1.0
    dimension: int = 1
    dt: float = 0.01
    t_end: float = 0.0
    potential: dict = field(default_factory=lambda: {"type": "harmonic"})
    integrator: str = DEFAULT_INTEGRATOR
    record_stride: int = DEFAULT_RECORD_STRIDE
    initial: dict = None
    quadrature_order: int = None
    quantum_correction: bool = True
    tolerances: Tolerances = field(default_factory=Tolerances)
    sweep: dict = None

    def __post_init__(self):
        if not self.hbar >= 0.0:
            raise ConfigError(f"hbar must be non-negative, got {self.hbar}")
        if not self.mass > 0.0:
            raise ConfigError(f"mass must be positive, got {self.mass}")
        if not _is_count(self.dimension) or self.dimension < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.dimension}")
        if not self.dt > 0.0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= 0.0:
            raise ConfigError(f"t_end must be non-negative, got {self.t_end}")
        if not _is_count(self.record_stride) or self.record_stride < 1:
            raise ConfigError(f"record_stride must be a positive integer, got {self.record_stride}")
        if self.integrator not in INTEGRATORS:
            raise ConfigError(f"unknown integrator '{self.integrator}'")
        if self.quadrature_order is not None and (
            not _is_count(self.quadrature_order) or self.quadrature_order < 1
        ):
            raise ConfigError(f"quadrature_order must be positive, got {self.quadrature_order}")
        ratio = self.t_end / self.dt
        if abs(ratio - round(ratio)) > STEP_MULTIPLE_TOL * max(1.0, ratio):
            raise ConfigError(f"t_end={self.t_end} is not a multiple of dt={self.dt}")

    @property
    def n_steps(self):
        return int(round(self.t_end / self.dt))

    def model(self):
        return build_potential(self.potential, self.dimension)

    def to_dict(self):
        data = asdict(self)
        if data["sweep"] is None:
            del data["sweep"]
        return data

    @classmethod
    def from_dict(cls, data):
        """
        Build a configuration from a parsed JSON document.

        Args:
            data (dict): The document

        Returns:
            SimulationConfig: Validated configuration
        """
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        for key in ("hbar", "mass", "dimension", "dt", "t_end", "potential", "initial"):
            if key not in data:
                raise ConfigError(f"missing configuration key '{key}'")
        kwargs = dict(data)
        kwargs["tolerances"] = _parse_tolerances(data.get("tolerances", {}))
        kwargs["initial"] = _parse_initial(data["initial"], data["dimension"])
        if data.get("sweep") is not None:
            kwargs["sweep"] = _parse_sweep(data["sweep"])
        try:
            cfg = cls(**kwargs)
        except TypeError as e:
            raise ConfigError(f"Error reading configuration: {e}")
        if cfg.hbar == 0.0:
            raise ConfigError("hbar must be positive in a configuration file")
        cfg.model()
        return cfg

    def resolved(self, **changes):
        """A copy with the given fields replaced and no sweep."""
        return replace(self, sweep=None, **changes)


def _is_count(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _parse_tolerances(data):
    if not isinstance(data, dict):
        raise ConfigError("tolerances must be an object")
    known = {f.name for f in fields(Tolerances)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
    return Tolerances(**{k: float(v) for k, v in data.items()})


def _parse_initial(data, d):
    if not isinstance(data, dict):
        raise ConfigError("initial must be an object")
    unknown = set(data) - INITIAL_KEYS
    if unknown:
        raise ConfigError(f"unknown initial keys: {sorted(unknown)}")
    for key in ("q", "p", "A", "B"):
        if key not in data:
            raise ConfigError(f"missing initial key '{key}'")
    shapes = {"q": (d,), "p": (d,), "A": (d, d), "B": (d, d)}
    for key, shape in shapes.items():
        if np.shape(data[key]) != shape:
            raise ConfigError(f"initial {key} must have shape {shape}, got {np.shape(data[key])}")
    try:
        SiegelPoint(data["A"], data["B"])
    except GeometryError as e:
        raise ConfigError(f"initial width: {e}")
    return dict(data)


def _parse_sweep(data):
    if not isinstance(data, dict) or len(data) != 1:
        raise ConfigError("sweep must be an object with exactly one of 'hbar' or 'dt'")
    (key, values), = data.items()
    if key not in SWEEP_KEYS:
        raise ConfigError(f"cannot sweep over '{key}'")
    if not isinstance(values, list) or not values:
        raise ConfigError("sweep values must be a non-empty list")
    return {key: [float(v) for v in values]}


def load_config(path):
    """
    Load and validate a JSON configuration file.

    Args:
        path (str): Path to the JSON document

    Returns:
        SimulationConfig: The configuration
    """
    if not os.path.exists(path):
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"Error parsing {path}: {e}")
    cfg = SimulationConfig.from_dict(data)
    logger.info("Loaded %s (d=%d, hbar=%g, %s)", path, cfg.dimension, cfg.hbar, cfg.integrator)
    return cfg
