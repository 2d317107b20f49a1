"""
Constants for the semiclassical wave packet library.
"""

VERSION = "1.0.0"

# Validation tolerances
SYMMETRY_TOL = 1e-12  # max |M_ij - M_ji|, scaled by max(1, |M|_max)
SYMPLECTIC_TOL = 1e-10  # |Y^T J Y - J|_max
HAGEDORN_TOL = 1e-8  # both constraint residuals of an integrated (Q, P) pair
ROTATION_TOL = 1e-10  # |R^T R - I|_max and |det R - 1|
DEGENERACY_RATIO = 1e-12  # smallest / largest eigenvalue of B
BRANCH_STEP_LIMIT = 0.9 * 3.141592653589793  # max |increment of arg det Q| per step

# Finite differences
THIRD_DERIVATIVE_STEP = 1e-5  # h = step * (1 + |x|)
BRACKET_STEP = 1e-6  # h = step * (1 + |coordinate|)

# Random test data
SP_GENERATOR_SCALE = 0.5

# Quadrature
MAX_QUADRATURE_ORDER_HIGH_DIM = 30  # cost guard for d > 4
HIGH_DIM_THRESHOLD = 4

# Simulation defaults
DEFAULT_RECORD_STRIDE = 10
DEFAULT_INTEGRATOR = "variational_splitting"
STEP_MULTIPLE_TOL = 1e-9  # t_end / dt must be an integer to this relative tolerance

# Output
CSV_FLOAT_FORMAT = "%.17g"
THREADS_ENV_VAR = "GWP_THREADS"
SVG_WIDTH = 640
SVG_HEIGHT = 480
SVG_MARGIN = 60
SVG_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

# Acceptance thresholds for the check suites
NOETHER_REDUCED_REL_DRIFT = 1e-8
CLASSICAL_PEAK_TO_PEAK_MIN = 1e-4
NOETHER_HAGEDORN_ABS_DRIFT = 1e-8
NEGATIVE_CONTROL_MIN_DRIFT = 1e-3
CONSTRAINT_MAX_RESIDUAL = 1e-10
LIFT_ANALYTIC_MAX = 1e-10
LIFT_NUMERICAL_MAX = 1e-4
LIFT_ORDER_MAGNITUDE = 1e-2  # leapfrog vs RK4 reference at dt = 0.01
ENERGY_REL_DRIFT = 1e-4
ORDER_TWO_RATIO = (3.0, 5.5)
BRACKET_FD_TOL = 1e-6
EXPECTATION_TOL = 1e-10
EQUIVARIANCE_TOL = 1e-10
FIRST_VARIATION_DRIFT = 1e-9
FIRST_VARIATION_MATCH = 1e-8
S1_REL_DRIFT = 1e-8

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_INVARIANT = 3
