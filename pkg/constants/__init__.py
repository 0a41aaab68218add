from pathlib import Path

# ---------------------------------
# Project Constants.
# ---------------------------------

# Release
__version__ = "1.0.0"

# Report schema version
__report_version__ = "1.0.0"

# The root directory of this project.
ROOT_DIR = Path(__file__).parent.parent

FIXTURES_DIR    = ROOT_DIR / "fixtures"
SCHEMAS_DIR     = ROOT_DIR / "schemas"
REPORT_SCHEMA   = SCHEMAS_DIR / "analysis_report.schema.json"
GENSUR_TABLE    = FIXTURES_DIR / "tables" / "gensur.json"
SUBMODEL_TABLE  = FIXTURES_DIR / "tables" / "submodels.json"

LOGGER_NAME     = "surroots"

# Numerical tolerances (relative)
RESIDUAL_TOL            = 1e-8
REAL_TOL                = 1e-8
CLUSTER_RADIUS          = 1e-8
FIBER_ROOT_TOL          = 1e-12
DEGENERACY_TOL          = 1e-6

# Mantissa bits used when polishing roots against exact coefficients
POLISH_PRECISION_BITS   = 128
POLISH_MAX_STEPS        = 60
ABERTH_MAX_ITER         = 800

# Iterated generalized least squares
IGLS_MAX_ITER           = 1000
IGLS_TOL                = 1e-10

# Generic random data: integers in [-RANDOM_RANGE, RANDOM_RANGE], N = R + C + extra
RANDOM_RANGE            = 300
RANDOM_MAX_RETRIES      = 100
RANDOM_EXTRA_SUBJECTS   = 2

# Determinant expansion is memoized over column subsets; larger R is refused
MAX_DET_SIZE            = 5

# Compute budgets, seconds
DEFAULT_BUDGET_SECS     = 60
EXTENDED_BUDGET_SECS    = 30*60

# Grid output
GRID_NUMBER_FORMAT      = "%.10g"

# Exit codes
EXIT_OK                     = 0
EXIT_VALIDATION             = 2
EXIT_TIMEOUT                = 3
EXIT_POSITIVE_DIMENSIONAL   = 4
EXIT_NONCONVERGENCE         = 5

# Environment overrides (read after dotenv)
ENV_BUDGET_SECS = "SURROOTS_BUDGET_SECS"
ENV_SLOW_TESTS  = "SURROOTS_SLOW_TESTS"
