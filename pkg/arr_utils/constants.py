"""Constants and configuration values for arrangement homology computations.

Requires Python 3.10+
"""

# Configuration defaults
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
VALID_LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

# Environment overrides
ENV_SEED = "ARRH_SEED"
ENV_JOBS = "ARRH_JOBS"
ENV_PROGRESS = "ARRH_PROGRESS"
ENV_LOG_LEVEL = "ARRH_LOG_LEVEL"
ENV_LOG_FILE = "ARRH_LOG_FILE"

# Sampling and parallelism
DEFAULT_SEED = 0
DEFAULT_JOBS = 1
DEFAULT_TRIALS = 20

# Report JSON schema
REPORT_SCHEMA_VERSION = "1.0"

# CLI exit codes
EXIT_VERDICT = 0
EXIT_ERROR = 1
EXIT_UNDETERMINED = 2

# Arrangement text format
ARRANGEMENT_SUFFIX = ".arr"
DEFAULT_VARIABLE_NAMES = ("x", "y", "z", "w", "v", "u")

# Verdict statuses
STATUS_FREE = "Free"
STATUS_NOT_FREE = "NotFree"
STATUS_UNDETERMINED = "Undetermined"

# Certificate kinds
CERT_SAITO_BASIS = "SaitoBasis"
CERT_TF2_CLASSIFIER = "TF2Classifier"
CERT_NOT_ESSENTIAL = "NotEssentialReduction"
CERT_NOT_FORMAL = "NotFormal"
CERT_EULER_CHAR = "EulerCharObstruction"
CERT_GENERIC_HYPERPLANE = "GenericHyperplane"
CERT_CIRCUIT_BOUND = "CircuitBound"
CERT_NONZERO_HOMOLOGY = "NonzeroHomology"
CERT_SUBARRANGEMENT = "SubarrangementNotFree"
CERT_CYCLE_CONDITION = "CycleConditionFailed"
CERT_NONE = "None"

NOT_FREE_CERTIFICATES = [
    CERT_TF2_CLASSIFIER,
    CERT_NOT_FORMAL,
    CERT_EULER_CHAR,
    CERT_GENERIC_HYPERPLANE,
    CERT_CIRCUIT_BOUND,
    CERT_NONZERO_HOMOLOGY,
    CERT_SUBARRANGEMENT,
    CERT_CYCLE_CONDITION,
]

# Named families accepted by --family
FAMILY_NAMES = [
    "boolean",
    "braid",
    "x3",
    "pencils",
    "cycle3",
    "xrt",
    "art",
    "generic",
    "wheel",
    "ziegler",
    "chord",
    "graphic",
]
