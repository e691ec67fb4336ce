# Package version written into every result file's metadata block
VERSION = "1.0.0"

# Solver defaults (all absolute quantities)
DEFAULT_LAMBDA = 0.01
DEFAULT_ETA = 1e-4
DEFAULT_EPS0 = 1.0
DEFAULT_EPS_MIN = 1e-3
DEFAULT_RHO = 0.5
DEFAULT_MAX_CCCP_ITERS = 100
DEFAULT_MAX_INNER_ITERS = 1000
DEFAULT_PERCEPTRON_PATIENCE = 5
DEFAULT_MAX_PERCEPTRON_PASSES = 100

# Simplex QP
QP_TOL = 1e-10
# Exchanges plus active-set steps
QP_MAX_ITERS = 20_000
# Pairwise exchanges per coordinate before switching to the active-set phase
QP_EXCHANGES_PER_COORD = 20
SIMPLEX_SUM_TOL = 1e-12

# Bound bookkeeping tolerances
ANCHOR_TIGHTNESS_TOL = 1e-9
BOUND_IDENTITY_TOL = 1e-9

# Task loss
DEFAULT_DELTA_SCALE = 1.0

# Oracle caps
CHAIN_ENUMERATION_CAP = 10**6
TRACKING_DETECTION_CAP = 12

# Chain generator defaults
CHAIN_LENGTH = 20
CHAIN_LABELS = 4
CHAIN_OBS_DIM = 6
CHAIN_NOISE = 0.8
CHAIN_SIGNAL = 2.0
CHAIN_STICKINESS = 0.6

# Tracking generator defaults
TRACK_MIN_LEFT = 2
TRACK_MAX_LEFT = 4
TRACK_P_DIVIDE = 0.25
TRACK_P_DISAPPEAR = 0.15
TRACK_P_APPEAR = 0.3
TRACK_MOTION_NOISE = 0.6
TRACK_MIN_SEPARATION = 10.0
TRACK_GATING_RADIUS = 4.0
TRACK_ARENA_SIZE = 40.0
TRACK_SIZE_RANGE = (1.0, 2.0)
TRACK_SIZE_NOISE = 0.05
TRACK_MAX_RETRIES = 1000

# Shared per-kind tracking parameters: (bias, distance, size mismatch)
# for MOVE, DIVIDE, APPEAR, DISAPPEAR in that order
PLANTED_TRACKING_WEIGHTS = (
    2.0, -1.0, -4.0,
    1.0, -1.0, -4.0,
    -1.5, 0.0, 0.0,
    -1.5, 0.0, 0.0,
)

# Experiment defaults
DEFAULT_TRAIN_SIZE = 50
DEFAULT_TEST_SIZE = 50
DEFAULT_REPEATS = 10
DEFAULT_FRACTIONS = (0.1, 0.25, 0.5, 1.0)
DEFAULT_SEED = 0
DEFAULT_FRACTION = 0.3
DEFAULT_DOMAIN_SHIFT = 0.1
