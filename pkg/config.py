import math
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Worker threads for rendering; the CLI flag --threads wins over this
THREADS = int(os.getenv("FIXDYN_THREADS", "1"))

# Fixed points and classification
FIXED_POINT_TOL = 1e-10
UNIT_CIRCLE_BAND = 1e-8
SUPERATTRACTING_TOL = 1e-12
ROOT_OF_UNITY_TOL = 1e-9
ROOT_OF_UNITY_MAX_Q = 64
AMBIGUOUS_TOL = 1e-7
COMMON_ROOT_TOL = 1e-9
MULTIPLICITY_ORDER = 12
GERM_ZERO_TOL = 1e-8
GERM_ORDER_CAP = 256

# Root finding
ABERTH_MAX_ITER = 500
ABERTH_TOL = 1e-14
NEWTON_POLISH_STEPS = 8
COMPANION_MAX_DEGREE = 64
ROOT_MERGE_TOL = 1e-6
PERIODIC_Q_MAX = 8
PERIODIC_DEGREE_CAP = 2 ** 8 + 1
PERIOD_FILTER_TOL = 1e-7

# Koenigs and Boettcher charts
KOENIGS_MAX_ITER = 100000
KOENIGS_STEP_TOL = 1e-12
KOENIGS_SERIES_ORDER = 40
SWITCH_FACTOR = 0.1
NEWTON_MAX_ITER = 60
BOETTCHER_TERM_TOL = 1e-17
BOETTCHER_MAX_STEPS = 200

# Parabolic points
PETAL_EPSILON = math.pi / 16
PETAL_MAX_RADIUS = 2.0 ** 40
PETAL_BOUNDARY_SAMPLES = 256
ABEL_RADIUS = 1e3
PARABOLIC_MAX_ITER = 10 ** 6
DIRECTION_TOL = 1e-4
DIRECTION_RADIUS = 0.5
DIRECTION_SETTLE_STEPS = 8
QUADRATURE_NODES = 24
QUADRATURE_TOL = 1e-12
QUADRATURE_MAX_DEPTH = 12
PARABOLIC_MULTIPLIER_TOL = 1e-8
FATOU_SERIES_RADIUS = 100.0
FATOU_SERIES_TERMS = 12
PETAL_ENTRY_MAX_ITER = 10 ** 5

# Rotation numbers
DEFAULT_PRECISION = 200
DEFAULT_DEPTH = 30
BEST_APPROXIMATION_MAX_Q = 10 ** 4
SERIES_GROWTH_RUN = 3

# Siegel disks and Cremer points
RADIAL_MAX_K = 14
RADIAL_FLOOR = 1e-3
SMALL_CYCLE_DELTA = 0.05
CREMER_DPS = 120
CAUCHY_RIEMANN_TOL = 1e-4
CAUCHY_RIEMANN_STEP = 1e-3
SMALL_CYCLE_Q_MAX = 8
ETA_MAX_ITER = 10 ** 6
SCAN_STABLE_RATIO = 0.5
RADIUS_MIN_ORDER = 16

# Rendering
ESCAPE_RADIUS = 4.0
RENDER_MAX_ITER = 2000
ATTRACTING_SHORTCUT = 1e-8
MIN_RESOLUTION = 16
