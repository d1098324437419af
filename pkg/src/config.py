import os
import sys
from fractions import Fraction

# Numeric policy
EPS_REL = 1e-9
SAFETY = 1e3
EPS_DEG = 1e-12
EPS_ORIENT = 1e-12
EPS_MACHINE = sys.float_info.epsilon
PI_UPPER = Fraction(355, 113)
INT64_SAFE = 2**62

# Runtime
DEFAULT_SEED = 0
THREADS = max(1, int(os.environ.get("MULTLAB_THREADS", "1") or 1))
LOG_LEVEL = os.environ.get("MULTLAB_LOG_LEVEL", "WARNING")

# Constructions
DEFAULT_ARC_DEGREES = 50
DEFAULT_CIRCLE_ARC_DEGREES = 100
DEFAULT_RETRY_BUDGET = 64
RANDOM_DENOMINATOR = 1000
RANDOM_SPAN = 1000

# Number theory
FACTOR_LIMIT = 2**63
BRUTE_FORCE_LIMIT = 10**9
LEMMA_MAX_K = 15
SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
GRID_EXHAUSTIVE_MAX_SIDE = 2000

# Default claim parameters (desk scale)
NGON_RANGE = (3, 400)
RANDOM_SET_COUNT = 200
RANDOM_SET_MAX_N = 200
DENSE_GRID_MAX = 20
DENSE_RANDOM_COUNT = 1000
DENSE_RANDOM_MAX_N = 100
GRID8_RANGE = (4, 30)
THREE_GROUP_CASES = ((7, 21), (10, 27), (13, 40), (37, 100))
CASCADE_CASES = ((1, 1), (1, 2), (1, 3), (2, 2), (2, 4), (2, 6), (3, 3), (3, 6), (3, 9))
CASCADE_DISTANCES = (1.0, 3**0.5, 2**0.5)
HEX_MAX_N = 401
STAIRCASE_MAX_N = 200
LEMMA_RANGE = (1, 6)
RICH_TREND_SIDES = (10, 20, 50, 100, 200, 500, 1000)
GRID_RATIO_CASES = ((12, 3), (24, 3), (12, 4), (24, 4), (48, 4), (15, 5), (30, 5))
