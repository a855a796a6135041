import os
from dotenv import load_dotenv

load_dotenv()

# Diagnostics (the only value read from the environment)
LOG_LEVEL = os.getenv('HENSELCELLS_LOG_LEVEL', 'WARNING')

# Arithmetic Configuration
DEFAULT_PRECISION = 20       # Known base-p digits for approximate elements
LAURENT_PRECISION_CAP = 20   # Coefficients kept when inverting exact Laurent polynomials

# Integration Configuration
MAX_LOG_POWER = 6            # Largest d supported in sum k^d x^k closed forms

# Oracle Grid Configuration
ORACLE_VALUATION_WINDOW = (-4, 4)  # Valuations v of grid points p^v * u
ORACLE_DEPTH_SMALL_PRIME = 6       # Residue depth k for p <= 5
ORACLE_DEPTH_LARGE_PRIME = 4       # Residue depth k for p = 7, 11
ORACLE_EXTRA_DIGITS = 2            # Extra digits over 2*v_p(n)+1 in oracle power tests
ORACLE_MAX_VIOLATIONS = 20         # Violations kept in a partition report

# Command-Line Configuration
DEFAULT_OUTPUT_FORMAT = "text"
# The valuation ring R minus its center, the default integration domain
DEFAULT_DOMAIN = {"center": "0", "lo": None, "hi": -1, "lambda": "1", "n": 1}
