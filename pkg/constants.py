"""
Numerical defaults and study settings for RobustLM
"""

# Package identity
TITLE = "RobustLM"
VERSION = "0.1.0"

# Qn scale estimator
QN_CONSTANT = 2.2191  # consistency at the normal distribution

# Log-periodogram regression
DEFAULT_ALPHA = 0.7  # bandwidth m' = floor(n^alpha)
DEFAULT_BETA = 0.7  # truncation point M = floor(n^beta)
MIN_REGRESSION_FREQUENCIES = 3

# ARFIMA model plumbing
MA_TRUNCATION = 512  # MA(inf) coefficients kept for the ARMA part
MA_TAIL_TOLERANCE = 1e-10
BURN_IN_MIN = 500
BURN_IN_PER_ORDER = 20
ROOT_MARGIN = 1e-8  # roots closer than this to the unit circle are rejected

# Hurvich-Beltrao quadrature
QUADRATURE_TOLERANCE = 1e-6
QUADRATURE_LIMIT = 500

# Lag windows configuration
WINDOW_TYPES = {
    'truncated': {
        'label': 'Truncated',
        'tag': '',
    },
    'bartlett': {
        'label': 'Bartlett',
        'tag': 'B',
    },
    'parzen': {
        'label': 'Parzen',
        'tag': 'P',
    },
    'tukey-hamming': {
        'label': 'Tukey-Hamming',
        'tag': 'TH',
    },
}

# Estimation methods
METHODS = ('gph', 'gphr')

# Additive outliers used throughout the simulation study: (magnitude, probability)
STUDY_OUTLIERS = [(10.0, 0.05)]

# Monte Carlo settings
DEFAULT_REPLICATES = 1000
MIN_TABLE_SCALE = 100
MAX_FAILURE_RATE = 0.01
DEFAULT_MASTER_SEED = 20111

# Simulation tables: memory values, sample sizes and estimators per table
TABLE_SETTINGS = {
    1: {
        'title': 'ARFIMA(0,d,0), alpha=beta=0.7, outliers 0 and 10',
        'memory': [0.3, 0.45],
        'sample_sizes': {0.3: [100, 300, 800], 0.45: [100, 300, 800]},
        'estimators': [
            {'label': 'GPH', 'method': 'gph'},
            {'label': 'GPHR', 'method': 'gphr', 'window': 'truncated'},
        ],
        'outliers': STUDY_OUTLIERS,
        'integrate': 0,
        'differencing': False,
    },
    2: {
        'title': 'ARFIMA(0,d,0) with different lag windows',
        'memory': [0.3],
        'sample_sizes': {0.3: [100, 300, 800]},
        'estimators': [
            {'label': 'GPHR_P', 'method': 'gphr', 'window': 'parzen'},
            {'label': 'GPHR_TH', 'method': 'gphr', 'window': 'tukey-hamming'},
            {'label': 'GPHR_B', 'method': 'gphr', 'window': 'bartlett'},
        ],
        'outliers': STUDY_OUTLIERS,
        'integrate': 0,
        'differencing': False,
    },
    3: {
        'title': 'ARFIMA(0,d,0) with differenced data',
        # memory of the differenced series; the simulated data are integrated once
        'memory': [-0.2, 0.0],
        'sample_sizes': {-0.2: [300, 800], 0.0: [100, 300, 800]},
        'estimators': [
            {'label': 'GPH', 'method': 'gph'},
            {'label': 'GPHR', 'method': 'gphr', 'window': 'truncated'},
        ],
        'outliers': STUDY_OUTLIERS,
        'integrate': 1,
        'differencing': True,
    },
}

# Command line
EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_INPUT = 2
THREADS_ENV = 'ROBUSTLM_THREADS'
MIN_ESTIMATE_LENGTH = 30

# Input files
MISSING_TOKENS = ('', 'na', 'n/a', 'nan', '-nan', 'null', 'none', '<na>')

# Files
DATA_DIR = 'data'
REPORT_DIR = 'data/reports'
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
