"""
Exceptions raised by RobustLM
"""


class RobustLMError(Exception):
    """Base class for every RobustLM failure"""


class SpecError(RobustLMError, ValueError):
    """Invalid model, outlier, window, bandwidth or Qn specification"""


class InsufficientDataError(RobustLMError, ValueError):
    """Series too short for the requested computation"""


class LagRangeError(RobustLMError, ValueError):
    """Lag outside the admissible range 0..n-2"""


class PoleError(RobustLMError, ValueError):
    """Spectral density requested at its pole"""


class TruncationError(RobustLMError, ValueError):
    """Truncation point incompatible with the series length"""


class UndefinedCorrelationError(RobustLMError, ArithmeticError):
    """Robust autocorrelation of constant lagged vectors (0/0)"""


class DegeneratePeriodogramError(RobustLMError, ArithmeticError):
    """Periodogram ordinate that cannot enter a log regression"""

    def __init__(self, index, frequency, value):
        self.index = index
        self.frequency = frequency
        self.value = value
        super().__init__(
            f"periodogram is {value!r} at Fourier index j={index} "
            f"(omega={frequency:.6f}); log regression impossible"
        )


class EstimationRefused(RobustLMError):
    """Too few usable frequencies left for the log regression"""

    def __init__(self, message, retained=0, dropped=0, dropped_indices=()):
        self.retained = retained
        self.dropped = dropped
        self.dropped_indices = tuple(dropped_indices)
        super().__init__(message)


class QuadratureError(RobustLMError, ArithmeticError):
    """Numerical integration did not reach the requested tolerance"""

    def __init__(self, message, achieved):
        self.achieved = achieved
        super().__init__(f"{message} (achieved absolute error {achieved:.3e})")


class ConfigError(RobustLMError, ValueError):
    """Malformed Monte Carlo or command line configuration"""


class InputError(RobustLMError, ValueError):
    """Dataset file that cannot be turned into a numeric series"""


class MonteCarloError(RobustLMError):
    """Monte Carlo cell with too many failed replicates"""
