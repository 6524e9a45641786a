"""
Exception hierarchy for Mather Hull

Every error carries the exit code the command line reports for it, the same
way an HTTP error carries its status code.
"""


class HullError(Exception):
    """Base error: exit_code plus a human-readable detail"""
    exit_code = 1

    def __init__(self, detail: str, exit_code: int = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


# ============================================
# Input / configuration errors (exit 1)
# ============================================

class ConfigError(HullError):
    exit_code = 1

class DegenerateShift(HullError):
    exit_code = 1

class GridMismatch(HullError):
    exit_code = 1

class WindowTooSmall(HullError):
    exit_code = 1

class NotMonotone(HullError):
    exit_code = 1


# ============================================
# Model validation errors (exit 3)
# ============================================

class ModelValidationError(HullError):
    exit_code = 3

class TwistViolation(ModelValidationError):
    pass

class PeriodicityViolation(ModelValidationError):
    pass

class DerivativeMismatch(ModelValidationError):
    pass


# ============================================
# Solver errors
# ============================================

class StepRejected(HullError):
    """dt underflowed while trying to keep the energy from increasing"""
    exit_code = 2


# ============================================
# Critical point errors (exit 5)
# ============================================

class NotComparable(HullError):
    exit_code = 5

class DegeneratePair(HullError):
    exit_code = 5


# ============================================
# Certificate errors (exit 6)
# ============================================

class NotOmegaBirkhoff(HullError):
    exit_code = 6
