"""
Configuration management for FairPath.
Loads settings from environment variables and provides defaults.
"""
import math
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

class Config:
    """Centralized configuration for discovery and removal runs."""

    # Discrimination threshold (5% difference)
    TAU = float(os.getenv('FAIRPATH_TAU', '0.05'))

    # Quadratic program
    SOLVER_ITERS = int(os.getenv('FAIRPATH_SOLVER_ITERS', '10000'))
    PRIMAL_TOL = float(os.getenv('FAIRPATH_PRIMAL_TOL', '1e-8'))
    KKT_TOL = float(os.getenv('FAIRPATH_KKT_TOL', '1e-7'))
    QP_RIDGE = float(os.getenv('FAIRPATH_QP_RIDGE', '1e-12'))
    # Effect rows are bounded by tau minus this margin
    REPAIR_MARGIN = float(os.getenv('FAIRPATH_REPAIR_MARGIN', '1e-9'))

    # Inference
    FAIL_THRESHOLD = float(os.getenv('FAIRPATH_FAIL_THRESHOLD', '1e-12'))
    CPT_TOLERANCE = float(os.getenv('FAIRPATH_CPT_TOLERANCE', '1e-9'))
    MAX_JOINT_STATES = int(os.getenv('FAIRPATH_MAX_JOINT_STATES', str(2 ** 22)))

    # Data
    SMOOTHING_ALPHA = float(os.getenv('FAIRPATH_ALPHA', '1.0'))
    SEED = int(os.getenv('FAIRPATH_SEED', '0'))

    # Logging
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO')
    LOG_FILE = os.getenv('LOG_FILE') or None

    @classmethod
    def validate(cls) -> bool:
        """Validate that the configured values are usable."""
        if not (math.isfinite(cls.TAU) and cls.TAU >= 0):
            raise ValueError(f"FAIRPATH_TAU must be a finite non-negative number, got {cls.TAU}")
        if cls.SOLVER_ITERS <= 0:
            raise ValueError(f"FAIRPATH_SOLVER_ITERS must be positive, got {cls.SOLVER_ITERS}")
        if not cls.SMOOTHING_ALPHA >= 0:
            raise ValueError(f"FAIRPATH_ALPHA must be non-negative, got {cls.SMOOTHING_ALPHA}")
        return True

    @classmethod
    def solver_iterations(cls) -> int:
        """Iteration budget, re-reading FAIRPATH_SOLVER_ITERS at call time."""
        value = os.getenv('FAIRPATH_SOLVER_ITERS')
        if value is None:
            return cls.SOLVER_ITERS
        iterations = int(value)
        if iterations <= 0:
            raise ValueError(f"FAIRPATH_SOLVER_ITERS must be positive, got {iterations}")
        return iterations
