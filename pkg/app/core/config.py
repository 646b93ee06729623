from typing import List
import os
import logging
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)


def _float_list(raw: str) -> List[float]:
    return [float(item) for item in raw.split(",") if item.strip()]


class Settings:
    def __init__(self):
        self.PROJECT_NAME: str = "Summability Lab"

        # Environment
        self.ENVIRONMENT: str = os.getenv("ENVIRONMENT", "development")
        self.DEBUG: bool = os.getenv("DEBUG", "false").lower() == "true"

        # Truncation protocol
        self.ZERO_TOL: float = float(os.getenv("ZERO_TOL", "0.01"))
        self.VIOLATION_FACTOR: float = float(os.getenv("VIOLATION_FACTOR", "10"))
        self.TAIL_START_FRACTION: float = float(os.getenv("TAIL_START_FRACTION", "0.25"))
        self.CHECKPOINT_RATIO: float = float(os.getenv("CHECKPOINT_RATIO", "1.25"))
        self.PINNED_RATIO: float = float(os.getenv("PINNED_RATIO", "0.9"))

        # Matrix checks
        self.DIVERGENCE_THRESHOLD: float = float(os.getenv("DIVERGENCE_THRESHOLD", "1e6"))
        self.STABILITY_TOLERANCE: float = float(os.getenv("STABILITY_TOLERANCE", "0.1"))
        self.HISTOGRAM_BINS: int = int(os.getenv("HISTOGRAM_BINS", "64"))
        self.S3_COLUMNS: List[int] = [int(v) for v in _float_list(os.getenv("S3_COLUMNS", "1,2,3,4,5"))]
        self.ROW_CHUNK: int = int(os.getenv("ROW_CHUNK", "65536"))
        self.DENSE_ROW_LIMIT: int = int(os.getenv("DENSE_ROW_LIMIT", "20000000"))

        # Epsilon grids
        self.DEFAULT_EPS_GRID: List[float] = _float_list(os.getenv("DEFAULT_EPS_GRID", "0.5,0.1,0.02"))
        self.PERMUTATION_EPS_GRID: List[float] = _float_list(
            os.getenv("PERMUTATION_EPS_GRID", "0.5,0.2,0.1,0.05")
        )

        # Constructions
        self.DEFAULT_MAX_BLOCK: int = int(os.getenv("DEFAULT_MAX_BLOCK", "10"))
        self.WITNESS_STEPS: int = int(os.getenv("WITNESS_STEPS", "20"))
        self.WITNESS_MAX_N: int = int(os.getenv("WITNESS_MAX_N", "2000"))

        # Runner settings
        self.DEFAULT_MAX_N: int = int(os.getenv("DEFAULT_MAX_N", "100000"))
        self.THREADS: int = int(os.getenv("THREADS", str(os.cpu_count() or 1)))
        self.OUTPUT_DIR: str = os.getenv("SUMMALAB_OUTPUT_DIR", "reports")

        # Logging
        self.LOG_LEVEL: str = os.getenv("LOG_LEVEL", "INFO")
        self.LOG_FILE: str = os.getenv("LOG_FILE", "")


settings = Settings()
