from pydantic_settings import BaseSettings
from typing import Literal


class Settings(BaseSettings):
    """
    Centralized numeric and budget settings.
    These values are automatically loaded from environment variables or .env file.
    """
    # "double" evaluates in machine floats first; "high" goes straight to interval arithmetic
    PRECISION: Literal["double", "high"] = "double"
    HIGH_PRECISION_BITS: int = 200

    # Budgets (exceeding any of them exits with code 3)
    ATOM_CAP: int = 3 ** 15
    SCAN_CAP: int = 10 ** 7
    DENSITY_SCAN_CAP: int = 10 ** 6
    DESCENT_SCAN_LIMIT: int = 2 ** 12
    PERIOD_CAP: int = 10 ** 5  # longest repeating digit block expanded exactly

    # Default tolerances for certified values
    MU_CDF_TOL: float = 1e-12
    LAMBDA_TOL: float = 1e-12

    # Output formatting
    FLOAT_DIGITS: int = 17

    # Scans are partitioned into contiguous index chunks of this size
    CHUNK_SIZE: int = 2 ** 16

    LOG_LEVEL: str = "WARNING"

    class Config:
        env_file = ".env"
        case_sensitive = True


# Create a single instance to be imported throughout the package
settings = Settings()
