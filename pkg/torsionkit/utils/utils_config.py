"""
Config Utility
File: torsionkit/utils/utils_config.py

This script provides the configuration functions for torsionkit.

It centralizes the configuration management
by loading environment variables from .env in the root project folder
 and constructing file paths using pathlib.

If you rename any variables in .env, remember to:
- recopy .env to .env.example
- update the corresponding function in this module.
"""

#####################################
# Imports
#####################################

# import from Python Standard Library
import os
import pathlib

# import from external packages
from dotenv import load_dotenv

# import from local modules
from .utils_logger import logger

#####################################
# Load Environment Variables
#####################################

load_dotenv()

#####################################
# Getter Functions for .env Variables
#####################################


def get_base_data_path() -> pathlib.Path:
    """Fetch BASE_DATA_DIR from environment or use default."""
    project_root = pathlib.Path(__file__).parent.parent.parent
    data_dir = project_root / os.getenv("BASE_DATA_DIR", "data")
    logger.info(f"BASE_DATA_DIR: {data_dir}")
    return data_dir


def get_example_path(name: str) -> pathlib.Path:
    """Return the path of a bundled presentation file such as ``hopf``."""
    path = get_base_data_path() / f"{name}.pres"
    logger.info(f"Example presentation: {path}")
    return path


def get_log_level() -> str:
    """Fetch TORSION_LOG_LEVEL from environment or use default."""
    level = os.getenv("TORSION_LOG_LEVEL", "INFO")
    logger.info(f"TORSION_LOG_LEVEL: {level}")
    return level


def get_default_strike_index() -> int:
    """Fetch TORSION_STRIKE_INDEX from environment or use default."""
    strike = int(os.getenv("TORSION_STRIKE_INDEX", 1))
    logger.info(f"TORSION_STRIKE_INDEX: {strike}")
    return strike


def get_selftest_seed() -> int:
    """Fetch TORSION_SELFTEST_SEED from environment or use default."""
    seed = int(os.getenv("TORSION_SELFTEST_SEED", 20240917))
    logger.info(f"TORSION_SELFTEST_SEED: {seed}")
    return seed


def get_selftest_trials() -> int:
    """Fetch TORSION_SELFTEST_TRIALS from environment or use default."""
    trials = int(os.getenv("TORSION_SELFTEST_TRIALS", 10))
    logger.info(f"TORSION_SELFTEST_TRIALS: {trials}")
    return trials


def get_report_indent() -> int:
    """Fetch TORSION_REPORT_INDENT from environment or use default."""
    indent = int(os.getenv("TORSION_REPORT_INDENT", 2))
    logger.info(f"TORSION_REPORT_INDENT: {indent}")
    return indent


#####################################
# Conditional Execution
#####################################

if __name__ == "__main__":
    # Test the configuration functions
    logger.info("Testing configuration.")
    try:
        get_base_data_path()
        get_example_path("hopf")
        get_log_level()
        get_default_strike_index()
        get_selftest_seed()
        get_selftest_trials()
        get_report_indent()
        logger.info("SUCCESS: Configuration function tests complete.")

    except Exception as e:
        logger.error(f"ERROR: Configuration function test failed: {e}")
