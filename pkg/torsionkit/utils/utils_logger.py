"""
Logger Setup Script
File: torsionkit/utils/utils_logger.py

This script provides logging for the torsionkit package.
Every module imports the shared loguru logger from here so that
theorem checks, parsing diagnostics and sampler runs land in one file.

Features:
- Logs information, warnings, and errors to a designated log file.
- Ensures the log directory exists.
- Lets the command line re-route console output to a chosen level.
"""

#####################################
# Imports
#####################################

# Imports from Python Standard Library
import pathlib
import sys

# Imports from external packages
from loguru import logger

# Get this file name without the extension
CURRENT_SCRIPT = pathlib.Path(__file__).stem

# Set directory where logs will be stored
LOG_FOLDER: pathlib.Path = pathlib.Path("logs")

# Set the name of the log file
LOG_FILE: pathlib.Path = LOG_FOLDER.joinpath("torsionkit.log")

# Ensure the log folder exists or create it
try:
    LOG_FOLDER.mkdir(exist_ok=True)
except Exception as e:
    logger.error(f"Error creating log folder: {e}")

# Configure Loguru to write to the log file
try:
    logger.add(LOG_FILE, level="INFO", rotation="5 MB")
except Exception as e:
    logger.error(f"Error configuring logger to write to file: {e}")


# loguru registers its default stderr sink with id 0
_console_handler_id: int = 0


def get_log_file_path() -> pathlib.Path:
    """Return the path to the log file."""
    return LOG_FILE


def set_console_level(level: str) -> None:
    """Replace the default stderr sink with one filtered at ``level``.

    The file sink added at import time is left untouched.
    """
    global _console_handler_id
    try:
        logger.remove(_console_handler_id)
    except ValueError:
        # sink already removed elsewhere
        pass
    _console_handler_id = logger.add(sys.stderr, level=level.upper())


def main() -> None:
    """Show where torsionkit writes its log."""
    logger.info(f"STARTING {CURRENT_SCRIPT}.py")
    logger.info(f"View the log output at {LOG_FILE}")
    logger.info(f"EXITING {CURRENT_SCRIPT}.py.")


# Conditional execution block that calls main() only when this file is executed directly
if __name__ == "__main__":
    main()
