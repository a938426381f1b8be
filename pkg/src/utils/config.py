"""
Runtime configuration for the simulator
"""

import logging
import os

from dotenv import load_dotenv

load_dotenv()

VERSION = "0.1.0"

logging.basicConfig(
    level=os.getenv("RINGLASE_LOG_LEVEL", "INFO").upper(),
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)


class Config:
    """Process-level settings read from the environment"""

    def __init__(self):
        self.version = VERSION
        self.output_dir = os.getenv("RINGLASE_OUTPUT_DIR", "output")
        self.log_level = os.getenv("RINGLASE_LOG_LEVEL", "INFO").upper()
        self.threads = self._read_threads()

    @staticmethod
    def _read_threads() -> int:
        raw = os.getenv("RINGLASE_THREADS")
        if not raw:
            return os.cpu_count() or 1
        try:
            return max(1, int(raw))
        except ValueError:
            logging.getLogger(__name__).warning(
                f"Ignoring non-integer RINGLASE_THREADS={raw!r}")
            return os.cpu_count() or 1


config = Config()
