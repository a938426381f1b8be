"""
Helper functions for the simulator
"""

import hashlib
import json
import logging
from datetime import datetime, timezone
from typing import Any, Dict

logger = logging.getLogger(__name__)


def get_timestamp() -> str:
    """Get current UTC timestamp"""
    return datetime.now(timezone.utc).replace(microsecond=0).isoformat()


def canonical_json(data: Dict[str, Any]) -> str:
    """Serialize with sorted keys and no whitespace"""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(data: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a scenario"""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()


def save_json(data: Dict[str, Any], filepath: str) -> bool:
    """Save data to JSON file"""
    try:
        with open(filepath, "w", encoding="utf-8") as f:
            json.dump(data, f, indent=2, sort_keys=True)
        return True
    except OSError as e:
        logger.error(f"Error saving to {filepath}: {e}")
        return False
