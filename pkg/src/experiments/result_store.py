"""
ResultStore: collects stage results of one run and persists a manifest
"""

import logging
import os
from typing import Any, Dict, List, Optional

from src.utils.helpers import save_json

logger = logging.getLogger(__name__)

MANIFEST_FILE = "run_manifest.json"


class ResultStore:
    """Keeps every stage result in run order"""

    def __init__(self):
        self.name = "ResultStore"
        self.results: List[Dict[str, Any]] = []

    def record(self, result: Dict[str, Any]) -> Dict[str, Any]:
        self.results.append(result)
        return result

    def get_result(self, stage: str) -> Optional[Dict[str, Any]]:
        for result in self.results:
            if result.get("stage") == stage:
                return result
        return None

    def first_failure(self) -> Optional[Dict[str, Any]]:
        for result in self.results:
            if not result.get("success"):
                return result
        return None

    def exit_code(self) -> int:
        failed = self.first_failure()
        return failed.get("exit_code", 1) if failed else 0

    def outputs(self) -> List[str]:
        return [path for result in self.results for path in result.get("outputs", [])]

    def save_manifest(self, output_dir: str, provenance: Dict[str, Any]) -> Dict[str, Any]:
        """Write stage outcomes and output file names next to the outputs"""
        manifest = {
            "provenance": provenance,
            "stages": [{"stage": r.get("stage"), "success": r.get("success"),
                        "message": r.get("message"),
                        "outputs": [os.path.basename(p) for p in r.get("outputs", [])]}
                       for r in self.results],
        }
        path = os.path.join(output_dir, MANIFEST_FILE)
        if save_json(manifest, path):
            return {"success": True, "message": f"Manifest written to {path}", "path": path}
        return {"success": False, "message": f"Failed to write manifest {path}"}
