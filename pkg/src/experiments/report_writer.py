"""
ReportWriter: human-readable run summary and validation report
"""

import logging
import os
from typing import Any, Dict, List

from src.config.scenario_config import ValidationReport
from src.experiments.result_store import ResultStore
from src.templates.report_templates import (
    COINCIDENCE_ROW,
    LASING_SECTION,
    SCHMIDT_ROW,
    SPECTRA_ROW,
    STAGE_FAILED,
    STAGE_OK,
    SUMMARY_HEADER,
    VALIDATION_DEFAULT,
    VALIDATION_HEADER,
    VALIDATION_ISSUE,
)
from src.tools.file_handler import FileHandler, Provenance

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.txt"


class ReportWriter:
    """Renders stage results into summary.txt"""

    def __init__(self, handler: FileHandler):
        self.handler = handler
        self.name = "ReportWriter"

    def generate_summary(self, scenario_name: str, store: ResultStore,
                         provenance: Provenance) -> str:
        report: List[str] = []
        report.append(SUMMARY_HEADER.format(
            name=scenario_name, version=provenance.version,
            config_hash=provenance.config_hash,
            seed="none" if provenance.seed is None else provenance.seed,
            timestamp_line=f"Generated: {provenance.timestamp}" if provenance.timestamp else ""))
        report.append("")

        report.append("STAGES")
        report.append("-" * 20)
        for result in store.results:
            if result.get("success"):
                report.append(STAGE_OK.format(**result))
            else:
                report.append(STAGE_FAILED.format(stage=result.get("stage"),
                                                  message=result.get("message"),
                                                  exit_code=result.get("exit_code", 1)))

        lasing = store.get_result("lasing-curve")
        if lasing and lasing.get("success"):
            fit = lasing["fit"]
            report.append(LASING_SECTION.format(threshold_ma=fit["threshold_ma"],
                                                slope_nw_per_ma=fit["slope_w_per_ma"] * 1e9,
                                                max_power_mw=lasing["max_power_in_w"] * 1e3))

        spectra = store.get_result("pump-spectra")
        if spectra and spectra.get("success"):
            report.append("")
            report.append("PUMP SPECTRA")
            report.append("-" * 20)
            for row in spectra["summary"]:
                report.append(SPECTRA_ROW.format(power_mw=row["P_in_W"] * 1e3, **row))

        schmidt = store.get_result("schmidt")
        if schmidt and schmidt.get("success"):
            report.append("")
            report.append("SCHMIDT DECOMPOSITION")
            report.append("-" * 20)
            report.extend(self._schmidt_rows(schmidt["schmidt"]))

        coincidences = store.get_result("coincidences")
        if coincidences and coincidences.get("success"):
            report.append("")
            report.append("COINCIDENCES")
            report.append("-" * 20)
            for row in coincidences["rows"]:
                report.append(COINCIDENCE_ROW.format(power_mw=row["P_in_W"] * 1e3,
                                                     rate=row["pair_rate_per_s"], **row))
            report.append(f"Simulated histogram CAR: {coincidences['histogram_car']:.1f}")

        report.append("")
        report.append("OUTPUT FILES")
        report.append("-" * 20)
        report.extend(f"  {os.path.basename(path)}" for path in store.outputs())
        return "\n".join(report) + "\n"

    @staticmethod
    def _schmidt_rows(rows: List[Dict[str, Any]]) -> List[str]:
        lines = []
        for row in rows:
            label = "input file" if row["P_in_W"] is None else f"{row['P_in_W'] * 1e3:g} mW"
            reference = row.get("K_reference")
            suffix = f"  (reference {reference})" if reference is not None else ""
            lines.append(SCHMIDT_ROW.format(label=label, K=row["K"], S_bits=row["S_bits"],
                                            reference=suffix))
        return lines

    def write_summary(self, scenario_name: str, store: ResultStore,
                      provenance: Provenance) -> str:
        text = self.generate_summary(scenario_name, store, provenance)
        return self.handler.write_text(text, SUMMARY_FILE)


def format_validation_report(path: str, report: ValidationReport) -> str:
    """Issues with field paths, then every field that took its default"""
    lines = [VALIDATION_HEADER.format(path=path, status="valid" if report.valid else "invalid")]
    if report.issues:
        lines.append("Issues:")
        lines.extend(VALIDATION_ISSUE.format(field=field, message=message)
                     for field, message in report.issues)
    if report.defaulted:
        lines.append("Defaulted fields:")
        lines.extend(VALIDATION_DEFAULT.format(field=field, value=value)
                     for field, value in report.defaulted)
    return "\n".join(lines) + "\n"
