"""
Text templates for run summaries and validation reports
"""

SUMMARY_HEADER = """
RINGLASE RUN SUMMARY
==================================================
Scenario: {name}
Version: {version}
Config SHA-256: {config_hash}
Seed: {seed}
{timestamp_line}""".strip("\n")

STAGE_OK = "[ok]     {stage}: {message}"
STAGE_FAILED = "[failed] {stage}: {message} (exit code {exit_code})"

LASING_SECTION = """
LASING CURVE
--------------------
Fitted threshold: {threshold_ma:.2f} mA
Slope at power monitor: {slope_nw_per_ma:.2f} nW/mA
Maximum ring input power: {max_power_mw:.3f} mW"""

SPECTRA_ROW = "{power_mw:>8.3f} mW  shift {shift_pm:7.1f} pm  ring FWHM {ring_fwhm_pm:6.1f} pm  " \
              "emission FWHM {emission_fwhm_pm:6.1f} pm  modes {active_modes}"

SCHMIDT_ROW = "{label:>12}  K = {K:.3f}  S = {S_bits:.3f} bits{reference}"

COINCIDENCE_ROW = "{power_mw:>8.3f} mW  R = {rate:.3e}/s  CAR = {car:9.1f}  " \
                  "multi-pair only = {car_multipair_only:10.1f}"

VALIDATION_HEADER = """
SCENARIO VALIDATION
==================================================
File: {path}
Status: {status}""".strip("\n")

VALIDATION_ISSUE = "  error   {field}: {message}"
VALIDATION_DEFAULT = "  default {field} = {value}"
