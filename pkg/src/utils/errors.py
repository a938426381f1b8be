"""
Exception hierarchy for the simulator
"""

from typing import Any, List, Optional, Tuple


class RinglaseError(Exception):
    """Base class for all simulator errors"""
    exit_code = 1


class DomainError(RinglaseError, ValueError):
    """Invalid numeric input to a pure function"""
    exit_code = 3


class ConfigError(RinglaseError):
    """Scenario parse or validation failure"""
    exit_code = 2

    def __init__(self, message: str, issues: Optional[List[Tuple[str, str]]] = None,
                 line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message)
        self.issues = issues or []
        self.line = line
        self.column = column

    def __str__(self) -> str:
        text = super().__str__()
        if self.line is not None:
            text = f"{text} (line {self.line}, column {self.column})"
        if self.issues:
            details = "; ".join(f"{field}: {msg}" for field, msg in self.issues)
            text = f"{text}: {details}"
        return text


class SolverError(RinglaseError):
    """Numerical solve failed"""
    exit_code = 3

    def __init__(self, message: str, last_iterate: Any = None):
        super().__init__(message)
        self.last_iterate = last_iterate


class AnalysisError(RinglaseError):
    """Post-processing of simulated data failed"""
    exit_code = 4
