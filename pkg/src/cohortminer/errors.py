"""Exception hierarchy shared across the toolkit.

Every error carries a short machine-parseable ``category`` used by the CLI
for exit codes and one-line diagnostics.
"""


class CohortError(Exception):
    category = "error"
    exit_code = 1

    def oneline(self) -> str:
        return f"{self.category}: {self}"


class InputError(CohortError):
    """Malformed or missing input (bad CSV, unknown patient, bad flag)."""

    category = "input-error"
    exit_code = 2


class LogFormatError(InputError):
    """CSV row rejected; remembers the 1-based line number."""

    category = "log-format"

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnknownPatientError(InputError):
    category = "unknown-patient"


class EmptyPatternError(CohortError):
    """No frequent pattern at the requested threshold; relax it."""

    category = "empty-pattern"
    exit_code = 3


class DegenerateCalibrationError(CohortError):
    """Calibration cannot pick a cut-off (empty frontier, all-empty groups)."""

    category = "calibration-degenerate"
    exit_code = 4


class ConflictError(CohortError):
    """Session operation not valid in the current phase, or a concurrent
    step is already in flight."""

    category = "conflict"
