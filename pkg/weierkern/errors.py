"""
Exception hierarchy shared by the library and the command line.

Library code raises these; only the CLI turns them into exit codes and the
``{"error": {"kind": ..., "detail": ...}}`` payload.
"""

from typing import Any, Dict, Optional


class WeierkernError(Exception):
    kind = "error"
    exit_code = 1

    def __init__(self, detail: str, **context: Any):
        super().__init__(detail)
        self.detail = detail
        self.context = context

    def to_payload(self) -> Dict[str, Any]:
        return {"error": {"kind": self.kind, "detail": self.detail}}


# ---- usage (exit 2) ----

class UsageError(WeierkernError):
    kind = "usage"
    exit_code = 2


class ParseError(UsageError):
    kind = "parse"

    def __init__(self, detail: str, offset: Optional[int] = None, **context: Any):
        if offset is not None:
            detail = f"{detail} at byte {offset}"
        super().__init__(detail, **context)
        self.offset = offset


class CurveFileError(UsageError):
    kind = "curve-file"


class DimensionError(UsageError):
    kind = "dimension"


class InvalidDegreesError(UsageError):
    kind = "invalid-degrees"


class ConfigError(UsageError):
    """An environment setting that does not validate."""
    kind = "config"


# ---- math domain (exit 3) ----

class MathDomainError(WeierkernError):
    kind = "math-domain"
    exit_code = 3


class PoleError(MathDomainError):
    kind = "pole"


class BranchPointError(MathDomainError):
    """The base coordinate is not a good local coordinate at this point."""
    kind = "branch-point"


class DegenerateError(MathDomainError):
    kind = "degenerate"


# ---- convergence (exit 4) ----

class ConvergenceError(WeierkernError):
    kind = "convergence"
    exit_code = 4


class NewtonError(ConvergenceError):
    kind = "newton"


class StepUnderflowError(ConvergenceError):
    kind = "step-underflow"


class QuadratureError(ConvergenceError):
    kind = "quadrature"


class NonFiniteError(ConvergenceError):
    kind = "non-finite"
