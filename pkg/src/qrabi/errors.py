"""Exception types shared across the toolkit."""


class QrabiError(Exception):
    """Base class for toolkit errors."""


class ValidationError(QrabiError, ValueError):
    """Bad user input (wrong domain, inconsistent labels, malformed config)."""


class SpecfunOverflowError(QrabiError, OverflowError):
    """A special-function value is not representable as a plain float.

    The attached report carries the split (value, log_scale) representation.
    """

    def __init__(self, report):
        self.report = report
        super().__init__(
            "value overflows a float; use the *_report API "
            f"(value={report.value!r}, log_scale={report.log_scale!r})"
        )


class TruncationLeakageError(QrabiError, RuntimeError):
    """Too much amplitude reached the truncation edge of the Fock space."""

    def __init__(self, leakage, tol, context=""):
        self.leakage = leakage
        self.tol = tol
        msg = f"truncation leakage {leakage:.3e} exceeds tolerance {tol:.3e}"
        if context:
            msg += f" ({context})"
        super().__init__(msg)


class NormDriftError(QrabiError, RuntimeError):
    """Propagation lost or gained norm beyond the hard failure threshold."""

    def __init__(self, drift, tol, culprit="step size or truncation too coarse"):
        self.drift = drift
        self.tol = tol
        super().__init__(
            f"norm drift {drift:.3e} exceeds {tol:.3e}; {culprit}"
        )


class FrequencyExtractionError(QrabiError, RuntimeError):
    """No dominant spectral peak could be identified in a time series."""
