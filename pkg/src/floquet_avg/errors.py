"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit-code contract: validation problems
(:class:`ModelError`) exit with 2, numeric range violations
(:class:`NumericRangeError`) with 3.
"""


class FloquetError(Exception):
    """Base class for all errors raised by this package."""


class ModelError(FloquetError, ValueError):
    """Invalid input data: bad dimensions, non-nilpotent generator,
    malformed model files, out-of-range orders."""


class NumericRangeError(FloquetError, ValueError):
    """An argument is outside the numeric range an operation supports
    (overflow guards, evaluation outside the period)."""


class BracketError(FloquetError, RuntimeError):
    """A root bracket does not straddle a sign change.

    Carries the margin values at both endpoints so callers can report
    which side of the boundary the bracket sits on.
    """

    def __init__(self, lo, hi, margin_lo, margin_hi):
        self.lo = lo
        self.hi = hi
        self.margin_lo = margin_lo
        self.margin_hi = margin_hi
        super().__init__(
            f"no sign change on bracket [{lo:g}, {hi:g}]: "
            f"margin({lo:g}) = {margin_lo:.6g}, margin({hi:g}) = {margin_hi:.6g}"
        )
