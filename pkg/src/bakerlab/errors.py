"""Exception types raised by baker-lab.

Every error carries the short diagnostic string used by the CLI, so
``str(exc)`` is safe to print as-is.
"""


class BakerLabError(Exception):
    """Base class for all library errors."""


class NumericOverflow(BakerLabError, ArithmeticError):
    def __init__(self, msg="numeric overflow"):
        super().__init__(msg)


class AnchorDivisionError(BakerLabError, ZeroDivisionError):
    def __init__(self, msg="division by zero at anchor"):
        super().__init__(msg)


class AnchorNotFixed(BakerLabError, ValueError):
    def __init__(self, msg="anchor not fixed"):
        super().__init__(msg)


class OutsideDisc(BakerLabError, ValueError):
    def __init__(self, msg="outside unit disc"):
        super().__init__(msg)


class InvalidBoundaryDistance(BakerLabError, ValueError):
    def __init__(self, msg="invalid boundary distance"):
        super().__init__(msg)


class QueryOutsideDomain(BakerLabError):
    def __init__(self, msg="query outside domain"):
        super().__init__(msg)


class OracleInconclusive(BakerLabError):
    def __init__(self, msg="oracle inconclusive"):
        super().__init__(msg)


class SegmentExitsDomain(BakerLabError):
    def __init__(self, msg="segment exits domain"):
        super().__init__(msg)


class NoFixedPoint(BakerLabError):
    def __init__(self, msg="no fixed point found near guess"):
        super().__init__(msg)


class DegenerateNewtonStep(BakerLabError):
    def __init__(self, msg="degenerate Newton step"):
        super().__init__(msg)


class NotACycle(BakerLabError, ValueError):
    def __init__(self, msg="not a cycle"):
        super().__init__(msg)


class NotLinearizable(BakerLabError):
    def __init__(self, msg="point not in linearizable basin"):
        super().__init__(msg)


class CurveTracingStalled(BakerLabError):
    """Newton failed while tracing an invariant curve.

    ``partial`` holds the points traced before the failure.
    """

    def __init__(self, partial, msg="curve tracing stalled"):
        super().__init__(msg)
        self.partial = partial


class NoSecondaryFixedPoint(BakerLabError):
    def __init__(self, msg="no secondary fixed point located"):
        super().__init__(msg)


class BranchLost(BakerLabError):
    """Continuation lost its branch; ``trace`` is the partial path."""

    def __init__(self, trace, msg="branch lost"):
        super().__init__(msg)
        self.trace = trace


class FoldSuspected(BakerLabError):
    def __init__(self, trace, msg="fold suspected"):
        super().__init__(msg)
        self.trace = trace


class UndefinedStatistic(BakerLabError, ValueError):
    def __init__(self, msg="statistic undefined at 1"):
        super().__init__(msg)


class IdentityCheckInfeasible(BakerLabError):
    def __init__(self, msg="identity check infeasible at this parameter"):
        super().__init__(msg)
