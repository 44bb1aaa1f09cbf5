"""Exception hierarchy shared by all hpxf modules."""


class HpxfError(Exception):
    """Base class for every error raised by hpxf."""


class ParseError(HpxfError):
    def __init__(self, message, line=None, col=None):
        self.message = message
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class SchemaError(ParseError):
    """Grounding failure: unknown sort, empty sort, unused or shadowed variable."""


class IterationBudgetExceeded(HpxfError):
    pass


class UnknownAction(HpxfError):
    pass


class InconsistencyDetected(HpxfError):
    """Raised when an inference mechanism would produce an invalid knowledge history.

    ``added`` is the offending new triple, ``conflict`` the triple it clashes
    with, ``mechanism`` the name of the inference mechanism that produced it.
    """

    def __init__(self, added, conflict, mechanism):
        self.added = added
        self.conflict = conflict
        self.mechanism = mechanism
        super().__init__(
            f"{mechanism} derived {_fmt(added)} which contradicts {_fmt(conflict)}"
        )


class MultipleSensingActions(HpxfError):
    pass


class AllOutcomesExcluded(HpxfError):
    pass


class ConcurrentSimilarEPs(HpxfError):
    pass


class BranchCapExceeded(HpxfError):
    pass


class NoPlan(HpxfError):
    """No conditional plan exists within the configured horizon and branch cap."""


class OracleScaleError(HpxfError):
    pass


def _fmt(triple):
    try:
        f, v, t, pos = triple
    except (TypeError, ValueError):
        return repr(triple)
    return f"<{f},{v if pos else '!' + v},{t}>"


class PlanError(ParseError):
    """Malformed plan text or a plan that does not fit the domain."""
