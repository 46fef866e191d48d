"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 2 for bad input,
3 for an unresolvable sign case under ``--strict``, 4 for numerical failure.
"""


class OVBSenseError(Exception):
    exit_code = 4


class InputError(OVBSenseError, ValueError):
    exit_code = 2


class NumericalError(OVBSenseError, ArithmeticError):
    exit_code = 4


class UnresolvableSignCase(OVBSenseError):
    exit_code = 3


# -- input / contract errors -------------------------------------------------

class UnknownColumn(InputError):
    def __init__(self, name):
        super().__init__(f"unknown column: {name!r}")
        self.name = name


class ParseError(InputError):
    """A cell that could not be read as a finite number.

    ``row`` is 1-based and excludes the header. ``rows`` lists every
    offending row found in the file.
    """

    def __init__(self, row, column, rows=None):
        self.row = row
        self.column = column
        self.rows = list(rows) if rows is not None else [row]
        shown = ", ".join(str(r) for r in self.rows[:20])
        more = "" if len(self.rows) <= 20 else f" (+{len(self.rows) - 20} more)"
        super().__init__(
            f"unparseable or missing value at row {row}, column {column!r}; "
            f"offending rows: {shown}{more}"
        )


class EmptyDataset(InputError):
    pass


class IoError(InputError):
    pass


class InvalidConfounder(InputError):
    pass


class InvalidQ(InputError):
    pass


class InvalidAlpha(InputError):
    pass


class InvalidCorrelation(InputError):
    pass


class InvalidInput(InputError):
    pass


class InvalidGrid(InputError):
    pass


class MultipleBenchmarkCovariatesUnsupported(InputError):
    pass


# -- numerical failures ------------------------------------------------------

class RankDeficient(NumericalError):
    pass


class InsufficientRows(NumericalError):
    pass


class DegenerateConditioning(NumericalError):
    pass


class ZeroVarianceResidual(NumericalError):
    pass


class DenominatorDegenerate(NumericalError):
    pass


class Saturated(NumericalError):
    pass


class DegenerateDf(NumericalError):
    pass


class ZeroTreatmentAssociation(NumericalError):
    pass


class ZeroBenchmarkAssociation(NumericalError):
    pass


class SaturatedModel(NumericalError):
    pass


class SaturatedBenchmark(NumericalError):
    pass


class BracketFailure(NumericalError):
    pass


class RegimeUnreachable(NumericalError):
    pass
