"""Exception hierarchy shared by every module."""


class ShtukaError(Exception):
    """Base class for all library errors."""


class PrecisionExhausted(ShtukaError):
    """An operation cannot certify any digit of its result."""


class NotAUnit(ShtukaError):
    pass


class NotDistinguishedDivisor(ShtukaError):
    """Weierstrass division by an element that vanishes modulo pi."""


class DimensionMismatch(ShtukaError):
    pass


class RankDeficient(ShtukaError):
    pass


class NotFree(ShtukaError):
    """A spanned module has no basis (it is not free of the expected rank)."""


class TruncationUnsound(ShtukaError):
    """A result would depend on z-coefficients that were truncated away."""


class IllegalDirection(ShtukaError):
    """Requested base change goes down the ring tower."""


class VerificationFailed(ShtukaError):
    def __init__(self, check, detail=""):
        self.check = check
        super().__init__(f"{check}: {detail}" if detail else check)


class PairInvariantViolated(ShtukaError):
    pass


class PreconditionError(ShtukaError):
    pass


class ParseError(ShtukaError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)
