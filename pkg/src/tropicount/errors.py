"""Exception types shared across the package."""


class TropicountError(Exception):
    pass


class ParseError(TropicountError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class BudgetExceeded(TropicountError):
    """A configured enumeration budget would be exceeded."""


class PrecisionError(TropicountError, ArithmeticError):
    """A truncated computation lost all significant digits."""


class CharacteristicError(TropicountError, ValueError):
    """The residue characteristic violates a coprimality hypothesis."""


class HenselError(TropicountError):
    """Preconditions for lifting a residue zero are not met, or lifting failed."""
