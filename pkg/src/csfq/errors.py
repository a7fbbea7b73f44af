"""Exception hierarchy shared by the toolkit and mapped onto CLI exit codes."""


class CsfqError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InputError(CsfqError, ValueError):
    """Invalid or inconsistent user input (exit code 2)."""

    exit_code = 2


class ConfigError(InputError):
    """Malformed configuration file; carries the offending line when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}:"
            if line is not None:
                loc += f"{line}:"
            loc += " "
        super().__init__(loc + message)


class FitError(CsfqError):
    """A fit could not produce usable parameters (exit code 3)."""

    exit_code = 3

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class ConvergenceError(FitError):
    """Non-convergence, degenerate data, or unphysical fitted parameters."""


class SolverError(CsfqError):
    """Numerical solver failure such as eigen-solver breakdown (exit code 4)."""

    exit_code = 4
