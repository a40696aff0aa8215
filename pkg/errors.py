class CantorError(Exception):
    """Base error: a human readable detail plus the process exit code the CLI should use"""

    exit_code = 1

    def __init__(self, detail: str, exit_code: int = None):
        super().__init__(detail)
        self.detail = detail
        if exit_code is not None:
            self.exit_code = exit_code


class ValidationFailure(CantorError):
    """Bad system spec, bad literal, or a violated precondition"""

    exit_code = 2


class BudgetExceeded(CantorError):
    """A configured cap (atoms, scan length, search length) would be exceeded"""

    exit_code = 3
