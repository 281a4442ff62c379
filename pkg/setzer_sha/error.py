import typing


class SetzerShaError(Exception):
    """
    Error raised while evaluating a curve or reading scan data
    """

    def __init__(self, message: str, u: typing.Optional[int] = None):
        super().__init__(f"u={u}: {message}" if u is not None else message)
        self.u = u


class BadResidueError(SetzerShaError):
    pass


class RejectedCurveError(SetzerShaError):
    pass


class WrongSignError(SetzerShaError):
    pass


class NoConvergenceError(SetzerShaError):
    pass


class PrecisionError(SetzerShaError):
    pass


class CorruptCheckpointError(SetzerShaError):
    pass


class EmptyInputError(SetzerShaError):
    pass


class MalformedRecordError(SetzerShaError):
    """
    Scan file line that does not parse
    """

    def __init__(self, message: str, line_number: int):
        super().__init__(f"Line {line_number}: {message}")
        self.line_number = line_number
