class UsageError(Exception):
    """
    The command line asked for something that cannot be run. The CLI reports the message and exits with status 2.
    """


class InvalidRunSpecError(UsageError):
    """
    A run or sweep was requested with parameters outside the supported envelope (e.g., n not a power of two).
    """


class OutputWriteError(Exception):
    """
    A result file could not be written. The CLI exits with status 1.
    """
