"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: DataError -> 2, BridgeError -> 3.
"""


class HumrankError(Exception):
    """Base class for all toolkit errors."""


class DataError(HumrankError):
    """Invalid or inconsistent input data (files, ids, shapes, formats)."""


class BridgeError(HumrankError):
    """An external child process (encoder bridge or scorer) misbehaved."""
