"""Exception types raised by the package."""


class KernelObstruction(ValueError):
    """The source of an elliptic solve has content in the operator kernel."""


class FrameError(ValueError):
    """Data is not in the center-of-mass frame (or has non-positive energy)."""


class DataFormatError(ValueError):
    """A data document is malformed; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
