"""Exception types shared across the package."""


class PinchError(RuntimeError):
    """The profile radius dropped to (or below) the pinch tolerance.

    The flow equation degenerates as the radius approaches the rotation
    axis, so a step that produces a near-zero radius is reported as a
    pinch event instead of continuing with garbage numbers.
    """

    def __init__(self, message, z=None, time=None):
        super().__init__(message)
        self.z = z
        self.time = time


class SingularSystemError(RuntimeError):
    """The stepping system could not be solved to the required residual."""
