"""Exception types raised by the simulator."""


class DnpError(Exception):
    """Base class for all simulator errors."""


class InvariantError(DnpError, ValueError):
    """A parameter violates one of its documented invariants.

    ``key`` names the offending field so that config loading can point at
    the line that set it.
    """

    def __init__(self, key, message):
        super().__init__(message)
        self.key = key


class NoEscapeChannelError(DnpError, ValueError):
    def __init__(self):
        super().__init__("no escape channel")


class PolarizationRangeError(DnpError, ValueError):
    def __init__(self, B_N, B_sat):
        super().__init__(
            f"polarization out of range: |B_N| = {abs(B_N):.6g} T > B_sat = {B_sat:.6g} T"
        )
        self.B_N = B_N


class MarginalFixedPointError(DnpError, ArithmeticError):
    def __init__(self, root, slope):
        super().__init__(f"marginal fixed point at B_N = {root:.9g} T (slope {slope:.3g} /s)")
        self.root = root
        self.slope = slope


class IntegrationDivergedError(DnpError, ArithmeticError):
    def __init__(self, last_state, time):
        super().__init__(
            f"integration diverged after t = {time:.6g} s; last finite state B_N = {last_state:.9g} T"
        )
        self.last_state = last_state
        self.time = time


class RelaxationError(DnpError, ArithmeticError):
    """Relaxation failed to reach a fixed point; ``trajectory`` holds the partial run."""

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class SweepError(DnpError):
    """A sweep point failed; ``axis_value`` locates it."""

    def __init__(self, axis_value, cause):
        super().__init__(f"sweep failed at axis value {axis_value:.9g}: {cause}")
        self.axis_value = axis_value
        self.cause = cause


class ConfigError(DnpError, ValueError):
    def __init__(self, message, line=None):
        text = message if line is None else f"line {line}: {message}"
        super().__init__(text)
        self.line = line
        self.reason = message
