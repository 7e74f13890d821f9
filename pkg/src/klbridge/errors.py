"""Exception types shared across the package."""


class KLBridgeError(Exception):
    """Base class for all package errors."""


class DomainError(KLBridgeError, ValueError):
    """An argument lies outside the domain of the operation."""


class SizeError(KLBridgeError, ValueError):
    pass


class DegenerateKernelError(KLBridgeError, ValueError):
    """K(1,1) vanishes, so the bridge / rank-one normalization is undefined."""


class PoleError(KLBridgeError, ValueError):
    """A secular function was evaluated on (or too close to) one of its poles."""


class BracketError(KLBridgeError, RuntimeError):
    """The secular function does not change sign on the interlacing interval."""


class ConvergenceError(KLBridgeError, RuntimeError):
    pass


class TruncationWarning(UserWarning):
    pass
