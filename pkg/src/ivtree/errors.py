"""Exception hierarchy shared by every module of the package."""


class IVTreeError(Exception):
    """Base class for all package errors."""


class UnsupportedOrder(IVTreeError, ValueError):
    pass


class DepthTooLarge(IVTreeError, ValueError):
    pass


class LeafVertex(IVTreeError, ValueError):
    pass


class NoGrandchildren(IVTreeError, ValueError):
    pass


class DimensionMismatch(IVTreeError, ValueError):
    pass


class MissingField(IVTreeError, KeyError):
    pass


class DomainError(IVTreeError, ValueError):
    pass


class NoConvergence(IVTreeError, ArithmeticError):
    pass


class ConfigError(IVTreeError, ValueError):
    """Invalid sweep/CLI configuration. ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
