"""Exception types raised by cat0kit."""


class Cat0Error(ValueError):
    """Base class for every error raised by this package."""


class ModelMismatchError(Cat0Error):
    """A point, set or pair was used with a space of a different model."""


class InvalidPointError(Cat0Error):
    """Point coordinates violate the invariants of their model."""


class InvalidSpaceError(Cat0Error):
    """A space configuration is malformed (unknown model, cyclic tree, ...)."""


class InvalidSetError(Cat0Error):
    """A convex set description is malformed or incompatible with its space."""


class GeodesicError(Cat0Error):
    """Geodesic combination is undefined (lambda out of range, antipodal pair)."""


class UnsupportedModelError(Cat0Error):
    """The operation requires a CAT(0) model (e.g. projection on the sphere)."""


class PreconditionError(Cat0Error):
    """Certificate inputs violate a precondition; this is never a verdict."""


class SamplingError(Cat0Error):
    """Rejection sampling could not produce enough points."""


class SceneError(Cat0Error):
    """A scene document is invalid; ``path`` locates the offending field."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)
