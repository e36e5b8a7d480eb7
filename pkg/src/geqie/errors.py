"""Exception hierarchy shared by all geqie modules."""


class GeqieError(Exception):
    """Base class for every error raised by this package."""


class DomainError(GeqieError, ValueError):
    """An argument is outside its documented domain (bad value, bad shape)."""


class FormatError(GeqieError, ValueError):
    """A file or serialized payload could not be parsed."""


class ModelError(GeqieError):
    """An encoding model violates its own contract (e.g. non-injective
    position map, value map that does not normalize)."""


class CapacityError(GeqieError):
    """A requested simulation exceeds the configured qubit budget."""

    def __init__(self, required, allowed, what="qubits"):
        self.required = int(required)
        self.allowed = int(allowed)
        self.what = what
        super().__init__(
            f"requires {self.required} {what} but only {self.allowed} are allowed"
        )
