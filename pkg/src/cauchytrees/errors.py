"""Exception hierarchy shared by the library and the CLI."""


class CauchyTreesError(Exception):
    pass


class InvalidInput(CauchyTreesError, ValueError):
    """An argument violates a documented precondition."""


class NotCatalanError(InvalidInput):
    pass


class PairingError(InvalidInput):
    """Pairing is malformed, incompatible with the signs, or crossing."""


class NotInDomain(InvalidInput):
    """Input is well formed but outside the set a bijection is defined on."""


class BoundExceeded(CauchyTreesError):
    pass


class CorruptedState(CauchyTreesError, RuntimeError):
    """An internal invariant broke; cannot happen on valid runs."""
