"""Exceptions and result sentinels shared across the package."""


class WreathLabError(Exception):
    pass


class MixedOwners(WreathLabError):
    pass


class CapExceeded(WreathLabError):
    pass


class NonAbelianBase(WreathLabError):
    pass


class UnsupportedDescriptor(WreathLabError):
    pass


class UnsupportedActingGroup(WreathLabError):
    pass


class NotFinite(WreathLabError):
    pass


class ArgumentsConjugate(WreathLabError):
    pass


class ArgumentInSubgroup(WreathLabError):
    pass


class PreconditionViolated(WreathLabError):
    pass


class ParseError(WreathLabError, ValueError):
    pass


class _Sentinel:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name

    def __reduce__(self):
        # keep identity across pickling (worker pools)
        return (_sentinel, (self.name,))


def _sentinel(name):
    return {"Unreached": UNREACHED, "Overflow": OVERFLOW}[name]


UNREACHED = _Sentinel("Unreached")
"""Returned when a minimal-index search exhausts its budget without success."""

OVERFLOW = _Sentinel("Overflow")
"""Returned by bound evaluation when the result would exceed the digit cap."""
