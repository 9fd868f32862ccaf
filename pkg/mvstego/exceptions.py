"""
Exception hierarchy shared by every app.

InputError subclasses describe unreadable or invalid input and map to
exit status 2 on the command line; DomainError subclasses describe
steganographic outcomes (nothing hidden, too little room, bad key) and
map to exit status 1.
"""


class MvStegoError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class InputError(MvStegoError):
    exit_code = 2


class DomainError(MvStegoError):
    exit_code = 1


class ParseError(InputError):
    pass


class TruncatedInput(InputError):
    pass


class Unsupported(InputError):
    pass


class EmptyInput(InputError):
    pass


class NotAStegoContainer(InputError):
    pass


class CorruptContainer(InputError):
    pass


class InvalidDims(InputError):
    pass


class InvalidKey(InputError):
    pass


class InvalidParams(InputError):
    pass


class HookRangeError(MvStegoError):
    """An embedding hook returned a motion vector outside the coded range."""


class InsufficientCapacity(DomainError):
    def __init__(self, placed, required, message=None):
        self.placed = placed
        self.required = required
        super().__init__(
            message or f"insufficient capacity: placed {placed} of {required} payload bits"
        )


class NoPayloadFound(DomainError):
    pass


class CorruptPayload(DomainError):
    pass


class KeyRequired(DomainError):
    pass


class InvalidComparison(DomainError):
    pass
