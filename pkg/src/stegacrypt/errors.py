"""Exception hierarchy.

Every concrete error belongs to exactly one category, and each category maps
to one CLI exit code (see ``stegacrypt.cli.EXIT_CODES``).
"""

from __future__ import annotations


class StegaCryptError(Exception):
    """Base class for all errors raised by this package."""


# -- usage -----------------------------------------------------------------


class UsageError(StegaCryptError):
    pass


class WrongKeyLength(UsageError, ValueError):
    pass


class EmptyPassphrase(UsageError, ValueError):
    pass


class ShapeMismatch(UsageError, ValueError):
    pass


# -- capacity --------------------------------------------------------------


class CapacityError(StegaCryptError):
    pass


class PayloadTooLarge(CapacityError):
    def __init__(self, required: int, available: int, what: str = "payload"):
        self.required = required
        self.available = available
        super().__init__(
            f"{what} needs {required} octets but the cover holds at most {available}"
        )


class PlaintextTooLarge(CapacityError):
    pass


# -- integrity (corrupted, absent or foreign data) -------------------------


class IntegrityError(StegaCryptError):
    pass


class NoFrameFound(IntegrityError):
    pass


class TruncatedFrame(IntegrityError):
    pass


class UnsupportedFrameVersion(IntegrityError):
    pass


class EnvelopeFormatError(IntegrityError):
    pass


class BadMagic(EnvelopeFormatError):
    pass


class BadVersion(EnvelopeFormatError):
    pass


class TruncatedEnvelope(EnvelopeFormatError):
    pass


class CrcMismatch(IntegrityError):
    pass


class BadCiphertextLength(IntegrityError, ValueError):
    pass


# -- authentication (wrong secret) -----------------------------------------


class AuthenticationError(StegaCryptError):
    pass


class BadPadding(AuthenticationError):
    pass


class SecretModeMismatch(AuthenticationError):
    pass


# -- I/O and image format --------------------------------------------------


class ImageFormatError(StegaCryptError):
    pass
