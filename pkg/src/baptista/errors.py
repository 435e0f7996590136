"""Exception types raised by the cipher, codec and analysis layers."""


class BaptistaError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BaptistaError, ValueError):
    """A chaotic state left the map's defining interval."""


class SearchLimitError(BaptistaError):
    """Encryption could not find a matching state within the search cap."""


class DesyncError(BaptistaError):
    """Masked decryption exhausted its scan cap without any token match."""


class CorruptCiphertextError(BaptistaError):
    """Ciphertext cannot be the output of the matching encryption."""


class CounterOverflowError(BaptistaError):
    """An occurrence counter exceeded its 16-bit storage."""


class FramingError(BaptistaError):
    """A token stream is malformed (truncated escape, bad header, ...)."""


class KeyFileError(BaptistaError, ValueError):
    """A key file is unreadable or contains invalid entries."""


class InsufficientDataError(BaptistaError, ValueError):
    """A statistical test was given too few samples."""


class DegenerateOrbitError(BaptistaError, ValueError):
    """An orbit has zero variance, so normalized statistics are undefined."""
