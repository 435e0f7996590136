"""Baptista-type chaotic cryptosystems."""

from baptista.chaos import MapKind, MapSpec, OrbitState, PerturbConfig, iterate, lyapunov_pwlcm, orbit
from baptista.ciphers import (
    CipherUnit,
    Variant,
    decipher,
    decrypt_masked,
    decrypt_original,
    decrypt_rectified,
    encipher,
    encrypt_masked,
    encrypt_original,
    encrypt_rectified,
    f_be,
)
from baptista.encoding import Scheme, TokenStreamHeader, read_ciphertext, write_ciphertext
from baptista.errors import (
    BaptistaError,
    CorruptCiphertextError,
    CounterOverflowError,
    DegenerateOrbitError,
    DesyncError,
    DomainError,
    FramingError,
    InsufficientDataError,
    KeyFileError,
    SearchLimitError,
)
from baptista.keys import KeyMaterial, generate_key, parse_key, read_key_file, write_key_file
from baptista.partition import BETA, Partition

__all__ = [
    "BETA",
    "BaptistaError",
    "CipherUnit",
    "CorruptCiphertextError",
    "CounterOverflowError",
    "DegenerateOrbitError",
    "DesyncError",
    "DomainError",
    "FramingError",
    "InsufficientDataError",
    "KeyFileError",
    "KeyMaterial",
    "MapKind",
    "MapSpec",
    "OrbitState",
    "Partition",
    "PerturbConfig",
    "Scheme",
    "SearchLimitError",
    "TokenStreamHeader",
    "Variant",
    "decipher",
    "decrypt_masked",
    "decrypt_original",
    "decrypt_rectified",
    "encipher",
    "encrypt_masked",
    "encrypt_original",
    "encrypt_rectified",
    "f_be",
    "generate_key",
    "iterate",
    "lyapunov_pwlcm",
    "orbit",
    "parse_key",
    "read_ciphertext",
    "read_key_file",
    "write_ciphertext",
    "write_key_file",
]
