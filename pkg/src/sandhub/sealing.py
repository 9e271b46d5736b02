"""Sealed result envelopes: passphrase-locked, tamper-evident blobs.

Wire layout (the byte-level contract every client must reproduce):

    salt(16) || iv(16) || ciphertext

The ciphertext is AES-256-CBC over a PKCS#7-padded plaintext envelope:

    sha256(payload)(32) || name_length(2, big-endian) || file_name(utf-8) || payload

The key is PBKDF2-HMAC-SHA256(passphrase, salt, 100 000 iterations, 32 bytes).
The checksum and file name travel inside the ciphertext, so whoever stores
the blob learns neither. Every post-decryption failure (bad padding, garbled
envelope, checksum mismatch, wrong passphrase) surfaces as the same
IntegrityFailure; callers and attackers get no distinguishing detail.
"""

from __future__ import annotations

import hashlib
import hmac
import os
from base64 import b64decode, b64encode
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

from cryptography.hazmat.primitives import padding
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

SALT_SIZE = 16
IV_SIZE = 16
KEY_SIZE = 32
BLOCK_SIZE = 16
CHECKSUM_SIZE = 32
NAME_LENGTH_SIZE = 2
MAX_NAME_BYTES = 0xFFFF
KDF_ITERATIONS = 100_000

_ENVELOPE_MIN = CHECKSUM_SIZE + NAME_LENGTH_SIZE
_PATH_SEPARATORS = ("/", "\\")


class SealingError(Exception):
    """Base class for sealing/unsealing failures."""


class EmptyPassphrase(SealingError):
    """Passphrase must be a non-empty string."""


class FileNameTooLong(SealingError):
    """File name exceeds 65 535 UTF-8 bytes."""


class FileNameHasSeparators(SealingError):
    """File name may not contain path separators."""


class MalformedBlob(SealingError):
    """Blob bytes fail the structural layout checks (raised before any crypto)."""


class IntegrityFailure(SealingError):
    """Uniform failure: wrong passphrase, tampering, or a garbled envelope."""


@dataclass(frozen=True)
class SealedBlob:
    """A sealed envelope split into its three wire segments."""

    salt: bytes
    iv: bytes
    ciphertext: bytes

    def __post_init__(self) -> None:
        if len(self.salt) != SALT_SIZE or len(self.iv) != IV_SIZE:
            raise MalformedBlob("salt and IV must be 16 bytes each")
        if not self.ciphertext or len(self.ciphertext) % BLOCK_SIZE != 0:
            raise MalformedBlob("ciphertext must be a positive multiple of 16 bytes")

    @classmethod
    def from_bytes(cls, raw: bytes) -> "SealedBlob":
        if len(raw) < SALT_SIZE + IV_SIZE + BLOCK_SIZE:
            raise MalformedBlob("blob shorter than salt + IV + one cipher block")
        return cls(
            salt=bytes(raw[:SALT_SIZE]),
            iv=bytes(raw[SALT_SIZE : SALT_SIZE + IV_SIZE]),
            ciphertext=bytes(raw[SALT_SIZE + IV_SIZE :]),
        )

    def to_bytes(self) -> bytes:
        return self.salt + self.iv + self.ciphertext

    @classmethod
    def from_base64(cls, text: str) -> "SealedBlob":
        try:
            raw = b64decode(text, validate=True)
        except (ValueError, TypeError) as exc:
            raise MalformedBlob(f"invalid base64: {exc}") from None
        return cls.from_bytes(raw)

    def to_base64(self) -> str:
        return b64encode(self.to_bytes()).decode("ascii")


def checksum(payload: bytes) -> bytes:
    """SHA-256 digest of the payload."""
    return hashlib.sha256(payload).digest()


@lru_cache(maxsize=256)
def _pbkdf2(passphrase: str, salt: bytes) -> bytes:
    return hashlib.pbkdf2_hmac(
        "sha256", passphrase.encode("utf-8"), salt, KDF_ITERATIONS, dklen=KEY_SIZE
    )


def derive_key(passphrase: str, salt: bytes) -> bytes:
    """Derive the 32-byte AES key for (passphrase, salt).

    Deterministic; results are memoised in a bounded in-process cache, which
    never touches disk or any log.
    """
    if not passphrase:
        raise EmptyPassphrase("passphrase must not be empty")
    if len(salt) != SALT_SIZE:
        raise ValueError(f"salt must be exactly {SALT_SIZE} bytes, got {len(salt)}")
    return _pbkdf2(passphrase, bytes(salt))


def _check_file_name(file_name: str) -> bytes:
    if any(sep in file_name for sep in _PATH_SEPARATORS):
        raise FileNameHasSeparators(f"file name contains a path separator: {file_name!r}")
    encoded = file_name.encode("utf-8")
    if len(encoded) > MAX_NAME_BYTES:
        raise FileNameTooLong(f"file name is {len(encoded)} bytes; limit is {MAX_NAME_BYTES}")
    return encoded


def seal(
    payload: bytes,
    file_name: str,
    passphrase: str,
    random_bytes: Callable[[int], bytes] = os.urandom,
) -> SealedBlob:
    """Seal payload + file name under a passphrase with a fresh salt and IV."""
    if not passphrase:
        raise EmptyPassphrase("passphrase must not be empty")
    name = _check_file_name(file_name)

    salt = random_bytes(SALT_SIZE)
    iv = random_bytes(IV_SIZE)
    key = derive_key(passphrase, salt)

    envelope = (
        checksum(payload) + len(name).to_bytes(NAME_LENGTH_SIZE, "big") + name + payload
    )
    padder = padding.PKCS7(BLOCK_SIZE * 8).padder()
    padded = padder.update(envelope) + padder.finalize()
    encryptor = Cipher(algorithms.AES(key), modes.CBC(iv)).encryptor()
    return SealedBlob(salt=salt, iv=iv, ciphertext=encryptor.update(padded) + encryptor.finalize())


def unseal(blob: SealedBlob | bytes, passphrase: str) -> tuple[bytes, str]:
    """Open a sealed blob, returning (payload, file_name).

    Structural defects raise MalformedBlob before any cryptography runs; every
    failure after that point raises the single uniform IntegrityFailure.
    """
    if isinstance(blob, (bytes, bytearray, memoryview)):
        blob = SealedBlob.from_bytes(bytes(blob))
    key = derive_key(passphrase, blob.salt)

    decryptor = Cipher(algorithms.AES(key), modes.CBC(blob.iv)).decryptor()
    padded = decryptor.update(blob.ciphertext) + decryptor.finalize()
    try:
        unpadder = padding.PKCS7(BLOCK_SIZE * 8).unpadder()
        envelope = unpadder.update(padded) + unpadder.finalize()
    except ValueError:
        raise IntegrityFailure("sealed data could not be opened") from None

    if len(envelope) < _ENVELOPE_MIN:
        raise IntegrityFailure("sealed data could not be opened")
    stored = envelope[:CHECKSUM_SIZE]
    name_length = int.from_bytes(envelope[CHECKSUM_SIZE:_ENVELOPE_MIN], "big")
    if len(envelope) < _ENVELOPE_MIN + name_length:
        raise IntegrityFailure("sealed data could not be opened")
    name_bytes = envelope[_ENVELOPE_MIN : _ENVELOPE_MIN + name_length]
    payload = envelope[_ENVELOPE_MIN + name_length :]

    try:
        file_name = name_bytes.decode("utf-8")
    except UnicodeDecodeError:
        raise IntegrityFailure("sealed data could not be opened") from None
    if any(sep in file_name for sep in _PATH_SEPARATORS):
        raise IntegrityFailure("sealed data could not be opened")
    if not hmac.compare_digest(stored, checksum(payload)):
        raise IntegrityFailure("sealed data could not be opened")
    return payload, file_name
